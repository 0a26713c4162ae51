use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use bergtube_core::Error;

pub const CSV_HEADER: &str = "kind,m,tau,rho,x,y,log_value,value,err_estimate,evaluations,status";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: String,
    pub m: u32,
    pub tau: f64,
    pub rho: f64,
    pub x: f64,
    pub y: f64,
    pub log_value: f64,
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
    pub status: String,
}

impl Row {
    pub fn failed(kind: String, m: u32, tau: f64, rho: f64, x: f64, y: f64, e: &Error) -> Self {
        Row {
            kind,
            m,
            tau,
            rho,
            x,
            y,
            log_value: f64::NAN,
            value: f64::NAN,
            err_estimate: f64::NAN,
            evaluations: 0,
            status: status_of(e),
        }
    }
}

/// `error:<variant>` without commas or newlines, so rows stay one field wide.
pub fn status_of(e: &Error) -> String {
    let tag = match e {
        Error::InvalidDefiningFunction(_) => "invalid-defining-function",
        Error::OutsideDomain { .. } => "outside-domain",
        Error::OutsideCone { .. } => "outside-cone",
        Error::TailSlopeUnstable(_) => "tail-slope-unstable",
        Error::MollifyInfeasible(_) => "mollify-infeasible",
        Error::NonConvergence { .. } => "non-convergence",
        Error::NoDecay => "no-decay",
        Error::Root(_) => "root",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::Construction(_) => "construction",
        Error::Degenerate(_) => "degenerate",
    };
    format!("error:{tag}")
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.kind, r.m, r.tau, r.rho, r.x, r.y, r.log_value, r.value, r.err_estimate, r.evaluations, r.status
        );
    }
    out
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    std::fs::write(path, render_csv(rows)).with_context(|| format!("writing {}", path.display()))
}

/// A matplotlib script drawing `log_value` against `ln rho`, one series per kind.
pub fn plot_script(csv: &Path, title: &str) -> String {
    format!(
        r#"import csv
import math
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv:?}
series = {{}}
with open(path) as fh:
    for row in csv.DictReader(fh):
        if row["status"] != "ok" or float(row["rho"]) <= 0:
            continue
        series.setdefault(row["kind"], []).append((math.log(float(row["rho"])), float(row["log_value"])))

fig, ax = plt.subplots()
for kind, pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=kind)
ax.set_xlabel("ln rho")
ax.set_ylabel("ln |value|")
ax.set_title({title:?})
ax.legend()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"#,
        csv = csv.display().to_string(),
    )
}

pub fn write_plot(path: &Path, csv: &Path, title: &str) -> Result<()> {
    std::fs::write(path, plot_script(csv, title)).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let rows = vec![
            Row {
                kind: "bergman".into(),
                m: 2,
                tau: 1.0,
                rho: 0.5,
                x: 0.0,
                y: 0.5,
                log_value: -1.25,
                value: 0.2865047968601901,
                err_estimate: 1e-9,
                evaluations: 100,
                status: "ok".into(),
            },
            Row::failed("szego".into(), 2, 1.0, 0.25, 0.0, 0.25, &Error::NoDecay),
        ];
        let text = render_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kind,m,tau,rho,x,y,log_value,value,err_estimate,evaluations,status");
        assert_eq!(lines[1], "bergman,2,1,0.5,0,0.5,-1.25,0.2865047968601901,0.000000001,100,ok");
        assert!(lines[2].ends_with(",0,error:no-decay"));
        assert!(lines.iter().all(|l| l.split(',').count() == 11));
    }
}
