//! Domain specifications: `name:key=value,...`.
//!
//! | spec | profile |
//! |------|---------|
//! | `model:m=2,g0=1` | `g0 x^{2m}` |
//! | `rational:m=2,g0=1` | `g0 x^{2m} / (1 + x^2)` |
//! | `blended-linear:m=2,slope=1` | `x^{2m}` near 0, linear tails of the given slope |
//! | `table:path=g.txt,m=2` | `x^{2m} g(x)`, `g` interpolated from samples |
//!
//! Any spec also accepts `mollify=δ` (strictly pseudoconvex away from 0) and
//! `class=weak` (drop the `x g'(x) <= 0` requirement). A table file holds one
//! `x g(x) g'(x)` row per line, separated by whitespace or commas, with
//! strictly increasing `x`; `#` starts a comment. Outside the table `g` is
//! held at its end values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use bergtube_core::domain::{blended_linear, mollify, DefiningFunction, HermiteTable, TailSlope};

#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    Model { g0: f64 },
    Rational { g0: f64 },
    BlendedLinear { slope: f64 },
    Table { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub builtin: Builtin,
    pub m: u32,
    pub mollify: Option<f64>,
    pub weak_class: bool,
}

impl std::str::FromStr for DomainSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("expected key=value in domain spec, got {item:?}"))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                bail!("duplicate key {k:?} in domain spec");
            }
        }
        let mut take = |k: &str| kv.remove(k);
        let num = |k: &str, v: Option<String>| -> Result<Option<f64>> {
            v.map(|v| v.parse::<f64>().with_context(|| format!("{k}={v} is not a number"))).transpose()
        };
        let m: u32 = match take("m") {
            Some(v) => v.parse().with_context(|| format!("m={v} is not a non-negative integer"))?,
            None => bail!("domain spec {s:?} needs m=<flatness index>"),
        };
        let builtin = match name {
            "model" => Builtin::Model { g0: num("g0", take("g0"))?.unwrap_or(1.0) },
            "rational" => Builtin::Rational { g0: num("g0", take("g0"))?.unwrap_or(1.0) },
            "blended-linear" => Builtin::BlendedLinear { slope: num("slope", take("slope"))?.unwrap_or(1.0) },
            "table" => Builtin::Table {
                path: take("path").map(PathBuf::from).ok_or_else(|| anyhow!("table spec needs path=<file>"))?,
            },
            other => bail!("unknown domain {other:?} (model, rational, blended-linear, table)"),
        };
        let mollify = num("mollify", take("mollify"))?;
        let weak_class = match take("class").as_deref() {
            None | Some("full") => false,
            Some("weak") => true,
            Some(other) => bail!("class={other} (expected full or weak)"),
        };
        if let Some(k) = kv.keys().next() {
            bail!("unknown key {k:?} for domain {name:?}");
        }
        Ok(DomainSpec { builtin, m, mollify, weak_class })
    }
}

impl std::fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.builtin {
            Builtin::Model { g0 } => write!(f, "model:m={},g0={g0}", self.m)?,
            Builtin::Rational { g0 } => write!(f, "rational:m={},g0={g0}", self.m)?,
            Builtin::BlendedLinear { slope } => write!(f, "blended-linear:m={},slope={slope}", self.m)?,
            Builtin::Table { path } => write!(f, "table:path={},m={}", path.display(), self.m)?,
        }
        if let Some(d) = self.mollify {
            write!(f, ",mollify={d}")?;
        }
        if self.weak_class {
            write!(f, ",class=weak")?;
        }
        Ok(())
    }
}

pub fn read_table(path: &Path) -> Result<HermiteTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading table {}", path.display()))?;
    let (mut xs, mut gs, mut ds) = (Vec::new(), Vec::new(), Vec::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        if cols.len() != 3 {
            bail!("{}:{}: expected 3 columns (x g g'), got {}", path.display(), lineno + 1, cols.len());
        }
        let parse = |t: &str| t.parse::<f64>().with_context(|| format!("{}:{}: bad number {t:?}", path.display(), lineno + 1));
        xs.push(parse(cols[0])?);
        gs.push(parse(cols[1])?);
        ds.push(parse(cols[2])?);
    }
    Ok(HermiteTable::new(xs, gs, ds)?)
}

impl DomainSpec {
    pub fn build(&self) -> Result<DefiningFunction> {
        let base = match &self.builtin {
            Builtin::Model { g0 } => DefiningFunction::model(self.m, *g0)?,
            Builtin::Rational { g0 } => DefiningFunction::rational(self.m, *g0)?,
            Builtin::BlendedLinear { slope } => blended_linear(self.m, *slope)?,
            Builtin::Table { path } => {
                let table = read_table(path)?;
                let ends = [table_end(&table, f64::NEG_INFINITY), table_end(&table, f64::INFINITY)];
                if ends.iter().any(|g| *g <= 0.0 || g.is_nan()) {
                    bail!("table end values of g must be positive (got {ends:?})");
                }
                DefiningFunction::builder(self.m, Arc::new(table))
                    .tails(TailSlope::Infinite, TailSlope::Infinite)
                    .full_theorem_class(!self.weak_class)
                    .build()?
            }
        };
        Ok(match self.mollify {
            Some(d) => mollify(&base, d)?,
            None => base,
        })
    }
}

fn table_end(t: &HermiteTable, x: f64) -> f64 {
    use bergtube_core::domain::Smooth;
    t.jet(x)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["model:m=2,g0=1", "rational:m=3,g0=2", "blended-linear:m=2,slope=1", "table:path=g.txt,m=2", "model:m=2,g0=1,mollify=0.05"] {
            let spec: DomainSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let spec: DomainSpec = "model:m=3".parse().unwrap();
        assert_eq!(spec.builtin, Builtin::Model { g0: 1.0 });
    }

    #[test]
    fn bad_specs_are_rejected() {
        for s in ["model", "model:m=two", "sphere:m=2", "model:m=2,color=red", "model:m=2,m=3", "model:m=2,g0"] {
            assert!(s.parse::<DomainSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn table_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        std::fs::write(&p, "# x g g'\n-20 1 0\n0, 1, 0\n20 1 0\n").unwrap();
        let spec: DomainSpec = format!("table:path={},m=2", p.display()).parse().unwrap();
        let f = spec.build().unwrap();
        assert!((f.eval_f(1.5, 0) - 1.5f64.powi(4)).abs() < 1e-12);
        std::fs::write(&p, "0 1\n").unwrap();
        assert!(read_table(&p).is_err());
    }
}
