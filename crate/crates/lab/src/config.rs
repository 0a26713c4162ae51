//! Run configuration: a TOML file with fixed sections, overlaid by flags.
//!
//! ```toml
//! [domain]
//! spec = "model:m=2,g0=1"
//!
//! [kernel]
//! kind = "bergman"
//!
//! [quadrature]
//! rel_tol = 1e-8
//!
//! [point]        # eval
//! x = 0.0
//! y = 1.0
//!
//! [path]         # fit, localize
//! mode = "fixed-tau"
//! tau = 1.0
//! rho0 = 1.0
//! ratio = 0.5
//! points = 15
//! window = 6
//!
//! [experiment]
//! slope_tol = 0.01
//!
//! [output]
//! csv = "out.csv"
//! plot = "out.py"
//!
//! [run]
//! workers = 4
//! ```
//!
//! Unknown sections or keys are errors.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

macro_rules! section {
    ($(#[$meta:meta])* $name:ident { $($field:ident: $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(pub $field: Option<$ty>,)*
        }

        impl $name {
            /// Fields set in `top` replace those in `self`.
            pub fn overlay(&mut self, top: &Self) {
                $(if top.$field.is_some() { self.$field = top.$field.clone(); })*
            }
        }
    };
}

section!(DomainSection { spec: String });
section!(KernelSection { kind: String });
section!(QuadratureSection { rel_tol: f64, abs_tol: f64, max_depth: u32, truncation_drop: f64 });
section!(PointSection { x: f64, y: f64, tau: f64, rho: f64 });
section!(PathSection { mode: String, tau: f64, x: f64, kappa: f64, rho0: f64, ratio: f64, points: usize, window: usize });
section!(ExperimentSection {
    slope_tol: f64,
    c0_tol: f64,
    bounded_slope: f64,
    delta: f64,
    alpha: f64,
    margin: f64,
    taus: usize,
    max_spread: f64,
    x0: f64,
    eps0: f64,
    levels: usize,
    ratio_tol: f64,
});
section!(OutputSection { csv: PathBuf, plot: PathBuf });
section!(RunSection { workers: usize });

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: DomainSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub point: PointSection,
    #[serde(default)]
    pub path: PathSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub run: RunSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn overlay(&mut self, top: &RunConfig) {
        self.domain.overlay(&top.domain);
        self.kernel.overlay(&top.kernel);
        self.quadrature.overlay(&top.quadrature);
        self.point.overlay(&top.point);
        self.path.overlay(&top.path);
        self.experiment.overlay(&top.experiment);
        self.output.overlay(&top.output);
        self.run.overlay(&top.run);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doc_example_parses() {
        let src = include_str!("config.rs");
        let block: String = src
            .lines()
            .skip_while(|l| !l.starts_with("//! ```toml"))
            .skip(1)
            .take_while(|l| !l.starts_with("//! ```"))
            .map(|l| l.trim_start_matches("//!").trim_start_matches(' '))
            .collect::<Vec<_>>()
            .join("\n");
        let cfg = RunConfig::parse(&block).unwrap();
        assert_eq!(cfg.domain.spec.as_deref(), Some("model:m=2,g0=1"));
        assert_eq!(cfg.path.points, Some(15));
        assert_eq!(cfg.run.workers, Some(4));
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(RunConfig::parse("[domain]\nspec = \"model:m=2\"\ncolour = 1\n").is_err());
        assert!(RunConfig::parse("[plots]\nx = 1\n").is_err());
        assert!(RunConfig::parse("[path]\npoints = \"many\"\n").is_err());
    }

    #[test]
    fn flags_win() {
        let mut cfg = RunConfig::parse("[point]\nx = 1.0\ny = 2.0\n").unwrap();
        let mut top = RunConfig::default();
        top.point.y = Some(5.0);
        cfg.overlay(&top);
        assert_eq!((cfg.point.x, cfg.point.y), (Some(1.0), Some(5.0)));
    }
}
