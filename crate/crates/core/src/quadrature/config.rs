use crate::{Error, Result};

/// How integrand values are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scaling {
    /// Plain sums; overflows once values exceed the f64 range.
    Direct,
    /// Values are summed as `exp(ln h - shift)` with `shift` at the peak.
    LogScaled,
}

/// Tolerances and truncation policy shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Absolute floor, in the scaled units when `scaling` is log-scaled.
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Breakpoints stop once the integrand drops below this fraction of its peak.
    pub truncation_drop: f64,
    pub scaling: Scaling,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            max_depth: 60,
            truncation_drop: 1e-16,
            scaling: Scaling::LogScaled,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureConfig { rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "tolerances must be positive (rel_tol={}, abs_tol={})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
        }
        if !(self.truncation_drop > 0.0 && self.truncation_drop < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "truncation_drop must lie in (0, 1), got {}",
                self.truncation_drop
            )));
        }
        Ok(())
    }

    /// Config for an inner integral whose error feeds an outer one.
    pub(crate) fn inner(&self, factor: f64) -> Self {
        QuadratureConfig { rel_tol: (self.rel_tol * factor).max(1e-14), ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = QuadratureConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.max_depth, 60);
        assert!(QuadratureConfig { rel_tol: 0.0, ..c }.validate().is_err());
        assert!(QuadratureConfig { max_depth: 0, ..c }.validate().is_err());
        assert!(QuadratureConfig { truncation_drop: 1.0, ..c }.validate().is_err());
    }
}
