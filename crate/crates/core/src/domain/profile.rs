//! Smooth scalar profiles: the `g` factor of `f(x) = x^{2m} g(x)` and closed
//! forms for `f` itself.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

#[allow(unused_imports)]
use crate::math::*;
use crate::{Error, Result};

/// A real function with two derivatives.
pub trait Smooth: Send + Sync + Debug {
    /// `[h(x), h'(x), h''(x)]`
    fn jet(&self, x: f64) -> [f64; 3];

    /// Stable textual description, used in report hashes.
    fn describe(&self) -> String;

    /// Description of the profile this one is an exact perturbation of, if any.
    fn offset_base(&self) -> Option<&str> {
        None
    }

    /// `h(x) - base(x)` for the profile named by [`Smooth::offset_base`],
    /// computed without cancellation.
    fn offset(&self, _x: f64) -> f64 {
        f64::NAN
    }
}

/// `g(x) = g0`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Smooth for Constant {
    fn jet(&self, _x: f64) -> [f64; 3] {
        [self.0, 0.0, 0.0]
    }
    fn describe(&self) -> String {
        format!("const({:e})", self.0)
    }
}

/// `g(x) = g0 / (1 + x^2)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rational {
    pub g0: f64,
}

impl Smooth for Rational {
    fn jet(&self, x: f64) -> [f64; 3] {
        let d = 1.0 + x * x;
        let g = self.g0 / d;
        [g, -2.0 * self.g0 * x / (d * d), self.g0 * (6.0 * x * x - 2.0) / (d * d * d)]
    }
    fn describe(&self) -> String {
        format!("rational({:e})", self.g0)
    }
}

/// Polynomial with coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Smooth for Polynomial {
    fn jet(&self, x: f64) -> [f64; 3] {
        let (mut p, mut dp, mut d2p) = (0.0, 0.0, 0.0);
        for &c in self.0.iter().rev() {
            d2p = d2p * x + 2.0 * dp;
            dp = dp * x + p;
            p = p * x + c;
        }
        [p, dp, d2p]
    }
    fn describe(&self) -> String {
        format!("poly({:?})", self.0)
    }
}

/// `c |x|^n` for even `n` (or `c x^n` generally).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub power: u32,
}

impl Smooth for Monomial {
    fn jet(&self, x: f64) -> [f64; 3] {
        let n = self.power;
        let c = self.coef;
        match n {
            0 => [c, 0.0, 0.0],
            1 => [c * x, c, 0.0],
            _ => {
                let xn2 = ipow(x, n - 2);
                let nf = n as f64;
                [c * xn2 * x * x, c * nf * xn2 * x, c * nf * (nf - 1.0) * xn2]
            }
        }
    }
    fn describe(&self) -> String {
        format!("monomial({:e},{})", self.coef, self.power)
    }
}

/// Piecewise cubic Hermite interpolant of `(x, g, g')` samples. Outside the
/// table the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    xs: Vec<f64>,
    gs: Vec<f64>,
    ds: Vec<f64>,
}

impl HermiteTable {
    pub fn new(xs: Vec<f64>, gs: Vec<f64>, ds: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != gs.len() || xs.len() != ds.len() {
            return Err(Error::InvalidArgument(format!(
                "table needs at least two rows of equal length (got {}, {}, {})",
                xs.len(),
                gs.len(),
                ds.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table abscissae must be strictly increasing".into()));
        }
        if xs.iter().chain(gs.iter()).chain(ds.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("table contains non-finite entries".into()));
        }
        Ok(HermiteTable { xs, gs, ds })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

impl Smooth for HermiteTable {
    fn jet(&self, x: f64) -> [f64; 3] {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return [self.gs[0], 0.0, 0.0];
        }
        if x >= self.xs[n - 1] {
            return [self.gs[n - 1], 0.0, 0.0];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (p0, p1, m0, m1) = (self.gs[i], self.gs[i + 1], self.ds[i] * h, self.ds[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1;
        let dv = (6.0 * t2 - 6.0 * t) * p0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * p1 + (3.0 * t2 - 2.0 * t) * m1;
        let d2v = (12.0 * t - 6.0) * p0 + (6.0 * t - 4.0) * m0 + (-12.0 * t + 6.0) * p1 + (6.0 * t - 2.0) * m1;
        [v, dv / h, d2v / (h * h)]
    }
    fn describe(&self) -> String {
        let mut bytes = Vec::with_capacity(self.xs.len() * 24);
        for v in self.xs.iter().chain(self.gs.iter()).chain(self.ds.iter()) {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        format!("table(n={},fnv={:016x})", self.xs.len(), fnv1a(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &dyn Smooth, xs: &[f64]) {
        let h = 1e-5;
        for &x in xs {
            let j = p.jet(x);
            let jp = p.jet(x + h);
            let jm = p.jet(x - h);
            assert!(((jp[0] - jm[0]) / (2.0 * h) - j[1]).abs() < 1e-6 * (1.0 + j[1].abs()), "{p:?} d1 at {x}");
            assert!(((jp[1] - jm[1]) / (2.0 * h) - j[2]).abs() < 1e-5 * (1.0 + j[2].abs()), "{p:?} d2 at {x}");
        }
    }

    #[test]
    fn builtin_derivatives_match_differences() {
        fd_check(&Constant(1.5), &[0.0, 2.0]);
        fd_check(&Rational { g0: 2.0 }, &[-1.3, 0.0, 0.4, 3.0]);
        fd_check(&Polynomial(alloc::vec![1.0, 0.0, 1.0, -0.2]), &[-1.0, 0.3, 2.0]);
        fd_check(&Monomial { coef: 1.0, power: 4 }, &[-1.0, 0.5, 3.0]);
    }

    #[test]
    fn rational_value() {
        assert!((Rational { g0: 1.0 }.jet(0.5)[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let p = |x: f64| 1.0 - 0.3 * x + 0.1 * x * x * x;
        let dp = |x: f64| -0.3 + 0.3 * x * x;
        let xs: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
        let gs = xs.iter().map(|&x| p(x)).collect();
        let ds = xs.iter().map(|&x| dp(x)).collect();
        let t = HermiteTable::new(xs, gs, ds).unwrap();
        for &x in &[-1.9, -0.3, 0.77, 1.6] {
            let j = t.jet(x);
            assert!((j[0] - p(x)).abs() < 1e-13);
            assert!((j[1] - dp(x)).abs() < 1e-12);
            assert!((j[2] - 0.6 * x).abs() < 1e-11);
        }
        assert_eq!(t.jet(5.0), [p(2.0), 0.0, 0.0]);
    }

    #[test]
    fn hermite_rejects_bad_tables() {
        assert!(HermiteTable::new(alloc::vec![0.0], alloc::vec![1.0], alloc::vec![0.0]).is_err());
        assert!(HermiteTable::new(alloc::vec![0.0, 0.0], alloc::vec![1.0, 1.0], alloc::vec![0.0, 0.0]).is_err());
    }
}
