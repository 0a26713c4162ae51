//! Tail modification: a profile equal to a given one on `|x| <= a` whose
//! curvature is switched off between `a` and `b`, leaving linear tails.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{Constant, DefiningFunction, Smooth, TailSlope};
#[allow(unused_imports)]
use crate::math::*;
use crate::quadrature::gauss_kronrod_15;
use crate::{Error, Result};

const NODES: usize = 4096;

#[derive(Debug, Clone)]
struct Side {
    dir: f64,
    c1: Vec<f64>,
    mm: Vec<f64>,
    cv: Vec<f64>,
    /// value and slope of the modified profile at `|x| = b`, in the variable `r = |x|`
    end: [f64; 2],
}

/// `f2'' = f1'' (1 - beta(|x|))` with `beta` a flat step from `a` to `b`,
/// and `f2 = f1` on `|x| <= a`.
///
/// With `C1(r) = int_a^r beta F1''` and `M(r) = int_a^r s beta F1'' ds`
/// (`F1(r) = f1(±r)`), the modified profile is `F2 = F1 - (r C1 - M)` and
/// `F2' = F1' - C1`. Both cumulative integrals are tabulated on a fine grid
/// and interpolated by cubic Hermite; beyond `b` the profile is linear.
#[derive(Debug, Clone)]
pub struct TailTaper {
    base: DefiningFunction,
    base_id: String,
    a: f64,
    b: f64,
    h: f64,
    sides: [Side; 2],
}

impl TailTaper {
    fn beta(&self, r: f64) -> [f64; 3] {
        flat_step((r - self.a) / (self.b - self.a))
    }

    fn base_r(base: &DefiningFunction, dir: f64, r: f64) -> [f64; 3] {
        let [v, d1, d2] = base.f_jet(dir * r);
        [v, dir * d1, d2]
    }

    fn new(base: DefiningFunction, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("taper window must satisfy 0 < a < b, got [{a}, {b}]")));
        }
        let h = (b - a) / (NODES - 1) as f64;
        let step = |r: f64| flat_step((r - a) / (b - a))[0];
        let mut sides = Vec::with_capacity(2);
        for dir in [1.0, -1.0] {
            let c = |r: f64| step(r) * Self::base_r(&base, dir, r)[2];
            let mut c1 = Vec::with_capacity(NODES);
            let mut mm = Vec::with_capacity(NODES);
            let mut cv = Vec::with_capacity(NODES);
            let (mut acc1, mut accm) = (0.0, 0.0);
            for j in 0..NODES {
                let r = a + h * j as f64;
                if j > 0 {
                    let r0 = r - h;
                    let mid = r0 + 0.5 * h;
                    for (lo, hi) in [(r0, mid), (mid, r)] {
                        acc1 += gauss_kronrod_15(c, lo, hi).0;
                        accm += gauss_kronrod_15(|s| s * c(s), lo, hi).0;
                    }
                }
                c1.push(acc1);
                mm.push(accm);
                cv.push(c(r));
            }
            let [fb, db, _] = Self::base_r(&base, dir, b);
            let end = [fb - (b * acc1 - accm), db - acc1];
            sides.push(Side { dir, c1, mm, cv, end });
        }
        let neg = sides.pop().expect("two sides");
        let pos = sides.pop().expect("two sides");
        let base_id = base.describe();
        Ok(TailTaper { base, base_id, a, b, h, sides: [pos, neg] })
    }

    /// Tail slope `lim f/|x|` on the side of `dir`.
    pub fn slope(&self, dir: f64) -> f64 {
        self.sides[if dir >= 0.0 { 0 } else { 1 }].end[1]
    }

    pub fn window(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `(r C1 - M, C1)` at `a < r < b`
    fn correction(&self, side: &Side, r: f64) -> (f64, f64) {
        let j = (((r - self.a) / self.h) as usize).min(NODES - 2);
        let r0 = self.a + self.h * j as f64;
        let t = (r - r0) / self.h;
        let hermite = |p0: f64, p1: f64, m0: f64, m1: f64| {
            let t2 = t * t;
            let t3 = t2 * t;
            (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 * self.h + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1 * self.h
        };
        let r1 = r0 + self.h;
        let c1 = hermite(side.c1[j], side.c1[j + 1], side.cv[j], side.cv[j + 1]);
        let mm = hermite(side.mm[j], side.mm[j + 1], r0 * side.cv[j], r1 * side.cv[j + 1]);
        (r * c1 - mm, c1)
    }

    fn jet_r(&self, side: &Side, r: f64) -> [f64; 3] {
        if r >= self.b {
            return [side.end[0] + side.end[1] * (r - self.b), side.end[1], 0.0];
        }
        let [f1, d1, d2] = Self::base_r(&self.base, side.dir, r);
        let (corr, c1) = self.correction(side, r);
        [f1 - corr, d1 - c1, d2 * (1.0 - self.beta(r)[0])]
    }
}

impl Smooth for TailTaper {
    fn jet(&self, x: f64) -> [f64; 3] {
        let r = x.abs();
        if r <= self.a {
            return self.base.f_jet(x);
        }
        let side = &self.sides[if x >= 0.0 { 0 } else { 1 }];
        let [v, d1, d2] = self.jet_r(side, r);
        [v, side.dir * d1, d2]
    }

    fn describe(&self) -> String {
        format!("taper({};a={:e};b={:e})", self.base_id, self.a, self.b)
    }

    fn offset_base(&self) -> Option<&str> {
        Some(&self.base_id)
    }

    fn offset(&self, x: f64) -> f64 {
        let r = x.abs();
        if r <= self.a {
            return 0.0;
        }
        let side = &self.sides[if x >= 0.0 { 0 } else { 1 }];
        if r >= self.b {
            return self.jet_r(side, r)[0] - self.base.eval_f(x, 0);
        }
        -self.correction(side, r).0
    }
}

/// `f2` equal to `f1` on `|x| <= a`, linear beyond `|x| = b`.
pub fn tail_modify(f1: &DefiningFunction, a: f64, b: f64) -> Result<DefiningFunction> {
    let g = f1.g.clone().ok_or_else(|| Error::InvalidDefiningFunction("tail modification needs a flat profile".into()))?;
    if a > f1.core_radius() {
        return Err(Error::InvalidArgument(format!("agreement radius {a} exceeds the class radius {}", f1.core_radius())));
    }
    let taper = TailTaper::new(f1.clone(), a, b)?;
    let (sp, sn) = (taper.slope(1.0), taper.slope(-1.0));
    if !(sp > 0.0 && sn > 0.0) {
        return Err(Error::Construction(format!("tapered tails have non-positive slopes {sp}, {sn}")));
    }
    DefiningFunction::builder(f1.m(), g)
        .full_theorem_class(f1.full_theorem_class())
        .core_radius(a)
        .tails(TailSlope::Finite(sp), TailSlope::Finite(sn))
        .analytic_override(Arc::new(taper))
        .build()
}

/// `x^{2m}` near the origin with linear tails of the given slope; the taper
/// window is `[r, 2r]` with `r` chosen so the final slope matches.
pub fn blended_linear(m: u32, slope: f64) -> Result<DefiningFunction> {
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(Error::InvalidArgument(format!("tail slope must be positive and finite, got {slope}")));
    }
    let base = DefiningFunction::builder(m, Arc::new(Constant(1.0)))
        .tails(TailSlope::Infinite, TailSlope::Infinite)
        .build()?;
    // slopes scale like r^{2m-1} for a pure power
    let unit = TailTaper::new(base.clone(), 1.0, 2.0)?.slope(1.0);
    let r = (slope / unit).powf(1.0 / (2 * m - 1) as f64);
    tail_modify(&base, r, 2.0 * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_offset_matches_subtraction() {
        let f1 = DefiningFunction::model(2, 1.0).unwrap();
        let f2 = tail_modify(&f1, 0.5, 1.0).unwrap();
        let d21 = f2.offset_from(&f1);
        let d12 = f1.offset_from(&f2);
        assert_eq!(d21(0.3), 0.0);
        for &x in &[0.52, -0.7, 0.95, 1.5, -3.0] {
            let plain = f2.eval_f(x, 0) - f1.eval_f(x, 0);
            assert!((d21(x) - plain).abs() < 1e-14 * f1.eval_f(x, 0), "x={x}");
            assert_eq!(d12(x), -d21(x));
        }
        // just inside the window the offset is tiny but still resolved
        let tiny = d21(0.505);
        assert!(tiny < 0.0 && tiny > -1e-20);
    }

    #[test]
    fn agrees_on_core_and_is_linear_outside() {
        let f1 = DefiningFunction::model(2, 1.0).unwrap();
        let f2 = tail_modify(&f1, 0.5, 1.0).unwrap();
        for &x in &[-0.5, -0.3, 0.0, 0.2, 0.4999] {
            assert_eq!(f2.f_jet(x), f1.f_jet(x));
        }
        let [v3, d3, c3] = f2.f_jet(3.0);
        let [v4, _, _] = f2.f_jet(4.0);
        assert_eq!(c3, 0.0);
        assert!((v4 - v3 - d3).abs() < 1e-12);
        let cone = f2.dual_cone().unwrap();
        assert!((cone.r_minus - d3).abs() < 1e-14);
        assert!((cone.r_plus - cone.r_minus).abs() < 1e-12);
        assert!(!cone.estimated);
    }

    #[test]
    fn derivatives_are_consistent() {
        let f1 = DefiningFunction::rational(2, 1.3).unwrap();
        let f2 = tail_modify(&f1, 0.5, 1.2).unwrap();
        let h = 1e-5;
        for &x in &[-1.1, -0.7, 0.55, 0.8, 1.19] {
            let j = f2.f_jet(x);
            let jp = f2.f_jet(x + h);
            let jm = f2.f_jet(x - h);
            assert!(((jp[0] - jm[0]) / (2.0 * h) - j[1]).abs() < 1e-8, "{x}");
            assert!(((jp[1] - jm[1]) / (2.0 * h) - j[2]).abs() < 1e-6, "{x}");
            assert!(j[2] >= 0.0);
        }
    }

    #[test]
    fn slope_one_builtin() {
        let f = blended_linear(2, 1.0).unwrap();
        let c = f.dual_cone().unwrap();
        assert!((c.r_plus - 1.0).abs() < 1e-10 && (c.r_minus - 1.0).abs() < 1e-10);
        // numeric estimate agrees with the analytic tail
        let est = crate::domain::estimate_tail_slope(|x| f.eval_f(x, 0), 1.0).unwrap();
        assert!((est - 1.0).abs() < 1e-10);
        assert!((f.eval_f(0.1, 0) - 1e-4).abs() < 1e-19);
    }

    #[test]
    fn rejects_bad_window() {
        let f1 = DefiningFunction::model(2, 1.0).unwrap();
        assert!(tail_modify(&f1, 1.0, 0.5).is_err());
        assert!(blended_linear(2, -1.0).is_err());
    }
}
