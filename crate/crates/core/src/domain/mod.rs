//! Convex profiles `f(x) = x^{2m} g(x)`, the tube domain `y > f(x)` over them,
//! and the dual cone of frequencies in which the kernel integrals converge.

mod mollify;
mod profile;
mod tail;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;

#[allow(unused_imports)]
use crate::math::*;
use crate::{Error, Result};

pub use mollify::{mollify, MollifiedProfile};
pub use profile::{Constant, HermiteTable, Monomial, Polynomial, Rational, Smooth};
pub use tail::{blended_linear, tail_modify, TailTaper};

/// `lim f(x)/|x|` along one tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailSlope {
    Finite(f64),
    Infinite,
    /// Estimated numerically on demand.
    Estimate,
}

/// Sampling grid for the sample-based validity checks: `points` values of
/// `|x|` spaced geometrically in `[radius * 1e-4, radius]`, both signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationGrid {
    pub points: usize,
    pub radius: f64,
    pub tol: f64,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        ValidationGrid { points: 512, radius: 10.0, tol: 1e-12 }
    }
}

impl ValidationGrid {
    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        let half = (self.points / 2).max(2);
        let ratio = (1e-4f64).powf(1.0 / (half - 1) as f64);
        (0..half).flat_map(move |k| {
            let x = self.radius * ratio.powi(k as i32);
            [x, -x]
        })
    }
}

/// Convex defining function of a tube domain. Cheap to clone.
#[derive(Debug, Clone)]
pub struct DefiningFunction {
    m: u32,
    g: Option<Arc<dyn Smooth>>,
    f_override: Option<Arc<dyn Smooth>>,
    tail_pos: TailSlope,
    tail_neg: TailSlope,
    full_theorem_class: bool,
    core_radius: f64,
    g0: f64,
}

/// Staged constructor; `build` runs the sampled validation.
#[derive(Debug, Clone)]
pub struct Builder {
    m: u32,
    g: Arc<dyn Smooth>,
    full: bool,
    tail_pos: TailSlope,
    tail_neg: TailSlope,
    f_override: Option<Arc<dyn Smooth>>,
    core_radius: f64,
    grid: ValidationGrid,
}

impl Builder {
    pub fn full_theorem_class(mut self, flag: bool) -> Self {
        self.full = flag;
        self
    }

    pub fn tails(mut self, pos: TailSlope, neg: TailSlope) -> Self {
        self.tail_pos = pos;
        self.tail_neg = neg;
        self
    }

    /// Closed form for `f` itself; `g` is then only trusted on `|x| <= core_radius`.
    pub fn analytic_override(mut self, f: Arc<dyn Smooth>) -> Self {
        self.f_override = Some(f);
        self
    }

    pub fn core_radius(mut self, r: f64) -> Self {
        self.core_radius = r;
        self
    }

    pub fn grid(mut self, grid: ValidationGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn build(self) -> Result<DefiningFunction> {
        if self.m < 2 {
            return Err(Error::InvalidDefiningFunction(format!("flatness index m must be at least 2, got {}", self.m)));
        }
        let g0 = self.g.jet(0.0)[0];
        if !(g0 > 0.0) || !g0.is_finite() {
            return Err(Error::InvalidDefiningFunction(format!("g(0) must be positive, got {g0}")));
        }
        if !(self.core_radius > 0.0) {
            return Err(Error::InvalidDefiningFunction("core radius must be positive".into()));
        }
        let f = DefiningFunction {
            m: self.m,
            g: Some(self.g),
            f_override: self.f_override,
            tail_pos: self.tail_pos,
            tail_neg: self.tail_neg,
            full_theorem_class: self.full,
            core_radius: self.core_radius,
            g0,
        };
        f.validate(&self.grid)?;
        Ok(f)
    }
}

/// Validated `f = x^{2m} g` with tails estimated numerically.
pub fn make_defining_function(m: u32, g: Arc<dyn Smooth>, full_theorem_class: bool) -> Result<DefiningFunction> {
    DefiningFunction::builder(m, g).full_theorem_class(full_theorem_class).build()
}

impl DefiningFunction {
    pub fn builder(m: u32, g: Arc<dyn Smooth>) -> Builder {
        Builder {
            m,
            g,
            full: true,
            tail_pos: TailSlope::Estimate,
            tail_neg: TailSlope::Estimate,
            f_override: None,
            core_radius: 10.0,
            grid: ValidationGrid::default(),
        }
    }

    /// The model profile `g0 x^{2m}`.
    pub fn model(m: u32, g0: f64) -> Result<Self> {
        Self::builder(m, Arc::new(Constant(g0)))
            .tails(TailSlope::Infinite, TailSlope::Infinite)
            .build()
    }

    /// `g0 x^{2m} / (1 + x^2)`.
    pub fn rational(m: u32, g0: f64) -> Result<Self> {
        Self::builder(m, Arc::new(Rational { g0 }))
            .tails(TailSlope::Infinite, TailSlope::Infinite)
            .build()
    }

    /// A convex profile outside the flat class (for instance `x^2`), used as
    /// a closed-form test input for the kernel evaluators.
    pub fn general_convex(f: Arc<dyn Smooth>, tail_pos: TailSlope, tail_neg: TailSlope) -> Result<Self> {
        let out = DefiningFunction {
            m: 0,
            g: None,
            f_override: Some(f),
            tail_pos,
            tail_neg,
            full_theorem_class: false,
            core_radius: 0.0,
            g0: f64::NAN,
        };
        let grid = ValidationGrid::default();
        for x in grid.abscissae().chain(core::iter::once(0.0)) {
            let [v, _, d2] = out.f_jet(x);
            if !v.is_finite() || d2 < -grid.tol * (1.0 + d2.abs()) {
                return Err(Error::InvalidDefiningFunction(format!("convexity fails at x={x}: f''={d2:e}")));
            }
        }
        Ok(out)
    }

    /// Flatness index; 0 for profiles built with [`general_convex`](Self::general_convex).
    pub fn m(&self) -> u32 {
        self.m
    }

    /// `g(0)`; NaN outside the flat class.
    pub fn g0(&self) -> f64 {
        self.g0
    }

    /// Whether `f = x^{2m} g` with `m >= 2` and `g(0) > 0`.
    pub fn is_flat_type(&self) -> bool {
        self.g.is_some()
    }

    pub fn full_theorem_class(&self) -> bool {
        self.full_theorem_class
    }

    /// Radius on which `f = x^{2m} g` holds and the class conditions were checked.
    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn g_jet(&self, x: f64) -> Option<[f64; 3]> {
        self.g.as_ref().map(|g| g.jet(x))
    }

    pub fn tails(&self) -> (TailSlope, TailSlope) {
        (self.tail_pos, self.tail_neg)
    }

    /// `[f, f', f'']` at `x`.
    pub fn f_jet(&self, x: f64) -> [f64; 3] {
        if let Some(o) = &self.f_override {
            return o.jet(x);
        }
        let g = self.g.as_ref().expect("flat profile without override carries g");
        let [gv, g1, g2] = g.jet(x);
        let n = 2 * self.m;
        let nf = n as f64;
        let xn2 = ipow(x, n - 2);
        let xn1 = xn2 * x;
        let xn = xn1 * x;
        [
            xn * gv,
            nf * xn1 * gv + xn * g1,
            nf * (nf - 1.0) * xn2 * gv + 2.0 * nf * xn1 * g1 + xn * g2,
        ]
    }

    /// `f`, `f'` or `f''` for `order` 0, 1, 2; NaN for any other order.
    pub fn eval_f(&self, x: f64, order: u8) -> f64 {
        match order {
            0..=2 => self.f_jet(x)[order as usize],
            _ => f64::NAN,
        }
    }

    /// `x -> self(x) - base(x)`. Exact (no cancellation) when one profile is
    /// a tail modification of the other; plain subtraction otherwise.
    pub fn offset_from<'a>(&'a self, base: &'a DefiningFunction) -> alloc::boxed::Box<dyn Fn(f64) -> f64 + 'a> {
        let base_id = base.describe();
        let self_id = self.describe();
        if let Some(o) = &self.f_override {
            if o.offset_base() == Some(base_id.as_str()) {
                return alloc::boxed::Box::new(move |x| o.offset(x));
            }
        }
        if let Some(o) = &base.f_override {
            if o.offset_base() == Some(self_id.as_str()) {
                return alloc::boxed::Box::new(move |x| -o.offset(x));
            }
        }
        alloc::boxed::Box::new(move |x| self.eval_f(x, 0) - base.eval_f(x, 0))
    }

    pub fn describe(&self) -> String {
        let g = self.g.as_ref().map(|g| g.describe()).unwrap_or_else(|| "-".into());
        let o = self.f_override.as_ref().map(|o| o.describe()).unwrap_or_else(|| "-".into());
        format!(
            "m={};g={};f={};tails={:?}/{:?};full={};core={:e}",
            self.m, g, o, self.tail_pos, self.tail_neg, self.full_theorem_class, self.core_radius
        )
    }

    fn validate(&self, grid: &ValidationGrid) -> Result<()> {
        let g = self.g.as_ref().expect("validated profiles are flat");
        for x in grid.abscissae().chain(core::iter::once(0.0)) {
            let [gv, g1, g2] = g.jet(x);
            let [fv, _, f2] = self.f_jet(x);
            if !fv.is_finite() || !f2.is_finite() || !gv.is_finite() {
                return Err(Error::InvalidDefiningFunction(format!("non-finite profile value at x={x}")));
            }
            let scale = if self.f_override.is_some() {
                1.0 + f2.abs()
            } else {
                let n = (2 * self.m) as f64;
                let xn2 = ipow(x, 2 * self.m - 2);
                1.0 + (n * (n - 1.0) * xn2 * gv).abs() + (2.0 * n * xn2 * x * g1).abs() + (xn2 * x * x * g2).abs()
            };
            if f2 < -grid.tol * scale {
                return Err(Error::InvalidDefiningFunction(format!("convexity fails at x={x}: f''={f2:e}")));
            }
            if self.full_theorem_class && x.abs() <= self.core_radius && x * g1 > grid.tol * (1.0 + gv.abs()) {
                return Err(Error::InvalidDefiningFunction(format!(
                    "x g'(x) = {:e} > 0 at x={x}; clear full_theorem_class to accept under the weaker hypothesis",
                    x * g1
                )));
            }
        }
        Ok(())
    }

    /// Dual cone; tails flagged [`TailSlope::Estimate`] are extrapolated
    /// from `f(±2^k)/2^k`.
    pub fn dual_cone(&self) -> Result<DualCone> {
        let (pos, est_p) = self.resolve_tail(1.0, self.tail_pos)?;
        let (neg, est_n) = self.resolve_tail(-1.0, self.tail_neg)?;
        if !(pos > 0.0) || !(neg > 0.0) {
            return Err(Error::InvalidDefiningFunction(format!("tail slopes must be positive, got {pos}, {neg}")));
        }
        // x -> -inf bounds zeta1 from above, x -> +inf from below
        Ok(DualCone { r_plus: neg, r_minus: pos, estimated: est_p || est_n })
    }

    fn resolve_tail(&self, dir: f64, t: TailSlope) -> Result<(f64, bool)> {
        match t {
            TailSlope::Finite(s) => Ok((s, false)),
            TailSlope::Infinite => Ok((f64::INFINITY, false)),
            TailSlope::Estimate => estimate_tail_slope(|x| self.f_jet(x)[0], dir).map(|s| (s, true)),
        }
    }
}

/// Extrapolates `lim f(dir x)/x` over `x = 2^k`. Convexity with `f(0) = 0`
/// makes the ratio monotone, so it either diverges geometrically or settles
/// like `s + c/x`, which one Richardson step removes.
pub fn estimate_tail_slope<F: Fn(f64) -> f64>(f: F, dir: f64) -> Result<f64> {
    const TOL: f64 = 1e-9;
    let mut q = [0.0f64; 64];
    let mut rich = [0.0f64; 64];
    let mut growth_run = 0;
    for k in 0..60usize {
        let x = (2.0f64).powi(k as i32);
        let v = f(dir * x) / x;
        if !v.is_finite() || v > 1e15 {
            return Ok(f64::INFINITY);
        }
        q[k] = v;
        if k >= 1 {
            if q[k - 1] > 0.0 && q[k] / q[k - 1] >= 1.5 {
                growth_run += 1;
                if growth_run >= 3 {
                    return Ok(f64::INFINITY);
                }
            } else {
                growth_run = 0;
            }
            rich[k] = 2.0 * q[k] - q[k - 1];
        }
        if k >= 4 {
            let (r0, r1, r2) = (rich[k - 2], rich[k - 1], rich[k]);
            let scale = r2.abs().max(1e-300);
            if (r2 - r1).abs() <= TOL * scale && (r1 - r0).abs() <= TOL * scale {
                return Ok(r2);
            }
        }
    }
    Err(Error::TailSlopeUnstable(format!(
        "f(x)/|x| along {} still changing at |x| = 2^59 (last value {:e})",
        if dir > 0.0 { "+inf" } else { "-inf" },
        q[59]
    )))
}

/// `{(z1, z2): -r_minus z2 < z1 < r_plus z2}`. In sector form `z1 = s z2`
/// the admissible `s` is the interval `(-r_minus, r_plus)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCone {
    pub r_plus: f64,
    pub r_minus: f64,
    pub estimated: bool,
}

impl DualCone {
    pub fn contains(&self, zeta1: f64, zeta2: f64) -> bool {
        zeta2 > 0.0 && zeta1 < self.r_plus * zeta2 && zeta1 > -self.r_minus * zeta2
    }

    pub fn is_half_plane(&self) -> bool {
        self.r_plus == f64::INFINITY && self.r_minus == f64::INFINITY
    }
}

/// `(x, y) = (Im z1, Im z2)` strictly above the graph of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRelativePoint {
    pub x: f64,
    pub y: f64,
}

impl BoundaryRelativePoint {
    pub fn new(f: &DefiningFunction, x: f64, y: f64) -> Result<Self> {
        let gap = y - f.eval_f(x, 0);
        if !(gap > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::OutsideDomain { x, y, gap });
        }
        Ok(BoundaryRelativePoint { x, y })
    }

    /// `y - f(x)`
    pub fn gap(&self, f: &DefiningFunction) -> f64 {
        self.y - f.eval_f(self.x, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn model_x4_values() {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        assert_eq!(f.eval_f(1.0, 0), 1.0);
        assert_eq!(f.eval_f(1.0, 1), 4.0);
        assert_eq!(f.eval_f(1.0, 2), 12.0);
        assert!(f.eval_f(1.0, 3).is_nan());
        assert_eq!(f.f_jet(0.0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn rational_profile_value_and_class() {
        let f = DefiningFunction::rational(2, 1.0).unwrap();
        assert!((f.eval_f(0.5, 0) - 0.05).abs() < 1e-16);
        assert!(f.full_theorem_class());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(DefiningFunction::model(1, 1.0), Err(Error::InvalidDefiningFunction(_))));
        assert!(DefiningFunction::model(2, 0.0).is_err());
        assert!(DefiningFunction::model(2, -1.0).is_err());
        // g = 1 - x^2 / 2 gives f'' < 0 for large |x|
        let g = Arc::new(Polynomial(alloc::vec![1.0, 0.0, -0.5]));
        assert!(make_defining_function(2, g, false).is_err());
    }

    #[test]
    fn growing_g_needs_weaker_class() {
        let g: Arc<dyn Smooth> = Arc::new(Polynomial(alloc::vec![1.0, 0.0, 1.0]));
        assert!(make_defining_function(2, g.clone(), true).is_err());
        let f = make_defining_function(2, g, false).unwrap();
        assert!(!f.full_theorem_class());
        assert!((f.eval_f(1.0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn superlinear_tails_give_half_plane() {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        let c = f.dual_cone().unwrap();
        assert!(c.is_half_plane() && !c.estimated);
        // x^4/(1+x^2) grows like x^2: estimated as infinite
        let f = make_defining_function(2, Arc::new(Rational { g0: 1.0 }), true).unwrap();
        let c = f.dual_cone().unwrap();
        assert!(c.is_half_plane() && c.estimated);
    }

    #[test]
    fn linear_tail_estimate() {
        let s = estimate_tail_slope(|x| { let a = x.abs(); if a > 2.0 { 1.5 * a - 0.7 } else { 0.1 * a } }, 1.0).unwrap();
        assert!((s - 1.5).abs() < 1e-12);
        let s = estimate_tail_slope(|x| { let a = x.abs(); if a > 2.0 { 3.0 * a - 2.0 } else { a } }, -1.0).unwrap();
        assert!((s - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slowly_diverging_tail_is_unstable() {
        let r = estimate_tail_slope(|x| { let a = x.abs(); a * (1.0 + a).ln() }, 1.0);
        assert!(matches!(r, Err(Error::TailSlopeUnstable(_))), "{r:?}");
    }

    #[test]
    fn dual_cone_orientation() {
        // slope 2 on the right, 5 on the left
        let f = DefiningFunction::general_convex(
            Arc::new(Monomial { coef: 1.0, power: 2 }),
            TailSlope::Finite(2.0),
            TailSlope::Finite(5.0),
        )
        .unwrap();
        let c = f.dual_cone().unwrap();
        assert_eq!((c.r_plus, c.r_minus), (5.0, 2.0));
        assert!(c.contains(4.9, 1.0) && !c.contains(-2.1, 1.0) && !c.contains(0.0, 0.0));
    }

    #[test]
    fn point_must_be_interior() {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        assert!(BoundaryRelativePoint::new(&f, 1.0, 1.25).is_ok());
        let e = BoundaryRelativePoint::new(&f, 1.0, 0.5).unwrap_err();
        assert!(e.is_domain());
        assert!(BoundaryRelativePoint::new(&f, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn convexity_midpoint(h in -5.0f64..5.0, g0 in 0.1f64..4.0, m in 2u32..5) {
            let f = DefiningFunction::rational(m, g0).unwrap();
            prop_assert!(f.eval_f(-h, 0) + f.eval_f(h, 0) >= 0.0);
            prop_assert!(f.eval_f(h, 2) >= -1e-12);
        }
    }
}
