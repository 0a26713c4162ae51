//! The localized profile `g~`: equal to `g` near 0, equal to `9/10 g(0)`
//! for `|x| >= 1`, with `0 <= -x g~'` and `|x^2 g~''| < g(0)/5` everywhere.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;

use super::{DefiningFunction, Smooth, TailSlope};
#[allow(unused_imports)]
use crate::math::*;
use crate::roots::bisect;
use crate::{Error, Result};

const FLOOR: f64 = 0.9;
const SECOND_BOUND: f64 = 0.2;
const CHECK_POINTS: usize = 20_001;

/// `g~ = g (1 - psi) + 0.9 g(0) psi` where `psi` is a flat step in `ln|x|`
/// from `|x| = delta` to the first point at which `g` reaches `0.9 g(0)`
/// (capped at 1), taken separately on each side.
#[derive(Debug, Clone)]
pub struct MollifiedProfile {
    inner: Arc<dyn Smooth>,
    g0: f64,
    delta: f64,
    end_pos: f64,
    end_neg: f64,
}

impl MollifiedProfile {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn side_end(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.end_pos
        } else {
            self.end_neg
        }
    }
}

impl Smooth for MollifiedProfile {
    fn jet(&self, x: f64) -> [f64; 3] {
        let ax = x.abs();
        if ax <= self.delta {
            return self.inner.jet(x);
        }
        let end = self.side_end(x);
        let floor = FLOOR * self.g0;
        if ax >= end {
            return [floor, 0.0, 0.0];
        }
        let w = (end / self.delta).ln();
        let s = (ax / self.delta).ln() / w;
        let [p, p1, p2] = flat_step(s);
        // d/dx of s = 1/(w x); written with signed x so odd symmetry is kept
        let sx = 1.0 / (w * x);
        let psi_x = p1 * sx;
        let psi_xx = p2 * sx * sx - p1 / (w * x * x);
        let [g, g1, g2] = self.inner.jet(x);
        let d = floor - g;
        [
            g * (1.0 - p) + floor * p,
            g1 * (1.0 - p) + d * psi_x,
            g2 * (1.0 - p) - 2.0 * g1 * psi_x + d * psi_xx,
        ]
    }

    fn describe(&self) -> String {
        format!("mollified({},delta={:e},ends={:e}/{:e})", self.inner.describe(), self.delta, self.end_pos, self.end_neg)
    }
}

/// Replaces `g` by the localized profile; `f` is unchanged on `|x| <= delta`.
pub fn mollify(f: &DefiningFunction, delta: f64) -> Result<DefiningFunction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !f.full_theorem_class() || f.f_override.is_some() {
        return Err(Error::InvalidDefiningFunction("mollify requires a profile in the full theorem class".into()));
    }
    let inner = f.g.clone().ok_or_else(|| Error::InvalidDefiningFunction("mollify requires a flat profile".into()))?;
    let g0 = f.g0();
    if delta > f.core_radius() {
        return Err(Error::MollifyInfeasible(format!("delta {delta} exceeds the class radius {}", f.core_radius())));
    }
    let floor = FLOOR * g0;
    let mut ends = [1.0f64, 1.0f64];
    for (i, dir) in [1.0f64, -1.0].into_iter().enumerate() {
        let gd = inner.jet(dir * delta)[0];
        if gd <= floor {
            return Err(Error::MollifyInfeasible(format!("g({}) = {gd} already at or below 9/10 g(0)", dir * delta)));
        }
        let g1 = inner.jet(dir)[0];
        if g1 < floor {
            ends[i] = bisect(|t| inner.jet(dir * t)[0] - floor, delta, 1.0, 1e-15)?;
        }
    }
    let prof = MollifiedProfile { inner, g0, delta, end_pos: ends[0], end_neg: ends[1] };
    check_bounds(&prof)?;
    DefiningFunction::builder(f.m(), Arc::new(prof))
        .tails(TailSlope::Infinite, TailSlope::Infinite)
        .full_theorem_class(true)
        .build()
        .map_err(|e| Error::MollifyInfeasible(format!("{e}")))
}

fn check_bounds(p: &MollifiedProfile) -> Result<()> {
    let lim = SECOND_BOUND * p.g0;
    let span = 1.25;
    for k in 0..CHECK_POINTS {
        let x = -span + 2.0 * span * (k as f64) / ((CHECK_POINTS - 1) as f64);
        let [g, g1, g2] = p.jet(x);
        let in_core = x.abs() <= p.delta;
        let what = if in_core { "g on |x| <= delta" } else { "the blend" };
        if g > p.g0 * (1.0 + 1e-12) || g < FLOOR * p.g0 * (1.0 - 1e-12) {
            return Err(Error::MollifyInfeasible(format!("{what} leaves [0.9 g(0), g(0)] at x={x}: {g}")));
        }
        if x * g1 > 1e-12 * p.g0 {
            return Err(Error::MollifyInfeasible(format!("{what} has x g'(x) = {:e} > 0 at x={x}", x * g1)));
        }
        if (x * x * g2).abs() >= lim {
            return Err(Error::MollifyInfeasible(format!(
                "{what} has |x^2 g''| = {:.4} >= g(0)/5 at x={x}; choose a smaller delta",
                (x * x * g2).abs()
            )));
        }
    }
    Ok(())
}
