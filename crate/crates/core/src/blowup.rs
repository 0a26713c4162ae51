//! The cutoff `chi` and the real blow-up `(x, y) -> (tau, rho)` with
//! `tau = chi(1 - f(x)/y)`, `rho = y`.
//!
//! `chi` is built from its derivative: on the blend interval
//! `(1/3, 1 - 3^{-2m})`,
//! `chi' = b (1 - wl - wr) + wl + wr * chi2'` where `wl`, `wr` are flat
//! steps switching off the slope 1 of the left piece and switching on the
//! slope of `chi2(u) = 1 - (1-u)^{1/2m}`. The plateau `b` is solved so that
//! `chi` lands exactly on `chi2` and is at least 1/2, which gives
//! `chi' >= 1/2` everywhere.

use alloc::format;
use alloc::string::String;

use crate::domain::{BoundaryRelativePoint, DefiningFunction};
#[allow(unused_imports)]
use crate::math::*;
use crate::quadrature::{integrate, Hint, QuadratureConfig, Range, Scaling};
use crate::roots::{newton_bisect, solve_increasing};
use crate::{Error, Result};

const THIRD: f64 = 1.0 / 3.0;

/// Which half of `{y > f(x)}` a polar point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub tau: f64,
    pub rho: f64,
    pub branch: Branch,
}

impl PolarPoint {
    pub fn new(tau: f64, rho: f64, branch: Branch) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) || !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!("polar point needs 0 < tau <= 1 and rho > 0, got ({tau}, {rho})")));
        }
        Ok(PolarPoint { tau, rho, branch })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupChart {
    m: u32,
    /// `1 - u2 = 3^{-2m}`; the right window is handled in `v = 1 - u`
    v2: f64,
    eps_l: f64,
    eps_r: f64,
    plateau: f64,
    /// `int wl` over the left window
    il: f64,
    id: String,
}

fn quad_cfg() -> QuadratureConfig {
    QuadratureConfig { rel_tol: 1e-13, abs_tol: 1e-17, scaling: Scaling::Direct, ..QuadratureConfig::default() }
}

fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let abs_tol = 1e-17 * (b - a).min(1.0);
    let cfg = QuadratureConfig { abs_tol, ..quad_cfg() };
    Ok(integrate(f, Range::Finite(a, b), Hint::around(0.5 * (a + b), 0.25 * (b - a)), &cfg)?.value())
}

/// Builds the chart for flatness index `m`.
pub fn build_chi(m: u32) -> Result<BlowupChart> {
    BlowupChart::new(m)
}

impl BlowupChart {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("chart needs m >= 2, got {m}")));
        }
        let two_m = (2 * m) as f64;
        let v2 = (3.0f64).powi(-(2 * m as i32));
        let slack = 0.5 * v2;
        let d2_at_u2 = (3.0f64).powi(2 * m as i32 - 1) / two_m;
        let eps_l = slack;
        let eps_r = 0.5 * slack / d2_at_u2;
        if !(v2 + eps_r > v2) || !(eps_r > 0.0) {
            return Err(Error::Construction(format!("chi blend window underflows for m = {m}")));
        }
        let mut chart = BlowupChart { m, v2, eps_l, eps_r, plateau: f64::NAN, il: 0.0, id: String::new() };
        let len = 2.0 * THIRD - v2;
        let il = quad(|u| chart.wl(u), THIRD, THIRD + eps_l)?;
        let ir = quad(|v| chart.wr(v), v2, v2 + eps_r)?;
        let ir2 = quad(|v| chart.wr(v) * chart.chi2_prime_v(v), v2, v2 + eps_r)?;
        let b = (THIRD - il - ir2) / (len - il - ir);
        if !(b >= 0.5) {
            return Err(Error::Construction(format!("chi plateau slope {b} below 1/2 for m = {m}")));
        }
        chart.plateau = b;
        chart.il = il;
        chart.id = format!("chi:m={m}:deriv-blend:b={b:.15e}:el={eps_l:.6e}:er={eps_r:.6e}");
        chart.check_slope()?;
        Ok(chart)
    }

    fn check_slope(&self) -> Result<()> {
        for k in 0..=10_000 {
            let u = k as f64 / 10_000.0;
            let d = self.chi_prime(u);
            if !(d >= 0.5) {
                return Err(Error::Construction(format!("chi'({u}) = {d} < 1/2")));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Stable identifier recorded in every report.
    pub fn id(&self) -> &str {
        &self.id
    }

    /// `(1/3, 1 - 3^{-2m})`
    pub fn blend_interval(&self) -> (f64, f64) {
        (THIRD, 1.0 - self.v2)
    }

    fn wl(&self, u: f64) -> f64 {
        1.0 - flat_step((u - THIRD) / self.eps_l)[0]
    }

    /// right weight as a function of `v = 1 - u`
    fn wr(&self, v: f64) -> f64 {
        flat_step((self.v2 + self.eps_r - v) / self.eps_r)[0]
    }

    fn chi2_prime_v(&self, v: f64) -> f64 {
        let k = 1.0 / (2 * self.m) as f64;
        k * v.powf(k - 1.0)
    }

    fn blend_prime(&self, u: f64, v: f64) -> f64 {
        let wl = self.wl(u);
        let wr = self.wr(v);
        self.plateau * (1.0 - wl - wr) + wl + wr * self.chi2_prime_v(v)
    }

    pub fn chi(&self, u: f64) -> f64 {
        if u <= THIRD {
            return u;
        }
        self.chi_v(u, 1.0 - u.min(1.0))
    }

    /// `chi(1 - v)`, with `v` carried at full relative precision.
    pub fn chi_of_complement(&self, v: f64) -> f64 {
        self.chi_v(1.0 - v, v)
    }

    fn chi_v(&self, u: f64, v: f64) -> f64 {
        if v <= self.v2 {
            return 1.0 - v.max(0.0).powf(1.0 / (2 * self.m) as f64);
        }
        if u <= THIRD {
            return u;
        }
        let b = self.plateau;
        if u <= THIRD + self.eps_l {
            let part = quad(|s| self.wl(s), THIRD, u).unwrap_or(f64::NAN);
            THIRD + b * (u - THIRD) + (1.0 - b) * part
        } else if v >= self.v2 + self.eps_r {
            THIRD + b * (u - THIRD) + (1.0 - b) * self.il
        } else {
            let rest = quad(|w| self.blend_prime(1.0 - w, w), self.v2, v).unwrap_or(f64::NAN);
            2.0 * THIRD - rest
        }
    }

    pub fn chi_prime(&self, u: f64) -> f64 {
        if u <= THIRD {
            return 1.0;
        }
        let v = 1.0 - u.min(1.0);
        if v <= self.v2 {
            if v <= 0.0 {
                f64::INFINITY
            } else {
                self.chi2_prime_v(v)
            }
        } else {
            self.blend_prime(u, v)
        }
    }

    /// `chi^{-1}(tau)`
    pub fn chi_inverse(&self, tau: f64) -> f64 {
        if tau <= THIRD {
            return tau;
        }
        1.0 - self.one_minus_chi_inverse(tau)
    }

    /// `1 - chi^{-1}(tau)`, accurate as `tau -> 1`.
    pub fn one_minus_chi_inverse(&self, tau: f64) -> f64 {
        if tau <= THIRD {
            return 1.0 - tau;
        }
        if tau >= 2.0 * THIRD {
            return ipow((1.0 - tau).max(0.0), 2 * self.m);
        }
        // chi(1 - v) decreases in v on [v2, 2/3]
        newton_bisect(
            |v| (self.chi_v(1.0 - v, v) - tau, -self.chi_prime(1.0 - v).min(f64::MAX)),
            self.v2,
            2.0 * THIRD,
            1e-15,
            0.0,
        )
        .unwrap_or(f64::NAN)
    }
}

/// `(x, y) -> (tau, rho, sign x)`
pub fn to_polar(f: &DefiningFunction, chart: &BlowupChart, p: &BoundaryRelativePoint) -> Result<PolarPoint> {
    let fx = f.eval_f(p.x, 0);
    let gap = p.y - fx;
    if !(gap > 0.0) || !(p.y > 0.0) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y, gap });
    }
    let tau = chart.chi_of_complement(fx / p.y);
    Ok(PolarPoint { tau, rho: p.y, branch: if p.x < 0.0 { Branch::Minus } else { Branch::Plus } })
}

/// Inverse of [`to_polar`]: solves `f(x) = rho (1 - chi^{-1}(tau))` on the branch.
pub fn from_polar(f: &DefiningFunction, chart: &BlowupChart, q: &PolarPoint) -> Result<BoundaryRelativePoint> {
    if !(q.tau > 0.0 && q.tau <= 1.0) || !(q.rho > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid polar point ({}, {})", q.tau, q.rho)));
    }
    let level = q.rho * chart.one_minus_chi_inverse(q.tau);
    let dir = q.branch.sign();
    let x = if level <= 0.0 {
        0.0
    } else {
        // start the bracket at the tangent-model guess when available
        let step = if f.is_flat_type() {
            (level / f.g0()).powf(1.0 / (2 * f.m()) as f64)
        } else {
            level.sqrt().max(1e-300)
        };
        let r = solve_increasing(
            |r| {
                let j = f.f_jet(dir * r);
                (j[0], dir * j[1])
            },
            0.0,
            0.5 * step,
            level,
            1e-15,
        )?;
        dir * r
    };
    Ok(BoundaryRelativePoint { x, y: q.rho })
}

/// Membership in the admissible approach region `{tau > 1/alpha}`.
pub fn admissible_region_test(q: &PolarPoint, alpha: f64) -> bool {
    q.tau > 1.0 / alpha
}
