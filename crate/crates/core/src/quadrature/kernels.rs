//! Kernel evaluators on the diagonal.
//!
//! Direct form, in sector coordinates `z1 = s e`, `z2 = e`:
//!
//! `K(x, y) = (4 pi)^-2 int ds int_0^inf e^p exp(-e (y + x s)) / D(s e, e) de`
//!
//! with `p = 2` for the Bergman kernel and `p = 1` for the Szegő kernel and
//! `D(z1, z2) = int exp(-xi z1 - f(xi) z2) dxi`. For fixed `s` the peak of
//! the `D` integrand sits at `xi*` with `f'(xi*) = -s` for every `e`, so it
//! is solved once per `s`. All three levels are log-scaled.

use alloc::format;
use core::cell::{Cell, RefCell};

use super::{integrate_log, integrate_log_signed, Hint, LogIntegral, QuadratureConfig, Range};
use crate::domain::{BoundaryRelativePoint, DefiningFunction, DualCone};
#[allow(unused_imports)]
use crate::math::*;
use crate::roots::solve_increasing;
use crate::{Error, Result};

const INNER_TOL: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Bergman,
    Szego,
}

impl KernelKind {
    /// Power of `z2` in the frequency integrand.
    pub fn weight_power(self) -> i32 {
        match self {
            KernelKind::Bergman => 2,
            KernelKind::Szego => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Bergman => "bergman",
            KernelKind::Szego => "szego",
        }
    }
}

impl core::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bergman" => Ok(KernelKind::Bergman),
            "szego" => Ok(KernelKind::Szego),
            _ => Err(Error::InvalidArgument(format!("unknown kernel kind {s:?} (bergman or szego)"))),
        }
    }
}

/// A kernel value carried as a logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub log_value: f64,
    /// `exp(log_value)`, or infinity when not representable.
    pub value: f64,
    /// Relative error estimate.
    pub err_estimate: f64,
    pub evaluations: usize,
    pub kind: KernelKind,
}

impl KernelValue {
    fn from_log(log_value: f64, err_estimate: f64, evaluations: usize, kind: KernelKind) -> Self {
        KernelValue { log_value, value: log_value.exp(), err_estimate: err_estimate.max(0.0), evaluations, kind }
    }
}

/// Signed kernel difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDifference {
    pub value: f64,
    pub log_abs: f64,
    pub sign: f64,
    /// Error estimate relative to `|value|`.
    pub err_estimate: f64,
    pub evaluations: usize,
    pub kind: KernelKind,
}

fn log_prefactor() -> f64 {
    -2.0 * (4.0 * PI).ln()
}

/// Solves `f'(xi) = slope`; fails with `OutsideCone` when the slope is not attained.
pub fn conjugate_point(f: &DefiningFunction, slope: f64) -> Result<f64> {
    let d0 = f.eval_f(0.0, 1) - slope;
    if d0 == 0.0 {
        return Ok(0.0);
    }
    let dir = if d0 < 0.0 { 1.0 } else { -1.0 };
    let step = if f.is_flat_type() {
        let n = (2 * f.m()) as f64;
        (slope.abs() / (n * f.g0())).powf(1.0 / (n - 1.0)).max(1e-300)
    } else {
        slope.abs().max(1e-3)
    };
    solve_increasing(
        |r| {
            let j = f.f_jet(dir * r);
            (dir * j[1], j[2])
        },
        0.0,
        step,
        dir * slope,
        1e-15,
    )
    .map(|r| dir * r)
    .map_err(|_| Error::OutsideCone { zeta1: -slope, zeta2: 1.0 })
}

/// Width of `exp(-e (f(xi) - tangent))` around `xi`.
fn xi_width(f: &DefiningFunction, xi: f64, e: f64) -> f64 {
    let c = f.eval_f(xi, 2);
    let quad = if c > 0.0 { 1.0 / (e * c).sqrt() } else { f64::INFINITY };
    let flat = if f.is_flat_type() {
        (e * f.g0()).powf(-1.0 / (2 * f.m()) as f64)
    } else {
        1.0 / e.sqrt()
    };
    quad.min(flat)
}

/// `ln int exp(-e (s (xi - xi*) + f(xi) - f(xi*))) dxi`, the tangent-reduced
/// `D(s e, e)`; `ln D = -e (s xi* + f(xi*)) + reduced`.
fn log_d_reduced(f: &DefiningFunction, s: f64, xi_star: f64, f_star: f64, e: f64, cfg: &QuadratureConfig) -> Result<LogIntegral> {
    let w = xi_width(f, xi_star, e);
    integrate_log(
        |xi| -e * (s * (xi - xi_star) + f.eval_f(xi, 0) - f_star),
        Range::Line,
        Hint::peak(xi_star, w),
        cfg,
    )
}

/// `ln D(z1, z2)` with its relative error.
pub fn compute_d(f: &DefiningFunction, zeta1: f64, zeta2: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let cone = f.dual_cone()?;
    if !cone.contains(zeta1, zeta2) {
        return Err(Error::OutsideCone { zeta1, zeta2 });
    }
    let s = zeta1 / zeta2;
    let xi = conjugate_point(f, -s).map_err(|_| Error::OutsideCone { zeta1, zeta2 })?;
    let fx = f.eval_f(xi, 0);
    let r = log_d_reduced(f, s, xi, fx, zeta2, cfg)?;
    Ok((-zeta2 * (s * xi + fx) + r.log_abs, r.rel_err))
}

/// Tracks the worst inner error and the first inner failure of a nested integral.
struct Nest {
    worst: Cell<f64>,
    evals: Cell<usize>,
    failure: RefCell<Option<Error>>,
}

impl Nest {
    fn new() -> Self {
        Nest { worst: Cell::new(0.0), evals: Cell::new(0), failure: RefCell::new(None) }
    }

    fn take(&self, r: Result<LogIntegral>) -> (f64, f64) {
        match r {
            Ok(v) => {
                self.evals.set(self.evals.get() + v.evaluations);
                if v.rel_err > self.worst.get() {
                    self.worst.set(v.rel_err);
                }
                (v.log_abs, v.sign)
            }
            Err(e) => {
                let mut slot = self.failure.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                (f64::NEG_INFINITY, 0.0)
            }
        }
    }

    fn absorb(&self, other: &Nest) {
        self.evals.set(self.evals.get() + other.evals.get());
        if other.worst.get() > self.worst.get() {
            self.worst.set(other.worst.get());
        }
        if let Some(e) = other.failure.borrow_mut().take() {
            let mut slot = self.failure.borrow_mut();
            if slot.is_none() {
                *slot = Some(e);
            }
        }
    }

    fn finish(self, outer: Result<LogIntegral>) -> Result<(LogIntegral, f64)> {
        if let Some(e) = self.failure.into_inner() {
            return Err(e);
        }
        let mut o = outer?;
        o.evaluations += self.evals.get();
        let worst = self.worst.get();
        Ok((o, worst))
    }
}

fn outer_hint(f: &DefiningFunction, p: &BoundaryRelativePoint, gap: f64) -> Hint {
    let [_, d1, d2] = f.f_jet(p.x);
    let mut scale = (2.0 * d2.max(0.0) * gap).sqrt();
    scale += if f.is_flat_type() {
        f.g0().powf(1.0 / (2 * f.m()) as f64) * gap.powf(1.0 - 1.0 / (2 * f.m()) as f64)
    } else {
        gap
    };
    Hint::around(-d1, scale.max(1e-300))
}

fn sector_range(cone: &DualCone) -> Range {
    Range::between(-cone.r_minus, cone.r_plus)
}

/// Per-sector data: tangent point and the `e`-decay rate `y + x s - (s xi* + f(xi*))`.
struct Sector {
    xi: f64,
    f_xi: f64,
    rate: f64,
}

fn sector(f: &DefiningFunction, p: &BoundaryRelativePoint, gap: f64, s: f64) -> Result<Sector> {
    let xi = conjugate_point(f, -s)?;
    let f_xi = f.eval_f(xi, 0);
    // y + x s - s xi - f(xi) = gap + [f(x) - f(xi) + s (x - xi)], the bracket being >= 0
    let breg = (f.eval_f(p.x, 0) - f_xi + s * (p.x - xi)).max(0.0);
    Ok(Sector { xi, f_xi, rate: gap + breg })
}

fn direct(f: &DefiningFunction, p: &BoundaryRelativePoint, kind: KernelKind, cfg: &QuadratureConfig) -> Result<KernelValue> {
    cfg.validate()?;
    let gap = p.gap(f);
    if !(gap > 0.0) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y, gap });
    }
    let cone = f.dual_cone()?;
    let pw = kind.weight_power() as f64;
    let eta_cfg = cfg.inner(INNER_TOL);
    let d_cfg = eta_cfg.inner(INNER_TOL);
    let outer_nest = Nest::new();
    let outer = integrate_log_signed(
        |s| {
            let sec = match sector(f, p, gap, s) {
                Ok(v) => v,
                Err(Error::OutsideCone { .. }) => return (f64::NEG_INFINITY, 0.0),
                Err(e) => return outer_nest.take(Err(e)),
            };
            let nest = Nest::new();
            let peak = (pw + 0.5) / sec.rate;
            let r = integrate_log(
                |e| {
                    if !(e > 0.0) {
                        return f64::NEG_INFINITY;
                    }
                    let (ld, _) = nest.take(log_d_reduced(f, s, sec.xi, sec.f_xi, e, &d_cfg));
                    pw * e.ln() - e * sec.rate - ld
                },
                Range::From(0.0),
                Hint::around(peak, 0.5 * peak),
                &eta_cfg,
            );
            outer_nest.absorb(&nest);
            outer_nest.take(r)
        },
        sector_range(&cone),
        outer_hint(f, p, gap),
        cfg,
    );
    let (o, inner_err) = outer_nest.finish(outer)?;
    Ok(KernelValue::from_log(o.log_abs + log_prefactor(), o.rel_err + inner_err, o.evaluations, kind))
}

/// Bergman kernel on the diagonal by direct quadrature.
pub fn bergman_direct(f: &DefiningFunction, p: &BoundaryRelativePoint, cfg: &QuadratureConfig) -> Result<KernelValue> {
    direct(f, p, KernelKind::Bergman, cfg)
}

/// Szegő kernel on the diagonal by direct quadrature.
pub fn szego_direct(f: &DefiningFunction, p: &BoundaryRelativePoint, cfg: &QuadratureConfig) -> Result<KernelValue> {
    direct(f, p, KernelKind::Szego, cfg)
}

pub fn kernel_direct(f: &DefiningFunction, p: &BoundaryRelativePoint, kind: KernelKind, cfg: &QuadratureConfig) -> Result<KernelValue> {
    direct(f, p, kind, cfg)
}

/// `ln phi(v, u) = ln int exp(v w - u^{2m} f(w / (k u))) dw` with `k = g(0)^{1/2m}`,
/// written through `g^ = g/g(0)` as `exp(v w - g^(w/(k u)) w^{2m})`.
pub fn log_phi_hat(f: &DefiningFunction, v: f64, u: f64, cfg: &QuadratureConfig) -> Result<LogIntegral> {
    let (m, g0) = flat_params(f)?;
    let k = g0.powf(1.0 / (2 * m) as f64);
    let ku = k * u;
    let u2m = ipow(u, 2 * m);
    // tangent point: f'(w/(ku)) = k v u^{1-2m}
    let xi = conjugate_point(f, k * v * u / u2m)?;
    let w_star = ku * xi;
    let phase = |w: f64| {
        let g = f.g_jet(w / ku).map(|j| j[0]).unwrap_or(f64::NAN) / g0;
        v * w - g * ipow(w, 2 * m)
    };
    let top = phase(w_star);
    let c = f.eval_f(xi, 2) * u2m / (ku * ku);
    let width = if c > 0.0 { (1.0 / c).sqrt().min(1.0) } else { 1.0 };
    let mut r = integrate_log(|w| phase(w) - top, Range::Line, Hint::peak(w_star, width), cfg)?;
    r.log_abs += top;
    Ok(r)
}

fn flat_params(f: &DefiningFunction) -> Result<(u32, f64)> {
    if !f.is_flat_type() {
        return Err(Error::InvalidDefiningFunction("normalized representation needs f = x^{2m} g".into()));
    }
    Ok((f.m(), f.g0()))
}

/// `ln P(x, u) = ln int exp(k x u v) / phi(v, u) dv`.
pub fn log_p(f: &DefiningFunction, x: f64, u: f64, cfg: &QuadratureConfig) -> Result<(LogIntegral, f64)> {
    let (m, g0) = flat_params(f)?;
    let k = g0.powf(1.0 / (2 * m) as f64);
    let cone = f.dual_cone()?;
    let lift = ipow(u, 2 * m - 1) / k;
    // v ranges over the cone image: z1 = -k u v, z2 = u^{2m}
    let range = Range::between(-cone.r_plus * lift, cone.r_minus * lift);
    let [_, d1, d2] = f.f_jet(x);
    let center = d1 * lift;
    let scale = (d2.max(0.0) * ipow(u, 2 * m - 2)).sqrt() / k;
    let inner = cfg.inner(INNER_TOL);
    let nest = Nest::new();
    let r = integrate_log_signed(
        |v| {
            let (lphi, s) = nest.take(log_phi_hat(f, v, u, &inner));
            if s == 0.0 {
                return (f64::NEG_INFINITY, 0.0);
            }
            (k * x * u * v - lphi, 1.0)
        },
        range,
        Hint::around(center, scale.max(0.5)),
        cfg,
    );
    nest.finish(r)
}

/// The normalized representation `K^`: the `u >= 1` part of the Bergman
/// frequency integral after `z2 = u^{2m}`, `z1 = -g(0)^{1/2m} u v`.
pub fn bergman_normalized(f: &DefiningFunction, p: &BoundaryRelativePoint, cfg: &QuadratureConfig) -> Result<KernelValue> {
    cfg.validate()?;
    let (m, g0) = flat_params(f)?;
    let gap = p.gap(f);
    if !(gap > 0.0) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y, gap });
    }
    let two_m = 2 * m;
    let lead = ((two_m as f64) * g0.powf(1.0 / m as f64)).ln() + log_prefactor();
    let inner = cfg.inner(INNER_TOL);
    let nest = Nest::new();
    // integrand ~ u^{4m+1} exp(-gap u^{2m}) (times slowly varying factors)
    let peak = (((4 * m + 2) as f64) / (two_m as f64 * gap)).powf(1.0 / two_m as f64).max(1.0);
    let r = integrate_log_signed(
        |u| {
            let (lp, _) = match log_p(f, p.x, u, &inner) {
                Ok((v, worst)) => {
                    let (l, s) = nest.take(Ok(v));
                    if worst > nest.worst.get() {
                        nest.worst.set(worst);
                    }
                    (l, s)
                }
                Err(e) => nest.take(Err(e)),
            };
            (-p.y * ipow(u, two_m) + ((4 * m + 1) as f64) * u.ln() + lp, 1.0)
        },
        Range::From(1.0),
        Hint::around(peak, 0.25 * peak),
        cfg,
    );
    let (o, inner_err) = nest.finish(r)?;
    Ok(KernelValue::from_log(o.log_abs + lead, o.rel_err + inner_err, o.evaluations, KernelKind::Bergman))
}

/// `K_{f1} - K_{f2}` for profiles equal on `|xi| < a`, evaluated without
/// cancellation: `1/D1 - 1/D2 = (D2 - D1) / (D1 D2)` with `D2 - D1` integrated
/// over `|xi| >= a` only.
pub fn kernel_difference(
    f1: &DefiningFunction,
    f2: &DefiningFunction,
    a: f64,
    p: &BoundaryRelativePoint,
    kind: KernelKind,
    cfg: &QuadratureConfig,
) -> Result<KernelDifference> {
    // canonical order so that swapping the arguments negates bit for bit
    if f1.describe() > f2.describe() {
        let mut d = kernel_difference(f2, f1, a, p, kind, cfg)?;
        d.value = -d.value;
        d.sign = -d.sign;
        return Ok(d);
    }
    cfg.validate()?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("agreement radius must be positive, got {a}")));
    }
    let gap1 = p.gap(f1);
    if f1.describe() == f2.describe() {
        if !(gap1 > 0.0) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y, gap: gap1 });
        }
        return Ok(KernelDifference { value: 0.0, log_abs: f64::NEG_INFINITY, sign: 0.0, err_estimate: 0.0, evaluations: 0, kind });
    }
    let gap2 = p.gap(f2);
    if !(gap1 > 0.0) || !(gap2 > 0.0) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y, gap: gap1.min(gap2) });
    }
    let c1 = f1.dual_cone()?;
    let c2 = f2.dual_cone()?;
    let pw = kind.weight_power() as f64;
    let eta_cfg = cfg.inner(INNER_TOL);
    let d_cfg = eta_cfg.inner(INNER_TOL);
    let outer_nest = Nest::new();
    let offset = f2.offset_from(f1);

    let integrand = |s: f64| -> (f64, f64) {
        let in1 = s > -c1.r_minus && s < c1.r_plus;
        let in2 = s > -c2.r_minus && s < c2.r_plus;
        let sec1 = if in1 { sector(f1, p, gap1, s).ok() } else { None };
        let sec2 = if in2 { sector(f2, p, gap2, s).ok() } else { None };
        let nest = Nest::new();
        let r = match (sec1, sec2) {
            (None, None) => return (f64::NEG_INFINITY, 0.0),
            (Some(a1), None) => {
                let peak = (pw + 0.5) / a1.rate;
                integrate_log(
                    |e| if e > 0.0 { pw * e.ln() - e * a1.rate - nest.take(log_d_reduced(f1, s, a1.xi, a1.f_xi, e, &d_cfg)).0 } else { f64::NEG_INFINITY },
                    Range::From(0.0),
                    Hint::around(peak, 0.5 * peak),
                    &eta_cfg,
                )
            }
            (None, Some(a2)) => {
                let peak = (pw + 0.5) / a2.rate;
                integrate_log(
                    |e| if e > 0.0 { pw * e.ln() - e * a2.rate - nest.take(log_d_reduced(f2, s, a2.xi, a2.f_xi, e, &d_cfg)).0 } else { f64::NEG_INFINITY },
                    Range::From(0.0),
                    Hint::around(peak, 0.5 * peak),
                    &eta_cfg,
                )
                .map(|mut v| {
                    v.sign = -v.sign;
                    v
                })
            }
            (Some(a1), Some(a2)) => {
                // common reference: ln D_j = -e t_j + reduced_j with t_j = s xi_j + f_j(xi_j)
                let t1 = s * a1.xi + a1.f_xi;
                let t2 = s * a2.xi + a2.f_xi;
                let rate = a1.rate.min(a2.rate);
                let peak = (pw + 0.5) / rate;
                let edge1 = (s + c1.r_minus).min(c1.r_plus - s);
                let edge2 = (s + c2.r_minus).min(c2.r_plus - s);
                let negligible = (1e-3 * d_cfg.rel_tol).ln();
                integrate_log_signed(
                    |e| {
                        if !(e > 0.0) {
                            return (f64::NEG_INFINITY, 0.0);
                        }
                        let y_xs = p.y + p.x * s;
                        // by convexity D_j >= exp(-e t_j) / (e edge_j); near a cone edge one
                        // reciprocal is then negligible and the tail difference is never formed
                        for (fj, aj, tj, t_other, edge_other, sign) in [(f1, &a1, t1, t2, edge2, 1.0), (f2, &a2, t2, t1, edge1, -1.0)] {
                            let lower_other = -e * t_other - (e * edge_other).ln();
                            if lower_other + e * tj < -negligible {
                                continue;
                            }
                            let (rj, _) = nest.take(log_d_reduced(fj, s, aj.xi, aj.f_xi, e, &d_cfg));
                            let ln_dj = rj - e * tj;
                            let ratio = ln_dj - lower_other;
                            if ratio < negligible {
                                nest.worst.set(nest.worst.get().max(ratio.exp()));
                                return (pw * e.ln() - e * y_xs - ln_dj, sign);
                            }
                        }
                        let (dd, sg) = nest.take(log_tail_difference(f1, f2, &*offset, a, s, e, t1, &d_cfg));
                        if sg == 0.0 {
                            return (f64::NEG_INFINITY, 0.0);
                        }
                        let (r1, _) = nest.take(log_d_reduced(f1, s, a1.xi, a1.f_xi, e, &d_cfg));
                        let (r2, _) = nest.take(log_d_reduced(f2, s, a2.xi, a2.f_xi, e, &d_cfg));
                        // e^p exp(-e(y + x s)) (D2 - D1) / (D1 D2), with D2 - D1 scaled by exp(e t1)
                        let l = pw * e.ln() - e * y_xs + (dd - e * t1) - (r1 - e * t1) - (r2 - e * t2);
                        if !l.is_finite() {
                            return (f64::NEG_INFINITY, 0.0);
                        }
                        (l, sg)
                    },
                    Range::From(0.0),
                    Hint::around(peak, 0.5 * peak),
                    &eta_cfg,
                )
            }
        };
        outer_nest.absorb(&nest);
        outer_nest.take(r)
    };

    // split the sector range at the edges of the smaller cone
    let lo = -c1.r_minus.max(c2.r_minus);
    let hi = c1.r_plus.max(c2.r_plus);
    let inner_lo = -c1.r_minus.min(c2.r_minus);
    let inner_hi = c1.r_plus.min(c2.r_plus);
    let hint = outer_hint(f1, p, gap1);
    let mut pieces = alloc::vec::Vec::new();
    pieces.push((Range::between(inner_lo, inner_hi), hint));
    if inner_lo > lo {
        pieces.push((Range::between(lo, inner_lo), Hint::around(inner_lo - 1.0, 1.0)));
    }
    if inner_hi < hi {
        pieces.push((Range::between(inner_hi, hi), Hint::around(inner_hi + 1.0, 1.0)));
    }
    let mut acc = (f64::NEG_INFINITY, 0.0);
    let mut abs_err_log = f64::NEG_INFINITY;
    let mut evals = 0;
    for (range, hint) in pieces {
        let r = integrate_log_signed(integrand, range, hint, cfg);
        match r {
            Ok(v) => {
                evals += v.evaluations;
                if v.sign != 0.0 {
                    acc = signed_log_add(acc.0, acc.1, v.log_abs, v.sign);
                    abs_err_log = log_add_exp(abs_err_log, v.log_abs + v.rel_err.max(1e-300).ln());
                }
            }
            Err(e) => {
                outer_nest.take(Err(e));
            }
        }
    }
    if let Some(e) = outer_nest.failure.into_inner() {
        return Err(e);
    }
    evals += outer_nest.evals.get();
    let inner_err = outer_nest.worst.get();
    let (log_abs, sign) = acc;
    let rel = if sign == 0.0 { 0.0 } else { (abs_err_log - log_abs).exp() + inner_err };
    let log_abs = log_abs + log_prefactor();
    Ok(KernelDifference {
        value: if sign == 0.0 { 0.0 } else { sign * log_abs.exp() },
        log_abs,
        sign,
        err_estimate: rel,
        evaluations: evals,
        kind,
    })
}

/// `ln |D2 - D1| + e t` and its sign, from
/// `int_{|xi| >= a} exp(-e F1) expm1(-e (F2 - F1)) dxi` with `F_j = s xi + f_j(xi)`.
#[allow(clippy::too_many_arguments)]
fn log_tail_difference(
    f1: &DefiningFunction,
    f2: &DefiningFunction,
    offset: &dyn Fn(f64) -> f64,
    a: f64,
    s: f64,
    e: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<LogIntegral> {
    let mut total = (f64::NEG_INFINITY, 0.0);
    let mut err_log = f64::NEG_INFINITY;
    let mut evals = 0;
    for dir in [1.0, -1.0] {
        let log_h = |xi: f64| -> (f64, f64) {
            let df = offset(xi);
            if e * df < -1.0 {
                // exp(-e F1) expm1(-e dF) = exp(-e F2) (1 - exp(e dF)), without the
                // cancellation between a huge -e F1 and a huge ln expm1
                return (-e * (s * xi + f2.eval_f(xi, 0) - t) + (-(e * df).exp_m1()).ln(), 1.0);
            }
            let d = (-e * df).exp_m1();
            if d == 0.0 || !d.is_finite() {
                return (f64::NEG_INFINITY, 0.0);
            }
            (-e * (s * xi + f1.eval_f(xi, 0) - t) + d.abs().ln(), d.signum())
        };
        // start near the tangent point of the tail that decays slower
        let start = match (conjugate_point(f2, -s), conjugate_point(f1, -s)) {
            (Ok(x2), _) if x2 * dir > a => x2,
            (_, Ok(x1)) if x1 * dir > a => x1,
            _ => dir * a * 1.5,
        };
        let range = if dir > 0.0 { Range::From(a) } else { Range::UpTo(-a) };
        let w = xi_width(f2, start, e).max(xi_width(f1, start, e));
        let r = integrate_log_signed(log_h, range, Hint::around(start, w), cfg)?;
        evals += r.evaluations;
        if r.sign != 0.0 {
            total = signed_log_add(total.0, total.1, r.log_abs, r.sign);
            err_log = log_add_exp(err_log, r.log_abs + r.rel_err.max(1e-300).ln());
        }
    }
    if total.1 == 0.0 {
        return Ok(LogIntegral::zero(evals));
    }
    Ok(LogIntegral { log_abs: total.0, sign: total.1, rel_err: (err_log - total.0).exp(), evaluations: evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{mollify, tail_modify, Monomial, TailSlope};
    use alloc::sync::Arc;

    fn quadratic() -> DefiningFunction {
        DefiningFunction::general_convex(Arc::new(Monomial { coef: 1.0, power: 2 }), TailSlope::Infinite, TailSlope::Infinite)
            .unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn d_gaussian_closed_form() {
        let f = quadratic();
        let (l, err) = compute_d(&f, 2.0, 1.0, &cfg()).unwrap();
        assert!((l.exp() - 4.818_029_094_698_72).abs() < 1e-7);
        assert!((l - (0.5 * PI.ln() + 1.0)).abs() < 1e-9);
        assert!(err < 1e-8);
    }

    #[test]
    fn d_quartic_scaling() {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        let (l1, _) = compute_d(&f, 0.0, 1.0, &cfg()).unwrap();
        let (l16, _) = compute_d(&f, 0.0, 16.0, &cfg()).unwrap();
        assert!((l1.exp() - 1.812_804_954_110_954).abs() < 1e-8);
        assert!((l16.exp() - 0.906_402_477_055_477).abs() < 1e-8);
    }

    #[test]
    fn d_outside_cone_is_domain_error() {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        let e = compute_d(&f, 1.0, -1.0, &cfg()).unwrap_err();
        assert!(matches!(e, Error::OutsideCone { .. }) && e.is_domain());
    }

    #[test]
    fn quadratic_kernels_closed_form() {
        // tube over y > x^2: K = 1/(4 pi^2 gap^3), S = 1/(8 pi^2 gap^2)
        let f = quadratic();
        for &(x, y) in &[(0.0, 1.0), (0.7, 1.0), (-1.2, 1.5)] {
            let p = BoundaryRelativePoint::new(&f, x, y).unwrap();
            let gap: f64 = y - x * x;
            let k = bergman_direct(&f, &p, &cfg()).unwrap();
            let s = szego_direct(&f, &p, &cfg()).unwrap();
            let kk = 1.0 / (4.0 * PI * PI * gap.powi(3));
            let ss = 1.0 / (8.0 * PI * PI * gap.powi(2));
            assert!((k.value / kk - 1.0).abs() < 1e-7, "K at ({x},{y}): {} vs {kk}", k.value);
            assert!((s.value / ss - 1.0).abs() < 1e-7, "S at ({x},{y}): {} vs {ss}", s.value);
            assert!(k.err_estimate < 1e-6);
        }
    }

    #[test]
    fn model_homogeneity() {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        let c = cfg();
        let k1 = bergman_direct(&f, &BoundaryRelativePoint::new(&f, 0.0, 1.0).unwrap(), &c).unwrap();
        let k2 = bergman_direct(&f, &BoundaryRelativePoint::new(&f, 0.0, 0.5).unwrap(), &c).unwrap();
        assert!(k1.value > 0.0 && k1.value.is_finite());
        assert!(((k2.log_value - k1.log_value) - 2.5 * 2f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn normalized_phi_at_origin() {
        let f = mollify(&DefiningFunction::model(2, 1.0).unwrap(), 0.05).unwrap();
        // u -> inf makes X = 1/u -> 0: phi(0, X) -> 2 Gamma(5/4)
        let r = log_phi_hat(&f, 0.0, 1e6, &cfg()).unwrap();
        assert!((r.log_abs.exp() - 1.812_804_954_110_954).abs() < 1e-7);
    }

    #[test]
    fn normalized_p_symmetry() {
        let f = mollify(&DefiningFunction::model(2, 1.0).unwrap(), 0.05).unwrap();
        let (a, _) = log_p(&f, 0.03, 2.0, &cfg()).unwrap();
        let (b, _) = log_p(&f, -0.03, 2.0, &cfg()).unwrap();
        assert!((a.log_abs - b.log_abs).abs() < 1e-8);
    }

    #[test]
    fn normalized_close_to_direct() {
        let f = mollify(&DefiningFunction::model(2, 1.0).unwrap(), 0.05).unwrap();
        let p = BoundaryRelativePoint::new(&f, 0.0, 0.01).unwrap();
        let c = QuadratureConfig::with_rel_tol(1e-9);
        let kd = bergman_direct(&f, &p, &c).unwrap();
        let kn = bergman_normalized(&f, &p, &c).unwrap();
        assert!(kn.value < kd.value);
        // the missing u < 1 piece is O(1) while K itself is ~ 1e4
        assert!(kd.value - kn.value < 1.0, "{} {}", kd.value, kn.value);
    }

    #[test]
    fn difference_antisymmetric_and_zero() {
        let f1 = DefiningFunction::model(2, 1.0).unwrap();
        let f2 = tail_modify(&f1, 0.5, 1.0).unwrap();
        let p = BoundaryRelativePoint::new(&f1, 0.0, 0.25).unwrap();
        let c = cfg();
        let d12 = kernel_difference(&f1, &f2, 0.5, &p, KernelKind::Bergman, &c).unwrap();
        let d21 = kernel_difference(&f2, &f1, 0.5, &p, KernelKind::Bergman, &c).unwrap();
        assert_eq!(d12.value, -d21.value);
        let k1 = bergman_direct(&f1, &p, &c).unwrap();
        let k2 = bergman_direct(&f2, &p, &c).unwrap();
        let naive = k1.value - k2.value;
        assert!((d12.value - naive).abs() < 1e-6 * k1.value, "{} vs {}", d12.value, naive);
        let z = kernel_difference(&f1, &f1, 0.5, &p, KernelKind::Bergman, &c).unwrap();
        assert_eq!(z.value, 0.0);
    }
}
