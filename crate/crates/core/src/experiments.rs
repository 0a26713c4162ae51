//! Boundary-approach studies: exponent fits, boundary limits of the
//! rescaled kernel, the strictly pseudoconvex limit, localization and
//! coefficient sweeps over the admissible region.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Rational64;

use crate::asymptotics::blowup_exponent;
use crate::blowup::{from_polar, to_polar, BlowupChart, Branch, PolarPoint};
use crate::domain::{BoundaryRelativePoint, DefiningFunction};
#[allow(unused_imports)]
use crate::math::*;
use crate::quadrature::{kernel_difference, kernel_direct, KernelDifference, KernelKind, KernelValue, QuadratureConfig};
use crate::roots::brent_max;
use crate::{Error, Result};

/// Runs independent point evaluations; results come back in index order.
pub trait Runner {
    fn map<R, F>(&self, n: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync;
}

/// Evaluates points one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Runner for Sequential {
    fn map<R, F>(&self, n: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync,
    {
        (0..n).map(job).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ApproachMode {
    /// `rho -> 0` at fixed `tau`, on the `x >= 0` branch.
    FixedTau(f64),
    /// `y -> f(x)` at fixed `x != 0`; `rho` is the vertical gap.
    FixedX(f64),
    /// `x = kappa rho`, `y = f(x) + rho`: non-tangential approach to the origin.
    NormalCone(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproachPath {
    pub mode: ApproachMode,
    pub rho_grid: Vec<f64>,
}

impl ApproachPath {
    /// `rho_k = rho0 ratio^k`, `k < n`.
    pub fn geometric(mode: ApproachMode, rho0: f64, ratio: f64, n: usize) -> Result<Self> {
        if !(rho0 > 0.0 && ratio > 0.0 && ratio < 1.0) || n == 0 {
            return Err(Error::InvalidArgument(format!("bad geometric grid rho0={rho0} ratio={ratio} n={n}")));
        }
        let rho_grid = (0..n).map(|k| rho0 * ratio.powi(k as i32)).collect();
        Ok(ApproachPath { mode, rho_grid })
    }

    /// `1, 1/2, ..., 2^{-14}`.
    pub fn default_grid(mode: ApproachMode) -> Self {
        Self::geometric(mode, 1.0, 0.5, 15).expect("valid default grid")
    }

    pub fn points(&self, f: &DefiningFunction, chart: &BlowupChart) -> Result<Vec<BoundaryRelativePoint>> {
        self.rho_grid
            .iter()
            .map(|&rho| match self.mode {
                ApproachMode::FixedTau(tau) => from_polar(f, chart, &PolarPoint::new(tau, rho, Branch::Plus)?),
                ApproachMode::FixedX(x) => {
                    if x == 0.0 {
                        return Err(Error::InvalidArgument("fixed-x approach needs x != 0".into()));
                    }
                    BoundaryRelativePoint::new(f, x, f.eval_f(x, 0) + rho)
                }
                ApproachMode::NormalCone(kappa) => {
                    let x = kappa * rho;
                    BoundaryRelativePoint::new(f, x, f.eval_f(x, 0) + rho)
                }
            })
            .collect()
    }
}

/// Blow-up exponent expected along a path: the weakly pseudoconvex one at
/// the origin, `n + 1 = 3` (Bergman) or `2` (Szegő) at a strictly
/// pseudoconvex boundary point.
pub fn path_exponent(m: u32, kind: KernelKind, mode: ApproachMode) -> Rational64 {
    match (mode, kind) {
        (ApproachMode::FixedX(_), KernelKind::Bergman) => Rational64::from_integer(3),
        (ApproachMode::FixedX(_), KernelKind::Szego) => Rational64::from_integer(2),
        _ => blowup_exponent(m, kind),
    }
}

/// Which grid points enter a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    Trailing(usize),
    /// Half-open index range.
    Range(usize, usize),
    All,
}

impl WindowPolicy {
    fn resolve(self, n: usize) -> Result<(usize, usize)> {
        let (a, b) = match self {
            WindowPolicy::Trailing(k) => (n.saturating_sub(k), n),
            WindowPolicy::Range(a, b) => (a, b),
            WindowPolicy::All => (0, n),
        };
        if a >= b || b > n || b - a < 2 {
            return Err(Error::InvalidArgument(format!("fit window [{a}, {b}) invalid for {n} points")));
        }
        Ok((a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub window: (usize, usize),
}

/// Least-squares line through `(ln rho, log_value)` over the window.
pub fn fit_log_log(log_values: &[f64], rho_grid: &[f64], policy: WindowPolicy) -> Result<FitResult> {
    if log_values.len() != rho_grid.len() {
        return Err(Error::InvalidArgument(format!("{} values for {} grid points", log_values.len(), rho_grid.len())));
    }
    if rho_grid.len() < 6 {
        return Err(Error::InvalidArgument(format!("need at least 6 grid points, got {}", rho_grid.len())));
    }
    let (a, b) = policy.resolve(rho_grid.len())?;
    let xs: Vec<f64> = rho_grid[a..b].iter().map(|r| r.ln()).collect();
    let ys = &log_values[a..b];
    if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite value in fit window".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("grid has no spread in the fit window".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    Ok(FitResult { slope, intercept, max_residual, window: (a, b) })
}

/// Fits `ln K` against `ln rho`; the slope estimates minus the blow-up exponent.
pub fn fit_exponent(values: &[KernelValue], rho_grid: &[f64], policy: WindowPolicy) -> Result<FitResult> {
    let logs: Vec<f64> = values.iter().map(|v| v.log_value).collect();
    fit_log_log(&logs, rho_grid, policy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct C0Estimate {
    pub estimate: f64,
    /// Relative change between the last two extrapolants.
    pub indicator: f64,
    pub converged: bool,
    /// `K rho^{exponent}` along the grid.
    pub sequence: Vec<f64>,
}

fn exponent_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Limit of `K rho^{2+1/m}` (or `S rho^{1+1/m}`) on a geometric grid,
/// Richardson-extrapolated against a leading `rho^{1/m}` correction.
pub fn limit_c0(values: &[KernelValue], rho_grid: &[f64], m: u32, kind: KernelKind, tol: f64) -> Result<C0Estimate> {
    if values.len() != rho_grid.len() || values.len() < 3 {
        return Err(Error::InvalidArgument("limit_c0 needs at least three matching values".into()));
    }
    let e = exponent_f64(blowup_exponent(m, kind));
    let sequence: Vec<f64> = values.iter().zip(rho_grid).map(|(v, r)| (v.log_value + e * r.ln()).exp()).collect();
    if sequence.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite rescaled kernel value".into()));
    }
    let n = sequence.len();
    let q = rho_grid[n - 2] / rho_grid[n - 1];
    let g = q.powf(1.0 / m as f64);
    let rich = |i: usize| (g * sequence[i + 1] - sequence[i]) / (g - 1.0);
    let last = rich(n - 2);
    let prev = rich(n - 3);
    let indicator = ((last - prev) / last).abs();
    Ok(C0Estimate { estimate: last, indicator, converged: indicator <= tol, sequence })
}

/// One evaluated point of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub index: usize,
    pub tau: f64,
    pub rho: f64,
    pub x: f64,
    pub y: f64,
    pub value: core::result::Result<KernelValue, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub kind: KernelKind,
    pub m: u32,
    pub mode: ApproachMode,
    pub chart_id: String,
    pub config_hash: u64,
    pub points: Vec<PathPoint>,
    pub expected_exponent: Rational64,
    pub fit: core::result::Result<FitResult, Error>,
    pub c0: Option<core::result::Result<C0Estimate, Error>>,
}

impl PathReport {
    /// Whether the fitted slope lies within `tol` (relative) of `-exponent`.
    pub fn slope_ok(&self, tol: f64) -> bool {
        let e = exponent_f64(self.expected_exponent);
        matches!(&self.fit, Ok(fit) if (fit.slope + e).abs() <= tol * e)
    }
}

/// Reproducibility tag for a report.
pub fn config_hash(cfg: &QuadratureConfig, extra: &str) -> u64 {
    fnv1a(format!("{cfg:?}|{extra}").as_bytes())
}

/// Evaluates a kernel along a path and fits the exponent on the trailing window.
#[allow(clippy::too_many_arguments)]
pub fn run_path<R: Runner>(
    f: &DefiningFunction,
    chart: &BlowupChart,
    path: &ApproachPath,
    kind: KernelKind,
    policy: WindowPolicy,
    c0_tol: f64,
    cfg: &QuadratureConfig,
    runner: &R,
) -> Result<PathReport> {
    let pts = path.points(f, chart)?;
    let values = runner.map(pts.len(), |i| kernel_direct(f, &pts[i], kind, cfg));
    let points: Vec<PathPoint> = pts
        .iter()
        .zip(values)
        .enumerate()
        .map(|(index, (p, value))| PathPoint {
            index,
            tau: to_polar(f, chart, p).map(|q| q.tau).unwrap_or(f64::NAN),
            rho: path.rho_grid[index],
            x: p.x,
            y: p.y,
            value,
        })
        .collect();
    let ok: Vec<(f64, KernelValue)> = points.iter().filter_map(|p| p.value.as_ref().ok().map(|v| (p.rho, *v))).collect();
    let rho: Vec<f64> = ok.iter().map(|(r, _)| *r).collect();
    let vals: Vec<KernelValue> = ok.iter().map(|(_, v)| *v).collect();
    let fit = fit_exponent(&vals, &rho, policy);
    let c0 = match path.mode {
        ApproachMode::FixedTau(_) => Some(limit_c0(&vals, &rho, f.m(), kind, c0_tol)),
        _ => None,
    };
    Ok(PathReport {
        kind,
        m: f.m(),
        mode: path.mode,
        chart_id: chart.id().into(),
        config_hash: config_hash(cfg, &format!("{}|{:?}|{:?}", f.describe(), path, kind)),
        points,
        expected_exponent: path_exponent(f.m(), kind, path.mode),
        fit,
        c0,
    })
}

/// Euclidean distance from `(x, y)` to the curve `y = f(x)`, by minimizing
/// over foot points within the vertical gap.
pub fn boundary_distance(f: &DefiningFunction, x: f64, y: f64) -> Result<f64> {
    let gap = y - f.eval_f(x, 0);
    if !(gap > 0.0) {
        return Err(Error::OutsideDomain { x, y, gap });
    }
    let d2 = |xi: f64| {
        let dy = f.eval_f(xi, 0) - y;
        (xi - x) * (xi - x) + dy * dy
    };
    let (_, best) = brent_max(|xi| -d2(xi), x - gap, x + gap, 1e-12 * gap, 500);
    Ok((-best).min(gap * gap).sqrt())
}

/// Levi determinant of `r = Im z2 - f(Im z1)` on the complex tangent space,
/// normalized by `|grad r|` and a unit tangent, from finite differences of `r`.
pub fn levi_determinant(f: &DefiningFunction, x0: f64) -> f64 {
    // r as a function of (x1, y1, x2, y2) with z_j = x_j + i y_j; negative inside
    let r = |p: [f64; 4]| f.eval_f(p[1], 0) - p[3];
    let base = [0.0, x0, 0.0, f.eval_f(x0, 0)];
    let h = 1e-4 * x0.abs().max(1.0);
    let shifted = |i: usize, di: f64, j: usize, dj: f64| {
        let mut p = base;
        p[i] += di;
        p[j] += dj;
        r(p)
    };
    let d1 = |i: usize| (shifted(i, h, i, 0.0) - shifted(i, -h, i, 0.0)) / (2.0 * h);
    let d2 = |i: usize, j: usize| {
        (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h)) / (4.0 * h * h)
    };
    // complex gradient dr/dz_j = (r_x - i r_y)/2 and Hessian r_{j kbar}
    let grad: [(f64, f64); 2] = [(0.5 * d1(0), -0.5 * d1(1)), (0.5 * d1(2), -0.5 * d1(3))];
    let hess = |j: usize, k: usize| -> (f64, f64) {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        (0.25 * (d2(xj, xk) + d2(yj, yk)), 0.25 * (d2(xj, yk) - d2(yj, xk)))
    };
    let w = [grad[1], (-grad[0].0, -grad[0].1)];
    let mut levi = 0.0;
    for j in 0..2 {
        for k in 0..2 {
            let (hr, hi) = hess(j, k);
            // w_j conj(w_k)
            let pr = w[j].0 * w[k].0 + w[j].1 * w[k].1;
            let pi = w[j].1 * w[k].0 - w[j].0 * w[k].1;
            levi += hr * pr - hi * pi;
        }
    }
    let w2: f64 = w.iter().map(|c| c.0 * c.0 + c.1 * c.1).sum();
    let grad_norm = 2.0 * grad.iter().map(|c| c.0 * c.0 + c.1 * c.1).sum::<f64>().sqrt();
    levi / (w2 * grad_norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HormanderSample {
    pub eps: f64,
    pub x: f64,
    pub y: f64,
    pub distance: f64,
    pub value: KernelValue,
    /// `K d^3`
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HormanderReport {
    pub x0: f64,
    pub measured_limit: f64,
    pub predicted_limit: f64,
    pub ratio: f64,
    pub levi_determinant: f64,
    /// Relative change between the last two extrapolants.
    pub indicator: f64,
    pub samples: Vec<HormanderSample>,
    pub config_hash: u64,
}

/// `lim K d^3` along the inward normal at `(x0, f(x0))` against
/// `(2 / 4 pi^2) det Levi`.
pub fn hormander_check<R: Runner>(
    f: &DefiningFunction,
    x0: f64,
    eps_grid: &[f64],
    cfg: &QuadratureConfig,
    runner: &R,
) -> Result<HormanderReport> {
    let [_, d1, d2] = f.f_jet(x0);
    if x0 == 0.0 || !(d2 > 0.0) {
        return Err(Error::InvalidArgument(format!("x0={x0} is not a strictly pseudoconvex boundary point (f''={d2})")));
    }
    if eps_grid.len() < 3 || eps_grid.windows(2).any(|w| !(w[1] < w[0])) || !(eps_grid[eps_grid.len() - 1] > 0.0) {
        return Err(Error::InvalidArgument("eps grid must be positive, decreasing, with at least 3 points".into()));
    }
    let norm = (1.0 + d1 * d1).sqrt();
    let (nx, ny) = (-d1 / norm, 1.0 / norm);
    let y0 = f.eval_f(x0, 0);
    let pts: Vec<BoundaryRelativePoint> =
        eps_grid.iter().map(|&e| BoundaryRelativePoint::new(f, x0 + e * nx, y0 + e * ny)).collect::<Result<_>>()?;
    let values = runner.map(pts.len(), |i| kernel_direct(f, &pts[i], KernelKind::Bergman, cfg));
    let mut samples = Vec::with_capacity(pts.len());
    for ((p, v), &eps) in pts.iter().zip(values).zip(eps_grid) {
        let value = v?;
        let distance = boundary_distance(f, p.x, p.y)?;
        let scaled = (value.log_value + 3.0 * distance.ln()).exp();
        samples.push(HormanderSample { eps, x: p.x, y: p.y, distance, value, scaled });
    }
    // K d^3 = c (1 + c1 d + ...): Richardson in d
    let n = samples.len();
    let rich = |i: usize| {
        let (a, b) = (&samples[i], &samples[i + 1]);
        (a.distance * b.scaled - b.distance * a.scaled) / (a.distance - b.distance)
    };
    let measured_limit = rich(n - 2);
    let indicator = ((measured_limit - rich(n - 3)) / measured_limit).abs();
    let levi = levi_determinant(f, x0);
    let predicted_limit = 2.0 / (4.0 * PI * PI) * levi;
    Ok(HormanderReport {
        x0,
        measured_limit,
        predicted_limit,
        ratio: measured_limit / predicted_limit,
        levi_determinant: levi,
        indicator,
        samples,
        config_hash: config_hash(cfg, &format!("{}|{x0}|{eps_grid:?}", f.describe())),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationRow {
    pub rho: f64,
    pub x: f64,
    pub y: f64,
    pub k1: core::result::Result<KernelValue, Error>,
    pub k2: core::result::Result<KernelValue, Error>,
    pub difference: core::result::Result<KernelDifference, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub rows: Vec<LocalizationRow>,
    pub k1_fit: core::result::Result<FitResult, Error>,
    pub k2_fit: core::result::Result<FitResult, Error>,
    pub difference_fit: core::result::Result<FitResult, Error>,
    pub expected_exponent: Rational64,
    /// Trailing slope of `ln |K1 - K2|` is at least this.
    pub bounded_threshold: f64,
    pub failures: Vec<usize>,
    pub chart_id: String,
    pub config_hash: u64,
}

impl LocalizationReport {
    pub fn difference_bounded(&self) -> bool {
        matches!(&self.difference_fit, Ok(fit) if fit.slope >= self.bounded_threshold)
    }

    /// Both kernels blow up with slope within `tol` (relative) of `-exponent`.
    pub fn kernels_blow_up(&self, tol: f64) -> bool {
        let e = exponent_f64(self.expected_exponent);
        let ok = |r: &core::result::Result<FitResult, Error>| matches!(r, Ok(fit) if (fit.slope + e).abs() <= tol * e);
        ok(&self.k1_fit) && ok(&self.k2_fit)
    }
}

/// Checks `f1 = f2` exactly on a grid of `|x| < delta`.
fn check_agreement(f1: &DefiningFunction, f2: &DefiningFunction, delta: f64) -> Result<()> {
    let off = f2.offset_from(f1);
    for i in 0..=400 {
        let x = delta * (i as f64 / 200.0 - 1.0) * (1.0 - 1e-12);
        let d = off(x);
        if d != 0.0 {
            return Err(Error::InvalidArgument(format!("profiles differ at x={x} (by {d:e}) inside |x| < {delta}")));
        }
    }
    Ok(())
}

/// Tabulates `K1`, `K2` and `K1 - K2` along a fixed-tau path for profiles
/// agreeing on `|x| < delta`.
#[allow(clippy::too_many_arguments)]
pub fn localization_experiment<R: Runner>(
    f1: &DefiningFunction,
    f2: &DefiningFunction,
    delta: f64,
    chart: &BlowupChart,
    path: &ApproachPath,
    kind: KernelKind,
    policy: WindowPolicy,
    cfg: &QuadratureConfig,
    runner: &R,
) -> Result<LocalizationReport> {
    if !matches!(path.mode, ApproachMode::FixedTau(_)) {
        return Err(Error::InvalidArgument("localization runs along a fixed-tau path".into()));
    }
    check_agreement(f1, f2, delta)?;
    let pts = path.points(f1, chart)?;
    // three evaluations per point, flattened so the runner can spread them
    let jobs = runner.map(3 * pts.len(), |j| {
        let p = &pts[j / 3];
        match j % 3 {
            0 => Job::Value(kernel_direct(f1, p, kind, cfg)),
            1 => Job::Value(kernel_direct(f2, p, kind, cfg)),
            _ => Job::Difference(kernel_difference(f1, f2, delta, p, kind, cfg)),
        }
    });
    let mut it = jobs.into_iter();
    let mut rows = Vec::with_capacity(pts.len());
    let mut failures = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let (a, b, c) = (it.next(), it.next(), it.next());
        let (Some(Job::Value(k1)), Some(Job::Value(k2)), Some(Job::Difference(difference))) = (a, b, c) else {
            return Err(Error::Degenerate("runner returned results out of order".into()));
        };
        if k1.is_err() || k2.is_err() || difference.is_err() {
            failures.push(i);
        }
        rows.push(LocalizationRow { rho: path.rho_grid[i], x: p.x, y: p.y, k1, k2, difference });
    }
    let good: Vec<&LocalizationRow> = rows.iter().filter(|r| r.k1.is_ok() && r.k2.is_ok() && r.difference.is_ok()).collect();
    let rho: Vec<f64> = good.iter().map(|r| r.rho).collect();
    let col = |g: &dyn Fn(&LocalizationRow) -> f64| -> Vec<f64> { good.iter().map(|r| g(r)).collect() };
    let l1 = col(&|r| r.k1.as_ref().map(|v| v.log_value).unwrap_or(f64::NAN));
    let l2 = col(&|r| r.k2.as_ref().map(|v| v.log_value).unwrap_or(f64::NAN));
    let ld = col(&|r| r.difference.as_ref().map(|v| v.log_abs).unwrap_or(f64::NAN));
    Ok(LocalizationReport {
        k1_fit: fit_log_log(&l1, &rho, policy),
        k2_fit: fit_log_log(&l2, &rho, policy),
        difference_fit: fit_log_log(&ld, &rho, policy),
        rows,
        expected_exponent: blowup_exponent(f1.m(), kind),
        bounded_threshold: -0.1,
        failures,
        chart_id: chart.id().into(),
        config_hash: config_hash(cfg, &format!("{}|{}|{delta}|{path:?}|{kind:?}", f1.describe(), f2.describe())),
    })
}

enum Job {
    Value(Result<KernelValue>),
    Difference(Result<KernelDifference>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub c0: core::result::Result<C0Estimate, Error>,
    /// `c0 tau^3`
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub alpha: f64,
    pub kind: KernelKind,
    pub rows: Vec<SweepRow>,
    pub sup_c0: f64,
    /// `max / min` of `c0 tau^3` over the rows with an estimate.
    pub scaled_spread: f64,
    pub all_finite: bool,
    pub chart_id: String,
    pub config_hash: u64,
}

impl SweepReport {
    pub fn bounded(&self, max_spread: f64) -> bool {
        self.all_finite && self.scaled_spread.is_finite() && self.scaled_spread <= max_spread
    }
}

/// `tau` values spread over `[1/alpha + margin, 1]`, largest first.
pub fn admissible_taus(alpha: f64, margin: f64, n: usize) -> Result<Vec<f64>> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
    }
    let lo = 1.0 / alpha + margin;
    if !(lo < 1.0) || n < 2 {
        return Err(Error::InvalidArgument(format!("empty tau range [{lo}, 1]")));
    }
    Ok((0..n).map(|i| 1.0 - (1.0 - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Estimates `c0(tau)` over `taus` (each from a fixed-tau path on `rho_grid`)
/// and records the `tau^{-3}` growth.
#[allow(clippy::too_many_arguments)]
pub fn admissible_coefficient_sweep<R: Runner>(
    f: &DefiningFunction,
    chart: &BlowupChart,
    alpha: f64,
    taus: &[f64],
    rho_grid: &[f64],
    kind: KernelKind,
    c0_tol: f64,
    cfg: &QuadratureConfig,
    runner: &R,
) -> Result<SweepReport> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
    }
    if let Some(t) = taus.iter().find(|&&t| !(t > 1.0 / alpha && t <= 1.0)) {
        return Err(Error::InvalidArgument(format!("tau={t} lies outside the admissible region (1/{alpha}, 1]")));
    }
    let nr = rho_grid.len();
    let pts: Vec<Vec<BoundaryRelativePoint>> = taus
        .iter()
        .map(|&tau| ApproachPath { mode: ApproachMode::FixedTau(tau), rho_grid: rho_grid.to_vec() }.points(f, chart))
        .collect::<Result<_>>()?;
    let values = runner.map(taus.len() * nr, |j| kernel_direct(f, &pts[j / nr][j % nr], kind, cfg));
    let mut rows = Vec::with_capacity(taus.len());
    for (i, &tau) in taus.iter().enumerate() {
        let vals: Result<Vec<KernelValue>> = values[i * nr..(i + 1) * nr].iter().cloned().collect();
        let c0 = vals.and_then(|v| limit_c0(&v, rho_grid, f.m(), kind, c0_tol));
        let scaled = c0.as_ref().map(|c| c.estimate * tau * tau * tau).unwrap_or(f64::NAN);
        rows.push(SweepRow { tau, c0, scaled });
    }
    let est: Vec<f64> = rows.iter().filter_map(|r| r.c0.as_ref().ok().map(|c| c.estimate)).collect();
    let scaled: Vec<f64> = rows.iter().filter(|r| r.c0.is_ok()).map(|r| r.scaled).collect();
    let all_finite = est.len() == rows.len() && est.iter().all(|v| v.is_finite() && *v > 0.0);
    let sup_c0 = est.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b.abs()));
    let (mn, mx) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(SweepReport {
        alpha,
        kind,
        rows,
        sup_c0,
        scaled_spread: if mn > 0.0 { mx / mn } else { f64::INFINITY },
        all_finite,
        chart_id: chart.id().into(),
        config_hash: config_hash(cfg, &format!("{}|{alpha}|{taus:?}|{rho_grid:?}|{kind:?}", f.describe())),
    })
}
