//! Laplace-method engine, the growth constants of `phi_l` and `L`, and the
//! leading profile `Phi(tau)` of the model domain `y > g x^{2m}`.

use alloc::format;
use alloc::string::String;

use num_rational::Rational64;

use crate::blowup::BlowupChart;
use crate::domain::DefiningFunction;
#[allow(unused_imports)]
use crate::math::*;
use crate::quadrature::{integrate_log, integrate_log_signed, log_p, Hint, KernelKind, LogIntegral, QuadratureConfig, Range};
use crate::roots::{bisect, newton_bisect};
use crate::{Error, Result};

const ROOT_TOL: f64 = 1e-12;

/// `int A(t) exp(-lambda p(t)) dt` over `domain`, with an interior minimum of `p`.
///
/// `phase` returns `[p, p', p'']`.
pub struct LaplaceProblem<P, A> {
    pub phase: P,
    pub amplitude: A,
    pub large_parameter_name: String,
    /// Closed-form seed for the critical point, refined by Newton.
    pub critical_point: Option<f64>,
    pub domain: (f64, f64),
}

impl<P, A> LaplaceProblem<P, A>
where
    P: Fn(f64) -> [f64; 3],
    A: Fn(f64) -> f64,
{
    pub fn new(phase: P, amplitude: A, name: &str, domain: (f64, f64)) -> Self {
        LaplaceProblem { phase, amplitude, large_parameter_name: name.into(), critical_point: None, domain }
    }

    pub fn with_seed(mut self, t: f64) -> Self {
        self.critical_point = Some(t);
        self
    }

    /// Locates `t*` with `p'(t*) = 0`, `p''(t*) > 0`.
    pub fn locate_critical_point(&self) -> Result<f64> {
        let (lo, hi) = self.domain;
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("empty Laplace domain [{lo}, {hi}]")));
        }
        let dp = |t: f64| (self.phase)(t)[1];
        let t = match self.critical_point {
            Some(seed) => {
                // Newton from the seed, bracketed by a local expansion
                let mut w = 1e-3 * seed.abs().max(1e-3);
                let mut found = None;
                for _ in 0..60 {
                    let (a, b) = ((seed - w).max(lo), (seed + w).min(hi));
                    if dp(a) < 0.0 && dp(b) > 0.0 {
                        found = Some((a, b));
                        break;
                    }
                    w *= 2.0;
                }
                let (a, b) = found.ok_or(Error::Root("no critical point near the seed"))?;
                newton_bisect(
                    |t| {
                        let j = (self.phase)(t);
                        (j[1], j[2])
                    },
                    a,
                    b,
                    ROOT_TOL,
                    ROOT_TOL * 1e-3,
                )?
            }
            None => {
                let (a, b) = (finite_or(lo, -50.0), finite_or(hi, 50.0));
                let n = 4000;
                let mut bracket = None;
                let mut prev = dp(a);
                for i in 1..=n {
                    let t = a + (b - a) * i as f64 / n as f64;
                    let cur = dp(t);
                    if prev < 0.0 && cur >= 0.0 {
                        bracket = Some((t - (b - a) / n as f64, t));
                        break;
                    }
                    prev = cur;
                }
                let (l, r) = bracket.ok_or(Error::Root("no sign change of the phase derivative on the grid"))?;
                bisect(dp, l, r, ROOT_TOL * l.abs().max(1.0))?
            }
        };
        let span = (hi - lo).min(1.0);
        if (t - lo).abs() < 1e-9 * span || (hi - t).abs() < 1e-9 * span {
            return Err(Error::Root("critical point on the boundary of the domain"));
        }
        if !((self.phase)(t)[2] > 0.0) {
            return Err(Error::Root("critical point is not a strict minimum"));
        }
        Ok(t)
    }
}

fn finite_or(x: f64, fallback: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        fallback
    }
}

/// Leading Laplace term and the size of its first correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceLeading {
    pub log_value: f64,
    /// Estimated `|c_1| / lambda` relative to the leading term.
    pub relative_correction: f64,
    pub critical_point: f64,
}

/// `ln[A(t*) sqrt(2 pi / (lambda p''(t*))) e^{-lambda p(t*)}]`.
pub fn laplace_leading<P, A>(prob: &LaplaceProblem<P, A>, lambda: f64) -> Result<LaplaceLeading>
where
    P: Fn(f64) -> [f64; 3],
    A: Fn(f64) -> f64,
{
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("large parameter must be positive, got {lambda}")));
    }
    let t = prob.locate_critical_point()?;
    let [p0, _, p2] = (prob.phase)(t);
    let a0 = (prob.amplitude)(t);
    if !(a0 > 0.0) {
        return Err(Error::Degenerate(format!("amplitude {a0} at the critical point is not positive")));
    }
    let log_value = a0.ln() + 0.5 * (2.0 * PI / (lambda * p2)).ln() - lambda * p0;

    // third and fourth phase derivatives and amplitude derivatives by differences
    let h = 1e-3 * t.abs().max(1.0);
    let d2 = |x: f64| (prob.phase)(x)[2];
    let p3 = (d2(t + h) - d2(t - h)) / (2.0 * h);
    let p4 = (d2(t + h) - 2.0 * p2 + d2(t - h)) / (h * h);
    let am = |x: f64| (prob.amplitude)(x);
    let a1 = (am(t + h) - am(t - h)) / (2.0 * h);
    let a2 = (am(t + h) - 2.0 * a0 + am(t - h)) / (h * h);
    let c1 = a2 / (2.0 * a0 * p2) - a1 * p3 / (2.0 * a0 * p2 * p2) - p4 / (8.0 * p2 * p2) + 5.0 * p3 * p3 / (24.0 * p2 * p2 * p2);
    Ok(LaplaceLeading { log_value, relative_correction: c1.abs() / lambda, critical_point: t })
}

/// `alpha = (2m)^{-1/(2m-1)}`, the minimizer of `t^{2m} - t`.
pub fn alpha(m: u32) -> f64 {
    let n = (2 * m) as f64;
    n.powf(-1.0 / (n - 1.0))
}

/// `a = (2m)^{-1/(2m-1)} - (2m)^{-2m/(2m-1)}`, so that `phi(v) ~ exp(a v^{2m/(2m-1)})`.
pub fn growth_constant(m: u32) -> f64 {
    let n = (2 * m) as f64;
    n.powf(-1.0 / (n - 1.0)) - n.powf(-n / (n - 1.0))
}

/// `beta = (2m-1) / (2m a)`, the critical point of `a t^{2m} - t^{2m-1}`.
pub fn beta(m: u32) -> f64 {
    let n = (2 * m) as f64;
    (n - 1.0) / (n * growth_constant(m))
}

/// `p(t) = t^{2m} - t` as a jet.
pub fn phi_phase(m: u32) -> impl Fn(f64) -> [f64; 3] {
    let n = 2 * m;
    let nf = n as f64;
    move |t| [ipow(t, n) - t, nf * ipow(t, n - 1) - 1.0, nf * (nf - 1.0) * ipow(t, n - 2)]
}

/// `q(t) = a t^{2m} - t^{2m-1}` as a jet.
pub fn l_phase(m: u32) -> impl Fn(f64) -> [f64; 3] {
    let n = 2 * m;
    let nf = n as f64;
    let a = growth_constant(m);
    move |t| {
        [
            a * ipow(t, n) - ipow(t, n - 1),
            a * nf * ipow(t, n - 1) - (nf - 1.0) * ipow(t, n - 2),
            a * nf * (nf - 1.0) * ipow(t, n - 2) - (nf - 1.0) * (nf - 2.0) * ipow(t, n - 3),
        ]
    }
}

/// Growth of `phi_l(v) = int w^l exp(-w^{2m} + v w) dw`:
/// `v^{power} exp(rate v^{2m/(2m-1)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiGrowth {
    pub power: Rational64,
    pub rate_constant: f64,
}

pub fn phi_l_growth(m: u32, l: u32) -> Result<PhiGrowth> {
    check_m(m)?;
    let (m, l) = (i64::from(m), i64::from(l));
    Ok(PhiGrowth { power: Rational64::new(1 - m + l, 2 * m - 1), rate_constant: growth_constant(m as u32) })
}

/// Growth of `L(u) = int e^{u v} A(v) dv` for `A(v) ~ v^{n/(2m-1)} exp(-a v^{2m/(2m-1)})`:
/// `u^{power} e^{u^{2m}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LGrowth {
    pub power: Rational64,
    /// The exponential rate is exactly `u^{2m}`.
    pub rate_is_u2m: bool,
}

pub fn l_growth(m: u32, n: i64) -> Result<LGrowth> {
    check_m(m)?;
    Ok(LGrowth { power: Rational64::from_integer(i64::from(m) - 1 + n), rate_is_u2m: true })
}

/// The `n` of the amplitude `1/phi`, for which `L(u) ~ u^{2m-2} e^{u^{2m}}`.
pub fn reciprocal_phi_index(m: u32) -> i64 {
    i64::from(m) - 1
}

fn check_m(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("flatness index m must be at least 2, got {m}")));
    }
    Ok(())
}

/// `ln |phi_l(v)|` and its sign.
pub fn log_phi_l(m: u32, l: u32, v: f64, cfg: &QuadratureConfig) -> Result<LogIntegral> {
    check_m(m)?;
    let n = 2 * m;
    let nf = n as f64;
    // exponent maximum: n w^{n-1} = v
    let w_star = if v == 0.0 { 0.0 } else { v.signum() * (v.abs() / nf).powf(1.0 / (nf - 1.0)) };
    let curv = nf * (nf - 1.0) * ipow(w_star, n - 2);
    let width = if curv > 0.0 { (1.0 / curv).sqrt().min(1.0) } else { 1.0 };
    // shift by the exponent at w*, the amplitude w^l moves the peak only slightly
    let top = v * w_star - ipow(w_star, n);
    let lf = f64::from(l);
    let mut r = integrate_log_signed(
        |w| {
            let body = v * w - ipow(w, n) - top;
            if l == 0 {
                return (body, 1.0);
            }
            if w == 0.0 {
                return (f64::NEG_INFINITY, 0.0);
            }
            let sign = if w < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
            (body + lf * w.abs().ln(), sign)
        },
        Range::Line,
        Hint::around(w_star, width),
        cfg,
    )?;
    r.log_abs += top;
    Ok(r)
}

/// `ln L(u)` with `L(u) = int e^{u v} / phi(v) dv`, `phi = phi_0`.
pub fn log_l(m: u32, u: f64, cfg: &QuadratureConfig) -> Result<LogIntegral> {
    check_m(m)?;
    let model = DefiningFunction::model(m, 1.0)?;
    log_p(&model, u, 1.0, cfg).map(|(r, worst)| LogIntegral { rel_err: r.rel_err + worst, ..r })
}

/// A measured exponential growth rate against its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthMeasurement {
    /// Plain ratio `ln F(x) / x^k`, with every sub-exponential factor included.
    pub ratio: f64,
    /// Secant slope of `ln F - power ln x` against `x^k` over `[x/2^{1/k}, x]`.
    pub rate: f64,
    pub expected: f64,
}

impl GrowthMeasurement {
    pub fn rate_rel_error(&self) -> f64 {
        (self.rate / self.expected - 1.0).abs()
    }

    pub fn ratio_rel_error(&self) -> f64 {
        (self.ratio / self.expected - 1.0).abs()
    }
}

/// Measures `ln phi_l(v) / v^{2m/(2m-1)} -> a`.
pub fn measure_phi_rate(m: u32, l: u32, v: f64, cfg: &QuadratureConfig) -> Result<GrowthMeasurement> {
    let g = phi_l_growth(m, l)?;
    let k = (2 * m) as f64 / (2 * m - 1) as f64;
    let power = *g.power.numer() as f64 / *g.power.denom() as f64;
    let v0 = v * 0.5f64.powf(1.0 / k);
    let reduced = |x: f64| -> Result<f64> { Ok(log_phi_l(m, l, x, cfg)?.log_abs - power * x.ln()) };
    let top = log_phi_l(m, l, v, cfg)?.log_abs;
    let rate = (reduced(v)? - reduced(v0)?) / (v.powf(k) - v0.powf(k));
    Ok(GrowthMeasurement { ratio: top / v.powf(k), rate, expected: g.rate_constant })
}

/// Measures `ln L(u) / u^{2m} -> 1`.
pub fn measure_l_rate(m: u32, u: f64, cfg: &QuadratureConfig) -> Result<GrowthMeasurement> {
    let g = l_growth(m, reciprocal_phi_index(m))?;
    let k = (2 * m) as f64;
    let power = *g.power.numer() as f64;
    let u0 = u * 0.5f64.powf(1.0 / k);
    let top = log_l(m, u, cfg)?.log_abs;
    let low = log_l(m, u0, cfg)?.log_abs;
    let rate = ((top - power * u.ln()) - (low - power * u0.ln())) / (u.powf(k) - u0.powf(k));
    Ok(GrowthMeasurement { ratio: top / u.powf(k), rate, expected: 1.0 })
}

/// Value of the model leading profile with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelProfile {
    pub value: f64,
    pub log_value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

/// `Phi(tau)` for the Bergman kernel of `y > g0 x^{2m}`:
/// `(2m/(4 pi)^2) g0^{1/m} int_0^inf e^{-s^{2m}} L(t s) s^{4m+1} ds`
/// with `t^{2m} = 1 - chi^{-1}(tau)`.
pub fn model_phi(m: u32, g0: f64, tau: f64, chart: &BlowupChart, cfg: &QuadratureConfig) -> Result<f64> {
    model_profile(m, g0, tau, chart, KernelKind::Bergman, cfg).map(|p| p.value)
}

/// Leading profile for either kernel; the Szegő integrand carries `s^{2m+1}`.
pub fn model_profile(
    m: u32,
    g0: f64,
    tau: f64,
    chart: &BlowupChart,
    kind: KernelKind,
    cfg: &QuadratureConfig,
) -> Result<ModelProfile> {
    check_m(m)?;
    cfg.validate()?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("tau must lie in (0, 1], got {tau}")));
    }
    if !(g0 > 0.0) {
        return Err(Error::InvalidArgument(format!("g0 must be positive, got {g0}")));
    }
    if chart.m() != m {
        return Err(Error::InvalidArgument(format!("chart is built for m={}, profile asked for m={m}", chart.m())));
    }
    let n = 2 * m;
    let nf = n as f64;
    let power = (2 * m * kind.weight_power() as u32 + 1) as f64;
    // decay rate of the outer integrand, 1 - t^{2m}
    let c = chart.chi_inverse(tau);
    let t2m = chart.one_minus_chi_inverse(tau);
    let t = t2m.max(0.0).powf(1.0 / nf);
    let inner = cfg.inner(0.3);
    let failure = core::cell::RefCell::new(None);
    let worst = core::cell::Cell::new(0.0f64);
    let evals = core::cell::Cell::new(0usize);
    let l_at_zero = if t == 0.0 { Some(log_l(m, 0.0, &inner)?) } else { None };
    let log_l_at = |u: f64| -> f64 {
        let r = match l_at_zero {
            Some(v) => Ok(v),
            None => log_l(m, u, &inner),
        };
        match r {
            Ok(v) => {
                evals.set(evals.get() + v.evaluations);
                worst.set(worst.get().max(v.rel_err));
                v.log_abs
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    let outer = if c < 0.5 {
        // sigma = c s^{2m}: the integrand is e^{-sigma} times a slowly varying factor
        let peak = (power + 1.0 - nf) / nf + (nf - 2.0) / nf;
        integrate_log(
            |sigma| {
                if !(sigma > 0.0) {
                    return f64::NEG_INFINITY;
                }
                let s = (sigma / c).powf(1.0 / nf);
                -ipow(s, n) + log_l_at(t * s) + (power + 1.0) * s.ln() - (nf * sigma).ln()
            },
            Range::From(0.0),
            Hint::around(peak.max(1.0), peak.max(1.0)),
            cfg,
        )
    } else {
        let peak = ((power + 1.0) / (nf * c)).powf(1.0 / nf);
        integrate_log(
            |s| {
                if !(s > 0.0) {
                    return f64::NEG_INFINITY;
                }
                -ipow(s, n) + log_l_at(t * s) + power * s.ln()
            },
            Range::From(0.0),
            Hint::around(peak, 0.5 * peak),
            cfg,
        )
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let o = outer?;
    let lead = (nf * g0.powf(1.0 / m as f64)).ln() - 2.0 * (4.0 * PI).ln();
    let log_value = o.log_abs + lead;
    Ok(ModelProfile {
        value: log_value.exp(),
        log_value,
        err_estimate: o.rel_err + worst.get(),
        evaluations: o.evaluations + evals.get(),
    })
}

/// Predicted leading behaviour `c0(tau) / rho^{exponent}` with a log correction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionPrediction {
    pub kind: KernelKind,
    pub exponent: Rational64,
    pub c0_tau: f64,
    pub c0_err: f64,
    pub log_term_expected: bool,
    pub tau: f64,
    pub chart_id: String,
    /// False when the profile only satisfies the weaker class without `x g' <= 0`.
    pub full_theorem_class: bool,
}

/// `2 + 1/m` for the Bergman kernel, `1 + 1/m` for the Szegő kernel.
pub fn blowup_exponent(m: u32, kind: KernelKind) -> Rational64 {
    let m = i64::from(m);
    match kind {
        KernelKind::Bergman => Rational64::new(2 * m + 1, m),
        KernelKind::Szego => Rational64::new(m + 1, m),
    }
}

/// Leading coefficient from the tangent model `g(0) x^{2m}`.
pub fn predict(
    f: &DefiningFunction,
    kind: KernelKind,
    tau: f64,
    chart: &BlowupChart,
    cfg: &QuadratureConfig,
) -> Result<ExpansionPrediction> {
    if !f.is_flat_type() {
        return Err(Error::InvalidDefiningFunction("predictions need f = x^{2m} g".into()));
    }
    let p = model_profile(f.m(), f.g0(), tau, chart, kind, cfg)?;
    Ok(ExpansionPrediction {
        kind,
        exponent: blowup_exponent(f.m(), kind),
        c0_tau: p.value,
        c0_err: p.err_estimate,
        log_term_expected: true,
        tau,
        chart_id: chart.id().into(),
        full_theorem_class: f.full_theorem_class(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn gaussian_laplace_is_exact() {
        let prob = LaplaceProblem::new(|t: f64| [t * t, 2.0 * t, 2.0], |_| 1.0, "lambda", (f64::NEG_INFINITY, f64::INFINITY));
        let r = laplace_leading(&prob, 1.0).unwrap();
        assert!((r.log_value - PI.sqrt().ln()).abs() < 1e-12);
        assert!(r.relative_correction < 1e-6);
        let shifted = LaplaceProblem::new(
            |t: f64| [3.0 * (t - 0.4).powi(2) + 1.0, 6.0 * (t - 0.4), 6.0],
            |_| 2.0,
            "lambda",
            (-5.0, 5.0),
        );
        let r = laplace_leading(&shifted, 7.0).unwrap();
        let exact = 2f64.ln() + 0.5 * (PI / 21.0).ln() - 7.0;
        assert!((r.log_value - exact).abs() < 1e-12);
    }

    #[test]
    fn phi_phase_critical_point() {
        let prob = LaplaceProblem::new(phi_phase(2), |_| 1.0, "v", (0.0, 2.0)).with_seed(0.6);
        let t = prob.locate_critical_point().unwrap();
        assert!((t - 0.629_960_524_947_436_6).abs() < 1e-12);
        assert!((phi_phase(2)(t)[0] + growth_constant(2)).abs() < 1e-12);
        // 4^{-1/3} - 4^{-4/3} = (3/4) 4^{-1/3}
        assert!((growth_constant(2) - 0.472_470_393_710_577_4).abs() < 1e-14);
        // grid search finds the same point
        let grid = LaplaceProblem::new(phi_phase(2), |_| 1.0, "v", (0.0, 2.0));
        assert!((grid.locate_critical_point().unwrap() - t).abs() < 1e-11);
    }

    #[test]
    fn l_phase_critical_point() {
        for m in 2..=6 {
            let b = beta(m);
            assert!(l_phase(m)(b)[1].abs() < 1e-10, "m={m}");
            assert!(phi_phase(m)(alpha(m))[1].abs() < 1e-10, "m={m}");
        }
        assert!((beta(2) - 1.587_401_051_968_199_4).abs() < 1e-12);
        let prob = LaplaceProblem::new(l_phase(2), |_| 1.0, "u", (0.5, 4.0)).with_seed(1.5);
        assert!((prob.locate_critical_point().unwrap() - beta(2)).abs() < 1e-11);
    }

    #[test]
    fn constant_a_positive() {
        for m in 2..=10 {
            assert!(growth_constant(m) > 0.0);
        }
    }

    #[test]
    fn boundary_critical_point_rejected() {
        let prob = LaplaceProblem::new(|t: f64| [t, 1.0, 0.0], |_| 1.0, "lambda", (0.0, 1.0));
        assert!(laplace_leading(&prob, 10.0).is_err());
    }

    #[test]
    fn rational_growth_powers() {
        assert_eq!(phi_l_growth(2, 0).unwrap().power, Rational64::new(-1, 3));
        assert_eq!(phi_l_growth(2, 3).unwrap().power, Rational64::new(2, 3));
        assert_eq!(l_growth(2, 0).unwrap().power, Rational64::from_integer(1));
        assert_eq!(l_growth(2, reciprocal_phi_index(2)).unwrap().power, Rational64::from_integer(2));
        // one derivative in u adds 2m - 1 to the power
        let m = 3;
        let base = l_growth(m, reciprocal_phi_index(m)).unwrap().power;
        assert_eq!(base + Rational64::from_integer(2 * m as i64 - 1), Rational64::from_integer(2 * m as i64 - 2 + 2 * m as i64 - 1));
        assert!(phi_l_growth(1, 0).is_err());
    }

    #[test]
    fn exponents_are_exact() {
        assert_eq!(blowup_exponent(2, KernelKind::Bergman), Rational64::new(5, 2));
        assert_eq!(blowup_exponent(3, KernelKind::Szego), Rational64::new(4, 3));
        assert_eq!(blowup_exponent(3, KernelKind::Bergman), Rational64::new(7, 3));
    }

    #[test]
    fn phi_l_at_zero() {
        // phi_0(0) = 2 Gamma(5/4) for m = 2; odd moments vanish at v = 0
        let r = log_phi_l(2, 0, 0.0, &cfg()).unwrap();
        assert!((r.value() - 1.812_804_954_110_954).abs() < 1e-8);
        // phi_2(0) = 2 Gamma(3/4) / 4
        let r = log_phi_l(2, 2, 0.0, &cfg()).unwrap();
        assert!((r.value() - 0.5 * 1.225_416_702_465_178).abs() < 1e-8);
    }

    #[test]
    fn phi_matches_laplace_at_large_v() {
        // phi_0(v) = v^{1/3} int exp(-v~ p(t)) dt with v~ = v^{4/3}
        let v: f64 = 40.0;
        let vt = v.powf(4.0 / 3.0);
        let prob = LaplaceProblem::new(phi_phase(2), |_| 1.0, "v", (0.0, 3.0)).with_seed(alpha(2));
        let lead = laplace_leading(&prob, vt).unwrap();
        let q = log_phi_l(2, 0, v, &cfg()).unwrap();
        let predicted = lead.log_value + v.ln() / 3.0;
        assert!((q.log_abs - predicted).abs() < 5.0 * lead.relative_correction + 1e-8);
    }
}
