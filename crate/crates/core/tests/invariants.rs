use std::sync::Arc;

use bergtube_core::blowup::{to_polar, BlowupChart};
use bergtube_core::domain::{mollify, tail_modify, BoundaryRelativePoint, DefiningFunction, Polynomial, TailSlope};
use bergtube_core::experiments::{fit_log_log, path_exponent, ApproachMode, ApproachPath, WindowPolicy};
use bergtube_core::quadrature::KernelKind;
use num_rational::Rational64;
use proptest::prelude::*;

fn profiles() -> Vec<DefiningFunction> {
    let model = DefiningFunction::model(2, 1.0).unwrap();
    vec![
        model.clone(),
        DefiningFunction::model(3, 2.5).unwrap(),
        DefiningFunction::rational(2, 1.0).unwrap(),
        mollify(&model, 0.05).unwrap(),
        tail_modify(&model, 0.5, 1.0).unwrap(),
        DefiningFunction::builder(2, Arc::new(Polynomial(vec![1.0, 0.0, 0.5])))
            .tails(TailSlope::Infinite, TailSlope::Infinite)
            .full_theorem_class(false)
            .build()
            .unwrap(),
    ]
}

proptest! {
    #[test]
    fn accepted_profiles_are_convex(h in -20.0f64..20.0, which in 0usize..6) {
        let f = &profiles()[which];
        prop_assert!(f.eval_f(-h, 0) + f.eval_f(h, 0) >= 0.0);
        prop_assert!(f.eval_f(h, 2) >= -1e-12 * (1.0 + f.eval_f(h, 0).abs()));
    }

    #[test]
    fn mollified_profile_is_strictly_convex_off_origin(x in 1e-3f64..8.0, sign in prop::bool::ANY) {
        let f = mollify(&DefiningFunction::model(2, 1.0).unwrap(), 0.05).unwrap();
        let x = if sign { x } else { -x };
        prop_assert!(f.eval_f(x, 2) > 0.0, "f''({x}) = {}", f.eval_f(x, 2));
    }

    #[test]
    fn tau_decreases_in_abs_x(x1 in 0.0f64..1.5, dx in 1e-3f64..0.5, y in 0.1f64..3.0) {
        let f = DefiningFunction::model(2, 1.0).unwrap();
        let chart = BlowupChart::new(2).unwrap();
        let x2 = x1 + dx;
        prop_assume!(y > f.eval_f(x2, 0));
        let t1 = to_polar(&f, &chart, &BoundaryRelativePoint { x: x1, y }).unwrap().tau;
        let t2 = to_polar(&f, &chart, &BoundaryRelativePoint { x: -x2, y }).unwrap().tau;
        prop_assert!(t2 < t1);
    }

    #[test]
    fn fit_recovers_synthetic_power_laws(e in -4.0f64..4.0, c in -10.0f64..10.0, ratio in 0.2f64..0.8, n in 6usize..20) {
        let path = ApproachPath::geometric(ApproachMode::FixedTau(1.0), 1.0, ratio, n).unwrap();
        let logs: Vec<f64> = path.rho_grid.iter().map(|r| c + e * r.ln()).collect();
        let fit = fit_log_log(&logs, &path.rho_grid, WindowPolicy::Trailing(6)).unwrap();
        prop_assert!((fit.slope - e).abs() < 1e-10);
        prop_assert!((fit.intercept - c).abs() < 1e-8 * (1.0 + c.abs()));
        prop_assert_eq!(fit.window, (n - 6, n));
    }

    #[test]
    fn generated_points_are_interior(tau in 1e-3f64..=1.0, x in 0.05f64..2.0, kappa in -3.0f64..3.0, which in 0usize..6) {
        let f = &profiles()[which];
        let chart = BlowupChart::new(f.m()).unwrap();
        for mode in [ApproachMode::FixedTau(tau), ApproachMode::FixedX(x), ApproachMode::NormalCone(kappa)] {
            let path = ApproachPath::default_grid(mode);
            for p in path.points(f, &chart).unwrap() {
                prop_assert!(p.gap(f) > 0.0);
            }
        }
    }
}

#[test]
fn superlinear_tails_give_unbounded_cone() {
    for f in &profiles()[..4] {
        let c = f.dual_cone().unwrap();
        assert_eq!((c.r_plus, c.r_minus), (f64::INFINITY, f64::INFINITY));
    }
    let c = profiles()[4].dual_cone().unwrap();
    assert!(c.r_plus.is_finite() && c.r_minus.is_finite());
}

#[test]
fn fixed_x_approach_reaches_the_tau_zero_edge() {
    let f = DefiningFunction::model(2, 1.0).unwrap();
    let chart = BlowupChart::new(2).unwrap();
    let path = ApproachPath::geometric(ApproachMode::FixedX(0.8), 1.0, 0.1, 12).unwrap();
    let taus: Vec<f64> = path.points(&f, &chart).unwrap().iter().map(|p| to_polar(&f, &chart, p).unwrap().tau).collect();
    assert!(taus.windows(2).all(|w| w[1] < w[0]));
    assert!(*taus.last().unwrap() < 1e-9);
    let normal = ApproachPath::default_grid(ApproachMode::FixedTau(1.0));
    for (p, r) in normal.points(&f, &chart).unwrap().iter().zip(&normal.rho_grid) {
        let q = to_polar(&f, &chart, p).unwrap();
        assert_eq!((p.x, q.tau), (0.0, 1.0));
        assert_eq!(q.rho, *r);
    }
}

#[test]
fn exponents_are_exact_rationals() {
    assert_eq!(path_exponent(2, KernelKind::Bergman, ApproachMode::FixedTau(1.0)), Rational64::new(5, 2));
    assert_eq!(path_exponent(3, KernelKind::Bergman, ApproachMode::NormalCone(0.0)), Rational64::new(7, 3));
    assert_eq!(path_exponent(3, KernelKind::Szego, ApproachMode::FixedTau(0.8)), Rational64::new(4, 3));
    assert_eq!(path_exponent(5, KernelKind::Bergman, ApproachMode::FixedX(1.0)), Rational64::from_integer(3));
    for m in 2..=12u32 {
        let e = path_exponent(m, KernelKind::Bergman, ApproachMode::FixedTau(1.0)) - Rational64::new(1, i64::from(m));
        assert_eq!(e, Rational64::from_integer(2));
    }
}
