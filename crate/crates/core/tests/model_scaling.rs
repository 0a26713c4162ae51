use bergtube_core::blowup::BlowupChart;
use bergtube_core::domain::{BoundaryRelativePoint, DefiningFunction};
use bergtube_core::experiments::{run_path, ApproachMode, ApproachPath, Sequential, WindowPolicy};
use bergtube_core::quadrature::{compute_d, kernel_direct, KernelKind, QuadratureConfig};

#[test]
fn d_scales_exactly_on_the_model() {
    let cfg = QuadratureConfig::with_rel_tol(1e-11);
    for m in [2u32, 3] {
        let f = DefiningFunction::model(m, 1.7).unwrap();
        let (d1, _) = compute_d(&f, 0.0, 1.0, &cfg).unwrap();
        for z2 in [0.1, 2.0, 37.0] {
            let (d, _) = compute_d(&f, 0.0, z2, &cfg).unwrap();
            let predicted = d1 - z2.ln() / (2 * m) as f64;
            assert!((d - predicted).abs() < 1e-9, "m={m} zeta2={z2}: {d} vs {predicted}");
        }
    }
}

#[test]
fn evaluators_are_deterministic() {
    let f = DefiningFunction::model(2, 1.0).unwrap();
    let cfg = QuadratureConfig::default();
    let p = BoundaryRelativePoint::new(&f, 0.3, 0.5).unwrap();
    for kind in [KernelKind::Bergman, KernelKind::Szego] {
        let a = kernel_direct(&f, &p, kind, &cfg).unwrap();
        let b = kernel_direct(&f, &p, kind, &cfg).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn tighter_tolerance_moves_toward_the_reference() {
    let f = DefiningFunction::model(2, 1.0).unwrap();
    let tight = QuadratureConfig::with_rel_tol(1e-12);
    for (x, y) in [(0.0, 1.0), (0.5, 0.3)] {
        let p = BoundaryRelativePoint::new(&f, x, y).unwrap();
        let reference = kernel_direct(&f, &p, KernelKind::Bergman, &tight).unwrap().log_value;
        let mut prev = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8] {
            let v = kernel_direct(&f, &p, KernelKind::Bergman, &QuadratureConfig::with_rel_tol(tol)).unwrap();
            let dev = (v.log_value - reference).abs();
            assert!(dev <= tol, "({x}, {y}) tol {tol}: deviation {dev:e}");
            assert!(dev <= prev.max(1e-13), "({x}, {y}) tol {tol}: {dev:e} after {prev:e}");
            prev = dev;
        }
    }
}

#[test]
fn rescaled_model_kernel_is_constant_along_fixed_tau() {
    let f = DefiningFunction::model(2, 1.0).unwrap();
    let chart = BlowupChart::new(2).unwrap();
    let cfg = QuadratureConfig::with_rel_tol(1e-10);
    let path = ApproachPath::geometric(ApproachMode::FixedTau(0.8), 1.0, 0.25, 6).unwrap();
    let r = run_path(&f, &chart, &path, KernelKind::Szego, WindowPolicy::All, 1e-6, &cfg, &Sequential).unwrap();
    let c0 = r.c0.clone().unwrap().unwrap();
    let first = c0.sequence[0];
    assert!(c0.sequence.iter().all(|v| ((v - first) / first).abs() < 1e-8), "{:?}", c0.sequence);
    assert!(c0.converged && ((c0.estimate - first) / first).abs() < 1e-7);
    let fit = r.fit.unwrap();
    assert!((fit.slope + 1.5).abs() < 1e-8);
    assert_eq!(r.chart_id, chart.id());
    assert!(r.points.iter().all(|p| p.value.as_ref().is_ok_and(|v| v.err_estimate > 0.0 && v.err_estimate < 1e-8)));
}
