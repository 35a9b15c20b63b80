use dipolefield::OrientationMode;
use dipolefield_web::demo;

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1])).sum()
}

#[test]
fn excluded_curve_narrows_and_keeps_mass() {
    let mut last_peak = 0.0;
    for eps in [0.0, 0.4, 2.0] {
        let s = demo::excluded(OrientationMode::Parallel, eps).unwrap();
        assert_eq!(s.x.len(), s.y.len());
        assert_eq!(s.x.len(), s.reference.len());
        let peak = s.y.iter().cloned().fold(0.0, f64::max);
        assert!(peak > last_peak);
        last_peak = peak;
        if eps > 0.0 {
            let mass = trapezoid(&s.x, &s.y);
            assert!((mass - 1.0).abs() < 2e-3, "eps {eps}: mass {mass}");
        }
    }
}

#[test]
fn lorentzian_matches_its_reference_at_zero() {
    let s = demo::excluded(OrientationMode::Random, 0.0).unwrap();
    for (a, b) in s.y.iter().zip(&s.reference) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn geometry_factor_tends_to_the_step() {
    for mode in OrientationMode::ALL {
        let s = demo::geometry(mode).unwrap();
        let last = s.x.len() - 1;
        assert!((s.y[last] - s.reference[last]).abs() < 0.02, "{mode:?}");
        assert!(s.y.iter().all(|v| *v >= 0.0));
    }
}

#[test]
fn small_simulation_agrees_with_the_curve() {
    let s = demo::simulate(OrientationMode::Parallel, 1.0, 500, 20_000, 4).unwrap();
    assert!(s.summary.starts_with("PASS"), "{}", s.summary);
    let again = demo::simulate(OrientationMode::Parallel, 1.0, 500, 20_000, 4).unwrap();
    assert_eq!(s, again);
}

#[test]
fn out_of_range_inputs_are_rejected() {
    assert!(demo::excluded(OrientationMode::Parallel, 0.01).is_err());
    assert!(demo::excluded(OrientationMode::Parallel, 100.0).is_err());
    assert!(demo::simulate(OrientationMode::Parallel, 0.0, 100_000, 100_000, 1).is_err());
}

#[test]
fn smallest_epsilon_is_close_to_the_lorentzian() {
    let s = demo::excluded(OrientationMode::Random, demo::MIN_EPSILON).unwrap();
    let sup = s.y.iter().zip(&s.reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(sup < 0.02, "{sup}");
}
