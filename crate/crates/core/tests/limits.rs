//! Properties of the excluded-volume family P∞(ε, g).

use dipolefield::analytic::shift_constant_for_mode;
use dipolefield::limit::*;
use dipolefield::OrientationMode;

fn near_center(mode: OrientationMode) -> Grid {
    let c = shift_constant_for_mode(mode);
    Grid::new(c - 6.0, c + 6.0, 481).unwrap()
}

#[test]
fn distance_to_lorentzian_shrinks_as_exclusion_vanishes() {
    for mode in OrientationMode::ALL {
        let grid = near_center(mode);
        let c = shift_constant_for_mode(mode);
        let lorentzian = lorentzian_limit(mode, &grid).unwrap();
        let d: Vec<f64> = [1.0, 0.3, 0.1, 0.03]
            .iter()
            .map(|&eps| {
                let curve = excluded_curve(mode, eps, &grid, &InversionOptions::default()).unwrap();
                curve.sup_distance(&lorentzian, |g| (g - c).abs() <= 5.0)
            })
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{mode}: {d:?}");
    }
}

#[test]
fn distance_to_gaussian_shrinks_as_exclusion_grows() {
    let mode = OrientationMode::Parallel;
    let d: Vec<f64> = [10.0, 30.0, 100.0]
        .iter()
        .map(|&eps| {
            let sd = gaussian_variance(eps, mode).sqrt();
            let grid = Grid::new(-8.0 * sd, 8.0 * sd, 401).unwrap();
            let curve = excluded_curve(mode, eps, &grid, &InversionOptions::default()).unwrap();
            let gauss = gaussian_asymptote(eps, mode, &grid).unwrap();
            curve.sup_distance(&gauss, |_| true) / gauss.peak().1
        })
        .collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn excluded_family_has_zero_mean_and_unit_mass() {
    for mode in OrientationMode::ALL {
        for eps in [0.4, 1.0, 2.0] {
            let grid = Grid::default_for_excluded(mode, eps);
            let curve = excluded_curve(mode, eps, &grid, &InversionOptions::default()).unwrap();
            let norm = curve.normalization();
            assert!((0.99..=1.001).contains(&norm), "{mode} {eps}: {norm}");
            assert!(curve.mean().abs() < 1e-3, "{mode} {eps}: {}", curve.mean());
            assert!(curve.density.iter().all(|p| *p >= 0.0));
        }
    }
}

#[test]
fn excluded_family_variance_is_second_moment_over_epsilon() {
    for mode in OrientationMode::ALL {
        let eps = 2.0;
        let curve = excluded_curve(mode, eps, &Grid::default_for_excluded(mode, eps), &InversionOptions::default()).unwrap();
        let expected = gaussian_variance(eps, mode);
        assert!((curve.variance() / expected - 1.0).abs() < 1e-3, "{mode}");
    }
}

#[test]
fn zero_exclusion_is_the_closed_form_lorentzian() {
    let mode = OrientationMode::Parallel;
    let grid = Grid::default_for(mode);
    let a = excluded_curve(mode, 0.0, &grid, &InversionOptions::default()).unwrap();
    assert_eq!(a, lorentzian_limit(mode, &grid).unwrap());
    assert!(excluded_curve(mode, 2e6, &grid, &InversionOptions::default()).is_err());
}

#[test]
fn lorentzian_curves_are_normalized() {
    for mode in OrientationMode::ALL {
        let curve = lorentzian_limit(mode, &Grid::default_for(mode)).unwrap();
        let n = curve.normalization();
        assert!((0.99..=1.001).contains(&n), "{mode}: {n}");
    }
}
