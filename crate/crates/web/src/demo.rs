//! Plain-Rust side of the demo operations.

use dipolefield::analytic::{d_infinity, geometry_factor_step, shift_constant_for_mode, GeometryFactor};
use dipolefield::error::invalid;
use dipolefield::limit::{excluded_curve, lorentzian_limit, Grid, InversionOptions};
use dipolefield::montecarlo::{compare, run_simulation, Binning, CompareOptions, SimulationSpec};
use dipolefield::{OrientationMode, Result};

/// Largest ε offered by the page.
pub const MAX_EPSILON: f64 = 20.0;
/// Smallest nonzero ε; the inversion cost grows like 1/ε below this.
pub const MIN_EPSILON: f64 = 0.05;
/// Cap on N·M so a click stays interactive.
pub const MAX_DRAWS: u64 = 200_000_000;

const CURVE_POINTS: usize = 401;
const SIM_BINS: usize = 101;
const TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub reference: Vec<f64>,
    pub summary: String,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon == 0.0 || (MIN_EPSILON..=MAX_EPSILON).contains(&epsilon)) {
        return Err(invalid(
            "epsilon",
            format!("{epsilon} is outside 0 or [{MIN_EPSILON}, {MAX_EPSILON}]"),
        ));
    }
    Ok(())
}

/// Plot half-width: ±8 at ε = 0, ±6σ of the Gaussian asymptote otherwise.
pub fn window(mode: OrientationMode, epsilon: f64) -> f64 {
    if epsilon > 0.0 {
        (6.0 * (mode.angular_second_moment() / epsilon).sqrt()).clamp(1.0, 8.0)
    } else {
        8.0
    }
}

fn options() -> InversionOptions {
    InversionOptions {
        tol: TOL,
        ..InversionOptions::default()
    }
}

/// P∞(ε, g) with the ε = 0 Lorentzian as reference.
pub fn excluded(mode: OrientationMode, epsilon: f64) -> Result<Series> {
    check_epsilon(epsilon)?;
    let half = window(mode, epsilon);
    let grid = Grid::new(-half, half, CURVE_POINTS)?;
    let curve = excluded_curve(mode, epsilon, &grid, &options())?;
    let reference = lorentzian_limit(mode, &grid)?;
    let (at, peak) = curve.peak();
    let summary = if epsilon > 0.0 {
        format!(
            "ε = {epsilon}: peak {peak:.4} at g = {at:.3}; variance {:.4} (E[d²]/ε)",
            mode.angular_second_moment() / epsilon
        )
    } else {
        format!(
            "ε = 0: Lorentzian, width Γ = {:.5}, center g_c = {:.5}",
            std::f64::consts::PI * d_infinity(mode),
            shift_constant_for_mode(mode)
        )
    };
    Ok(Series {
        x: curve.g,
        y: curve.density,
        reference: reference.density,
        summary,
    })
}

/// D(g) with the step D∞·1{|g| ≥ 2D∞} as reference.
pub fn geometry(mode: OrientationMode) -> Result<Series> {
    let geometry = GeometryFactor::for_mode(mode);
    let d = geometry.d_infinity();
    let grid = Grid::new(-2.5, 2.5, 501)?;
    let x = grid.values();
    let y = x.iter().map(|&g| geometry.eval(g)).collect();
    let reference = x.iter().map(|&g| geometry_factor_step(g, d)).collect();
    Ok(Series {
        x,
        y,
        reference,
        summary: format!(
            "D∞ = {d:.7}, Γ = πD∞ = {:.5}, g_c = {:.5}",
            std::f64::consts::PI * d,
            shift_constant_for_mode(mode)
        ),
    })
}

/// Histogram of a direct simulation, with the limiting curve averaged over
/// each bin as reference.
pub fn simulate(mode: OrientationMode, epsilon: f64, n_dipoles: u64, realizations: u64, seed: u64) -> Result<Series> {
    check_epsilon(epsilon)?;
    if n_dipoles.saturating_mul(realizations) > MAX_DRAWS {
        return Err(invalid("realizations", format!("N·M above {MAX_DRAWS} is too slow for the page")));
    }
    let half = window(mode, epsilon);
    let binning = Binning::new(-half, half, SIM_BINS)?;
    let spec = SimulationSpec::new(mode, epsilon, n_dipoles, realizations, seed)?.with_binning(binning)?;
    let hist = run_simulation(&spec, None)?;
    let grid = Grid::new(-half, half, 4 * SIM_BINS + 1)?;
    let curve = excluded_curve(mode, epsilon, &grid, &options())?;
    let report = compare(&hist, &curve, &CompareOptions::default())?;
    let x = (0..SIM_BINS).map(|i| binning.center(i)).collect();
    let reference = (0..SIM_BINS)
        .map(|i| curve.average_over(binning.edge(i), binning.edge(i + 1)))
        .collect();
    Ok(Series {
        x,
        y: hist.normalized_heights(),
        reference,
        summary: format!(
            "{}: max |z| {:.2}, χ²/dof {:.3} over {} bins; mean {:.4} ± {:.4}",
            report.verdict,
            report.max_z,
            report.chi2_per_dof(),
            report.included_bins,
            hist.mean(),
            hist.standard_error()
        ),
    })
}
