use std::f64::consts::PI;
use std::fmt::Write as _;

use dipolefield::analytic::{d_infinity, shift_constant_for_mode, shift_constant_with_tol, GeometryFactor};
use dipolefield::io::{self, Format};
use dipolefield::limit::{excluded_curve, lorentzian_curve, lorentzian_limit, Grid};
use dipolefield::montecarlo::{compare, run_simulation};
use dipolefield::OrientationMode;
use serde::Serialize;

use crate::config::{AnalyticSettings, CompareSettings, ConstantsSettings, SimulateSettings};
use crate::output::{file_name, write_atomic};
use crate::{CliError, Outcome};

/// Γ and g_c in units of Cρ: F₀ = C·4πρ/3.
const UNIT_FACTOR: f64 = 4.0 * PI / 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsRow {
    pub mode: OrientationMode,
    pub d_infinity: f64,
    pub half_width: f64,
    pub shift: f64,
    /// g_c by quadrature of g·P₁,₁ on [−3, 3].
    pub shift_quadrature: f64,
    pub width_coefficient: f64,
    pub center_coefficient: f64,
}

pub fn constants_rows(modes: &[OrientationMode], tol: f64) -> Result<Vec<ConstantsRow>, CliError> {
    modes
        .iter()
        .map(|&mode| {
            let d = d_infinity(mode);
            let gamma = PI * d;
            let shift = shift_constant_for_mode(mode);
            let quad = shift_constant_with_tol(&GeometryFactor::for_mode(mode), 3.0, tol)?;
            Ok(ConstantsRow {
                mode,
                d_infinity: d,
                half_width: gamma,
                shift,
                shift_quadrature: quad,
                width_coefficient: gamma * UNIT_FACTOR,
                center_coefficient: shift * UNIT_FACTOR,
            })
        })
        .collect()
}

fn constants_csv(rows: &[ConstantsRow]) -> String {
    let mut out =
        String::from("mode,d_infinity,half_width,shift,shift_quadrature,width_coefficient,center_coefficient\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
            r.mode, r.d_infinity, r.half_width, r.shift, r.shift_quadrature, r.width_coefficient, r.center_coefficient
        );
    }
    out
}

pub fn constants(s: &ConstantsSettings) -> Result<Outcome, CliError> {
    let rows = constants_rows(&s.modes, s.tol)?;
    let text = match s.format {
        Format::Csv => constants_csv(&rows),
        Format::Json => io::to_json(&rows),
    };
    match &s.out {
        Some(p) => {
            write_atomic(p, &text)?;
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(Outcome::Done)
}

pub fn analytic(s: &AnalyticSettings) -> Result<Outcome, CliError> {
    for &eps in &s.epsilons {
        let grid = s.grid.unwrap_or_else(|| Grid::default_for_excluded(s.mode, eps));
        let (curve, suffix) = match (eps == 0.0, s.shift) {
            (true, Some(center)) => {
                let gamma = PI * d_infinity(s.mode);
                (lorentzian_curve(gamma, center, Some(s.mode), &grid)?, format!("-shift{center}"))
            }
            (true, None) => (lorentzian_limit(s.mode, &grid)?, String::new()),
            (false, _) => (excluded_curve(s.mode, eps, &grid, &s.inversion)?, String::new()),
        };
        let path = s.out_dir.join(file_name("curve", s.mode, eps, &suffix, s.format.extension()));
        write_atomic(&path, &io::render_curve(&curve, s.format))?;
        let (gp, pp) = curve.peak();
        println!(
            "wrote {} (peak {pp:.6} at g = {gp:.4}, mass {:.6})",
            path.display(),
            curve.normalization()
        );
    }
    Ok(Outcome::Done)
}

pub fn simulate(s: &SimulateSettings) -> Result<Outcome, CliError> {
    for spec in &s.specs {
        let h = run_simulation(spec, s.workers)?;
        let path = s
            .out_dir
            .join(file_name("histogram", spec.mode, spec.epsilon, "", s.format.extension()));
        write_atomic(&path, &io::render_histogram(&h, s.format))?;
        let var_note = if h.variance_converged() { "" } else { " (not convergent at epsilon = 0)" };
        println!(
            "wrote {} (seed {}, N {}, M {}, mean {:.5} +/- {:.5}, variance {:.5}{var_note}, underflow {}, overflow {})",
            path.display(),
            spec.seed,
            spec.n_dipoles,
            spec.realizations,
            h.mean(),
            h.standard_error(),
            h.variance(),
            h.underflow,
            h.overflow
        );
    }
    Ok(Outcome::Done)
}

fn read_input(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn compare_files(s: &CompareSettings) -> Result<Outcome, CliError> {
    let h = io::parse_histogram(&read_input(&s.histogram)?).map_err(|source| CliError::Input {
        path: s.histogram.clone(),
        source,
    })?;
    let c = io::parse_curve(&read_input(&s.curve)?).map_err(|source| CliError::Input {
        path: s.curve.clone(),
        source,
    })?;
    let report = compare(&h, &c, &s.options)?;
    println!("{report}");
    if let Some(p) = &s.out {
        write_atomic(p, &io::render_report(&report, s.format))?;
        println!("wrote {}", p.display());
    }
    Ok(if report.passed() { Outcome::Pass } else { Outcome::Fail })
}
