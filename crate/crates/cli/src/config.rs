//! TOML run config and its merge with command-line flags (flags win).
//!
//! ```toml
//! mode = "parallel"
//! seed = 1
//! format = "csv"
//! out = "results"
//!
//! [analytic]
//! epsilon = [0.0, 0.4, 1.0, 2.0]
//! grid = "-14:14:2048"
//! tol = 1e-10
//!
//! [simulate]
//! epsilon = [0.0]
//! n_dipoles = 10000
//! realizations = 200000
//! bins = "-8:8:101"
//!
//! [compare]
//! threshold = 5.0
//! chi2_band = [0.8, 1.3]
//! min_expected = 10.0
//! ```

use std::path::{Path, PathBuf};

use dipolefield::io::Format;
use dipolefield::limit::{Grid, InversionOptions};
use dipolefield::montecarlo::{Binning, CompareOptions, SimulationSpec};
use dipolefield::OrientationMode;
use serde::Deserialize;

use crate::args::{AnalyticArgs, CompareArgs, ConstantsArgs, SimulateArgs};
use crate::{CliError, OUTPUT_DIR_ENV};

pub const DEFAULT_N_DIPOLES: u64 = 10_000;
pub const DEFAULT_REALIZATIONS: u64 = 200_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<OrientationMode>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub analytic: AnalyticSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticSection {
    pub mode: Option<OrientationMode>,
    pub epsilon: Option<Vec<f64>>,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub shift: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub mode: Option<OrientationMode>,
    pub epsilon: Option<Vec<f64>>,
    pub n_dipoles: Option<u64>,
    pub realizations: Option<u64>,
    pub seed: Option<u64>,
    pub bins: Option<String>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub threshold: Option<f64>,
    pub chi2_band: Option<(f64, f64)>,
    pub min_expected: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|reason| CliError::Config {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    fn format(&self) -> Result<Option<Format>, CliError> {
        self.format
            .as_deref()
            .map(|f| f.parse().map_err(|e: dipolefield::Error| CliError::Usage(format!("format: {e}"))))
            .transpose()
    }
}

fn usage(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid {field}: {reason}"))
}

/// Output directory: --out, then the environment override, then the
/// config, then the working directory.
pub fn output_dir(flag: Option<&PathBuf>, config: Option<&PathBuf>) -> PathBuf {
    if let Some(p) = flag {
        return p.clone();
    }
    if let Some(env) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(env);
    }
    config.cloned().unwrap_or_else(|| PathBuf::from("."))
}

/// A single output file path; a relative path is placed under the
/// environment override directory when that is set.
pub fn output_file(flag: Option<&PathBuf>) -> Option<PathBuf> {
    let p = flag?;
    if p.is_relative() {
        if let Some(env) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return Some(PathBuf::from(env).join(p));
        }
    }
    Some(p.clone())
}

#[derive(Debug, Clone)]
pub struct ConstantsSettings {
    pub modes: Vec<OrientationMode>,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn constants_settings(args: &ConstantsArgs, cfg: &FileConfig) -> Result<ConstantsSettings, CliError> {
    let modes = match args.mode.or(cfg.mode) {
        Some(m) => vec![m],
        None => OrientationMode::ALL.to_vec(),
    };
    let tol = args.tol.unwrap_or(1e-13);
    if !(tol > 0.0) {
        return Err(usage("tol", "must be positive"));
    }
    Ok(ConstantsSettings {
        modes,
        tol,
        format: args.output.format.or(cfg.format()?).unwrap_or(Format::Csv),
        out: output_file(args.output.out.as_ref()),
    })
}

#[derive(Debug, Clone)]
pub struct AnalyticSettings {
    pub mode: OrientationMode,
    pub epsilons: Vec<f64>,
    pub grid: Option<Grid>,
    pub inversion: InversionOptions,
    pub shift: Option<f64>,
    pub format: Format,
    pub out_dir: PathBuf,
}

fn check_epsilons(eps: &[f64]) -> Result<(), CliError> {
    if eps.is_empty() {
        return Err(usage("epsilon", "list is empty"));
    }
    if let Some(e) = eps.iter().find(|e| !e.is_finite() || **e < 0.0) {
        return Err(usage("epsilon", format!("{e} is not a finite nonnegative number")));
    }
    if let Some(e) = eps.iter().find(|e| **e > dipolefield::limit::MAX_EPSILON) {
        return Err(usage("epsilon", format!("{e} exceeds {}", dipolefield::limit::MAX_EPSILON)));
    }
    Ok(())
}

pub fn analytic_settings(args: &AnalyticArgs, cfg: &FileConfig) -> Result<AnalyticSettings, CliError> {
    let sec = &cfg.analytic;
    let mode = args.mode.or(sec.mode).or(cfg.mode).unwrap_or(OrientationMode::Parallel);
    let epsilons = args.epsilon.clone().or_else(|| sec.epsilon.clone()).unwrap_or_else(|| vec![0.0]);
    check_epsilons(&epsilons)?;
    let grid = match (&args.grid, &sec.grid) {
        (Some(g), _) => Some(*g),
        (None, Some(text)) => Some(text.parse::<Grid>().map_err(|e| usage("grid", e))?),
        (None, None) => None,
    };
    let mut inversion = InversionOptions::default();
    if let Some(tol) = args.tol.or(sec.tol) {
        if !(tol > 0.0 && tol < 1e-3) {
            return Err(usage("tol", format!("{tol} must lie in (0, 1e-3)")));
        }
        inversion.tol = tol;
    }
    let shift = args.shift.or(sec.shift);
    if let Some(s) = shift {
        if !s.is_finite() {
            return Err(usage("shift", "must be finite"));
        }
    }
    Ok(AnalyticSettings {
        mode,
        epsilons,
        grid,
        inversion,
        shift,
        format: args.output.format.or(cfg.format()?).unwrap_or(Format::Csv),
        out_dir: output_dir(args.output.out.as_ref(), cfg.out.as_ref()),
    })
}

#[derive(Debug, Clone)]
pub struct SimulateSettings {
    pub specs: Vec<SimulationSpec>,
    pub workers: Option<usize>,
    pub format: Format,
    pub out_dir: PathBuf,
}

pub fn simulate_settings(args: &SimulateArgs, cfg: &FileConfig) -> Result<SimulateSettings, CliError> {
    let sec = &cfg.simulate;
    let mode = args.mode.or(sec.mode).or(cfg.mode).unwrap_or(OrientationMode::Parallel);
    let epsilons = args.epsilon.clone().or_else(|| sec.epsilon.clone()).unwrap_or_else(|| vec![0.0]);
    check_epsilons(&epsilons)?;
    let n = args.n_dipoles.or(sec.n_dipoles).unwrap_or(DEFAULT_N_DIPOLES);
    let m = args.realizations.or(sec.realizations).unwrap_or(DEFAULT_REALIZATIONS);
    let seed = args.seed.or(sec.seed).or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let bins = match (&args.bins, &sec.bins) {
        (Some(b), _) => Some(*b),
        (None, Some(text)) => Some(text.parse::<Binning>().map_err(|e| usage("bins", e))?),
        (None, None) => None,
    };
    let workers = args.workers.or(sec.workers);
    if workers == Some(0) {
        return Err(usage("workers", "must be at least 1"));
    }
    let specs = epsilons
        .iter()
        .map(|&eps| {
            let spec = SimulationSpec::new(mode, eps, n, m, seed)?;
            match bins {
                Some(b) => spec.with_binning(b),
                None => Ok(spec),
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(SimulateSettings {
        specs,
        workers,
        format: args.output.format.or(cfg.format()?).unwrap_or(Format::Csv),
        out_dir: output_dir(args.output.out.as_ref(), cfg.out.as_ref()),
    })
}

#[derive(Debug, Clone)]
pub struct CompareSettings {
    pub histogram: PathBuf,
    pub curve: PathBuf,
    pub options: CompareOptions,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn compare_settings(args: &CompareArgs, cfg: &FileConfig) -> Result<CompareSettings, CliError> {
    let sec = &cfg.compare;
    let mut options = CompareOptions::default();
    if let Some(t) = args.threshold.or(sec.threshold) {
        if !(t > 0.0) {
            return Err(usage("threshold", format!("{t} must be positive")));
        }
        options.threshold = t;
    }
    if let Some((lo, hi)) = sec.chi2_band {
        if !(lo >= 0.0 && hi > lo) {
            return Err(usage("chi2_band", format!("[{lo}, {hi}] is not an interval")));
        }
        options.chi2_band = (lo, hi);
    }
    if let Some(me) = sec.min_expected {
        if !(me > 0.0) {
            return Err(usage("min_expected", "must be positive"));
        }
        options.min_expected = me;
    }
    Ok(CompareSettings {
        histogram: args.histogram.clone(),
        curve: args.curve.clone(),
        options,
        format: args.output.format.or(cfg.format()?).unwrap_or(Format::Csv),
        out: output_file(args.output.out.as_ref()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"
            mode = "random"
            seed = 9
            [simulate]
            epsilon = [0.0, 1.0]
            n_dipoles = 100
            bins = "-4:4:41"
            [compare]
            chi2_band = [0.7, 1.4]
        "#;
        let cfg = FileConfig::parse(text).unwrap();
        assert_eq!(cfg.mode, Some(OrientationMode::Random));
        assert_eq!(cfg.simulate.n_dipoles, Some(100));
        assert_eq!(cfg.compare.chi2_band, Some((0.7, 1.4)));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_modes() {
        assert!(FileConfig::parse("nonsense = 1").is_err());
        assert!(FileConfig::parse("mode = \"sideways\"").is_err());
        assert!(FileConfig::parse("[simulate]\nn_dipole = 3").is_err());
    }
}
