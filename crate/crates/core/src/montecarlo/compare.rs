use std::fmt;

use serde::{Deserialize, Serialize};

use super::FieldHistogram;
use crate::error::{Error, Result};
use crate::limit::DistributionCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Largest allowed |z| over included bins.
    pub threshold: f64,
    /// Allowed band for χ²/dof.
    pub chi2_band: (f64, f64),
    /// Bins with fewer expected counts are left out of z and χ².
    pub min_expected: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            threshold: 5.0,
            chi2_band: (0.8, 1.3),
            min_expected: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// max |normalized height − bin-averaged density| over covered bins.
    pub sup_norm: f64,
    /// max |O − E|/√E over included bins.
    pub max_z: f64,
    /// Center of the bin holding `max_z`.
    pub max_z_at: f64,
    pub chi2: f64,
    /// Included bins minus one (the total count is fixed).
    pub dof: usize,
    pub included_bins: usize,
    pub excluded_bins: usize,
    pub options: CompareOptions,
    pub verdict: Verdict,
}

impl ComparisonReport {
    pub fn chi2_per_dof(&self) -> f64 {
        self.chi2 / self.dof as f64
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: max z {:.3} at g = {:.4} (threshold {}), chi2/dof {:.4} = {:.2}/{} (band {}..{}), sup-norm {:.3e}, {} bins used, {} excluded",
            self.verdict,
            self.max_z,
            self.max_z_at,
            self.options.threshold,
            self.chi2_per_dof(),
            self.chi2,
            self.dof,
            self.options.chi2_band.0,
            self.options.chi2_band.1,
            self.sup_norm,
            self.included_bins,
            self.excluded_bins
        )
    }
}

/// Compares histogram counts with the counts expected from a density curve.
///
/// Expected count per bin is M times the integral of the curve's linear
/// interpolant over the bin. Bins the curve does not fully cover, or with
/// expected count below `min_expected`, are excluded from z and χ².
pub fn compare(histogram: &FieldHistogram, curve: &DistributionCurve, opts: &CompareOptions) -> Result<ComparisonReport> {
    histogram.check_consistent()?;
    let b = histogram.binning;
    let (lo, hi) = (curve.g[0], curve.g[curve.len() - 1]);
    if hi <= b.min || lo >= b.max {
        return Err(Error::Comparison(format!(
            "curve support [{lo}, {hi}] does not overlap bins [{}, {}]",
            b.min, b.max
        )));
    }
    let curve_step = (hi - lo) / (curve.len() - 1) as f64;
    if curve_step > b.width() {
        return Err(Error::Comparison(format!(
            "curve step {curve_step} is coarser than bin width {}",
            b.width()
        )));
    }
    if histogram.realizations == 0 {
        return Err(Error::Comparison("histogram is empty".into()));
    }

    let m = histogram.realizations as f64;
    let heights = histogram.normalized_heights();
    let mut sup_norm: f64 = 0.0;
    let (mut max_z, mut max_z_at) = (0.0f64, f64::NAN);
    let mut chi2 = 0.0;
    let mut included = 0usize;
    for i in 0..b.count {
        let (a, e) = (b.edge(i), b.edge(i + 1));
        if a < lo || e > hi {
            continue;
        }
        let avg = curve.average_over(a, e);
        sup_norm = sup_norm.max((heights[i] - avg).abs());
        let expected = m * avg * (e - a);
        if expected < opts.min_expected {
            continue;
        }
        included += 1;
        let z = (histogram.counts[i] as f64 - expected) / expected.sqrt();
        chi2 += z * z;
        if z.abs() > max_z {
            max_z = z.abs();
            max_z_at = b.center(i);
        }
    }
    if included < 2 {
        return Err(Error::Comparison(format!(
            "only {included} bins have at least {} expected counts",
            opts.min_expected
        )));
    }
    let dof = included - 1;
    let ratio = chi2 / dof as f64;
    let verdict = if max_z <= opts.threshold && ratio >= opts.chi2_band.0 && ratio <= opts.chi2_band.1 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ComparisonReport {
        sup_norm,
        max_z,
        max_z_at,
        chi2,
        dof,
        included_bins: included,
        excluded_bins: b.count - included,
        options: *opts,
        verdict,
    })
}
