use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::OrientationMode;

/// Upper bound on bin count, guarding the per-block histogram allocations.
pub const MAX_BINS: usize = 10_000_000;

/// `count` uniform bins on [min, max).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Binning {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let b = Self { min, max, count };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || !(self.min < self.max) {
            return Err(invalid("bins", format!("need finite min < max, got {}:{}", self.min, self.max)));
        }
        if self.count < 2 {
            return Err(invalid("bins", format!("need at least 2 bins, got {}", self.count)));
        }
        if self.count > MAX_BINS {
            return Err(invalid("bins", format!("{} bins exceed the budget of {MAX_BINS}", self.count)));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.max - self.min) / self.count as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        if i == self.count {
            self.max
        } else {
            self.min + self.width() * i as f64
        }
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edge(i) + self.edge(i + 1))
    }

    /// Bin index, or Err(false) below the range and Err(true) above it.
    #[inline]
    pub fn locate(&self, g: f64) -> std::result::Result<usize, bool> {
        if g < self.min {
            return Err(false);
        }
        if !(g < self.max) {
            return Err(true);
        }
        let i = ((g - self.min) / (self.max - self.min) * self.count as f64) as usize;
        Ok(i.min(self.count - 1))
    }

    /// [−8, 8] with 401 bins at ε = 0; ±6 standard deviations of the
    /// large-ε Gaussian otherwise.
    pub fn default_for(epsilon: f64, mode: OrientationMode) -> Self {
        if epsilon > 0.0 {
            let sd = (mode.angular_second_moment() / epsilon).sqrt();
            Self {
                min: -6.0 * sd,
                max: 6.0 * sd,
                count: 401,
            }
        } else {
            Self {
                min: -8.0,
                max: 8.0,
                count: 401,
            }
        }
    }
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

/// Parses `min:max:count`.
impl FromStr for Binning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bins '{s}' is not of the form min:max:count")));
        }
        let num = |p: &str| p.parse::<f64>().map_err(|_| Error::Parse(format!("bins '{s}': '{p}' is not a number")));
        let count = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bins '{s}': '{}' is not a bin count", parts[2])))?;
        Binning::new(num(parts[0])?, num(parts[1])?, count)
    }
}

/// One-pass mean and variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StreamingMoments {
    pub count: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
}

impl StreamingMoments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &StreamingMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            f64::INFINITY
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Histogram of realizations of the summed field, with streaming moments of
/// g and of the angular factor of every sampled dipole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHistogram {
    pub binning: Binning,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub realizations: u64,
    pub moments: StreamingMoments,
    /// Moments of the angular factor d over all dipoles.
    pub angular: StreamingMoments,
    pub mode: OrientationMode,
    pub epsilon: f64,
    pub n_dipoles: u64,
    pub seed: u64,
}

impl FieldHistogram {
    pub fn empty(binning: Binning, mode: OrientationMode, epsilon: f64, n_dipoles: u64, seed: u64) -> Self {
        Self {
            binning,
            counts: vec![0; binning.count],
            underflow: 0,
            overflow: 0,
            realizations: 0,
            moments: StreamingMoments::default(),
            angular: StreamingMoments::default(),
            mode,
            epsilon,
            n_dipoles,
            seed,
        }
    }

    #[inline]
    pub fn record(&mut self, g: f64) {
        self.realizations += 1;
        self.moments.push(g);
        match self.binning.locate(g) {
            Ok(i) => self.counts[i] += 1,
            Err(false) => self.underflow += 1,
            Err(true) => self.overflow += 1,
        }
    }

    /// Adds another histogram with identical binning.
    pub fn merge(&mut self, other: &FieldHistogram) -> Result<()> {
        if self.binning != other.binning {
            return Err(invalid("bins", "cannot merge histograms with different binning"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        self.realizations += other.realizations;
        self.moments.merge(&other.moments);
        self.angular.merge(&other.angular);
        Ok(())
    }

    /// count / (M · width), so the heights integrate to the in-range fraction.
    pub fn normalized_heights(&self) -> Vec<f64> {
        let scale = 1.0 / (self.realizations.max(1) as f64 * self.binning.width());
        self.counts.iter().map(|&c| c as f64 * scale).collect()
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn variance(&self) -> f64 {
        self.moments.variance()
    }

    pub fn standard_error(&self) -> f64 {
        self.moments.standard_error()
    }

    /// The g variance only exists for ε > 0; at ε = 0 it grows with M.
    pub fn variance_converged(&self) -> bool {
        self.epsilon > 0.0
    }

    /// Largest normalized height and its bin center.
    pub fn peak(&self) -> (f64, f64) {
        let h = self.normalized_heights();
        let (i, v) = h
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (self.binning.center(i), v)
    }

    pub fn check_consistent(&self) -> Result<()> {
        if self.counts.len() != self.binning.count {
            return Err(invalid("counts", format!("{} counts for {} bins", self.counts.len(), self.binning.count)));
        }
        if self.in_range() + self.underflow + self.overflow != self.realizations {
            return Err(invalid("counts", "bin counts plus underflow and overflow differ from the realization total"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn binning_locates_edges() {
        let b: Binning = "-1:1:4".parse().unwrap();
        assert_eq!(b.locate(-1.0), Ok(0));
        assert_eq!(b.locate(-0.5), Ok(1));
        assert_eq!(b.locate(0.999_999), Ok(3));
        assert_eq!(b.locate(1.0), Err(true));
        assert_eq!(b.locate(-1.000_001), Err(false));
        assert_eq!(b.locate(f64::NAN), Err(true));
        assert!("1:-1:4".parse::<Binning>().is_err());
        assert!("-1:1:1".parse::<Binning>().is_err());
        assert!(Binning::new(0.0, 1.0, MAX_BINS + 1).is_err());
    }

    #[test]
    fn default_binning() {
        let b = Binning::default_for(0.0, OrientationMode::Parallel);
        assert_eq!((b.min, b.max, b.count), (-8.0, 8.0, 401));
        let b = Binning::default_for(0.8, OrientationMode::Parallel);
        assert_abs_diff_eq!(b.max, 6.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn merged_moments_match_sequential(xs in prop::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
            let split = split.min(xs.len());
            let mut all = StreamingMoments::default();
            xs.iter().for_each(|&x| all.push(x));
            let (mut a, mut b) = (StreamingMoments::default(), StreamingMoments::default());
            xs[..split].iter().for_each(|&x| a.push(x));
            xs[split..].iter().for_each(|&x| b.push(x));
            a.merge(&b);
            prop_assert_eq!(a.count, all.count);
            prop_assert!((a.mean - all.mean).abs() <= 1e-9 * (1.0 + all.mean.abs()));
            prop_assert!((a.variance() - all.variance()).abs() <= 1e-8 * (1.0 + all.variance()));
        }

        #[test]
        fn counts_add_up(xs in prop::collection::vec(-20f64..20.0, 0..300)) {
            let b = Binning::new(-8.0, 8.0, 17).unwrap();
            let mut h = FieldHistogram::empty(b, OrientationMode::Parallel, 0.0, 1, 0);
            xs.iter().for_each(|&x| h.record(x));
            prop_assert!(h.check_consistent().is_ok());
            let mass: f64 = h.normalized_heights().iter().map(|v| v * b.width()).sum();
            let expected = h.in_range() as f64 / h.realizations.max(1) as f64;
            prop_assert!((mass - expected).abs() < 1e-12);
        }
    }
}
