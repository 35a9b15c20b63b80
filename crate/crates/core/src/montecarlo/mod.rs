//! Direct simulation: N dipoles placed uniformly in the shell ε < x ≤ N + ε
//! (x = (r/r₀)³), summed field per realization, histogrammed over M
//! realizations.
//!
//! Realizations are split into fixed blocks of [`BLOCK_SIZE`]. Block `b` draws
//! from ChaCha8 stream `b` under the run seed, and block results are merged
//! in block order, so the output does not depend on how many workers ran.

mod compare;
mod histogram;

pub use compare::{compare, ComparisonReport, CompareOptions, Verdict};
pub use histogram::{Binning, FieldHistogram, StreamingMoments, MAX_BINS};

use std::f64::consts::TAU;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::{DipolePlacement, OrientationMode, ReducedField};

/// Realizations per RNG stream.
pub const BLOCK_SIZE: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub n_dipoles: u64,
    pub realizations: u64,
    pub epsilon: f64,
    pub mode: OrientationMode,
    pub seed: u64,
    pub binning: Binning,
}

impl SimulationSpec {
    /// Spec with the default binning for (ε, mode).
    pub fn new(mode: OrientationMode, epsilon: f64, n_dipoles: u64, realizations: u64, seed: u64) -> Result<Self> {
        let spec = Self {
            n_dipoles,
            realizations,
            epsilon,
            mode,
            seed,
            binning: Binning::default_for(epsilon, mode),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_binning(mut self, binning: Binning) -> Result<Self> {
        self.binning = binning;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_dipoles < 1 {
            return Err(invalid("n_dipoles", "need at least one dipole"));
        }
        if self.realizations < 1 {
            return Err(invalid("realizations", "need at least one realization"));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(invalid("epsilon", format!("must be finite and nonnegative, got {}", self.epsilon)));
        }
        self.binning.validate()
    }
}

/// Uniform on (0, 1], 53 random bits.
#[inline]
fn unit_open_closed(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on (−1, 1].
#[inline]
fn cosine(rng: &mut impl RngCore) -> f64 {
    2.0 * unit_open_closed(rng) - 1.0
}

/// Draws one dipole: x uniform on (ε, N + ε], directions from the uniform
/// sphere measure.
pub fn sample_dipole(spec: &SimulationSpec, rng: &mut impl RngCore) -> DipolePlacement {
    let x = spec.epsilon + spec.n_dipoles as f64 * unit_open_closed(rng);
    let mu = cosine(rng);
    match spec.mode {
        OrientationMode::Parallel => DipolePlacement::parallel(x, mu),
        OrientationMode::Random => {
            let mu2 = cosine(rng);
            let phi = TAU * (1.0 - unit_open_closed(rng));
            DipolePlacement::random(x, mu, mu2, phi)
        }
    }
}

/// Running Σd and Σd² of the angular factors.
#[derive(Default)]
struct AngularSums {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

impl AngularSums {
    #[inline]
    fn push(&mut self, d: f64) {
        self.count += 1;
        self.sum += d;
        self.sum_sq += d * d;
    }

    fn moments(&self) -> StreamingMoments {
        if self.count == 0 {
            return StreamingMoments::default();
        }
        let mean = self.sum / self.count as f64;
        StreamingMoments {
            count: self.count,
            mean,
            m2: (self.sum_sq - mean * self.sum).max(0.0),
        }
    }
}

/// Summed reduced field of one realization, also feeding each dipole's
/// angular factor to `angular` when given.
#[inline]
fn realization(spec: &SimulationSpec, rng: &mut impl RngCore, mut angular: Option<&mut AngularSums>) -> f64 {
    let n = spec.n_dipoles as f64;
    let mut g = 0.0;
    match spec.mode {
        OrientationMode::Parallel => {
            for _ in 0..spec.n_dipoles {
                let x = spec.epsilon + n * unit_open_closed(rng);
                let mu = cosine(rng);
                let d = 1.0 - 3.0 * mu * mu;
                if let Some(a) = angular.as_deref_mut() {
                    a.push(d);
                }
                g += d / x;
            }
        }
        OrientationMode::Random => {
            for _ in 0..spec.n_dipoles {
                let x = spec.epsilon + n * unit_open_closed(rng);
                let mu1 = cosine(rng);
                let mu2 = cosine(rng);
                let phi = TAU * (1.0 - unit_open_closed(rng));
                let s = ((1.0 - mu1 * mu1) * (1.0 - mu2 * mu2)).max(0.0).sqrt();
                let d = s * phi.sin() - 2.0 * mu1 * mu2;
                if let Some(a) = angular.as_deref_mut() {
                    a.push(d);
                }
                g += d / x;
            }
        }
    }
    g
}

/// One realization of the total reduced field Σ dᵢ/xᵢ.
pub fn sample_realization(spec: &SimulationSpec, rng: &mut impl RngCore) -> ReducedField {
    ReducedField(realization(spec, rng, None))
}

/// RNG for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn run_block(spec: &SimulationSpec, block: u64) -> FieldHistogram {
    let mut h = FieldHistogram::empty(spec.binning, spec.mode, spec.epsilon, spec.n_dipoles, spec.seed);
    let start = block * BLOCK_SIZE;
    let len = BLOCK_SIZE.min(spec.realizations - start);
    let mut rng = block_rng(spec.seed, block);
    let mut angular = AngularSums::default();
    for _ in 0..len {
        let g = realization(spec, &mut rng, Some(&mut angular));
        h.record(g);
    }
    h.angular = angular.moments();
    h
}

/// Runs all realizations. `workers` sets the thread count (None: the global
/// pool); the result is identical for every choice.
pub fn run_simulation(spec: &SimulationSpec, workers: Option<usize>) -> Result<FieldHistogram> {
    spec.validate()?;
    let blocks: Vec<u64> = (0..spec.realizations.div_ceil(BLOCK_SIZE)).collect();
    let parts = run_blocks(spec, &blocks, workers)?;
    let mut total = FieldHistogram::empty(spec.binning, spec.mode, spec.epsilon, spec.n_dipoles, spec.seed);
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

#[cfg(feature = "parallel")]
fn run_blocks(spec: &SimulationSpec, blocks: &[u64], workers: Option<usize>) -> Result<Vec<FieldHistogram>> {
    use rayon::prelude::*;
    let work = || blocks.par_iter().map(|&b| run_block(spec, b)).collect();
    match workers {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| invalid("workers", e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_blocks(spec: &SimulationSpec, blocks: &[u64], _workers: Option<usize>) -> Result<Vec<FieldHistogram>> {
    Ok(blocks.iter().map(|&b| run_block(spec, b)).collect())
}
