//! N → ∞ limits of the summed field: the shifted Lorentzian, the
//! excluded-volume family P∞(ε, g), numerical inversion of characteristic
//! functions, and the large-ε Gaussian.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    charfn_single_minus_one, d_infinity, shift_constant_for_mode, CharacteristicFunction, GeometryFactor,
};
use crate::error::{domain, invalid, Error, Result};
use crate::kernel::OrientationMode;
use crate::par;
use crate::quad::{gl16, Quadrature};

/// Largest excluded-volume parameter accepted by the inversion.
pub const MAX_EPSILON: f64 = 1e6;
/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Default grid half-width in units of the Lorentzian half width Γ.
pub const DEFAULT_GRID_HALF_WIDTHS: f64 = 12.0;
/// Default grid half-width for ε > 0 in units of 1/ε.
const EXCLUDED_TAIL_REACH: f64 = 4.0;
/// Round-off floor of the single-dipole correction integral.
const QUAD_TOL_FLOOR: f64 = 1e-14;
/// Densities in [−floor, 0) are treated as round-off and clamped to zero.
pub const NEGATIVE_DENSITY_FLOOR: f64 = 1e-9;

/// Uniform grid `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        let g = Self { min, max, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || !(self.min < self.max) {
            return Err(invalid("grid", format!("need finite min < max, got {}:{}", self.min, self.max)));
        }
        if self.points < 2 {
            return Err(invalid("grid", format!("need at least 2 points, got {}", self.points)));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.max
        } else {
            self.min + self.step() * i as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    /// [g_c − 12Γ, g_c + 12Γ] with 2048 points.
    pub fn default_for(mode: OrientationMode) -> Self {
        let gamma = PI * d_infinity(mode);
        let c = shift_constant_for_mode(mode);
        let half = DEFAULT_GRID_HALF_WIDTHS * gamma;
        Self {
            min: c - half,
            max: c + half,
            points: DEFAULT_GRID_POINTS,
        }
    }

    /// Default grid for P∞(ε, ·): for small ε the tails run out to |g| ~ 2/ε
    /// and fall off faster than g⁻², so the half-width grows to 4/ε with the
    /// step held at Γ/20 or finer.
    pub fn default_for_excluded(mode: OrientationMode, epsilon: f64) -> Self {
        let base = Self::default_for(mode);
        if !(epsilon > 0.0) {
            return base;
        }
        let gamma = PI * d_infinity(mode);
        let c = shift_constant_for_mode(mode);
        let half = (DEFAULT_GRID_HALF_WIDTHS * gamma).max(EXCLUDED_TAIL_REACH / epsilon);
        let points = ((2.0 * half / (gamma / 20.0)).ceil() as usize + 1).max(DEFAULT_GRID_POINTS);
        Self {
            min: c - half,
            max: c + half,
            points,
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.points)
    }
}

/// Parses `min:max:points`.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid '{s}' is not of the form min:max:points")));
        }
        let num = |p: &str| p.parse::<f64>().map_err(|_| Error::Parse(format!("grid '{s}': '{p}' is not a number")));
        let points = parts[2]
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("grid '{s}': '{}' is not a point count", parts[2])))?;
        Grid::new(num(parts[0])?, num(parts[1])?, points)
    }
}

/// What a curve represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Lorentzian,
    Excluded,
    Gaussian,
    Inverted,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Lorentzian => "lorentzian",
            CurveKind::Excluded => "excluded",
            CurveKind::Gaussian => "gaussian",
            CurveKind::Inverted => "inverted",
        }
    }
}

impl FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lorentzian" => Ok(CurveKind::Lorentzian),
            "excluded" => Ok(CurveKind::Excluded),
            "gaussian" => Ok(CurveKind::Gaussian),
            "inverted" => Ok(CurveKind::Inverted),
            other => Err(Error::Parse(format!("unknown curve kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub kind: CurveKind,
    pub mode: Option<OrientationMode>,
    pub epsilon: f64,
    /// Center used for the algebraic tail estimate (g_c for the Lorentzian, 0 otherwise).
    pub center: f64,
    pub grid_step: f64,
    /// Inversion tolerance; 0 for closed forms.
    pub tolerance: f64,
    /// Upper k cutoff of the inversion; 0 for closed forms.
    pub cutoff: f64,
}

/// Density values on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    pub g: Vec<f64>,
    pub density: Vec<f64>,
    pub meta: CurveMeta,
}

impl DistributionCurve {
    pub fn new(g: Vec<f64>, density: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        if g.len() != density.len() {
            return Err(invalid("curve", format!("{} grid points but {} densities", g.len(), density.len())));
        }
        if g.len() < 2 {
            return Err(invalid("curve", "need at least 2 points"));
        }
        if g.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("curve", "grid must be strictly increasing"));
        }
        if let Some((x, v)) = g.iter().zip(&density).find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(invalid("curve", format!("density {v} at g = {x} is not a nonnegative number")));
        }
        Ok(Self { g, density, meta })
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn trapezoid_mass(&self) -> f64 {
        trapezoid(&self.g, &self.density)
    }

    /// Mass beyond the grid assuming P ∝ (g − center)⁻² outside it.
    pub fn tail_mass_estimate(&self) -> f64 {
        let c = self.meta.center;
        let n = self.len();
        let left = self.density[0] * (c - self.g[0]).abs();
        let right = self.density[n - 1] * (self.g[n - 1] - c).abs();
        left + right
    }

    /// Trapezoid integral plus tail estimate.
    pub fn normalization(&self) -> f64 {
        self.trapezoid_mass() + self.tail_mass_estimate()
    }

    /// First moment over the grid. Algebraic tails cancel between the two
    /// sides when the grid is symmetric about the center.
    pub fn mean(&self) -> f64 {
        let gp: Vec<f64> = self.g.iter().zip(&self.density).map(|(g, p)| g * p).collect();
        trapezoid(&self.g, &gp) / self.trapezoid_mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let v: Vec<f64> = self.g.iter().zip(&self.density).map(|(g, p)| (g - m).powi(2) * p).collect();
        trapezoid(&self.g, &v) / self.trapezoid_mass()
    }

    /// (g, P) at the largest density.
    pub fn peak(&self) -> (f64, f64) {
        let (i, p) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        (self.g[i], p)
    }

    /// Linear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.len();
        if !(x >= self.g[0] && x <= self.g[n - 1]) {
            return 0.0;
        }
        let i = match self.g.partition_point(|&v| v <= x) {
            0 => 0,
            j if j >= n => n - 2,
            j => j - 1,
        };
        let (x0, x1) = (self.g[i], self.g[i + 1]);
        let t = (x - x0) / (x1 - x0);
        self.density[i] * (1.0 - t) + self.density[i + 1] * t
    }

    /// Mean of the linear interpolant over [a, b] (zero outside the grid).
    pub fn average_over(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return self.interpolate(a);
        }
        self.integral_between(a, b) / (b - a)
    }

    /// ∫_a^b of the linear interpolant, a ≤ b.
    pub fn integral_between(&self, a: f64, b: f64) -> f64 {
        let n = self.len();
        let lo = a.max(self.g[0]);
        let hi = b.min(self.g[n - 1]);
        if !(hi > lo) {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut x = lo;
        let mut i = self.g.partition_point(|&v| v <= lo).saturating_sub(1).min(n - 2);
        while x < hi && i < n - 1 {
            let seg_end = self.g[i + 1].min(hi);
            if seg_end > x {
                acc += 0.5 * (self.interpolate(x) + self.interpolate(seg_end)) * (seg_end - x);
            }
            x = seg_end;
            i += 1;
        }
        acc
    }

    /// Largest |P − other| over grid points of `self` whose g satisfies `keep`.
    pub fn sup_distance(&self, other: &DistributionCurve, keep: impl Fn(f64) -> bool) -> f64 {
        self.g
            .iter()
            .zip(&self.density)
            .filter(|(g, _)| keep(**g))
            .map(|(g, p)| (p - other.interpolate(*g)).abs())
            .fold(0.0, f64::max)
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (ys[0] + ys[1]) * (xs[1] - xs[0]))
        .sum()
}

/// p̃∞(k) = exp(−πD∞|k| − i g_c k).
pub fn charfn_limit(k: f64, mode: OrientationMode) -> Complex64 {
    let gamma = PI * d_infinity(mode);
    let c = shift_constant_for_mode(mode);
    Complex64::new(-gamma * k.abs(), -c * k).exp()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(domain("epsilon", epsilon, "excluded volume must be finite and nonnegative"));
    }
    if epsilon > MAX_EPSILON {
        return Err(domain("epsilon", epsilon, "above 1e6 the Gaussian asymptote is exact to round-off; use it instead"));
    }
    Ok(())
}

/// Characteristic function of P∞(ε, g) for one orientation law.
#[derive(Debug, Clone)]
pub struct ExcludedCharFn {
    pub mode: OrientationMode,
    pub epsilon: f64,
    geometry: GeometryFactor,
    gamma: f64,
    shift: f64,
    quad: Quadrature,
}

impl ExcludedCharFn {
    /// `tol` bounds the absolute error of log p̃; the single-dipole correction
    /// integral is evaluated to tol/ε.
    pub fn new(mode: OrientationMode, epsilon: f64, tol: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(tol > 0.0) {
            return Err(domain("tol", tol, "tolerance must be positive"));
        }
        let quad_tol = if epsilon > 0.0 { (tol / epsilon.max(1e-3)).max(QUAD_TOL_FLOOR) } else { tol };
        Ok(Self {
            mode,
            epsilon,
            geometry: GeometryFactor::for_mode(mode),
            gamma: PI * d_infinity(mode),
            shift: shift_constant_for_mode(mode),
            quad: Quadrature::with_abs_tol(quad_tol),
        })
    }

    /// log p̃∞(ε, k).
    pub fn log_eval(&self, k: f64) -> Result<Complex64> {
        let base = Complex64::new(-self.gamma * k.abs(), -self.shift * k);
        if self.epsilon == 0.0 || k == 0.0 {
            return Ok(base);
        }
        let m = charfn_single_minus_one(k / self.epsilon, &self.geometry, &self.quad)?;
        Ok(base - m * self.epsilon)
    }
}

impl CharacteristicFunction for ExcludedCharFn {
    fn eval(&self, k: f64) -> Result<Complex64> {
        Ok(self.log_eval(k)?.exp())
    }
}

/// p̃∞(ε, k) at tolerance 1e-10; ε = 0 gives [`charfn_limit`].
pub fn charfn_excluded(k: f64, epsilon: f64, mode: OrientationMode) -> Result<Complex64> {
    ExcludedCharFn::new(mode, epsilon, 1e-10)?.eval(k)
}

/// Closed-form shifted Lorentzian with Γ = πD∞ and center g_c.
pub fn lorentzian_limit(mode: OrientationMode, grid: &Grid) -> Result<DistributionCurve> {
    let gamma = PI * d_infinity(mode);
    lorentzian_curve(gamma, shift_constant_for_mode(mode), Some(mode), grid)
}

/// Lorentzian with arbitrary width and center, e.g. the unshifted alternative.
pub fn lorentzian_curve(gamma: f64, center: f64, mode: Option<OrientationMode>, grid: &Grid) -> Result<DistributionCurve> {
    grid.validate()?;
    if !(gamma > 0.0) {
        return Err(domain("gamma", gamma, "half width must be positive"));
    }
    let g = grid.values();
    let density = g
        .iter()
        .map(|x| gamma / (PI * (gamma * gamma + (x - center).powi(2))))
        .collect();
    DistributionCurve::new(
        g,
        density,
        CurveMeta {
            kind: CurveKind::Lorentzian,
            mode,
            epsilon: 0.0,
            center,
            grid_step: grid.step(),
            tolerance: 0.0,
            cutoff: 0.0,
        },
    )
}

/// Zero-mean Gaussian with variance E[d²]/ε: 4/(5ε) for parallel dipoles,
/// 2/(3ε) for random orientation.
pub fn gaussian_asymptote(epsilon: f64, mode: OrientationMode, grid: &Grid) -> Result<DistributionCurve> {
    grid.validate()?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(domain("epsilon", epsilon, "Gaussian asymptote needs finite epsilon > 0"));
    }
    let var = gaussian_variance(epsilon, mode);
    let norm = 1.0 / (2.0 * PI * var).sqrt();
    let g = grid.values();
    let density = g.iter().map(|x| norm * (-x * x / (2.0 * var)).exp()).collect();
    DistributionCurve::new(
        g,
        density,
        CurveMeta {
            kind: CurveKind::Gaussian,
            mode: Some(mode),
            epsilon,
            center: 0.0,
            grid_step: grid.step(),
            tolerance: 0.0,
            cutoff: 0.0,
        },
    )
}

pub fn gaussian_variance(epsilon: f64, mode: OrientationMode) -> f64 {
    mode.angular_second_moment() / epsilon
}

/// Settings for [`invert_charfn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    /// Absolute accuracy target for the k-integral of each panel family.
    pub tol: f64,
    /// The cutoff K is the first power of two with |p̃(K)| below this.
    pub decay_threshold: f64,
    pub max_cutoff: f64,
    pub max_nodes: usize,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            decay_threshold: 1e-12,
            max_cutoff: 1e6,
            max_nodes: 2_000_000,
        }
    }
}

/// Quadrature nodes, weights and p̃ values covering [0, K].
struct KSamples {
    k: Vec<f64>,
    w: Vec<f64>,
    value: Vec<Complex64>,
}

fn find_cutoff(cf: &dyn CharacteristicFunction, opts: &InversionOptions) -> Result<f64> {
    let mut k = 1.0;
    loop {
        let m = cf.eval(k)?.norm();
        if m < opts.decay_threshold {
            return Ok(k);
        }
        if k >= opts.max_cutoff {
            return Err(Error::CutoffUnreachable { k, modulus: m });
        }
        k *= 2.0;
    }
}

struct KPanel {
    a: f64,
    b: f64,
    /// GL16 estimate of ∫p̃ over the panel.
    whole: Complex64,
    depth: u32,
}

fn panel_values(cf: &dyn CharacteristicFunction, a: f64, b: f64) -> Result<(Vec<(f64, f64)>, Vec<Complex64>)> {
    let nodes: Vec<(f64, f64)> = gl16().nodes_on(a, b).collect();
    let values = nodes.iter().map(|(k, _)| cf.eval(*k)).collect::<Result<Vec<_>>>()?;
    Ok((nodes, values))
}

fn sample_charfn(cf: &dyn CharacteristicFunction, max_abs_g: f64, opts: &InversionOptions) -> Result<(f64, KSamples)> {
    let cutoff = find_cutoff(cf, opts)?;
    // GL16 resolves up to 3π of phase of e^{ikg} per panel to ~1e-14
    let width = (3.0 * PI / max_abs_g.max(1.0)).min(cutoff / 8.0);
    let count = (cutoff / width).ceil() as usize;
    let edges: Vec<(f64, f64)> = (0..count)
        .map(|i| (cutoff * i as f64 / count as f64, cutoff * (i + 1) as f64 / count as f64))
        .collect();

    let first = par::map(&edges, |&(a, b)| -> Result<KPanel> {
        let (nodes, values) = panel_values(cf, a, b)?;
        let whole = nodes.iter().zip(&values).map(|((_, w), v)| v * w).sum();
        Ok(KPanel { a, b, whole, depth: 0 })
    });
    let mut pending = first.into_iter().collect::<Result<Vec<_>>>()?;

    let mut samples = KSamples {
        k: Vec::new(),
        w: Vec::new(),
        value: Vec::new(),
    };
    while !pending.is_empty() {
        let halves = par::map(&pending, |p| -> Result<[(Vec<(f64, f64)>, Vec<Complex64>); 2]> {
            let m = 0.5 * (p.a + p.b);
            Ok([panel_values(cf, p.a, m)?, panel_values(cf, m, p.b)?])
        });
        let mut next = Vec::new();
        for (p, h) in pending.iter().zip(halves) {
            let h = h?;
            let sums: Vec<Complex64> = h
                .iter()
                .map(|(nodes, vals)| nodes.iter().zip(vals).map(|((_, w), v)| v * w).sum())
                .collect();
            let err = (sums[0] + sums[1] - p.whole).norm();
            let allowed = opts.tol * (p.b - p.a) / cutoff;
            if err <= allowed || p.depth >= 40 {
                for (nodes, vals) in h {
                    for ((k, w), v) in nodes.into_iter().zip(vals) {
                        samples.k.push(k);
                        samples.w.push(w);
                        samples.value.push(v);
                    }
                }
            } else {
                let m = 0.5 * (p.a + p.b);
                next.push(KPanel { a: p.a, b: m, whole: sums[0], depth: p.depth + 1 });
                next.push(KPanel { a: m, b: p.b, whole: sums[1], depth: p.depth + 1 });
            }
        }
        if samples.k.len() + 32 * next.len() > opts.max_nodes {
            return Err(Error::Quadrature {
                estimate: cutoff,
                error: f64::NAN,
                tolerance: opts.tol,
            });
        }
        pending = next;
    }
    Ok((cutoff, samples))
}

/// Density values P(g) = (1/π)∫₀^K Re[e^{ikg} p̃(k)] dk on the grid, and K.
pub fn invert_to_values(cf: &dyn CharacteristicFunction, grid: &Grid, opts: &InversionOptions) -> Result<(Vec<f64>, f64)> {
    grid.validate()?;
    let max_abs_g = grid.min.abs().max(grid.max.abs());
    let (cutoff, s) = sample_charfn(cf, max_abs_g, opts)?;
    let g = grid.values();
    let floor = NEGATIVE_DENSITY_FLOOR.max(opts.tol);
    let density = par::map(&g, |&x| {
        let mut acc = 0.0;
        for ((k, w), v) in s.k.iter().zip(&s.w).zip(&s.value) {
            let (sin, cos) = (k * x).sin_cos();
            acc += w * (v.re * cos - v.im * sin);
        }
        acc / PI
    });
    let mut out = Vec::with_capacity(density.len());
    for (x, p) in g.iter().zip(density) {
        if p < 0.0 {
            if p < -floor {
                return Err(Error::NegativeDensity { g: *x, value: p });
            }
            out.push(0.0);
        } else {
            out.push(p);
        }
    }
    Ok((out, cutoff))
}

/// Inverts a characteristic function onto `grid`.
pub fn invert_charfn(cf: &dyn CharacteristicFunction, grid: &Grid, opts: &InversionOptions) -> Result<DistributionCurve> {
    let (density, cutoff) = invert_to_values(cf, grid, opts)?;
    DistributionCurve::new(
        grid.values(),
        density,
        CurveMeta {
            kind: CurveKind::Inverted,
            mode: None,
            epsilon: 0.0,
            center: 0.0,
            grid_step: grid.step(),
            tolerance: opts.tol,
            cutoff,
        },
    )
}

/// P∞(ε, g) by inversion; ε = 0 returns the closed-form Lorentzian.
pub fn excluded_curve(mode: OrientationMode, epsilon: f64, grid: &Grid, opts: &InversionOptions) -> Result<DistributionCurve> {
    check_epsilon(epsilon)?;
    if epsilon == 0.0 {
        return lorentzian_limit(mode, grid);
    }
    let cf = ExcludedCharFn::new(mode, epsilon, opts.tol)?;
    let mut curve = invert_charfn(&cf, grid, opts)?;
    curve.meta.kind = CurveKind::Excluded;
    curve.meta.mode = Some(mode);
    curve.meta.epsilon = epsilon;
    Ok(curve)
}

/// Inverse-CDF sampler for a curve, continued beyond the grid by
/// (g − center)⁻² tails matched to the edge densities.
#[derive(Debug, Clone)]
pub struct CurveSampler {
    g: Vec<f64>,
    density: Vec<f64>,
    /// Cumulative mass at each grid point, starting at the left-tail mass.
    cdf: Vec<f64>,
    center: f64,
    left_tail: f64,
    total: f64,
}

impl CurveSampler {
    pub fn new(curve: &DistributionCurve) -> Self {
        let n = curve.len();
        let c = curve.meta.center;
        let left_tail = curve.density[0] * (c - curve.g[0]).abs();
        let mut cdf = Vec::with_capacity(n);
        let mut acc = left_tail;
        cdf.push(acc);
        for i in 1..n {
            acc += 0.5 * (curve.density[i - 1] + curve.density[i]) * (curve.g[i] - curve.g[i - 1]);
            cdf.push(acc);
        }
        let right_tail = curve.density[n - 1] * (curve.g[n - 1] - c).abs();
        Self {
            g: curve.g.clone(),
            density: curve.density.clone(),
            cdf,
            center: c,
            left_tail,
            total: acc + right_tail,
        }
    }

    /// Maps u ∈ (0, 1) to a draw.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.g.len();
        let m = u * self.total;
        if m < self.left_tail {
            // mass left of g is A/(c − g), A = P₀(c − g₀)²
            let a = self.density[0] * (self.center - self.g[0]).powi(2);
            return self.center - a / m;
        }
        let inner_end = self.cdf[n - 1];
        if m >= inner_end {
            let a = self.density[n - 1] * (self.g[n - 1] - self.center).powi(2);
            let rest = self.total - m;
            if rest <= 0.0 || a == 0.0 {
                return self.g[n - 1];
            }
            return self.center + a / rest;
        }
        let i = self.cdf.partition_point(|&v| v <= m).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.g[i], self.g[i + 1]);
        let (p0, p1) = (self.density[i], self.density[i + 1]);
        let h = x1 - x0;
        let target = m - self.cdf[i];
        // solve p0 t + (p1 − p0) t²/(2h) = target for t ∈ [0, h]
        let slope = (p1 - p0) / h;
        let t = if slope.abs() < 1e-14 * (p0 + p1).max(1e-300) / h {
            if p0 > 0.0 {
                target / p0
            } else {
                0.5 * h
            }
        } else {
            let disc = (p0 * p0 + 2.0 * slope * target).max(0.0);
            2.0 * target / (p0 + disc.sqrt())
        };
        x0 + t.clamp(0.0, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{charfn_single, shift_constant_parallel_closed_form};
    use approx::assert_abs_diff_eq;

    fn small_grid(mode: OrientationMode) -> Grid {
        let mut g = Grid::default_for(mode);
        g.points = 241;
        g
    }

    #[test]
    fn grid_parsing_and_values() {
        let g: Grid = "-2:2:5".parse().unwrap();
        assert_eq!(g.values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!("1:0:5".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn lorentzian_examples() {
        let grid = Grid::default_for(OrientationMode::Parallel);
        let curve = lorentzian_limit(OrientationMode::Parallel, &grid).unwrap();
        let gamma = PI * d_infinity(OrientationMode::Parallel);
        assert!((gamma - 1.2092).abs() < 5e-5);
        let (gp, pp) = curve.peak();
        assert!((gp - shift_constant_parallel_closed_form()).abs() <= grid.step());
        // the grid misses g_c by at most half a step
        assert!((pp - 1.0 / (PI * gamma)).abs() < 1e-4);
        let c = shift_constant_parallel_closed_form();
        let dens = |x: f64| gamma / (PI * (gamma * gamma + (x - c).powi(2)));
        for x in [0.3, 2.0, 9.0] {
            assert_eq!(dens(c + x), dens(c - x));
        }
        let random = lorentzian_limit(OrientationMode::Random, &Grid::default_for(OrientationMode::Random)).unwrap();
        // π·0.3450438 = 1.08399; the quoted 1.083 is truncated, not rounded
        assert!((PI * d_infinity(OrientationMode::Random) - 1.083).abs() < 1e-3);
        assert!(random.peak().0.abs() <= random.meta.grid_step);
        assert!((curve.normalization() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn charfn_limit_examples() {
        for mode in OrientationMode::ALL {
            assert_eq!(charfn_limit(0.0, mode), Complex64::new(1.0, 0.0));
            for k in [-3.0, 0.5, 2.0] {
                let expected = (-PI * d_infinity(mode) * f64::abs(k)).exp();
                assert_abs_diff_eq!(charfn_limit(k, mode).norm(), expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn inversion_reproduces_lorentzian() {
        for mode in OrientationMode::ALL {
            let grid = small_grid(mode);
            let cf = move |k: f64| -> Result<Complex64> { Ok(charfn_limit(k, mode)) };
            let inverted = invert_charfn(&cf, &grid, &InversionOptions::default()).unwrap();
            let exact = lorentzian_limit(mode, &grid).unwrap();
            let sup = inverted
                .density
                .iter()
                .zip(&exact.density)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(sup < 1e-6, "{mode}: {sup}");
        }
    }

    #[test]
    fn inversion_of_gaussian_transform_pair() {
        let grid = Grid::new(-6.0, 6.0, 121).unwrap();
        let cf = |k: f64| -> Result<Complex64> { Ok(Complex64::new((-k * k / 2.0).exp(), 0.0)) };
        let curve = invert_charfn(&cf, &grid, &InversionOptions::default()).unwrap();
        let at_zero = curve.interpolate(0.0);
        assert_abs_diff_eq!(at_zero, 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-9);
        assert!((at_zero - 0.39894).abs() < 5e-6);
    }

    #[test]
    fn slowly_decaying_charfn_is_reported() {
        let grid = Grid::new(-1.0, 1.0, 11).unwrap();
        let cf = |k: f64| -> Result<Complex64> { Ok(Complex64::new(1.0 / (1.0 + k.abs()), 0.0)) };
        let err = invert_charfn(&cf, &grid, &InversionOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CutoffUnreachable { .. }));
    }

    #[test]
    fn excluded_charfn_examples() {
        for mode in OrientationMode::ALL {
            for eps in [0.1, 2.0, 50.0] {
                assert_eq!(charfn_excluded(0.0, eps, mode).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
        let near = charfn_excluded(1.0, 1e-3, OrientationMode::Parallel).unwrap();
        let limit = charfn_limit(1.0, OrientationMode::Parallel);
        assert!((near - limit).norm() / limit.norm() < 0.01);
        assert!(charfn_excluded(1.0, 2e6, OrientationMode::Parallel).is_err());
        assert!(charfn_excluded(1.0, -1.0, OrientationMode::Parallel).is_err());
    }

    #[test]
    fn excluded_charfn_large_epsilon_expansion() {
        let cf = ExcludedCharFn::new(OrientationMode::Parallel, 1000.0, 1e-12).unwrap();
        for k in [2.0, 5.0] {
            let eps = 1000.0f64;
            let log = cf.log_eval(k).unwrap();
            let expected = Complex64::new(-0.4 * k * k / eps, -4.0 / 105.0 * k.powi(3) / (eps * eps));
            // next terms are O(k⁴/ε³)
            assert!((log.re - expected.re).abs() < 5.0 * k.powi(4) / eps.powi(3), "{log} vs {expected}");
            assert!((log.im - expected.im).abs() < 0.05 * expected.im.abs(), "{log} vs {expected}");
        }
    }

    #[test]
    fn scale_identity_for_finite_n() {
        let geometry = GeometryFactor::Parallel;
        let quad = Quadrature::with_abs_tol(1e-13);
        let n = 1e4;
        for k in [0.5, 1.0, 2.0] {
            let m = charfn_single_minus_one(k / n, &geometry, &quad).unwrap();
            let pn = ((m + 1.0).ln() * n).exp();
            let limit = charfn_limit(k, OrientationMode::Parallel);
            assert!((pn - limit).norm() < 0.01, "k={k}: {pn} vs {limit}");
        }
        // the single-dipole transform itself is unchanged by the scaling
        assert!((charfn_single(0.0, &geometry).unwrap() - 1.0).norm() == 0.0);
    }

    #[test]
    fn gaussian_asymptote_examples() {
        let grid = Grid::new(-8.0, 8.0, 1601).unwrap();
        let g = gaussian_asymptote(0.8, OrientationMode::Parallel, &grid).unwrap();
        assert_abs_diff_eq!(g.variance(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(g.mean(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gaussian_variance(50.0, OrientationMode::Parallel), 0.016, epsilon = 1e-15);
        assert!(gaussian_asymptote(0.0, OrientationMode::Parallel, &grid).is_err());
    }

    #[test]
    fn excluded_curves_are_normalized_with_zero_mean() {
        let grid = small_grid(OrientationMode::Parallel);
        for eps in [0.4, 2.0] {
            let curve = excluded_curve(OrientationMode::Parallel, eps, &grid, &InversionOptions::default()).unwrap();
            let norm = curve.normalization();
            assert!((0.99..=1.001).contains(&norm), "eps {eps}: {norm}");
            assert!(curve.mean().abs() < 1e-3, "eps {eps}: {}", curve.mean());
        }
    }

    #[test]
    fn sampler_quantiles_track_cdf() {
        let grid = Grid::new(-30.0, 30.0, 3001).unwrap();
        let curve = lorentzian_curve(1.0, 0.0, None, &grid).unwrap();
        let s = CurveSampler::new(&curve);
        for u in [0.001, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999] {
            let exact = (PI * (u - 0.5)).tan();
            let q = s.quantile(u);
            let tol = if (0.05..=0.95).contains(&u) { 2e-3 } else { 0.05 * exact.abs() };
            assert!((q - exact).abs() < tol, "u {u}: {q} vs {exact}");
        }
    }
}
