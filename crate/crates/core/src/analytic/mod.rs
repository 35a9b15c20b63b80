//! Single-dipole distribution: geometry factor D(g), density P₁,N(g), its
//! characteristic function and the constants D∞ and g_c.
//!
//! Fourier convention throughout: p̃(k) = ∫ e^{−ikg} P(g) dg.

pub mod random;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::kernel::OrientationMode;
use crate::quad::Quadrature;
use crate::special::one_minus_cos_over_t2_integral;

pub use random::{d_infinity_random, geometry_factor_random_direct, RandomGeometry};

/// Below this |g| the parallel-mode D(g)/g² is summed from its Taylor series.
const PARALLEL_SERIES_LIMIT: f64 = 1e-3;

/// Absolute tolerance for the correction integral of the characteristic function.
pub const CORRECTION_TOL: f64 = 1e-10;

/// Asymptotic value D∞ of the geometry factor for |g| > 2.
pub fn d_infinity(mode: OrientationMode) -> f64 {
    match mode {
        OrientationMode::Parallel => 2.0 / (3.0 * 3f64.sqrt()),
        OrientationMode::Random => d_infinity_random(),
    }
}

/// Closed-form shift constant for parallel dipoles,
/// (2/9)(3 + √3 log((√3 − 1)/(√3 + 1))).
pub fn shift_constant_parallel_closed_form() -> f64 {
    let r3 = 3f64.sqrt();
    2.0 / 9.0 * (3.0 + r3 * ((r3 - 1.0) / (r3 + 1.0)).ln())
}

/// D⁽ᵖ⁾(g) for dipoles parallel to z.
pub fn geometry_factor_parallel(g: f64) -> f64 {
    let scale = 1.0 / (3.0 * 3f64.sqrt());
    if g > -2.0 && g < 1.0 {
        scale * (2.0 - (2.0 + g) * (1.0 - g).sqrt())
    } else {
        2.0 * scale
    }
}

/// D⁽ᵖ⁾(g)/g² from the Taylor series of (2 + g)√(1 − g) about 0.
fn parallel_density_series(g: f64) -> f64 {
    let scale = 1.0 / (3.0 * 3f64.sqrt());
    // a_n: coefficients of √(1 − g); c_n = 2a_n + a_{n−1}
    let mut a = -0.5;
    let mut sum = 0.0;
    let mut pow = 1.0;
    for n in 2..12 {
        let a_next = a * (n as f64 - 1.5) / n as f64;
        sum -= (2.0 * a_next + a) * pow;
        pow *= g;
        a = a_next;
    }
    scale * sum
}

/// Step approximation D⁽θ⁾(g): D∞ outside |g| ≤ 2D∞, zero inside.
///
/// The edge at 2D∞ makes ∫ D⁽θ⁾(g)/g² dg = 1.
pub fn geometry_factor_step(g: f64, d_infinity: f64) -> f64 {
    if g.abs() > 2.0 * d_infinity {
        d_infinity
    } else {
        0.0
    }
}

/// D⁽ʳ⁾(g) from the shared tabulation.
pub fn geometry_factor_random(g: f64) -> Result<f64> {
    if g == 0.0 || !g.is_finite() {
        return Err(domain("g", g, "random-orientation geometry factor needs finite g != 0"));
    }
    Ok(RandomGeometry::shared().eval(g))
}

/// The geometry factor of one of the angular laws, or the step approximation.
#[derive(Debug, Clone)]
pub enum GeometryFactor {
    Parallel,
    Random(Arc<RandomGeometry>),
    Step { d_infinity: f64 },
}

impl GeometryFactor {
    pub fn for_mode(mode: OrientationMode) -> Self {
        match mode {
            OrientationMode::Parallel => GeometryFactor::Parallel,
            OrientationMode::Random => GeometryFactor::Random(RandomGeometry::shared().clone()),
        }
    }

    pub fn step(d_infinity: f64) -> Self {
        GeometryFactor::Step { d_infinity }
    }

    pub fn mode(&self) -> Option<OrientationMode> {
        match self {
            GeometryFactor::Parallel => Some(OrientationMode::Parallel),
            GeometryFactor::Random(_) => Some(OrientationMode::Random),
            GeometryFactor::Step { .. } => None,
        }
    }

    pub fn d_infinity(&self) -> f64 {
        match self {
            GeometryFactor::Parallel => d_infinity(OrientationMode::Parallel),
            GeometryFactor::Random(_) => d_infinity_random(),
            GeometryFactor::Step { d_infinity } => *d_infinity,
        }
    }

    pub fn eval(&self, g: f64) -> f64 {
        match self {
            GeometryFactor::Parallel => geometry_factor_parallel(g),
            GeometryFactor::Random(r) => r.eval(g),
            GeometryFactor::Step { d_infinity } => geometry_factor_step(g, *d_infinity),
        }
    }

    /// P₁,₁(g) = D(g)/g², with the finite limit at g = 0.
    pub fn density_over_g2(&self, g: f64) -> f64 {
        match self {
            GeometryFactor::Parallel if g.abs() < PARALLEL_SERIES_LIMIT => parallel_density_series(g),
            GeometryFactor::Random(r) => r.eval_over_g2(g),
            _ => {
                let d = self.eval(g);
                if d == 0.0 {
                    0.0
                } else {
                    d / (g * g)
                }
            }
        }
    }

    /// Points in [−2, 2] where D or D⁽θ⁾ has a jump or kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let e = 2.0 * self.d_infinity();
        let mut pts = vec![-2.0, -e, 0.0, e, 2.0];
        if matches!(self, GeometryFactor::Parallel) {
            pts.push(1.0);
        }
        pts.retain(|p| (-2.0..=2.0).contains(p));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// P₁,N(g) = D(Ng)/(Ng²), the field of one dipole placed uniformly in a
/// sphere holding on average N dipoles.
pub fn single_dipole_density(g: f64, n: f64, geometry: &GeometryFactor) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(domain("N", n, "mean dipole count must be at least 1"));
    }
    Ok(n * geometry.density_over_g2(n * g))
}

/// Fourier transform of D⁽θ⁾(g)/g²:
/// 1 − 2|k|D∞ (π/2 − ∫₀^{2|k|D∞} (1 − cos t)/t² dt).
pub fn step_charfn(k: f64, d_infinity: f64) -> f64 {
    1.0 + step_charfn_minus_one(k, d_infinity)
}

fn step_charfn_minus_one(k: f64, d_infinity: f64) -> f64 {
    let a = 2.0 * k.abs() * d_infinity;
    -a * (PI / 2.0 - one_minus_cos_over_t2_integral(a))
}

/// ∫_{−2}^{2} e^{−ikg} g⁻² (D(g) − D⁽θ⁾(g)) dg.
pub fn charfn_correction(k: f64, geometry: &GeometryFactor, quad: &Quadrature) -> Result<Complex64> {
    let d_inf = geometry.d_infinity();
    let f = |g: f64| {
        let diff = if g.abs() > 2.0 * d_inf {
            (geometry.eval(g) - d_inf) / (g * g)
        } else {
            geometry.density_over_g2(g)
        };
        Complex64::new(0.0, -k * g).exp() * diff
    };
    Ok(quad.integrate_panels(f, &geometry.breakpoints())?.value)
}

/// p̃₁,₁(k) − 1, evaluated without forming 1 + small − 1.
pub fn charfn_single_minus_one(k: f64, geometry: &GeometryFactor, quad: &Quadrature) -> Result<Complex64> {
    if k == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let step = step_charfn_minus_one(k, geometry.d_infinity());
    Ok(charfn_correction(k, geometry, quad)? + step)
}

/// p̃₁,₁(k) at the default correction tolerance.
pub fn charfn_single(k: f64, geometry: &GeometryFactor) -> Result<Complex64> {
    let quad = Quadrature::with_abs_tol(CORRECTION_TOL);
    Ok(charfn_single_minus_one(k, geometry, &quad)? + 1.0)
}

/// g_c = ∫_{−g₀}^{g₀} g P₁,₁(g) dg for any g₀ > 2.
pub fn shift_constant(geometry: &GeometryFactor, g0: f64) -> Result<f64> {
    shift_constant_with_tol(geometry, g0, 1e-13)
}

/// [`shift_constant`] at absolute quadrature tolerance `tol`.
pub fn shift_constant_with_tol(geometry: &GeometryFactor, g0: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "tolerance must be positive"));
    }
    if !(g0 > 2.0) || !g0.is_finite() {
        return Err(domain("g0", g0, "symmetric limit must exceed 2"));
    }
    let mut pts = geometry.breakpoints();
    pts.push(-g0);
    pts.push(g0);
    pts.sort_by(f64::total_cmp);
    let quad = Quadrature::with_abs_tol(tol);
    let r = quad.integrate_panels(|g: f64| g * geometry.density_over_g2(g), &pts)?;
    Ok(r.value)
}

/// The shift constant of a mode: closed form for parallel dipoles, zero by
/// evenness of D⁽ʳ⁾ for random orientation.
pub fn shift_constant_for_mode(mode: OrientationMode) -> f64 {
    match mode {
        OrientationMode::Parallel => shift_constant_parallel_closed_form(),
        OrientationMode::Random => 0.0,
    }
}

/// A complex characteristic function p̃(k) = ∫ e^{−ikg} P(g) dg.
pub trait CharacteristicFunction: Sync {
    fn eval(&self, k: f64) -> Result<Complex64>;
}

impl<F> CharacteristicFunction for F
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    fn eval(&self, k: f64) -> Result<Complex64> {
        self(k)
    }
}

/// p̃₁,₁ for a given geometry factor.
#[derive(Debug, Clone)]
pub struct SingleDipoleCharFn {
    pub geometry: GeometryFactor,
    pub quad: Quadrature,
}

impl SingleDipoleCharFn {
    pub fn new(geometry: GeometryFactor) -> Self {
        Self {
            geometry,
            quad: Quadrature::with_abs_tol(CORRECTION_TOL),
        }
    }
}

impl CharacteristicFunction for SingleDipoleCharFn {
    fn eval(&self, k: f64) -> Result<Complex64> {
        Ok(charfn_single_minus_one(k, &self.geometry, &self.quad)? + 1.0)
    }
}
