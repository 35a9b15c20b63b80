//! Geometry factor for isotropically oriented dipoles.
//!
//! With d = A sinφ + B, A = sinθ₁ sinθ₂ and B = −2 cosθ₁ cosθ₂, the φ average
//! of d·𝟙(0 < d < g) has a closed form because sinφ follows the arcsine law.
//! What remains is a two-dimensional integral over (cosθ₁, cosθ₂) whose kinks
//! are located analytically and passed to the adaptive integrator as panel
//! breakpoints.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::quad::Quadrature;

/// D∞ = 1/4 + (√3/24) asinh(√3).
pub fn d_infinity_random() -> f64 {
    let r3 = 3f64.sqrt();
    0.25 + r3 / 24.0 * r3.asinh()
}

/// E[sinφ · 𝟙(sinφ < t)] for φ uniform on [0, 2π).
fn sin_partial_mean(t: f64) -> f64 {
    -(1.0 - t * t).max(0.0).sqrt() / PI
}

/// P(sinφ < t).
fn sin_cdf(t: f64) -> f64 {
    0.5 + t.asin() / PI
}

/// φ-average of d·𝟙(0 < d < g) at fixed (μ₁, μ₂), for g > 0.
fn phi_average(mu1: f64, mu2: f64, g: f64) -> f64 {
    let a_coef = ((1.0 - mu1 * mu1) * (1.0 - mu2 * mu2)).max(0.0).sqrt();
    let b_coef = -2.0 * mu1 * mu2;
    if a_coef < 1e-300 {
        return if b_coef > 0.0 && b_coef < g { b_coef } else { 0.0 };
    }
    let lo = (-b_coef / a_coef).clamp(-1.0, 1.0);
    let hi = ((g - b_coef) / a_coef).clamp(-1.0, 1.0);
    if hi <= lo {
        return 0.0;
    }
    a_coef * (sin_partial_mean(hi) - sin_partial_mean(lo)) + b_coef * (sin_cdf(hi) - sin_cdf(lo))
}

/// Values of μ₂ in (−1, 1) where the clamped arcsine limits touch ±1.
fn inner_breakpoints(mu1: f64, g: f64) -> Vec<f64> {
    let mut pts = vec![-1.0, 1.0];
    let s1sq = 1.0 - mu1 * mu1;
    // lower limit: 2μ₁μ₂ = ±s₁s₂  ⇒  μ₂ = ±t/√(1+t²), t = s₁/(2μ₁)
    if mu1 > 0.0 {
        let t = s1sq.sqrt() / (2.0 * mu1);
        let m = t / (1.0 + t * t).sqrt();
        pts.push(m);
        pts.push(-m);
    } else {
        pts.push(0.0);
    }
    // upper limit: (g + 2μ₁μ₂)² = s₁²(1 − μ₂²)
    let qa = 1.0 + 3.0 * mu1 * mu1;
    let qb = 4.0 * g * mu1;
    let qc = g * g - s1sq;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        pts.push((-qb + sq) / (2.0 * qa));
        pts.push((-qb - sq) / (2.0 * qa));
    }
    pts.retain(|p| (-1.0..=1.0).contains(p));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Values of μ₁ in (0, 1) where the upper-limit roots appear or merge.
fn outer_breakpoints(g: f64) -> Vec<f64> {
    let mut pts = vec![0.0, 1.0];
    // 3m² − (g² + 2)m − (1 − g²) = 0 with m = μ₁²
    let b = g * g + 2.0;
    let disc = b * b + 12.0 * (1.0 - g * g);
    if disc >= 0.0 {
        for m in [(b + disc.sqrt()) / 6.0, (b - disc.sqrt()) / 6.0] {
            if m > 0.0 && m < 1.0 {
                pts.push(m.sqrt());
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// D⁽ʳ⁾(g) by direct quadrature to absolute tolerance `tol`.
pub fn geometry_factor_random_direct(g: f64, tol: f64) -> Result<f64> {
    let g = g.abs();
    if g == 0.0 {
        return Ok(0.0);
    }
    if g >= 2.0 {
        return Ok(d_infinity_random());
    }
    let inner = Quadrature::with_abs_tol(0.1 * tol);
    let outer = Quadrature::with_abs_tol(0.5 * tol);
    let result = outer.integrate_panels(
        |mu1: f64| {
            let pts = inner_breakpoints(mu1, g);
            inner
                .integrate_panels(|mu2: f64| phi_average(mu1, mu2, g), &pts)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        },
        &outer_breakpoints(g),
    )?;
    Ok(0.5 * result.value)
}

/// Monotone (Fritsch–Carlson) cubic interpolant.
#[derive(Debug, Clone)]
struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Three-point slopes, then the Fritsch–Carlson limiter on every interval.
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 3 && ys.len() == n);
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (h[i - 1], h[i]);
            slopes[i] = (h1 * secants[i - 1] + h0 * secants[i]) / (h0 + h1);
        }
        let end_slope = |d0: f64, d1: f64, h0: f64, h1: f64| ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        slopes[0] = end_slope(secants[0], secants[1], h[0], h[1]);
        slopes[n - 1] = end_slope(secants[n - 2], secants[n - 3], h[n - 2], h[n - 3]);
        for k in 0..n - 1 {
            let d = secants[k];
            if d == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            if slopes[k] * d < 0.0 {
                slopes[k] = 0.0;
            }
            if slopes[k + 1] * d < 0.0 {
                slopes[k + 1] = 0.0;
            }
            let a = slopes[k] / d;
            let b = slopes[k + 1] / d;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[k] = tau * a * d;
                slopes[k + 1] = tau * b * d;
            }
        }
        Self { xs, ys, slopes }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Tabulated D⁽ʳ⁾ built once per tolerance and shared read-only afterwards.
///
/// The tabulated quantity is D(g)/g², finite at the origin. On [0, 1] nodes are
/// uniform in g; on [1, 2] they are uniform in u = √(g − 1), which smooths the
/// (g − 1)^{3/2} behaviour just above the kink at g = 1.
#[derive(Debug)]
pub struct RandomGeometry {
    tol: f64,
    table: OnceLock<RandomTable>,
}

#[derive(Debug)]
struct RandomTable {
    inner: MonotoneCubic,
    outer: MonotoneCubic,
}

const INNER_NODES: usize = 81;
const OUTER_NODES: usize = 161;

impl RandomGeometry {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            table: OnceLock::new(),
        }
    }

    /// Process-wide instance at the default tolerance.
    pub fn shared() -> &'static Arc<RandomGeometry> {
        static SHARED: OnceLock<Arc<RandomGeometry>> = OnceLock::new();
        SHARED.get_or_init(|| Arc::new(RandomGeometry::new(1e-11)))
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    fn table(&self) -> &RandomTable {
        self.table.get_or_init(|| {
            let gs_inner: Vec<f64> = (1..INNER_NODES)
                .map(|i| i as f64 / (INNER_NODES - 1) as f64)
                .collect();
            let us: Vec<f64> = (0..OUTER_NODES)
                .map(|i| i as f64 / (OUTER_NODES - 1) as f64)
                .collect();
            let all: Vec<f64> = gs_inner
                .iter()
                .copied()
                .chain(us[1..].iter().map(|u| 1.0 + u * u))
                .collect();
            let values: Vec<f64> = crate::par::map(&all, |&g| {
                // relative accuracy in D/g² near the origin
                let tol = self.tol * (g * g).clamp(1e-3, 1.0);
                geometry_factor_random_direct(g, tol).map_or(f64::NAN, |d| d / (g * g))
            });
            assert!(
                values.iter().all(|y| y.is_finite()),
                "random-orientation geometry table failed to converge"
            );
            let (inner_vals, outer_vals) = values.split_at(gs_inner.len());

            // D/g² is even and smooth at 0: y ≈ y₀ + y₂g²
            let (g1, g2) = (gs_inner[0].powi(2), gs_inner[1].powi(2));
            let y0 = (g2 * inner_vals[0] - g1 * inner_vals[1]) / (g2 - g1);
            let mut xs = vec![0.0];
            xs.extend_from_slice(&gs_inner);
            let mut ys = vec![y0];
            ys.extend_from_slice(inner_vals);
            let at_one = *ys.last().unwrap();
            let inner = MonotoneCubic::new(xs, ys);

            let mut ys = vec![at_one];
            ys.extend_from_slice(outer_vals);
            let outer = MonotoneCubic::new(us, ys);
            RandomTable { inner, outer }
        })
    }

    /// Interpolated D⁽ʳ⁾(g); even in g.
    pub fn eval(&self, g: f64) -> f64 {
        let g = g.abs();
        if g >= 2.0 {
            return d_infinity_random();
        }
        g * g * self.eval_over_g2(g)
    }

    /// Interpolated D⁽ʳ⁾(g)/g², finite at g = 0.
    pub fn eval_over_g2(&self, g: f64) -> f64 {
        let g = g.abs();
        if g >= 2.0 {
            return d_infinity_random() / (g * g);
        }
        let t = self.table();
        if g <= 1.0 {
            t.inner.eval(g)
        } else {
            t.outer.eval((g - 1.0).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn asymptote_value() {
        assert!((d_infinity_random() - 0.3450).abs() < 5e-5);
        // E|d|/2 over the full angular measure equals D∞
        let direct = geometry_factor_random_direct(1.999_999_999, 1e-10).unwrap();
        assert_abs_diff_eq!(direct, d_infinity_random(), epsilon = 1e-8);
    }

    #[test]
    fn phi_average_matches_brute_force() {
        let n = 200_000;
        for &(mu1, mu2, g) in &[(0.3, -0.4, 0.7), (0.9, 0.1, 1.5), (0.1, -0.95, 0.2)] {
            let a = ((1.0 - mu1 * mu1) * (1.0f64 - mu2 * mu2)).sqrt();
            let b = -2.0 * mu1 * mu2;
            let mut acc = 0.0;
            for i in 0..n {
                let phi = 2.0 * PI * (i as f64 + 0.5) / n as f64;
                let d = a * phi.sin() + b;
                if d > 0.0 && d < g {
                    acc += d;
                }
            }
            assert_abs_diff_eq!(phi_average(mu1, mu2, g), acc / n as f64, epsilon = 1e-5);
        }
    }

    #[test]
    fn monotone_cubic_reproduces_nodes_and_stays_monotone() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| if *x < 5.0 { 0.0 } else { 1.0 }).collect();
        let m = MonotoneCubic::new(xs, ys);
        let mut prev = -1.0;
        for i in 0..=900 {
            let v = m.eval(i as f64 / 100.0);
            assert!(v >= prev - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
        assert_eq!(m.eval(7.0), 1.0);
    }
}
