//! Sine integral and the Fresnel-type auxiliary integral used by the
//! step-approximation characteristic function.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

/// Below this argument the Maclaurin series is summed directly.
const SERIES_LIMIT: f64 = 4.0;
const EPS: f64 = 1e-16;

/// Sine integral Si(x) = ∫₀ˣ sin(t)/t dt.
///
/// Power series for |x| < 4; for larger arguments the continued fraction of
/// E₁(ix), which is the convergent form of the large-x asymptotic expansion.
pub fn sine_integral(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return FRAC_PI_2;
    }
    if x < SERIES_LIMIT {
        sine_integral_series(x)
    } else {
        FRAC_PI_2 + exp_integral_imaginary(x).im
    }
}

fn sine_integral_series(x: f64) -> f64 {
    let x2 = x * x;
    // term_n = (-1)^n x^(2n+1) / (2n+1)!
    let mut term = x;
    let mut sum = x;
    for n in 1..60 {
        let a = (2 * n) as f64;
        term *= -x2 / (a * (a + 1.0));
        let contrib = term / (a + 1.0);
        sum += contrib;
        if contrib.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

/// Returns h with Ci(x) = -Re h and Si(x) = π/2 + Im h, i.e. h = -E₁(ix),
/// by modified Lentz evaluation of the continued fraction.
fn exp_integral_imaginary(x: f64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..200 {
        let fi = i as f64;
        let a = -fi * fi;
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h * Complex64::new(x.cos(), -x.sin())
}

/// ∫₀ˣ (1 − cos t)/t² dt = Si(x) − (1 − cos x)/x, for x ≥ 0.
pub fn one_minus_cos_over_t2_integral(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1e-3 {
        // x/2 - x^3/72 + x^5/3600
        let x2 = x * x;
        return x * (0.5 - x2 * (1.0 / 72.0 - x2 / 3600.0));
    }
    let half = 0.5 * x;
    let one_minus_cos = 2.0 * half.sin() * half.sin();
    sine_integral(x) - one_minus_cos / x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Quadrature;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tabulated_values() {
        assert_abs_diff_eq!(sine_integral(1.0), 0.946_083_070_367_183_0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            sine_integral(std::f64::consts::PI),
            1.851_937_051_982_466_2,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(sine_integral(10.0), 1.658_347_594_218_874_0, epsilon = 1e-14);
        assert_abs_diff_eq!(sine_integral(-1.0), -0.946_083_070_367_183_0, epsilon = 1e-15);
        assert_eq!(sine_integral(0.0), 0.0);
    }

    #[test]
    fn matches_direct_quadrature_across_switch() {
        let q = Quadrature::with_abs_tol(1e-14);
        let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
        for &x in &[0.5, 2.0, 3.999, 4.0, 4.001, 7.5, 25.0, 120.0] {
            let direct = q.integrate(sinc, 0.0, x).unwrap().value;
            assert_abs_diff_eq!(sine_integral(x), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_argument_tends_to_half_pi() {
        let x = 1e6;
        // Si(x) ≈ π/2 − cos(x)/x
        assert_abs_diff_eq!(sine_integral(x), FRAC_PI_2 - x.cos() / x, epsilon = 1e-11);
    }

    #[test]
    fn auxiliary_integral_against_quadrature() {
        let q = Quadrature::with_abs_tol(1e-14);
        let f = |t: f64| {
            if t == 0.0 {
                0.5
            } else {
                let s = (0.5 * t).sin();
                2.0 * s * s / (t * t)
            }
        };
        for &x in &[1e-4, 5e-4, 2e-3, 0.3, 1.0, 5.0, 40.0] {
            let direct = q.integrate(f, 0.0, x).unwrap().value;
            assert_abs_diff_eq!(one_minus_cos_over_t2_integral(x), direct, epsilon = 1e-13);
        }
    }
}
