//! Dipole field kernel in reduced units.
//!
//! Directions are parametrized by the cosine of the polar angle so that the
//! uniform measure on the sphere is uniform in the parameter.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which angular-factor law applies to the dipoles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationMode {
    /// All dipoles point along the z axis.
    Parallel,
    /// Dipole directions are isotropic and independent.
    Random,
}

impl OrientationMode {
    pub const ALL: [OrientationMode; 2] = [OrientationMode::Parallel, OrientationMode::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            OrientationMode::Parallel => "parallel",
            OrientationMode::Random => "random",
        }
    }

    /// E[d²] over the angular measure.
    pub fn angular_second_moment(self) -> f64 {
        match self {
            // ∫(1 − 3μ²)² dμ / 2
            OrientationMode::Parallel => 0.8,
            // E[sin²θ₁]E[sin²θ₂]E[sin²φ] + 4E[μ₁²]E[μ₂²]
            OrientationMode::Random => 2.0 / 3.0,
        }
    }
}

impl fmt::Display for OrientationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrientationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parallel" | "parallel_z" | "p" => Ok(OrientationMode::Parallel),
            "random" | "random_isotropic" | "isotropic" | "r" => Ok(OrientationMode::Random),
            other => Err(Error::Parse(format!(
                "unknown orientation mode '{other}' (expected parallel or random)"
            ))),
        }
    }
}

/// Orientation of a dipole relative to its position vector; only present in
/// random mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleOrientation {
    /// cos θ₂, angle between r̂ and the dipole axis
    pub mu2: f64,
    /// rotation of the dipole axis about r̂
    pub phi: f64,
}

/// One dipole: cubed reduced radius x = (r/r₀)³ and direction cosine of r̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipolePlacement {
    pub x: f64,
    pub mu: f64,
    pub orientation: Option<DipoleOrientation>,
}

impl DipolePlacement {
    pub fn parallel(x: f64, mu: f64) -> Self {
        Self {
            x,
            mu,
            orientation: None,
        }
    }

    pub fn random(x: f64, mu1: f64, mu2: f64, phi: f64) -> Self {
        Self {
            x,
            mu: mu1,
            orientation: Some(DipoleOrientation { mu2, phi }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x > 0.0) || !self.x.is_finite() {
            return Err(domain("x", self.x, "cubed radius must be positive"));
        }
        check_cosine("mu", self.mu)?;
        if let Some(o) = self.orientation {
            check_cosine("mu2", o.mu2)?;
            check_azimuth(o.phi)?;
        }
        Ok(())
    }

    pub fn angular_factor(&self) -> Result<f64> {
        match self.orientation {
            None => angular_factor_parallel(self.mu),
            Some(o) => angular_factor_random(self.mu, o.mu2, o.phi),
        }
    }

    /// Reduced field g = d/x of this dipole at the origin.
    pub fn field(&self) -> Result<ReducedField> {
        self.validate()?;
        reduced_field_contribution(self.x, self.angular_factor()?)
    }
}

/// Field component in units of F₀ = C r₀⁻³.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct ReducedField(pub f64);

impl ReducedField {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::ops::Add for ReducedField {
    type Output = ReducedField;
    fn add(self, rhs: Self) -> Self {
        ReducedField(self.0 + rhs.0)
    }
}

impl std::iter::Sum for ReducedField {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        ReducedField(iter.map(|g| g.0).sum())
    }
}

fn check_cosine(name: &'static str, mu: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&mu) {
        Ok(())
    } else {
        Err(domain(name, mu, "cosine must lie in [-1, 1]"))
    }
}

fn check_azimuth(phi: f64) -> Result<()> {
    if (0.0..TAU).contains(&phi) {
        Ok(())
    } else {
        Err(domain("phi", phi, "azimuth must lie in [0, 2π)"))
    }
}

/// 1 − 3μ² for a dipole parallel to z at polar cosine μ.
pub fn angular_factor_parallel(mu: f64) -> Result<f64> {
    check_cosine("mu", mu)?;
    Ok(1.0 - 3.0 * mu * mu)
}

/// sinθ₁ sinθ₂ sinφ − 2 cosθ₁ cosθ₂ for an isotropically oriented dipole.
pub fn angular_factor_random(mu1: f64, mu2: f64, phi: f64) -> Result<f64> {
    check_cosine("mu1", mu1)?;
    check_cosine("mu2", mu2)?;
    check_azimuth(phi)?;
    let s1 = (1.0 - mu1 * mu1).max(0.0).sqrt();
    let s2 = (1.0 - mu2 * mu2).max(0.0).sqrt();
    Ok(s1 * s2 * phi.sin() - 2.0 * mu1 * mu2)
}

/// g = d / x.
pub fn reduced_field_contribution(x: f64, d: f64) -> Result<ReducedField> {
    if !(x > 0.0) {
        return Err(domain("x", x, "cubed radius must be positive"));
    }
    Ok(ReducedField(d / x))
}

/// F₀ = C r₀⁻³ = C · 4πρ/3.
pub fn typical_field(dipole_constant: f64, density: f64) -> Result<f64> {
    if !(density > 0.0) {
        return Err(domain("rho", density, "dipole density must be positive"));
    }
    Ok(dipole_constant * 4.0 * PI * density / 3.0)
}

/// Converts a reduced field to physical units, g · F₀.
pub fn physical_field(g: ReducedField, dipole_constant: f64, density: f64) -> Result<f64> {
    Ok(g.0 * typical_field(dipole_constant, density)?)
}

/// Typical inter-dipole distance r₀ = (3/4πρ)^{1/3}.
pub fn typical_distance(density: f64) -> Result<f64> {
    if !(density > 0.0) {
        return Err(domain("rho", density, "dipole density must be positive"));
    }
    Ok((3.0 / (4.0 * PI * density)).cbrt())
}
