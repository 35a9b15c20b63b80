//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations: the excluded-volume density next to its ε = 0
//! Lorentzian, the single-dipole geometry factor D(g), and a small direct
//! simulation compared with the limiting curve. The logic lives in
//! [`demo`] so it can be tested natively.

pub mod demo;

use dipolefield::OrientationMode;
use wasm_bindgen::prelude::*;

/// Series ready for plotting: abscissa, primary values and a reference
/// series on the same abscissa.
#[wasm_bindgen]
pub struct Plot {
    inner: demo::Series,
}

#[wasm_bindgen]
impl Plot {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.inner.y.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn reference(&self) -> Vec<f64> {
        self.inner.reference.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.inner.summary.clone()
    }
}

fn mode(name: &str) -> Result<OrientationMode, JsError> {
    name.parse().map_err(|e: dipolefield::Error| JsError::new(&e.to_string()))
}

fn wrap(r: dipolefield::Result<demo::Series>) -> Result<Plot, JsError> {
    r.map(|inner| Plot { inner }).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = excludedCurve)]
pub fn excluded_curve(mode_name: &str, epsilon: f64) -> Result<Plot, JsError> {
    wrap(demo::excluded(mode(mode_name)?, epsilon))
}

#[wasm_bindgen(js_name = geometryFactor)]
pub fn geometry_factor(mode_name: &str) -> Result<Plot, JsError> {
    wrap(demo::geometry(mode(mode_name)?))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate(mode_name: &str, epsilon: f64, n_dipoles: u32, realizations: u32, seed: u32) -> Result<Plot, JsError> {
    wrap(demo::simulate(
        mode(mode_name)?,
        epsilon,
        n_dipoles.into(),
        realizations.into(),
        seed.into(),
    ))
}
