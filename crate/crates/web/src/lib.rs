//! WebAssembly bindings for the profile demo in `www/index.html`.
//!
//! Every sampler returns a flat array of rows `x, V, U, Θ` (Burgers rows are
//! `x, w, w_x`) so the page can plot them without extra glue.

use lagwave_core::burgers::BurgersData;
use lagwave_core::composite_wave::CompositeWave;
use lagwave_core::contact_wave::{ContactWave, ContactWaveSpec};
use lagwave_core::euler_riemann::{FluidState, GasParams};
use lagwave_core::profile::Background;
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-10;

fn xs(x_min: f64, x_max: f64, n: usize) -> Result<impl Iterator<Item = f64>, JsError> {
    if n < 2 || !(x_max > x_min) {
        return Err(JsError::new("need n >= 2 and x_max > x_min"));
    }
    let h = (x_max - x_min) / (n - 1) as f64;
    Ok((0..n).map(move |i| x_min + i as f64 * h))
}

fn rows(bg: &dyn Background, t: f64, x_min: f64, x_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let mut out = Vec::with_capacity(4 * n);
    for x in xs(x_min, x_max, n)? {
        let s = bg.sample(x, t);
        out.extend([x, s.v, s.u, s.theta]);
    }
    Ok(out)
}

/// Viscous contact wave between temperatures `theta_minus` and `theta_plus`
/// at common pressure `p_plus`.
#[wasm_bindgen]
pub fn contact_profile(
    theta_minus: f64,
    theta_plus: f64,
    p_plus: f64,
    u_minus: f64,
    t: f64,
    x_min: f64,
    x_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    let gas = GasParams::default();
    let spec = ContactWaveSpec::new(&gas, theta_minus, theta_plus, p_plus, u_minus)?;
    let wave = ContactWave::new(gas, spec, TOL)?;
    rows(&wave, t, x_min, x_max, n)
}

/// Rarefaction, contact, rarefaction pattern connecting two end states.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn composite_profile(
    v_left: f64,
    u_left: f64,
    theta_left: f64,
    v_right: f64,
    u_right: f64,
    theta_right: f64,
    t: f64,
    x_min: f64,
    x_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    let left = FluidState::new(v_left, u_left, theta_left);
    let right = FluidState::new(v_right, u_right, theta_right);
    let wave = CompositeWave::new(GasParams::default(), left, right, TOL)?;
    rows(&wave, t, x_min, x_max, n)
}

/// Smooth Burgers rarefaction between `w_l < w_r`.
#[wasm_bindgen]
pub fn burgers_profile(w_l: f64, w_r: f64, t: f64, x_min: f64, x_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    if !(w_l < w_r) || !(t >= 0.0) {
        return Err(JsError::new("need w_l < w_r and t >= 0"));
    }
    let data = BurgersData::new(w_l, w_r);
    let mut out = Vec::with_capacity(3 * n);
    for x in xs(x_min, x_max, n)? {
        out.extend([x, data.evaluate(x, t), data.derivative(x, t)]);
    }
    Ok(out)
}
