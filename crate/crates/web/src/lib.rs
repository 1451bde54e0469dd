//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every entry point returns a flat `Vec<f64>` (a `Float64Array` in
//! JavaScript) or a JSON string, and reports errors as JS exceptions.

use logsob::experiments::{indicator_scaling as scaling, ExperimentOptions};
use logsob::grid::{sample, AnalyticFunction, Domain};
use logsob::maximal::lusin_functional;
use logsob::quadrature::{SchemeOptions, MOMENT_RADIUS, SEMINORM_RADIUS};
use logsob::seminorms::{x_seminorm, SeminormParams};
use logsob::spectral::{kernel_moment, moment_scheme};
use wasm_bindgen::prelude::*;

fn js(e: logsob::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[ξ_0, I(ξ_0), ξ_1, I(ξ_1), ...]` on `points` log-spaced frequencies in
/// `[xi_min, xi_max]`, `d = 1`.
#[wasm_bindgen]
pub fn kernel_moment_curve(gamma: f64, xi_min: f64, xi_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    if !(xi_min > 0.0 && xi_max > xi_min && points >= 2) {
        return Err(JsError::new("need 0 < xi_min < xi_max and at least two points"));
    }
    let scheme = moment_scheme(1, MOMENT_RADIUS, xi_max).map_err(js)?;
    let step = (xi_max / xi_min).ln() / (points - 1) as f64;
    let mut out = Vec::with_capacity(2 * points);
    for k in 0..points {
        let xi = xi_min * (step * k as f64).exp();
        out.push(xi);
        out.push(kernel_moment(&[xi], gamma, &scheme).map_err(js)?);
    }
    Ok(out)
}

/// The indicator scaling experiment as a JSON report.
#[wasm_bindgen]
pub fn indicator_scaling(gamma: f64, p: f64, n: usize) -> Result<String, JsError> {
    let dom = Domain::new(1, 1.0, n).map_err(js)?;
    let radii = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let opts = ExperimentOptions {
        refine: false,
        ..Default::default()
    };
    let rep = scaling(gamma, p, &radii, &dom, &opts).map_err(js)?;
    serde_json::to_string(&rep).map_err(|e| JsError::new(&e.to_string()))
}

/// Parses `gaussian`, `indicator` or `step` with its single parameter.
fn function(kind: &str, param: f64) -> Result<AnalyticFunction, JsError> {
    Ok(match kind {
        "gaussian" => AnalyticFunction::gaussian(param),
        "indicator" => AnalyticFunction::indicator_ball(param),
        "step" => AnalyticFunction::step_sum(param as usize),
        _ => return Err(JsError::new(&format!("unknown function `{kind}`"))),
    })
}

/// `[seminorm, x_0, f_0, L_0, x_1, f_1, L_1, ...]`: the `X^{γ,p}` seminorm
/// and the pointwise functional `L_{γ,p}f` on `[-1, 1]`.
#[wasm_bindgen]
pub fn pointwise_profile(kind: &str, param: f64, gamma: f64, p: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let dom = Domain::new(1, 1.0, n).map_err(js)?;
    let f = sample(&function(kind, param)?, &dom).map_err(js)?;
    let params = SeminormParams::log(gamma, p);
    let scheme = SchemeOptions::default().log_scheme(&dom, SEMINORM_RADIUS).map_err(js)?;
    let l = lusin_functional(&f, &params, &scheme).map_err(js)?;
    let mut out = vec![x_seminorm(&f, &params, &scheme).map_err(js)?];
    for k in 0..dom.len() {
        let x = dom.node(k)[0];
        out.extend([x, f.values()[k], l.value_at(&[x])]);
    }
    Ok(out)
}
