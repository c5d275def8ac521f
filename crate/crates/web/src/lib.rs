//! WebAssembly bindings for the browser demo. Every export returns a flat
//! `Float64Array`, row-major, whose layout is given in its doc comment.

use trigger_default::basket::{self, BasketContract};
use trigger_default::fixtures;
use trigger_default::{Firm, TwoFirmParams};
use wasm_bindgen::prelude::*;

pub const NAMES: usize = 10;
pub const RATE: f64 = 0.05;
pub const MATURITY: f64 = 5.0;

fn economy_contract(b: f64, c: f64) -> Result<BasketContract, String> {
    BasketContract::new(NAMES, b, c, RATE, MATURITY, 1, fixtures::four_state_economy(), 0).map_err(|e| e.to_string())
}

/// Rows `[b, S_1, ..., S_10]` for `b` on `steps + 1` points of `[0, b_max]`,
/// singular points dropped.
pub fn premium_sweep(c: f64, b_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 || b_max.is_nan() || b_max <= 0.0 {
        return Err("need steps >= 1 and b_max > 0".into());
    }
    let grid: Vec<f64> = (0..=steps).map(|i| b_max * i as f64 / steps as f64).collect();
    let table = basket::sweep(&economy_contract(0.0, c)?, &grid, &[c]).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for &b in &grid {
        if table.premium(1, b, c).is_none() {
            continue;
        }
        out.push(b);
        out.extend((1..=NAMES).map(|k| table.premium(k, b, c).unwrap_or(f64::NAN)));
    }
    Ok(out)
}

/// Rows `[t, P(τ^1 <= t), ..., P(τ^10 <= t)]` on `steps + 1` points of `[0, t_max]`.
pub fn kth_default_curves(b: f64, c: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 || t_max.is_nan() || t_max <= 0.0 {
        return Err("need steps >= 1 and t_max > 0".into());
    }
    let contract = economy_contract(b, c)?;
    let mut out = Vec::with_capacity((steps + 1) * (NAMES + 1));
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        out.push(t);
        out.extend(contract.cdf_all(t).map_err(|e| e.to_string())?.iter().map(|v| v.probability));
    }
    Ok(out)
}

/// Rows `[t, f_A, f_B, S_A, S_B]` of the two-firm marginal densities and survivals.
#[allow(clippy::too_many_arguments)]
pub fn two_firm_curves(a1: f64, a2: f64, b1: f64, b2: f64, p: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 || t_max.is_nan() || t_max <= 0.0 {
        return Err("need steps >= 1 and t_max > 0".into());
    }
    let params = TwoFirmParams::new(a1, a2, b1, b2, p, 0.0, t_max).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity((steps + 1) * 5);
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        out.extend([
            t,
            params.marginal_density(Firm::A, t),
            params.marginal_density(Firm::B, t),
            params.marginal_survival(Firm::A, t),
            params.marginal_survival(Firm::B, t),
        ]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = premiumSweep)]
pub fn premium_sweep_js(c: f64, b_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    premium_sweep(c, b_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kthDefaultCurves)]
pub fn kth_default_curves_js(b: f64, c: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    kth_default_curves(b, c, t_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = twoFirmCurves)]
#[allow(clippy::too_many_arguments)]
pub fn two_firm_curves_js(a1: f64, a2: f64, b1: f64, b2: f64, p: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    two_firm_curves(a1, a2, b1, b2, p, t_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = basketNames)]
pub fn basket_names() -> usize {
    NAMES
}
