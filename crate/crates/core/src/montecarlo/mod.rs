//! Monte Carlo oracle for every analytic result in the crate.

mod estimate;
pub mod payoff;
mod simulate;

pub use estimate::{estimate, estimate_many, path_stream, McConfig, McEstimate, PathRng};
pub use simulate::{
    draw_single, simulate_basket, simulate_basket_by_name, simulate_single, simulate_two_firm, SingleDraw,
    TwoFirmDraw,
};

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::single_name::HazardSpec;

/// Compensator residual `1{τ <= t} - ∫_0^{t∧τ} p λ du`; a martingale with
/// zero mean, so the estimate should sit within a few standard errors of 0.
pub fn martingale_residual(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    initial: usize,
    t: f64,
    config: &McConfig,
) -> Result<McEstimate> {
    if !(t > 0.0 && t <= config.horizon) {
        return Err(Error::invalid("time", format!("t = {t} must lie in (0, {}]", config.horizon)));
    }
    chain.check_state(initial)?;
    estimate(config, |rng| {
        let draw = draw_single(chain, hazard, initial, t, rng).expect("validated inputs");
        let stop = draw.default_time.unwrap_or(t);
        let defaulted = if draw.default_time.is_some() { 1.0 } else { 0.0 };
        defaulted - draw.path.integrate(|j| hazard.fatal_rate(j), 0.0, stop)
    })
}
