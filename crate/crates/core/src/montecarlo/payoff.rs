//! Pathwise payoffs of the single-name building blocks.

use crate::chain::ChainPath;
use crate::single_name::ClaimSpec;

use super::SingleDraw;

/// `exp(-∫_0^t r(X_u) du)`.
pub fn discount_factor(path: &ChainPath, rates: &[f64], t: f64) -> f64 {
    (-path.integrate(|j| rates[j], 0.0, t)).exp()
}

/// `∫_0^stop y(X_s) exp(-∫_0^s r) ds`, exact on each constant segment.
pub fn discounted_stream(path: &ChainPath, rates: &[f64], stream: &[f64], stop: f64) -> f64 {
    let mut total = 0.0;
    let mut log_discount = 0.0f64;
    for (start, seg) in path.timed_segments() {
        if start >= stop {
            break;
        }
        let len = (start + seg.duration).min(stop) - start;
        let r = rates[seg.state];
        let annuity = if r * len > 1e-12 { -(-r * len).exp_m1() / r } else { len };
        total += stream[seg.state] * (-log_discount).exp() * annuity;
        log_discount += r * len;
    }
    total
}

/// Discounted terminal payment, survival-contingent.
pub fn terminal_payoff(draw: &SingleDraw, claim: &ClaimSpec, maturity: f64) -> f64 {
    if !draw.survived(maturity) {
        return 0.0;
    }
    let last = draw.path.state_at(maturity);
    claim.terminal[last] * discount_factor(&draw.path, &claim.rate, maturity)
}

/// Discounted payment stream received while alive.
pub fn stream_payoff(draw: &SingleDraw, claim: &ClaimSpec, maturity: f64) -> f64 {
    let stop = draw.default_time.map_or(maturity, |tau| tau.min(maturity));
    discounted_stream(&draw.path, &claim.rate, &claim.stream, stop)
}

/// Discounted recovery paid at default, if default happens by maturity.
pub fn recovery_payoff(draw: &SingleDraw, claim: &ClaimSpec, maturity: f64) -> f64 {
    match draw.default_time {
        Some(tau) if tau <= maturity => {
            claim.recovery[draw.path.state_at(tau)] * discount_factor(&draw.path, &claim.rate, tau)
        }
        _ => 0.0,
    }
}
