//! Exact samplers for every model in the crate. Triggers are simulated
//! explicitly and resolved by a Bernoulli draw with the fatality
//! probability, so the thinning identities are checked rather than assumed.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::basket::BasketContract;
use crate::chain::{ChainPath, ChainSpec};
use crate::error::{Error, Result};
use crate::single_name::HazardSpec;
use crate::two_firm::TwoFirmParams;

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Single-name draw: the economy path and the default time, if it falls
/// inside the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleDraw {
    pub path: ChainPath,
    pub default_time: Option<f64>,
    /// Triggers observed up to default (inclusive) or the horizon.
    pub triggers: u64,
}

impl SingleDraw {
    pub fn survived(&self, t: f64) -> bool {
        self.default_time.is_none_or(|tau| tau > t)
    }
}

pub fn draw_single<R: Rng + ?Sized>(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    initial: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<SingleDraw> {
    if hazard.len() != chain.len() {
        return Err(Error::invalid(
            "hazard.intensity",
            format!("expected {} states, got {}", chain.len(), hazard.len()),
        ));
    }
    let path = chain.sample_path(initial, horizon, rng)?;
    let mut triggers = 0;
    let mut default_time = None;
    'segments: for (start, seg) in path.timed_segments() {
        let rate = hazard.intensity()[seg.state];
        if rate <= 0.0 {
            continue;
        }
        let end = start + seg.duration;
        let mut t = start;
        loop {
            t += exp1(rng) / rate;
            if t >= end {
                break;
            }
            triggers += 1;
            let u: f64 = rng.random();
            if u < hazard.fatality()[seg.state] {
                default_time = Some(t);
                break 'segments;
            }
        }
    }
    Ok(SingleDraw {
        path,
        default_time,
        triggers,
    })
}

/// Default time of one name, `None` when it survives past `horizon`.
pub fn simulate_single<R: Rng + ?Sized>(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    initial: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<Option<f64>> {
    Ok(draw_single(chain, hazard, initial, horizon, rng)?.default_time)
}

/// Default times of the two looping firms; `f64::INFINITY` for a firm that
/// never defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFirmDraw {
    pub tau_a: f64,
    pub tau_b: f64,
}

/// Waits for the first fatal trigger of a Poisson(`rate`) stream.
fn first_fatal<R: Rng + ?Sized>(rate: f64, fatality: f64, rng: &mut R) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let mut t = 0.0;
    loop {
        t += exp1(rng) / rate;
        let u: f64 = rng.random();
        if u < fatality {
            return t;
        }
    }
}

pub fn simulate_two_firm<R: Rng + ?Sized>(params: &TwoFirmParams, rng: &mut R) -> TwoFirmDraw {
    let p = params.fatality;
    let joint = params.a1 + params.b1;
    // Both alive: merged trigger stream, each trigger belongs to A with
    // probability a1 / (a1 + b1).
    let mut t = 0.0;
    let a_first = loop {
        t += exp1(rng) / joint;
        let owner_is_a = rng.random::<f64>() * joint < params.a1;
        if rng.random::<f64>() < p {
            break owner_is_a;
        }
    };
    if a_first {
        let tau_b = t + first_fatal(params.b1 + params.b2, p, rng);
        TwoFirmDraw { tau_a: t, tau_b }
    } else {
        let tau_a = t + first_fatal(params.a1 + params.a2, p, rng);
        TwoFirmDraw { tau_a, tau_b: t }
    }
}

/// Ordered default times `τ^1 <= τ^2 <= ...` up to `horizon` (later
/// defaults are censored and omitted).
///
/// Uses the aggregate representation: with `m` defaults, the next one
/// arrives at rate `β_m x_s (1 - e^{-c x_s})` in economy state `s`; each gap
/// is drawn by inverting the piecewise-linear cumulative rate.
pub fn simulate_basket<R: Rng + ?Sized>(
    contract: &BasketContract,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let path = contract
        .chain()
        .sample_path(contract.initial_state(), horizon, rng)?;
    let n = contract.names();
    let mut defaults = Vec::with_capacity(n);
    let mut budget = exp1(rng);
    for (start, seg) in path.timed_segments() {
        let end = start + seg.duration;
        let mut t = start;
        while defaults.len() < n {
            let rate = contract.default_rate(seg.state, defaults.len());
            if rate <= 0.0 || rate * (end - t) < budget {
                budget -= rate * (end - t);
                break;
            }
            t += budget / rate;
            defaults.push(t);
            budget = exp1(rng);
        }
        if defaults.len() == n {
            break;
        }
    }
    Ok(defaults)
}

/// Per-name trigger-level simulation of the same basket: every surviving
/// name triggers at `x_s (1 + b m)` and each trigger is fatal with
/// probability `1 - e^{-c x_s}`. Returns each name's default time
/// (`f64::INFINITY` if it survives the horizon).
pub fn simulate_basket_by_name<R: Rng + ?Sized>(
    contract: &BasketContract,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let path = contract
        .chain()
        .sample_path(contract.initial_state(), horizon, rng)?;
    let n = contract.names();
    let b = contract.contagion();
    let c = contract.fatality_shape();
    let mut times = vec![f64::INFINITY; n];
    let mut alive: Vec<usize> = (0..n).collect();
    for (start, seg) in path.timed_segments() {
        let x = contract.chain().values()[seg.state];
        let fatality = -(-c * x).exp_m1();
        let end = start + seg.duration;
        let mut t = start;
        while !alive.is_empty() {
            let m = n - alive.len();
            let per_name = x * (1.0 + b * m as f64);
            let total = per_name * alive.len() as f64;
            if total <= 0.0 {
                break;
            }
            t += exp1(rng) / total;
            if t >= end {
                break;
            }
            let who = rng.random_range(0..alive.len());
            if rng.random::<f64>() < fatality {
                times[alive.swap_remove(who)] = t;
            }
        }
    }
    Ok(times)
}
