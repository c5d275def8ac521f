//! Analytic-versus-simulation report covering every pricing route.

use serde::Serialize;

use crate::basket::BasketContract;
use crate::chain::ChainSpec;
use crate::error::Result;
use crate::montecarlo::{self, payoff, McConfig, McEstimate};
use crate::single_name::{self, ClaimSpec, HazardSpec};
use crate::two_firm::{Firm, TwoFirmParams};

/// Agreement threshold in standard errors.
pub const SIGMAS: f64 = 3.0;

/// Everything a validation run prices and simulates.
#[derive(Debug, Clone)]
pub struct ValidationScenario {
    pub chain: ChainSpec,
    pub hazard: HazardSpec,
    pub claim: ClaimSpec,
    pub initial: usize,
    pub maturity: f64,
    pub two_firm: Option<TwoFirmParams>,
    pub basket: Option<BasketContract>,
    pub mc: McConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationLine {
    pub item: String,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_std_error: f64,
    /// Standard error used for the test; differs from `mc_std_error` only
    /// when an indicator sample has no variance (see [`ValidationLine::new`]).
    pub test_std_error: f64,
    pub z_score: f64,
    pub pass: bool,
}

impl ValidationLine {
    /// Compares `est` with `analytic` at [`SIGMAS`] standard errors. For
    /// indicator statistics (`indicator_scale = Some(s)` for payoffs `s·1{A}`)
    /// a zero sample variance means no event was observed; the binomial
    /// standard error at the analytic probability is used instead.
    pub fn new(item: impl Into<String>, analytic: f64, est: &McEstimate, indicator_scale: Option<f64>) -> Self {
        let mut se = est.std_error;
        if se == 0.0 {
            if let Some(scale) = indicator_scale.filter(|s| *s > 0.0) {
                let p = (analytic / scale).clamp(0.0, 1.0);
                se = scale * (p * (1.0 - p) / est.paths as f64).sqrt();
            }
        }
        let diff = (est.mean - analytic).abs();
        let z_score = if diff == 0.0 {
            0.0
        } else if se > 0.0 {
            diff / se
        } else {
            f64::INFINITY
        };
        Self {
            item: item.into(),
            analytic,
            mc_mean: est.mean,
            mc_std_error: est.std_error,
            test_std_error: se,
            z_score,
            pass: z_score <= SIGMAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub paths: u64,
    pub lines: Vec<ValidationLine>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationLine> {
        self.lines.iter().filter(|l| !l.pass)
    }
}

fn single_name_lines(s: &ValidationScenario, out: &mut Vec<ValidationLine>) -> Result<()> {
    let t = s.maturity;
    let analytic_survival = single_name::survival(&s.chain, &s.hazard, s.initial, t)?;
    let prices = single_name::price_claim(&s.chain, &s.hazard, &s.claim, s.initial, t)?;
    let half = 0.5 * t;
    let config = McConfig { horizon: t, ..s.mc };
    let est = montecarlo::estimate_many(&config, 6, |rng| {
        let draw = montecarlo::draw_single(&s.chain, &s.hazard, s.initial, t, rng).expect("validated inputs");
        let stop = draw.default_time.unwrap_or(t);
        let died = if draw.default_time.is_some() { 1.0 } else { 0.0 };
        let died_half = if draw.survived(half) { 0.0 } else { 1.0 };
        let stop_half = stop.min(half);
        vec![
            if draw.survived(t) { 1.0 } else { 0.0 },
            payoff::terminal_payoff(&draw, &s.claim, t),
            payoff::stream_payoff(&draw, &s.claim, t),
            payoff::recovery_payoff(&draw, &s.claim, t),
            died - draw.path.integrate(|j| s.hazard.fatal_rate(j), 0.0, stop),
            died_half - draw.path.integrate(|j| s.hazard.fatal_rate(j), 0.0, stop_half),
        ]
    })?;
    let terminal_scale = s.claim.terminal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    out.push(ValidationLine::new(format!("survival(T={t})"), analytic_survival, &est[0], Some(1.0)));
    out.push(ValidationLine::new("price_terminal", prices.terminal, &est[1], None));
    if est[1].std_error == 0.0 && terminal_scale > 0.0 {
        // Degenerate sample; retest as a scaled indicator.
        let last = out.len() - 1;
        out[last] = ValidationLine::new("price_terminal", prices.terminal, &est[1], Some(terminal_scale));
    }
    out.push(ValidationLine::new("price_stream", prices.stream, &est[2], None));
    out.push(ValidationLine::new("price_recovery", prices.recovery, &est[3], None));
    out.push(ValidationLine::new(format!("martingale_residual(t={half})"), 0.0, &est[5], None));
    out.push(ValidationLine::new(format!("martingale_residual(t={t})"), 0.0, &est[4], None));
    Ok(())
}

fn two_firm_lines(params: &TwoFirmParams, mc: &McConfig, out: &mut Vec<ValidationLine>) -> Result<()> {
    let t = params.maturity;
    let est = montecarlo::estimate_many(mc, 5, |rng| {
        let d = montecarlo::simulate_two_firm(params, rng);
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        vec![
            ind(d.tau_a.min(d.tau_b) > t),
            ind(d.tau_a > t),
            ind(d.tau_b > t),
            ind(d.tau_a < d.tau_b),
            (-params.rate * t).exp() * ind(d.tau_a > t),
        ]
    })?;
    out.push(ValidationLine::new(
        format!("two_firm.first_default_survival(T={t})"),
        params.first_default_survival(t),
        &est[0],
        Some(1.0),
    ));
    out.push(ValidationLine::new(
        format!("two_firm.marginal_survival_A(T={t})"),
        params.marginal_survival(Firm::A, t),
        &est[1],
        Some(1.0),
    ));
    out.push(ValidationLine::new(
        format!("two_firm.marginal_survival_B(T={t})"),
        params.marginal_survival(Firm::B, t),
        &est[2],
        Some(1.0),
    ));
    out.push(ValidationLine::new(
        "two_firm.P(A defaults first)",
        params.a1 / (params.a1 + params.b1),
        &est[3],
        Some(1.0),
    ));
    let discount = (-params.rate * t).exp();
    out.push(ValidationLine::new(
        "two_firm.bond_price_A",
        params.bond_price(Firm::A),
        &est[4],
        Some(discount),
    ));
    Ok(())
}

/// Premium lines `S_1..S_n` of one basket contract.
pub fn basket_lines(contract: &BasketContract, mc: &McConfig) -> Result<Vec<ValidationLine>> {
    let n = contract.names();
    let t = contract.maturity();
    let discount = contract.discount();
    let analytic = contract.premiums()?;
    let config = McConfig { horizon: t, ..*mc };
    let est = montecarlo::estimate_many(&config, n, |rng| {
        let times = montecarlo::simulate_basket(contract, t, rng).expect("validated inputs");
        (1..=n)
            .map(|k| if times.len() >= k { discount } else { 0.0 })
            .collect()
    })?;
    Ok((1..=n)
        .map(|k| {
            ValidationLine::new(
                format!(
                    "basket.S_{k}(b={},c={})",
                    contract.contagion(),
                    contract.fatality_shape()
                ),
                analytic[k - 1].probability,
                &est[k - 1],
                Some(discount),
            )
        })
        .collect())
}

pub fn run(scenario: &ValidationScenario) -> Result<ValidationReport> {
    scenario.mc.validate()?;
    let mut lines = Vec::new();
    single_name_lines(scenario, &mut lines)?;
    if let Some(params) = &scenario.two_firm {
        two_firm_lines(params, &scenario.mc, &mut lines)?;
    }
    if let Some(contract) = &scenario.basket {
        lines.extend(basket_lines(contract, &scenario.mc)?);
    }
    Ok(ValidationReport {
        seed: scenario.mc.seed,
        paths: scenario.mc.paths,
        lines,
    })
}
