//! Single-name default law and the three defaultable building blocks.
//!
//! Triggers arrive at rate `λ(X_t)`; each one is fatal with probability
//! `p(X_t)`. The default time therefore has intensity `p λ` along the
//! economy path, and every price reduces to an action of
//! `B = Q - diag(r + p λ)`.

use nalgebra::{DMatrix, DVector};

use crate::chain::{ChainPath, ChainSpec};
use crate::error::{Error, Result};
use crate::matexp;
use crate::occupation;

/// Per-state trigger intensity and fatality probability.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardSpec {
    intensity: Vec<f64>,
    fatality: Vec<f64>,
}

impl HazardSpec {
    pub fn new(intensity: Vec<f64>, fatality: Vec<f64>) -> Result<Self> {
        if intensity.len() != fatality.len() {
            return Err(Error::invalid(
                "hazard.fatality",
                format!("expected {} entries, got {}", intensity.len(), fatality.len()),
            ));
        }
        for (j, &l) in intensity.iter().enumerate() {
            if l < 0.0 || !l.is_finite() {
                return Err(Error::invalid(
                    "hazard.intensity",
                    format!("state {} intensity must be finite and >= 0, got {l}", j + 1),
                ));
            }
        }
        for (j, &p) in fatality.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(
                    "hazard.fatality",
                    format!("state {} probability must lie in [0, 1], got {p}", j + 1),
                ));
            }
        }
        Ok(Self { intensity, fatality })
    }

    /// `λ_j = x_j` and `p_j = 1 - e^{-c x_j}`, the shape used for baskets.
    pub fn from_state_values(chain: &ChainSpec, c: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::invalid("hazard.c", format!("must be finite and > 0, got {c}")));
        }
        let intensity = chain.values().to_vec();
        let fatality = chain.values().iter().map(|x| -(-c * x).exp_m1()).collect();
        Self::new(intensity, fatality)
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn fatality(&self) -> &[f64] {
        &self.fatality
    }

    pub fn len(&self) -> usize {
        self.intensity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensity.is_empty()
    }

    /// Recovery probabilities `q_j = 1 - p_j`.
    pub fn recovery(&self) -> Vec<f64> {
        self.fatality.iter().map(|p| 1.0 - p).collect()
    }

    /// Per-state default intensity `p_j λ_j`.
    pub fn fatal_rate(&self, state: usize) -> f64 {
        self.fatality[state] * self.intensity[state]
    }

    pub fn fatal_rates(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.fatal_rate(j)).collect()
    }

    fn check_against(&self, chain: &ChainSpec) -> Result<()> {
        if self.len() != chain.len() {
            return Err(Error::invalid(
                "hazard.intensity",
                format!("expected {} states, got {}", chain.len(), self.len()),
            ));
        }
        Ok(())
    }
}

/// Per-state payoffs of a defaultable claim.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimSpec {
    /// Short rate `r_j`.
    pub rate: Vec<f64>,
    /// Amount paid at maturity if no default, by terminal state.
    pub terminal: Vec<f64>,
    /// Payment-stream rate while alive.
    pub stream: Vec<f64>,
    /// Amount paid at the default time, by the state at default.
    pub recovery: Vec<f64>,
}

impl ClaimSpec {
    /// Zero-coupon bond paying 1 at maturity, no recovery, flat rate.
    pub fn zero_coupon(states: usize, rate: f64) -> Self {
        Self {
            rate: vec![rate; states],
            terminal: vec![1.0; states],
            stream: vec![0.0; states],
            recovery: vec![0.0; states],
        }
    }

    fn validate(&self, states: usize) -> Result<()> {
        let fields: [(&str, &Vec<f64>); 4] = [
            ("claim.rate", &self.rate),
            ("claim.terminal", &self.terminal),
            ("claim.stream", &self.stream),
            ("claim.recovery", &self.recovery),
        ];
        for (name, v) in fields {
            if v.len() != states {
                return Err(Error::invalid(name, format!("expected {states} entries, got {}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(name, "entries must be finite"));
            }
        }
        if let Some(j) = self.rate.iter().position(|&r| r < 0.0) {
            return Err(Error::invalid("claim.rate", format!("state {} rate is negative", j + 1)));
        }
        Ok(())
    }
}

/// The three building-block prices of one claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimPrices {
    pub terminal: f64,
    pub stream: f64,
    pub recovery: f64,
}

impl ClaimPrices {
    pub fn total(&self) -> f64 {
        self.terminal + self.stream + self.recovery
    }
}

fn check_time(name: &str, t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::invalid(name, format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `P(τ > s)` starting from `initial`.
pub fn survival(chain: &ChainSpec, hazard: &HazardSpec, initial: usize, s: f64) -> Result<f64> {
    hazard.check_against(chain)?;
    chain.check_state(initial)?;
    check_time("time", s)?;
    let weights: Vec<f64> = hazard.fatal_rates().iter().map(|h| -h).collect();
    Ok(occupation::mgf(chain, &weights, s)?[initial])
}

/// Survival probability conditional on the economy path: `exp(-∫_{s1}^{s2} p λ)`.
pub fn path_survival(path: &ChainPath, hazard: &HazardSpec, s1: f64, s2: f64) -> Result<f64> {
    if !(0.0 <= s1 && s1 <= s2 && s2 <= path.horizon()) {
        return Err(Error::invalid(
            "interval",
            format!("[{s1}, {s2}] is not inside [0, {}]", path.horizon()),
        ));
    }
    if s1 == s2 {
        return Ok(1.0);
    }
    Ok((-path.integrate(|j| hazard.fatal_rate(j), s1, s2)).exp())
}

/// `B = Q - diag(r + p λ)`.
fn killed_generator(chain: &ChainSpec, hazard: &HazardSpec, claim: &ClaimSpec) -> Result<DMatrix<f64>> {
    hazard.check_against(chain)?;
    claim.validate(chain.len())?;
    let mut b = chain.generator();
    for j in 0..chain.len() {
        b[(j, j)] -= claim.rate[j] + hazard.fatal_rate(j);
    }
    Ok(b)
}

/// `E[e^{-∫_0^T r} X(X_T) 1{τ > T}]`.
pub fn price_terminal(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    claim: &ClaimSpec,
    initial: usize,
    maturity: f64,
) -> Result<f64> {
    chain.check_state(initial)?;
    check_time("maturity", maturity)?;
    let b = killed_generator(chain, hazard, claim)?;
    let x = DVector::from_column_slice(&claim.terminal);
    Ok(matexp::exp_action(&b, &x, maturity)?[initial])
}

/// `E[∫_0^T Y(X_s) 1{τ > s} e^{-∫_0^s r} ds]`.
pub fn price_stream(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    claim: &ClaimSpec,
    initial: usize,
    maturity: f64,
) -> Result<f64> {
    chain.check_state(initial)?;
    check_time("maturity", maturity)?;
    let b = killed_generator(chain, hazard, claim)?;
    let y = DVector::from_column_slice(&claim.stream);
    Ok(matexp::integral_action(&b, &y, maturity)?[initial])
}

/// `E[Z(X_τ) e^{-∫_0^τ r} 1{τ <= T}]`, i.e. `∫_0^T` of the recovery weighted
/// by the default density `p λ` under the killed semigroup.
pub fn price_recovery(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    claim: &ClaimSpec,
    initial: usize,
    maturity: f64,
) -> Result<f64> {
    chain.check_state(initial)?;
    check_time("maturity", maturity)?;
    let b = killed_generator(chain, hazard, claim)?;
    let w = DVector::from_iterator(
        chain.len(),
        (0..chain.len()).map(|j| claim.recovery[j] * hazard.fatal_rate(j)),
    );
    Ok(matexp::integral_action(&b, &w, maturity)?[initial])
}

pub fn price_claim(
    chain: &ChainSpec,
    hazard: &HazardSpec,
    claim: &ClaimSpec,
    initial: usize,
    maturity: f64,
) -> Result<ClaimPrices> {
    Ok(ClaimPrices {
        terminal: price_terminal(chain, hazard, claim, initial, maturity)?,
        stream: price_stream(chain, hazard, claim, initial, maturity)?,
        recovery: price_recovery(chain, hazard, claim, initial, maturity)?,
    })
}
