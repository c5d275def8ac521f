//! TOML run configuration. States are 1-based here and 0-based in the library.

use std::path::PathBuf;

use serde::Deserialize;
use trigger_default::{BasketContract, ChainSpec, ClaimSpec, HazardSpec, McConfig, TwoFirmParams};

use crate::CliError;

pub const DEFAULT_PATHS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chain: Option<ChainSection>,
    pub hazard: Option<HazardSection>,
    pub claim: Option<ClaimSection>,
    pub contract: Option<ContractSection>,
    pub two_firm: Option<TwoFirmSection>,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub query: QuerySection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub states: Vec<f64>,
    pub exit_rates: Vec<f64>,
    /// Jump matrix, one row per line. Uniform over the other states if absent.
    pub transitions: Option<Vec<Vec<f64>>>,
    #[serde(default = "first_state")]
    pub initial: usize,
}

fn first_state() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HazardSection {
    /// Trigger intensity per state; defaults to the state values.
    pub intensity: Option<Vec<f64>>,
    pub fatality: Option<Vec<f64>>,
    /// Fatality shape: `p_j = 1 - exp(-c x_j)`.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerState {
    Flat(f64),
    List(Vec<f64>),
}

impl PerState {
    fn expand(&self, states: usize) -> Vec<f64> {
        match self {
            PerState::Flat(v) => vec![*v; states],
            PerState::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSection {
    pub rate: Option<PerState>,
    pub terminal: Option<PerState>,
    pub stream: Option<PerState>,
    pub recovery: Option<PerState>,
    #[serde(rename = "T")]
    pub maturity: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractSection {
    pub n: usize,
    pub b: f64,
    pub c: f64,
    pub r: f64,
    #[serde(rename = "T")]
    pub maturity: f64,
    #[serde(default = "first_state")]
    pub k: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoFirmSection {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub p: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(rename = "T")]
    pub maturity: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub horizon: Option<f64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySection {
    pub times: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub b: Option<Vec<f64>>,
    pub c: Option<Vec<f64>>,
}

fn missing(key: &str) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: "required but missing".to_string(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::parse(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            CliError::Config {
                key: format!("line {line}"),
                message: e.message().to_string(),
            }
        })?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let message = e.into_inner().message().to_string();
            CliError::Config { key, message }
        })
    }

    pub fn chain(&self) -> Result<ChainSpec, CliError> {
        let c = self.chain.as_ref().ok_or_else(|| missing("chain"))?;
        let spec = match &c.transitions {
            Some(rows) => ChainSpec::new(c.states.clone(), c.exit_rates.clone(), rows.clone())?,
            None => ChainSpec::uniform_jumps(c.states.clone(), c.exit_rates.clone())?,
        };
        Ok(spec)
    }

    /// Initial state, 0-based.
    pub fn initial(&self) -> Result<usize, CliError> {
        let c = self.chain.as_ref().ok_or_else(|| missing("chain"))?;
        if c.initial == 0 || c.initial > c.states.len() {
            return Err(CliError::Config {
                key: "chain.initial".to_string(),
                message: format!("state {} outside 1..={}", c.initial, c.states.len()),
            });
        }
        Ok(c.initial - 1)
    }

    pub fn hazard(&self, chain: &ChainSpec) -> Result<HazardSpec, CliError> {
        let h = self.hazard.as_ref().ok_or_else(|| missing("hazard"))?;
        let intensity = h.intensity.clone().unwrap_or_else(|| chain.values().to_vec());
        let fatality = match (&h.fatality, h.c) {
            (Some(p), None) => p.clone(),
            (None, Some(c)) => {
                if c <= 0.0 || !c.is_finite() {
                    return Err(CliError::Config {
                        key: "hazard.c".to_string(),
                        message: format!("must be finite and > 0, got {c}"),
                    });
                }
                chain.values().iter().map(|x| -(-c * x).exp_m1()).collect()
            }
            _ => {
                return Err(CliError::Config {
                    key: "hazard.fatality".to_string(),
                    message: "give exactly one of hazard.fatality and hazard.c".to_string(),
                })
            }
        };
        if intensity.len() != chain.len() {
            return Err(CliError::Config {
                key: "hazard.intensity".to_string(),
                message: format!("expected {} entries, got {}", chain.len(), intensity.len()),
            });
        }
        Ok(HazardSpec::new(intensity, fatality)?)
    }

    /// Horizon of single-name queries: `claim.T`, else `contract.T`, else `two_firm.T`.
    pub fn maturity(&self) -> Result<f64, CliError> {
        self.claim
            .as_ref()
            .and_then(|c| c.maturity)
            .or(self.contract.as_ref().map(|c| c.maturity))
            .or(self.two_firm.as_ref().map(|c| c.maturity))
            .ok_or_else(|| missing("claim.T"))
    }

    /// Defaults to a zero-coupon bond at the contract rate.
    pub fn claim(&self, states: usize) -> ClaimSpec {
        let flat_rate = self.contract.as_ref().map_or(0.0, |c| c.r);
        let get = |v: Option<&PerState>, default: f64| v.map_or(vec![default; states], |v| v.expand(states));
        let c = self.claim.as_ref();
        ClaimSpec {
            rate: get(c.and_then(|c| c.rate.as_ref()), flat_rate),
            terminal: get(c.and_then(|c| c.terminal.as_ref()), 1.0),
            stream: get(c.and_then(|c| c.stream.as_ref()), 0.0),
            recovery: get(c.and_then(|c| c.recovery.as_ref()), 0.0),
        }
    }

    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        match &self.query.times {
            Some(t) if t.is_empty() => Err(CliError::Config {
                key: "query.times".to_string(),
                message: "must not be empty".to_string(),
            }),
            Some(t) => Ok(t.clone()),
            None => Ok(vec![self.maturity().map_err(|_| missing("query.times"))?]),
        }
    }

    pub fn contract(&self, chain: ChainSpec, initial: usize) -> Result<BasketContract, CliError> {
        let c = self.contract.as_ref().ok_or_else(|| missing("contract"))?;
        Ok(BasketContract::new(c.n, c.b, c.c, c.r, c.maturity, c.k, chain, initial)?)
    }

    pub fn two_firm(&self) -> Result<Option<TwoFirmParams>, CliError> {
        self.two_firm
            .as_ref()
            .map(|s| TwoFirmParams::new(s.a1, s.a2, s.b1, s.b2, s.p, s.r, s.maturity))
            .transpose()
            .map_err(CliError::from)
    }

    pub fn mc(&self, seed: Option<u64>, paths: Option<u64>, horizon: f64) -> Result<McConfig, CliError> {
        let config = McConfig::new(
            paths.or(self.mc.paths).unwrap_or(DEFAULT_PATHS),
            seed.or(self.mc.seed).unwrap_or(0),
            self.mc.horizon.unwrap_or(horizon),
        )
        .with_workers(self.mc.workers.unwrap_or(1));
        config.validate()?;
        Ok(config)
    }
}
