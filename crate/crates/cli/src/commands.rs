//! One function per subcommand, each producing a [`Table`].

use std::io::Write;

use trigger_default::basket;
use trigger_default::fixtures::FATALITY_GRID;
use trigger_default::occupation;
use trigger_default::single_name;
use trigger_default::validation::{self, ValidationScenario};
use trigger_default::Firm;

use crate::config::RunConfig;
use crate::table::{Cell, Table};
use crate::{CliError, Command};

pub struct Outcome {
    pub table: Table,
    /// Validation lines that failed; non-zero maps to the validation exit status.
    pub failures: usize,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, failures: 0 }
    }
}

pub fn dispatch(command: &Command, config: &RunConfig, diag: &mut dyn Write) -> Result<Outcome, CliError> {
    let args = command.args();
    match command {
        Command::Survival(_) => survival(config).map(Outcome::from),
        Command::Price(_) => price(config).map(Outcome::from),
        Command::TwoFirm(_) => two_firm(config).map(Outcome::from),
        Command::Basket(_) => basket_table(config, diag).map(Outcome::from),
        Command::Sweep(_) => sweep(config, diag).map(Outcome::from),
        Command::Mgf(_) => mgf(config).map(Outcome::from),
        Command::Simulate(_) | Command::Validate(_) => {
            let scenario = scenario(config, args.seed, args.paths)?;
            let _ = writeln!(diag, "seed: {} paths: {}", scenario.mc.seed, scenario.mc.paths);
            let report = validation::run(&scenario)?;
            if matches!(command, Command::Simulate(_)) {
                let mut table = Table::new(vec!["item", "mean", "std_error", "paths"]);
                for line in &report.lines {
                    table.push(vec![line.item.clone().into(), line.mc_mean.into(), line.mc_std_error.into(), report.paths.into()]);
                }
                return Ok(table.into());
            }
            let mut table = Table::new(vec!["item", "analytic", "mc_mean", "mc_std_error", "z_score", "pass"]);
            for line in &report.lines {
                table.push(vec![
                    line.item.clone().into(),
                    line.analytic.into(),
                    line.mc_mean.into(),
                    line.mc_std_error.into(),
                    line.z_score.into(),
                    line.pass.into(),
                ]);
            }
            for line in report.failures() {
                let _ = writeln!(diag, "FAIL {}: analytic {} mc {} ± {} (z = {:.2})", line.item, line.analytic, line.mc_mean, line.test_std_error, line.z_score);
            }
            Ok(Outcome { table, failures: report.failures().count() })
        }
    }
}

fn survival(config: &RunConfig) -> Result<Table, CliError> {
    let chain = config.chain()?;
    let initial = config.initial()?;
    let hazard = config.hazard(&chain)?;
    let mut table = Table::new(vec!["time", "survival"]);
    for t in config.times()? {
        table.push(vec![t.into(), single_name::survival(&chain, &hazard, initial, t)?.into()]);
    }
    Ok(table)
}

fn price(config: &RunConfig) -> Result<Table, CliError> {
    let chain = config.chain()?;
    let initial = config.initial()?;
    let hazard = config.hazard(&chain)?;
    let claim = config.claim(chain.len());
    let prices = single_name::price_claim(&chain, &hazard, &claim, initial, config.maturity()?)?;
    let mut table = Table::new(vec!["item", "value"]);
    for (item, value) in [
        ("terminal", prices.terminal),
        ("stream", prices.stream),
        ("recovery", prices.recovery),
        ("total", prices.total()),
    ] {
        table.push(vec![item.into(), value.into()]);
    }
    Ok(table)
}

fn two_firm(config: &RunConfig) -> Result<Table, CliError> {
    let params = config.two_firm()?.ok_or_else(|| CliError::Config {
        key: "two_firm".to_string(),
        message: "required but missing".to_string(),
    })?;
    let times = match &config.query.times {
        Some(t) => t.clone(),
        None => vec![params.maturity],
    };
    let mut table = Table::new(vec![
        "time",
        "density_a",
        "density_b",
        "survival_a",
        "survival_b",
        "first_default_survival",
        "bond_a",
        "bond_b",
    ]);
    for t in times {
        if t < 0.0 || !t.is_finite() {
            return Err(CliError::Config {
                key: "query.times".to_string(),
                message: format!("{t} must be finite and >= 0"),
            });
        }
        let discount = (-params.rate * t).exp();
        table.push(vec![
            t.into(),
            params.marginal_density(Firm::A, t).into(),
            params.marginal_density(Firm::B, t).into(),
            params.marginal_survival(Firm::A, t).into(),
            params.marginal_survival(Firm::B, t).into(),
            params.first_default_survival(t).into(),
            (discount * params.marginal_survival(Firm::A, t)).into(),
            (discount * params.marginal_survival(Firm::B, t)).into(),
        ]);
    }
    Ok(table)
}

fn basket_table(config: &RunConfig, diag: &mut dyn Write) -> Result<Table, CliError> {
    let chain = config.chain()?;
    let contract = config.contract(chain, config.initial()?)?;
    let cdf = contract.cdf_all(contract.maturity())?;
    let discount = contract.discount();
    let mut table = Table::new(vec!["k", "cdf", "premium", "error_bound", "route"]);
    for (i, v) in cdf.iter().enumerate() {
        if v.precision_warning() {
            let _ = writeln!(diag, "warning: k={} cdf error bound {:.3e} exceeds the precision threshold", i + 1, v.error_bound);
        }
        let route = match v.route {
            basket::CdfRoute::Expansion => "expansion",
            basket::CdfRoute::JointChain => "joint_chain",
        };
        table.push(vec![
            (i + 1).into(),
            v.probability.into(),
            (discount * v.probability).into(),
            v.error_bound.into(),
            route.into(),
        ]);
    }
    Ok(table)
}

fn sweep(config: &RunConfig, diag: &mut dyn Write) -> Result<Table, CliError> {
    let chain = config.chain()?;
    let base = config.contract(chain, config.initial()?)?;
    let b_grid = config
        .sweep
        .b
        .clone()
        .unwrap_or_else(|| (0..=10).map(|i| i as f64 / 20.0).collect());
    let c_grid = config.sweep.c.clone().unwrap_or_else(|| FATALITY_GRID.to_vec());
    for (key, grid) in [("sweep.b", &b_grid), ("sweep.c", &c_grid)] {
        if grid.is_empty() {
            return Err(CliError::Config {
                key: key.to_string(),
                message: "must not be empty".to_string(),
            });
        }
    }
    let result = basket::sweep(&base, &b_grid, &c_grid)?;
    for s in &result.skipped {
        let _ = writeln!(diag, "skipped b={} c={}: {}", s.b, s.c, s.reason);
    }
    let mut table = Table::new(vec!["k", "b", "c", "premium"]);
    for row in &result.rows {
        if row.precision_warning {
            let _ = writeln!(diag, "warning: k={} b={} c={} premium may be imprecise", row.k, row.b, row.c);
        }
        table.push(vec![row.k.into(), row.b.into(), row.c.into(), row.premium.into()]);
    }
    Ok(table)
}

fn mgf(config: &RunConfig) -> Result<Table, CliError> {
    let chain = config.chain()?;
    let weights = config.query.weights.clone().ok_or_else(|| CliError::Config {
        key: "query.weights".to_string(),
        message: "required but missing".to_string(),
    })?;
    if weights.len() != chain.len() {
        return Err(CliError::Config {
            key: "query.weights".to_string(),
            message: format!("expected {} entries, got {}", chain.len(), weights.len()),
        });
    }
    let mut table = Table::new(vec!["time", "state", "psi"]);
    for t in config.times()? {
        let psi = occupation::mgf(&chain, &weights, t)?;
        for (state, value) in psi.iter().enumerate() {
            table.push(vec![Cell::Num(t), (state + 1).into(), (*value).into()]);
        }
    }
    Ok(table)
}

fn scenario(config: &RunConfig, seed: Option<u64>, paths: Option<u64>) -> Result<ValidationScenario, CliError> {
    let chain = config.chain()?;
    let initial = config.initial()?;
    let hazard = config.hazard(&chain)?;
    let claim = config.claim(chain.len());
    let maturity = config.maturity()?;
    let basket = match config.contract {
        Some(_) => Some(config.contract(chain.clone(), initial)?),
        None => None,
    };
    Ok(ValidationScenario {
        mc: config.mc(seed, paths, maturity)?,
        two_firm: config.two_firm()?,
        basket,
        chain,
        hazard,
        claim,
        initial,
        maturity,
    })
}
