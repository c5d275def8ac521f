//! Command-line driver: reads a TOML run configuration, dispatches one
//! subcommand and writes a CSV or JSON table.

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "trigger-default", version, about = "Trigger-event credit model: pricing, sweeps and Monte Carlo checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Single-name survival probability at the query times.
    Survival(CommonArgs),
    /// Building-block prices of the configured claim.
    Price(CommonArgs),
    /// Two-firm looping-default densities and survival curves.
    TwoFirm(CommonArgs),
    /// kth-to-default CDF and premium for every seniority.
    Basket(CommonArgs),
    /// Premium table over the contagion and fatality grids.
    Sweep(CommonArgs),
    /// Occupation-time moment generating function.
    Mgf(CommonArgs),
    /// Monte Carlo estimates with standard errors.
    Simulate(CommonArgs),
    /// Analytic versus Monte Carlo report, one line per quantity.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Defaults to `output.format` from the config, then csv.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides `mc.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `mc.paths`.
    #[arg(long)]
    pub paths: Option<u64>,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Survival(a)
            | Command::Price(a)
            | Command::TwoFirm(a)
            | Command::Basket(a)
            | Command::Sweep(a)
            | Command::Mgf(a)
            | Command::Simulate(a)
            | Command::Validate(a) => a,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config { key: String, message: String },
    Model(trigger_default::Error),
    Io(String),
    ValidationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use trigger_default::Error as E;
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Model(E::Validation { .. } | E::Dimension { .. }) => EXIT_CONFIG,
            CliError::Model(E::Degenerate(_)) => EXIT_DEGENERATE,
            CliError::Model(E::NumericRange(_)) | CliError::Io(_) => EXIT_FAILURE,
            CliError::ValidationFailed(_) => EXIT_VALIDATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { key, message } => write!(f, "config error at {key}: {message}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::ValidationFailed(n) => write!(f, "{n} validation line(s) outside {} standard errors", trigger_default::validation::SIGMAS),
        }
    }
}

impl From<trigger_default::Error> for CliError {
    fn from(e: trigger_default::Error) -> Self {
        CliError::Model(e)
    }
}

/// Parses `argv` and runs one subcommand. Data goes to `out` (unless
/// `--output` is given), diagnostics to `diag`. Returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { diag.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out, diag) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write, diag: &mut dyn Write) -> Result<(), CliError> {
    let args = command.args();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let config = RunConfig::parse(&text)?;
    let outcome = commands::dispatch(command, &config, diag)?;
    let format = args.format.or(config.output.format).unwrap_or(Format::Csv);
    let rendered = match format {
        Format::Csv => outcome.table.to_csv(),
        Format::Json => outcome.table.to_json(),
    };
    let io_err = |e: std::io::Error| CliError::Io(format!("write failed: {e}"));
    match args.output.as_ref().or(config.output.path.as_ref()) {
        Some(path) => std::fs::write(path, rendered).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(rendered.as_bytes()).map_err(io_err)?,
    }
    match outcome.failures {
        0 => Ok(()),
        n => Err(CliError::ValidationFailed(n)),
    }
}
