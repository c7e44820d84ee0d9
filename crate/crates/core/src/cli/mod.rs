//! Command-line front end of the `esd` binary.
//!
//! Exit codes: 0 on success, 2 when the configuration or inputs are invalid,
//! 1 when a computation fails.

pub mod commands;
pub mod config;
pub mod sphere;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::error::Error;
use config::{CouplingSpec, GridSpec, InitialSpec, Overrides, Resolved, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotNormalized { .. }
            | Error::InvalidRate(_)
            | Error::DegenerateCoupling
            | Error::NotDissipative { .. }
            | Error::InvalidTime(_)
            | Error::InvalidDensityMatrix(_)
            | Error::InvalidWeight(_)
            | Error::InvalidGrid(_)
            | Error::NotEntangled { .. }
            | Error::WrongClass { .. } => CliError::Validation(e.to_string()),
            Error::NotHermitian { .. }
            | Error::NotPsd { .. }
            | Error::InvalidChoi(_)
            | Error::IncompleteKraus { .. }
            | Error::GridTooCoarse { .. }
            | Error::TauNotBracketed { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "esd", version, about = "Entanglement sudden death of two qubits under Markovian couplings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bloch-vector evolution of one qubit (JSON)
    Evolve(CommonArgs),
    /// Λ(t) and concurrence of a qubit pair on the time grid (CSV)
    Trajectory(CommonArgs),
    /// Sudden-death verdict for a qubit pair (JSON)
    SdeCheck(CommonArgs),
    /// Choi matrix and Kraus operators of qubit 1's channel at time t (JSON)
    Choi(CommonArgs),
    /// Monte Carlo census of the coupling space (JSON)
    Census(CommonArgs),
    /// Images of a 642-point sphere of pure states at the given times (CSV)
    BlochExport(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Time grid as START:END:POINTS
    #[arg(long, value_parser = GridSpec::parse_flag)]
    pub grid: Option<GridSpec>,
    /// Decay rate applied to both qubits
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Coupling of qubit 1: appc:THETA, family:THETA,PHI or explicit:UX,UY,UZ,VX,VY,VZ
    #[arg(long, value_parser = CouplingSpec::parse_flag)]
    pub coupling1: Option<CouplingSpec>,
    /// Coupling of qubit 2 (defaults to qubit 1's)
    #[arg(long, value_parser = CouplingSpec::parse_flag)]
    pub coupling2: Option<CouplingSpec>,
    /// Initial two-qubit state: plus:ALPHA_SQ, minus:ALPHA_SQ or matrix:PATH
    #[arg(long, value_parser = InitialSpec::parse_flag)]
    pub state: Option<InitialSpec>,
    /// Initial Bloch vector X,Y,Z for `evolve`
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub r0: Option<[f64; 3]>,
    /// Time for `choi`
    #[arg(long)]
    pub t: Option<f64>,
    /// Comma-separated snapshot times for `bloch-export`
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Number of census samples
    #[arg(long)]
    pub n: Option<u64>,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let x: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(x).map_err(|_| format!("expected X,Y,Z, got {s:?}"))
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            grid: self.grid.clone(),
            gamma: self.gamma,
            qubit1: self.coupling1.clone(),
            qubit2: self.coupling2.clone(),
            initial: self.state.clone(),
            r0: self.r0,
            t: self.t,
            times: self.times.clone(),
            n: self.n,
        }
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let (file, base_dir) = match &self.config {
            Some(path) => {
                let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (RunConfig::load(path)?, dir)
            }
            None => (RunConfig::default(), PathBuf::from(".")),
        };
        Resolved::new(file, self.overrides(), &base_dir)
    }
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Evolve(a)
            | Command::Trajectory(a)
            | Command::SdeCheck(a)
            | Command::Choi(a)
            | Command::Census(a)
            | Command::BlochExport(a) => a,
        }
    }
}

/// Run a parsed command and return the document it produces.
pub fn execute(command: &Command) -> Result<(String, Option<PathBuf>), CliError> {
    let r = command.args().resolve()?;
    let text = match command {
        Command::Evolve(_) => commands::evolve(&r)?,
        Command::Trajectory(_) => commands::trajectory(&r)?,
        Command::SdeCheck(_) => commands::sde_check(&r)?,
        Command::Choi(_) => commands::choi(&r)?,
        Command::Census(_) => commands::census(&r)?,
        Command::BlochExport(_) => commands::bloch_export(&r)?,
    };
    Ok((text, r.out))
}

/// Write `text` to `path` through a temporary file in the same directory, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli.command).and_then(|(text, out)| match out {
        Some(path) => write_atomic(&path, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
