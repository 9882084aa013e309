//! `ergolab` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ergolab::protocols::ProtocolKind;

use config::CommonArgs;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or flags (exit 2).
    Config(String),
    /// A computation failed (exit 3).
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl From<ergolab::Error> for CliError {
    fn from(e: ergolab::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "ergolab",
    version,
    about = "Work extraction from a dissipative qubit"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Dephasing,
    Direct,
    Sequential,
}

impl From<Kind> for ProtocolKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Dephasing => ProtocolKind::Dephasing,
            Kind::Direct => ProtocolKind::Direct,
            Kind::Sequential => ProtocolKind::Sequential,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Range {
    /// θ ∈ [0, π]
    Full,
    /// θ ∈ [π/2, π]
    Efficiency,
}

#[derive(Subcommand)]
enum Command {
    /// Run one extraction protocol and write its trace.
    Protocol {
        #[arg(value_enum)]
        kind: Kind,
        /// Preparation angle: radians, "fig2", "<x>pi" or "pi/<n>".
        #[arg(long)]
        theta_s: Option<String>,
        /// Hold time in seconds (dephasing protocol).
        #[arg(long)]
        hold: Option<f64>,
    },
    /// Sequential protocol across a grid of preparation angles.
    Sweep {
        #[arg(long, default_value_t = ergolab::analysis::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Range::Full)]
        range: Range,
        /// Append the efficiency optima θ_m and θ_e.
        #[arg(long)]
        optimum: bool,
    },
    /// Coherent ergotropy over (θ, C) for partially dephased states.
    Surface {
        /// Number of θ values on [π/2, π).
        #[arg(long, default_value_t = 46)]
        grid: usize,
        /// Number of coherence values per θ, spanning [0, C_max(θ)].
        #[arg(long, default_value_t = 41)]
        coherence_points: usize,
    },
    /// Free decay under the Lindblad integrator against the closed form.
    DecayCheck {
        #[arg(long)]
        theta_s: Option<String>,
        /// Evolution time in seconds.
        #[arg(long)]
        hold: Option<f64>,
        /// Write the sampled trajectory as CSV.
        #[arg(long, value_name = "PATH")]
        trajectory: Option<std::path::PathBuf>,
        /// Maximum number of trajectory samples.
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Protocol {
            kind,
            theta_s,
            hold,
        } => {
            let s = config::resolve(&cli.common, theta_s.as_deref(), hold)?;
            commands::protocol(kind.into(), &s)
        }
        Command::Sweep {
            grid,
            range,
            optimum,
        } => {
            let s = config::resolve(&cli.common, None, None)?;
            commands::sweep(&s, grid, range, optimum)
        }
        Command::Surface {
            grid,
            coherence_points,
        } => {
            let s = config::resolve(&cli.common, None, None)?;
            commands::surface(&s, grid, coherence_points)
        }
        Command::DecayCheck {
            theta_s,
            hold,
            trajectory,
            samples,
        } => {
            let s = config::resolve(&cli.common, theta_s.as_deref(), hold)?;
            commands::decay_check(&s, trajectory.as_deref(), samples)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ergolab: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => 2,
                CliError::Numeric(_) => 3,
            })
        }
    }
}
