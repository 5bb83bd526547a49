//! `qresource`: reproduction workflows for coherence, superposition and
//! entanglement resources, writing CSV/JSON tables and SVG figures.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qresource::tomography::SamplingMode;

use commands::{ActivateMode, ExperimentArgs, TomographyArgs, DEFAULT_SEED};

const DEFAULT_THETA_GRID: &str = "0,15,30,45,60,75,90";

#[derive(Parser)]
#[command(name = "qresource", version, about = "Coherence, superposition and entanglement resource workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Simulated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampling {
    Poisson,
    Multinomial,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate superposition-free two-qubit unitaries for a free-state overlap s.
    Classify {
        /// |s|, strictly between 0 and 1.
        #[arg(long, default_value_t = 0.5)]
        overlap_mod: f64,
        /// arg(s) in degrees.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        overlap_arg: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Coherence-to-entanglement activation through a CNOT.
    Activate {
        /// Comma-separated angles in degrees.
        #[arg(long, default_value = DEFAULT_THETA_GRID, allow_negative_numbers = true)]
        theta_grid: String,
        #[arg(long, value_enum, default_value_t = Mode::Ideal)]
        mode: Mode,
        /// Circuit config (required in simulated mode).
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        /// Monte Carlo rounds for error bars; below 2 disables them.
        #[arg(long, default_value_t = 20)]
        rounds: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Strong-monotonicity violation of trace-norm entanglement.
    Monotonicity {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 0.01)]
        p_step: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Truth tables, fidelity bounds and output states of the optical CNOT.
    Experiment {
        /// Circuit config; the ideal core is used when omitted.
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Coincidences per truth-table row and per tomography setting; 0 is exact.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = DEFAULT_THETA_GRID, allow_negative_numbers = true)]
        theta_grid: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Pauli-basis state tomography by maximum likelihood.
    Tomography {
        /// Dataset CSV to reconstruct; otherwise `--state` is simulated.
        #[arg(long)]
        input: Option<PathBuf>,
        /// h, v, d, a, r, l, bell or mixed.
        #[arg(long, default_value = "bell")]
        state: String,
        /// Counts per setting; 0 gives exact probabilities.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, value_enum, default_value_t = Sampling::Poisson)]
        sampling: Sampling,
        #[arg(long, default_value_t = 0)]
        rounds: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> error::Result<()> {
    match cli.command {
        Command::Classify { overlap_mod, overlap_arg, out } => commands::classify(overlap_mod, overlap_arg, &out),
        Command::Activate { theta_grid, mode, circuit, shots, rounds, seed, out } => {
            let grid = commands::parse_theta_grid(&theta_grid)?;
            let mode = match mode {
                Mode::Ideal => ActivateMode::Ideal,
                Mode::Simulated => ActivateMode::Simulated { shots, rounds, seed },
            };
            commands::activate(&grid, mode, circuit.as_deref(), &out)
        }
        Command::Monotonicity { p_min, p_max, p_step, out } => commands::monotonicity(p_min, p_max, p_step, &out),
        Command::Experiment { circuit, shots, seed, theta_grid, out } => {
            let grid = commands::parse_theta_grid(&theta_grid)?;
            commands::experiment(ExperimentArgs { circuit: circuit.as_deref(), shots, seed, grid_deg: &grid, out: &out })
        }
        Command::Tomography { input, state, shots, sampling, rounds, seed, out } => {
            let sampling = match sampling {
                Sampling::Poisson => SamplingMode::Poisson,
                Sampling::Multinomial => SamplingMode::Multinomial,
            };
            commands::tomography(TomographyArgs {
                input: input.as_ref(),
                state: &state.to_lowercase(),
                shots,
                sampling,
                rounds,
                seed,
                out: &out,
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
