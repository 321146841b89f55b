//! Command-line driver: dataset generation, LF/HF/BF training, sampling, KID
//! evaluation and the KID-versus-n experiment sweep.
//!
//! Every command is a pure function of its input files, flags and `--seed`.
//! Exit status: 0 success, 2 usage or validation error, 3 I/O failure,
//! 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use bfvae::datagen::Problem;
use bfvae::io::DataKind;

pub mod commands;
mod error;
pub mod experiment;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "bfvae", version, about = "Bi-fidelity VAE training, sampling and KID evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset with a bundled solver.
    GenData(GenDataArgs),
    /// Train a VAE on low-fidelity rows.
    TrainLf(TrainArgs),
    /// Train the HF-only baseline VAE on high-fidelity rows.
    TrainHf(TrainArgs),
    /// Adapt an LF checkpoint to HF data from paired rows.
    TrainBf(TrainBfArgs),
    /// Draw samples from a checkpoint.
    Generate(GenerateArgs),
    /// Multi-trial KID between test rows and checkpoint samples.
    EvalKid(EvalKidArgs),
    /// KID-versus-n sweep comparing BF-VAE with the HF-only baseline.
    Experiment(ExperimentArgs),
}

/// Run configuration file plus `key=value` overrides.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Preset used when no configuration file is given.
    #[arg(long, default_value = "burgers")]
    pub problem: Problem,
    /// Override a configuration key, e.g. `--set epochs_lf=10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long)]
    pub problem: Problem,
    /// `lf`, `hf` or `paired`.
    #[arg(long)]
    pub mode: DataKind,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output path; a `.csv` extension writes headerless CSV instead of BFQD.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// BFQD or CSV training rows.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub seed: u64,
    /// Checkpoint path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch loss CSV; printed to stdout when omitted.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainBfArgs {
    #[arg(long)]
    pub lf_checkpoint: PathBuf,
    /// Paired BFQD or CSV rows `[x_L | x_H]`.
    #[arg(long)]
    pub pairs: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write headerless CSV regardless of the extension.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct EvalKidArgs {
    /// Held-out HF rows (HF-only or paired).
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, required_unless_present = "self_check")]
    pub checkpoint: Option<PathBuf>,
    /// Samples per side in each trial.
    #[arg(long = "T", alias = "test-size", default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Score the test rows against themselves instead of checkpoint samples.
    #[arg(long)]
    pub self_check: bool,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Result table path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress progress messages on stderr.
    #[arg(long)]
    pub quiet: bool,
}

/// Either a command-line parsing outcome (including `--help`) or a command failure.
#[derive(Debug)]
pub enum Failure {
    Clap(clap::Error),
    Command(CliError),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Clap(e) => e.exit_code(),
            Failure::Command(e) => e.exit_code(),
        }
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Command(e)
    }
}

/// Parses `args` (program name first) and runs the command, writing primary
/// output to `out`.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> Result<(), Failure>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(Failure::Clap)?;
    execute(cli.command, out).map_err(Failure::Command)
}

pub fn execute(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::GenData(a) => commands::gen_data(&a, out),
        Command::TrainLf(a) => commands::train(&a, DataKind::LfOnly, out),
        Command::TrainHf(a) => commands::train(&a, DataKind::HfOnly, out),
        Command::TrainBf(a) => commands::train_bf(&a, out),
        Command::Generate(a) => commands::generate(&a, out),
        Command::EvalKid(a) => commands::eval_kid(&a, out),
        Command::Experiment(a) => experiment::run(&a, out),
    }
}
