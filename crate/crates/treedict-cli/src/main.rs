//! `treedict`: learn multiscale dictionaries from image patches or CSV
//! data sets, reconstruct images with OMP, and inspect atom usage.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors
//! (including missing input files, which are rejected before any output
//! is written).

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "treedict",
    version,
    about = "Tree-based multiscale dictionary learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a partition tree and extract the Haar and leaves dictionaries.
    Train(TrainArgs),
    /// Reconstruct an image from grid patches encoded against a dictionary.
    Reconstruct(ReconstructArgs),
    /// Per-atom usage statistics (and optionally a mosaic of the top atoms).
    Stats(StatsArgs),
    /// Self-check of the wavelet reference against the tree construction.
    HaarCheck(HaarCheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusteringArg {
    #[value(name = "2means")]
    TwoMeans,
    #[value(name = "2maxoids")]
    TwoMaxoids,
    #[value(name = "1dfeature")]
    OneDFeature,
    Spectral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Fifo,
    Priority,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepresentativeArg {
    Centroid,
    Maxoid,
    RankR,
    DctM,
}

#[derive(Args, Serialize)]
pub struct TrainArgs {
    /// Training input: a PGM image or a data-set CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Directory for tree.json, dictionaries, timing.csv and the config echo.
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "priority")]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "2means")]
    pub clustering: ClusteringArg,
    /// Nodes at or below this cardinality are never branched.
    #[arg(long, default_value_t = 1)]
    pub mincard: usize,
    /// FIFO branching threshold on the clustering objective.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Priority-queue dictionary cardinality; defaults to 1.5x the patch
    /// dimension.
    #[arg(long)]
    pub cardinality: Option<usize>,
    #[arg(long, value_enum, default_value = "centroid")]
    pub representative: RepresentativeArg,
    /// Rank for the rank-r representative policy.
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Term count for the dct-m representative policy.
    #[arg(long, default_value_t = 1)]
    pub terms: usize,
    /// Patch rows when training from an image.
    #[arg(long, default_value_t = 8)]
    pub patch_rows: usize,
    /// Patch columns when training from an image.
    #[arg(long, default_value_t = 8)]
    pub patch_cols: usize,
    /// Number of random patches drawn when training from an image.
    #[arg(long, default_value_t = 500)]
    pub num_patches: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub lloyd_iters: usize,
}

#[derive(Args, Serialize)]
pub struct ReconstructArgs {
    /// Dictionary JSON produced by `train`.
    #[arg(long)]
    pub dict: PathBuf,
    /// Image to reconstruct (PGM).
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Sparsity: maximum number of atoms per patch.
    #[arg(long, default_value_t = 5)]
    pub sparsity: usize,
}

#[derive(Args, Serialize)]
pub struct StatsArgs {
    /// Dictionary JSON produced by `train`.
    #[arg(long)]
    pub dict: PathBuf,
    /// Image whose grid patches are encoded to measure atom usage.
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub sparsity: usize,
    /// Also render the most-used atoms as mosaic.pgm.
    #[arg(long, default_value_t = false)]
    pub mosaic: bool,
    /// Number of top atoms in the mosaic.
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Mosaic columns.
    #[arg(long, default_value_t = 5)]
    pub columns: usize,
}

#[derive(Args, Serialize)]
pub struct HaarCheckArgs {
    /// Transform depth; the check runs on a signal of length 2^levels.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Corrupt the built tree first to demonstrate that the invariant
    /// checks catch it (the command then reports failure).
    #[arg(long, default_value_t = false)]
    pub inject_corruption: bool,
}

/// Errors split by exit code.
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<treedict::Error> for CliError {
    fn from(err: treedict::Error) -> CliError {
        CliError::Runtime(err.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(&args),
        Command::Reconstruct(args) => commands::reconstruct(&args),
        Command::Stats(args) => commands::stats(&args),
        Command::HaarCheck(args) => commands::haar_check(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}
