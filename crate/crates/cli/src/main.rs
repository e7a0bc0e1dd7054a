//! `qgt`: graph generation, decoding, density evolution and simulation for
//! quantitative group testing with bundles.
//!
//! Every defect probability and rate on this interface is in percent.

mod cmd;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "qgt", version)]
#[command(about = "Quantitative group testing with bundle-augmented sparse graphs")]
#[command(
    long_about = "Quantitative group testing with bundle-augmented sparse graphs.\n\n\
All defect probabilities (gamma) and rates (omega) are given and reported in PERCENT: \
--gamma 0.7 means a defect probability of 0.007.\n\n\
Every subcommand accepts --config FILE, a JSON object with \"schema\": \"qgt.config.v1\" \
and keys named after the long flags (with '_' for '-'). Flags on the command line take \
precedence. A run manifest (*.manifest.json) is also accepted as a config file."
)]
#[command(after_help = "Exit codes: 0 success, 1 usage error, 2 runtime error.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a bundle-augmented graph and write it as JSON.
    GenGraph(GenGraphArgs),
    /// Decode a syndrome on a given graph.
    Decode(DecodeArgs),
    /// Monte Carlo misdetection rates over a grid of defect probabilities.
    Simulate(SimulateArgs),
    /// Density-evolution threshold on gamma at a fixed ensemble.
    DeThreshold(DeThresholdArgs),
    /// Density-evolution minimum rate at fixed gamma values.
    DeRate(DeRateArgs),
    /// Compare decoder message statistics with density evolution.
    Crosscheck(CrosscheckArgs),
    /// Density-evolution thresholds at rate 5% for a grid of (q, d_v).
    ReproduceTable1(Table1Args),
    /// Finite-length misdetection curves at rate 5% for n = 210000.
    ReproduceFig3(Fig3Args),
}

/// Ensemble parameters shared by the commands that build graphs.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleArgs {
    /// Number of items.
    #[arg(long)]
    pub n: Option<usize>,
    /// Bundle size.
    #[arg(long)]
    pub q: Option<usize>,
    /// Tests per item (item-level plus bundle-level).
    #[arg(long)]
    pub dv: Option<usize>,
    /// Item-level tests per item.
    #[arg(long)]
    pub dvx: Option<usize>,
    /// Items per test.
    #[arg(long)]
    pub dc: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenGraphArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Forbid two items of the same bundle in one item-level test.
    #[arg(long)]
    pub distinct_bundles: bool,
    /// Output JSON file (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the flat test matrix in Matrix Market format.
    #[arg(long, value_name = "FILE")]
    pub mtx: Option<PathBuf>,
    /// Defect probability in percent; samples a population on the graph.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Write the sampled population's test outcomes (needs --gamma).
    #[arg(long, value_name = "FILE", requires = "gamma")]
    pub syndrome_out: Option<PathBuf>,
    /// Write the sampled population as a 0/1 array (needs --gamma).
    #[arg(long, value_name = "FILE", requires = "gamma")]
    pub truth_out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Graph JSON as written by gen-graph.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Syndrome JSON: array of test outcomes, bundle-level tests first.
    #[arg(long, value_name = "FILE")]
    pub syndrome: Option<PathBuf>,
    /// Optional ground truth JSON (0/1 array) for error metrics.
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
    /// Iteration budget [default: 200].
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Output JSON file (stdout when absent).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Defect probabilities in percent, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub gamma: Vec<f64>,
    /// Trials per gamma value.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decoder iteration budget [default: 200].
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Reuse one graph for all trials instead of a fresh graph per trial.
    #[arg(long)]
    pub fixed_graph: bool,
    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Output JSON file with the configuration embedded.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingArg {
    /// Average per distinct bundle value of the full test.
    DistinctValue,
    /// Exact conditional law of the other bundles.
    Conditional,
}

/// Numerical settings of density evolution.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DeNumerics {
    /// Syndrome tail mass dropped from the test-bundle average [default: 1e-7].
    #[arg(long)]
    pub eps_tail: Option<f64>,
    /// Residual error probability counted as success [default: 1e-8].
    #[arg(long)]
    pub delta: Option<f64>,
    /// DE iteration budget [default: 2000].
    #[arg(long)]
    pub max_de_iters: Option<usize>,
    /// Bisection resolution in percent [default: 0.001].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Test-bundle averaging rule [default: distinct-value].
    #[arg(long, value_enum)]
    pub averaging: Option<AveragingArg>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DeThresholdArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Bundle size.
    #[arg(long)]
    pub q: Option<usize>,
    /// Tests per item.
    #[arg(long)]
    pub dv: Option<usize>,
    /// Item-level tests per item [default: dv when q = 1].
    #[arg(long)]
    pub dvx: Option<usize>,
    /// Items per test.
    #[arg(long)]
    pub dc: Option<usize>,
    /// Rate dv/dc in percent; sets dc when --dc is absent.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Upper end of the search interval in percent [default: 5].
    #[arg(long)]
    pub upper: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub numerics: DeNumerics,
    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct DeRateArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Defect probabilities in percent, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub gamma: Vec<f64>,
    /// Bundle size.
    #[arg(long)]
    pub q: Option<usize>,
    /// Tests per item.
    #[arg(long)]
    pub dv: Option<usize>,
    /// Item-level tests per item [default: dv when q = 1].
    #[arg(long)]
    pub dvx: Option<usize>,
    /// Largest items-per-test value searched [default: 4000].
    #[arg(long)]
    pub max_dc: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub numerics: DeNumerics,
    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CrosscheckArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Defect probability in percent.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Iterations to compare, comma separated [default: 1,2,3].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub ell: Vec<usize>,
    /// Independent instances [default: 20].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSON report.
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Table1Args {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Bundle sizes, comma separated [default: 1,4,5,10].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q: Vec<usize>,
    /// Tests per item, comma separated [default: 4,5,6,7,8].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub dv: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub numerics: DeNumerics,
    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig3Args {
    /// JSON config file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Bundle sizes, comma separated [default: 1,5,10].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q: Vec<usize>,
    /// Number of items [default: 210000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Defect probabilities in percent, replacing the per-curve default grids.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub gamma: Vec<f64>,
    /// Trials per point [default: 100].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decoder iteration budget [default: 200].
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Directory for one CSV and JSON file per curve [default: fig3].
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::GenGraph(a) => cmd::graph::gen_graph(a),
        Command::Decode(a) => cmd::graph::decode(a),
        Command::Simulate(a) => cmd::sim::simulate(a),
        Command::DeThreshold(a) => cmd::de::de_threshold(a),
        Command::DeRate(a) => cmd::de::de_rate(a),
        Command::Crosscheck(a) => cmd::sim::crosscheck(a),
        Command::ReproduceTable1(a) => cmd::de::reproduce_table1(a),
        Command::ReproduceFig3(a) => cmd::sim::reproduce_fig3(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
