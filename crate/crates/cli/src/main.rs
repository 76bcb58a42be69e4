use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use walkwatch::{ContextMode, TrainConfig};

mod commands;
mod manifest;

#[derive(Debug, Parser)]
#[command(
    name = "walkwatch",
    version,
    about = "Graph embeddings with a learned random-walk context distribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train embeddings on a whole graph.
    Train(TrainCmd),
    /// Split edges, train on the training graph, report test ROC-AUC.
    Linkpred(LinkpredCmd),
    /// Compare simulated walk co-occurrences with the closed-form expectation.
    Simulate(SimulateCmd),
    /// Train embeddings and classify nodes with smooth kNN.
    Classify(ClassifyCmd),
}

#[derive(Debug, Clone, Args)]
pub(crate) struct GraphArgs {
    /// Edge list: one `u v` pair per line, `#` comments.
    #[arg(long)]
    pub graph: PathBuf,
    /// Treat edges as directed arcs.
    #[arg(long)]
    pub directed: bool,
    /// Keep only the largest connected component.
    #[arg(long)]
    pub largest_component: bool,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct TrainArgs {
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 80)]
    pub walks_per_node: u32,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// attention, deepwalk or glove.
    #[arg(long, default_value = "attention")]
    pub context: ContextMode,
}

impl TrainArgs {
    pub fn config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.dim,
            horizon: self.horizon,
            beta: self.beta,
            walks_per_node: self.walks_per_node,
            learning_rate: self.lr,
            epochs: self.epochs,
            seed: self.seed,
            context: self.context,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub(crate) struct TrainCmd {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub(crate) struct LinkpredCmd {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Fraction of edges held out for testing.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub(crate) struct SimulateCmd {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 10_000)]
    pub walks_per_node: u32,
    #[arg(long, default_value_t = 5)]
    pub horizon: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub(crate) struct ClassifyCmd {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Label file: one `node class` pair per line.
    #[arg(long)]
    pub labels: PathBuf,
    /// Node ids (one per line) of the training set; with --val-nodes and
    /// --test-nodes replaces the random split.
    #[arg(long, requires_all = ["val_nodes", "test_nodes"])]
    pub train_nodes: Option<PathBuf>,
    #[arg(long)]
    pub val_nodes: Option<PathBuf>,
    #[arg(long)]
    pub test_nodes: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub train_per_class: usize,
    #[arg(long, default_value_t = 500)]
    pub num_val: usize,
    #[arg(long, default_value_t = 1000)]
    pub num_test: usize,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
    /// Comma-separated alpha values searched on the validation set.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4,8,16")]
    pub grid: Vec<f64>,
    /// Use this alpha instead of searching the grid.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn init_threads() -> anyhow::Result<()> {
    let threads = match std::env::var("WALKWATCH_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            anyhow::anyhow!("WALKWATCH_THREADS must be a non-negative integer, got {v:?}")
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let result = init_threads().and_then(|_| match cli.command {
        Command::Train(cmd) => commands::train(&cmd, &argv),
        Command::Linkpred(cmd) => commands::linkpred(&cmd, &argv),
        Command::Simulate(cmd) => commands::simulate(&cmd, &argv),
        Command::Classify(cmd) => commands::classify(&cmd, &argv),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
