//! Command-line pipeline around `feather_core`: embed, pool, train,
//! predict and bench, each reproducible from a flag set or JSON config.

pub mod commands;
pub mod config;
pub mod error;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "feather",
    version,
    about = "Characteristic function embeddings of attributed graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed every node of one graph.
    Embed(RunConfig),
    /// Pool node embeddings into one descriptor row per graph.
    Pool(RunConfig),
    /// Fit a classifier together with its evaluation points.
    Train(RunConfig),
    /// Apply a checkpoint to a graph.
    Predict(RunConfig),
    /// Time the embedding over a parameter sweep.
    Bench(RunConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Embed(_) => "embed",
            Command::Pool(_) => "pool",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Bench(_) => "bench",
        }
    }

    fn config(&self) -> &RunConfig {
        match self {
            Command::Embed(c)
            | Command::Pool(c)
            | Command::Train(c)
            | Command::Predict(c)
            | Command::Bench(c) => c,
        }
    }
}

/// Resolves the configuration and runs the command on a pool of
/// `--threads` workers.
pub fn run(command: Command) -> CliResult<()> {
    let config = command.config().clone().resolve()?;
    log::info!(
        "{}: {}",
        command.name(),
        serde_json::to_string(&config).unwrap_or_default()
    );
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Embed(_) => commands::embed(&config),
        Command::Pool(_) => commands::pool(&config),
        Command::Train(_) => commands::train_cmd(&config),
        Command::Predict(_) => commands::predict_cmd(&config),
        Command::Bench(_) => commands::bench(&config),
    })
}
