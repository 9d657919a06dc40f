mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::CliError;
use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "famrec", version, about = "Family-aware collaborative filtering pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Each one overrides the matching
/// config-file setting.
#[derive(Debug, Args)]
struct Common {
    /// Config file of `section.key = value` lines
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory holding the five corpus files; without it a synthetic corpus is generated
    #[arg(long, value_name = "DIR")]
    data: Option<PathBuf>,
    /// Seed for the synthetic generator
    #[arg(long)]
    seed: Option<u64>,
    /// Neighborhood size
    #[arg(long)]
    k: Option<usize>,
    /// Split point, `YYYY-MM-DD HH:MM:SS`; later transactions form the test set
    #[arg(long, value_name = "TIMESTAMP", conflicts_with = "test_fraction")]
    split: Option<String>,
    /// Target share of transactions in the test set
    #[arg(long, value_name = "FRACTION")]
    test_fraction: Option<f64>,
    /// Longest recommendation list evaluated
    #[arg(long)]
    n_max: Option<usize>,
    /// Blend weights, e.g. `brand=1,profile=0.5`
    #[arg(long, value_name = "AXIS=W,...")]
    weights: Option<String>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for matrix builds and evaluation
    #[arg(long)]
    workers: Option<usize>,
    /// Reuse matrix dumps whose inputs are unchanged
    #[arg(long)]
    cache: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let mut set = |key: &str, value: String| cfg.apply(key, &value);
        if let Some(d) = &self.data {
            set("data.dir", d.display().to_string())?;
        }
        if let Some(v) = self.seed {
            set("synth.seed", v.to_string())?;
        }
        if let Some(v) = self.k {
            set("model.k", v.to_string())?;
        }
        if let Some(v) = &self.split {
            set("split.point", v.clone())?;
        }
        if let Some(v) = self.test_fraction {
            set("split.test_fraction", v.to_string())?;
        }
        if let Some(v) = self.n_max {
            set("eval.n_max", v.to_string())?;
        }
        if let Some(v) = &self.weights {
            set("model.weights", v.clone())?;
        }
        if let Some(v) = &self.out {
            set("output.dir", v.display().to_string())?;
        }
        if let Some(v) = self.workers {
            set("run.workers", v.to_string())?;
        }
        if self.cache {
            set("output.cache", "true".into())?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic corpus to the output directory
    Generate(Common),
    /// Build similarity matrices and dump them
    Similarity(Common),
    /// Print a Top-N list for one member or family
    Recommend {
        #[command(flatten)]
        common: Common,
        /// Member id, or family id for the family model
        #[arg(long)]
        actor: String,
        /// user, hybrid_user or hybrid_family
        #[arg(long, default_value = "hybrid_user")]
        model: String,
        /// brand, type or category
        #[arg(long, default_value = "brand")]
        axis: String,
        /// List length
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Run the model comparison and write report.csv and summary.csv
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated model kinds
        #[arg(long)]
        models: Option<String>,
    },
    /// Print item frequency tables per axis
    Describe {
        #[command(flatten)]
        common: Common,
        /// Rows per axis
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Generate(c) | Command::Similarity(c) => c,
            Command::Recommend { common, .. } | Command::Evaluate { common, .. } | Command::Describe { common, .. } => {
                common
            }
        }
    }
}

fn init_workers(workers: Option<usize>) -> Result<(), CliError> {
    let n = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(format!("cannot start worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = cli.command.common().resolve()?;
    init_workers(cfg.workers)?;
    match cli.command {
        Command::Generate(_) => commands::generate(&cfg),
        Command::Similarity(_) => commands::similarity(&cfg),
        Command::Recommend {
            actor, model, axis, n, ..
        } => commands::recommend(&cfg, &actor, &model, &axis, n),
        Command::Evaluate { models, .. } => {
            if let Some(m) = models {
                cfg.apply("model.kinds", &m)?;
            }
            commands::evaluate(&cfg)
        }
        Command::Describe { top, .. } => commands::describe(&cfg, top),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("famrec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
