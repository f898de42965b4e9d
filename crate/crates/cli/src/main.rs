//! `evcat`: the event categorization pipeline from the command line.
//!
//! Exit status: 0 success, 2 configuration error, 3 data error, 4 internal
//! invariant violation.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "evcat", version, about = "Event categorization with decomposable model search")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand; flags override the config file.
#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration (defaults: the best reported experiment).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus file (JSON lines).
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pattern families or pattern ids, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    patterns: Option<Vec<String>>,
    /// pc1, pc2, or1 or or2.
    #[arg(long, global = true)]
    organization: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump every pattern match of a corpus as TSV.
    Extract,
    /// Select collocations on a training corpus.
    Select,
    /// Build a feature table from a corpus and an inventory.
    Features {
        #[arg(long)]
        inventory: PathBuf,
        /// Training tables must come from the inventory's own corpus.
        #[arg(long, value_enum, default_value = "training")]
        role: commands::Role,
    },
    /// Backward model search over a feature table.
    Search {
        #[arg(long)]
        table: PathBuf,
        /// Forbid dropping any feature-class edge.
        #[arg(long, conflicts_with = "unpinned")]
        pin_features: bool,
        /// Allow dropping feature-class edges.
        #[arg(long)]
        unpinned: bool,
        #[arg(long)]
        stop_alpha: Option<f64>,
    },
    /// Classify a corpus with a model from a search trace.
    Classify {
        #[arg(long)]
        inventory: PathBuf,
        /// Training feature table the trace was searched on.
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Trace position of the model to use.
        #[arg(long, conflicts_with = "select_on")]
        step: Option<usize>,
        /// Choose the model by accuracy on this labeled corpus instead.
        #[arg(long)]
        select_on: Option<PathBuf>,
    },
    /// Nested cross-validation.
    Crossval,
    /// Nested cross-validation over every organization and pattern family.
    Grid,
    /// Write the search, selection and test corpora of one fold.
    Split {
        #[arg(long)]
        fold: usize,
    },
    /// Generate a synthetic labeled corpus.
    Synth {
        /// Generator parameters (JSON); defaults when absent.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Sentence count override.
        #[arg(long)]
        sentences: Option<usize>,
    },
    /// Majority-class accuracy under the fold protocol.
    Baseline,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.common;
    let mut config = RunConfig::load(common.config.as_deref())?;
    let seed_flag = common.seed;
    if let Some(c) = common.corpus {
        config.corpus = Some(c);
    }
    if let Some(d) = common.out_dir {
        config.output_dir = d;
    }
    if let Some(s) = common.seed {
        config.seed = s;
    }
    if let Some(p) = common.patterns {
        config.patterns = p;
    }
    if let Some(o) = common.organization {
        config.organization = o.parse().map_err(|e: evcat::features::FeatureError| CliError::Config(e.to_string()))?;
    }
    let ctx = commands::Context::new(config, common.config)?;
    match cli.command {
        Command::Extract => commands::extract(&ctx),
        Command::Select => commands::select(&ctx),
        Command::Features { inventory, role } => commands::features(&ctx, &inventory, role),
        Command::Search {
            table,
            pin_features,
            unpinned,
            stop_alpha,
        } => commands::search(&ctx, &table, pin_features.then_some(true).or(unpinned.then_some(false)), stop_alpha),
        Command::Classify {
            inventory,
            table,
            trace,
            step,
            select_on,
        } => commands::classify(&ctx, &inventory, &table, &trace, step, select_on.as_deref()),
        Command::Crossval => commands::crossval(&ctx),
        Command::Grid => commands::grid(&ctx),
        Command::Split { fold } => commands::split(&ctx, fold),
        Command::Synth { params, sentences } => commands::synth(&ctx, params.as_deref(), seed_flag, sentences),
        Command::Baseline => commands::baseline(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evcat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
