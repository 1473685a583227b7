mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, Extra, RunConfig};

/// Rule induction, action rules and recommendations.
#[derive(Debug, Parser)]
#[command(name = "actrules", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Induce classification rules or action rules from a training set
    Induce {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Recommend attribute changes for examples using an action-rule dump
    Recommend {
        #[command(flatten)]
        common: CommonArgs,
        /// action_rules.json written by `induce --mode action`
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Examples to transform, in the training data format
        #[arg(long)]
        examples: Option<PathBuf>,
    },
    /// Cross-validate the rule classifier and/or recommendation strategies
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Run the classification experiment
        #[arg(long)]
        classification: bool,
        /// Run the recommendation experiment
        #[arg(long)]
        recommendation: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (name, common, extra) = match cli.command {
        Command::Induce { common } => ("induce", common, Extra::default()),
        Command::Recommend {
            common,
            rules,
            examples,
        } => (
            "recommend",
            common,
            Extra {
                rules,
                examples,
                ..Extra::default()
            },
        ),
        Command::Evaluate {
            common,
            classification,
            recommendation,
        } => (
            "evaluate",
            common,
            Extra {
                classification,
                recommendation,
                ..Extra::default()
            },
        ),
    };
    let cfg = RunConfig::resolve(name, &common, extra)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match name {
        "induce" => commands::induce(&cfg),
        "recommend" => commands::recommend(&cfg),
        _ => commands::evaluate(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
