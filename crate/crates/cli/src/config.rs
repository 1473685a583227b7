//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use actrules::eval::{DEFAULT_FOLDS, DEFAULT_SEED};
use actrules::recommend::DEFAULT_MAX_RECS;
use actrules::rules::DEFAULT_MINCOV;
use actrules::{Direction, Measure, Strategy};
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classification,
    Action,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse::<Measure>().map_err(|e| e.to_string())
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Training data (delimiter-separated, header row)
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Sidecar schema describing each column
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// TOML file with defaults for any of these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Field delimiter of the data files
    #[arg(long)]
    pub delimiter: Option<char>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub direction: Option<Direction>,
    /// Sets both the growing and the pruning measure
    #[arg(long, value_parser = parse_measure)]
    pub measure: Option<Measure>,
    #[arg(long, value_parser = parse_measure)]
    pub grow_measure: Option<Measure>,
    /// Also used for voting and for ranking rules and recommendations
    #[arg(long, value_parser = parse_measure)]
    pub prune_measure: Option<Measure>,
    /// Source class name (action rules and recommendation experiments)
    #[arg(long)]
    pub source: Option<String>,
    /// Target class name
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub mincov: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Transformation strategy; repeat or separate with commas
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<Strategy>,
    #[arg(long)]
    pub max_recs: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for fold loops (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Keys accepted in the TOML config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    data: Option<PathBuf>,
    schema: Option<PathBuf>,
    delimiter: Option<char>,
    mode: Option<Mode>,
    direction: Option<String>,
    measure: Option<String>,
    grow_measure: Option<String>,
    prune_measure: Option<String>,
    source: Option<String>,
    target: Option<String>,
    mincov: Option<usize>,
    folds: Option<usize>,
    seed: Option<u64>,
    strategy: Option<Vec<String>>,
    max_recs: Option<usize>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    rules: Option<PathBuf>,
    examples: Option<PathBuf>,
}

/// Fully resolved configuration, echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub data: PathBuf,
    pub schema: PathBuf,
    pub delimiter: char,
    pub mode: Mode,
    pub direction: Direction,
    pub grow_measure: Measure,
    pub prune_measure: Measure,
    pub source: Option<String>,
    pub target: Option<String>,
    pub mincov: usize,
    pub folds: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub max_recs: usize,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub rules: Option<PathBuf>,
    pub examples: Option<PathBuf>,
    pub classification: bool,
    pub recommendation: bool,
}

fn measure_from(name: &Option<String>) -> Result<Option<Measure>> {
    name.as_deref()
        .map(|s| s.parse::<Measure>().map_err(anyhow::Error::from))
        .transpose()
}

fn require_file(path: Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    let path = path.with_context(|| format!("--{flag} is required"))?;
    if !path.is_file() {
        bail!("--{flag}: `{}` does not exist", path.display());
    }
    Ok(path)
}

/// Extra command-specific inputs.
#[derive(Debug, Default)]
pub struct Extra {
    pub rules: Option<PathBuf>,
    pub examples: Option<PathBuf>,
    pub classification: bool,
    pub recommendation: bool,
}

impl RunConfig {
    pub fn resolve(command: &str, args: &CommonArgs, extra: Extra) -> Result<RunConfig> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let measure = args.measure.or(measure_from(&file.measure)?);
        let grow_measure = args
            .grow_measure
            .or(measure_from(&file.grow_measure)?)
            .or(measure)
            .unwrap_or(Measure::C2);
        let prune_measure = args
            .prune_measure
            .or(measure_from(&file.prune_measure)?)
            .or(measure)
            .unwrap_or(Measure::C2);
        let direction = match (args.direction, &file.direction) {
            (Some(d), _) => d,
            (None, Some(s)) => s.parse().map_err(anyhow::Error::msg)?,
            (None, None) => Direction::Backward,
        };
        let strategies = if !args.strategy.is_empty() {
            args.strategy.clone()
        } else if let Some(names) = &file.strategy {
            names
                .iter()
                .map(|s| s.parse().map_err(anyhow::Error::msg))
                .collect::<Result<_>>()?
        } else {
            vec![Strategy::Recommendation, Strategy::BestRule]
        };
        let rules = extra.rules.or(file.rules);
        let examples = extra.examples.or(file.examples);
        let cfg = RunConfig {
            command: command.to_string(),
            data: require_file(args.data.clone().or(file.data), "data")?,
            schema: require_file(args.schema.clone().or(file.schema), "schema")?,
            delimiter: args.delimiter.or(file.delimiter).unwrap_or(','),
            mode: args.mode.or(file.mode).unwrap_or(Mode::Classification),
            direction,
            grow_measure,
            prune_measure,
            source: args.source.clone().or(file.source),
            target: args.target.clone().or(file.target),
            mincov: args.mincov.or(file.mincov).unwrap_or(DEFAULT_MINCOV),
            folds: args.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            strategies,
            max_recs: args.max_recs.or(file.max_recs).unwrap_or(DEFAULT_MAX_RECS),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("actrules-out")),
            threads: args.threads.or(file.threads),
            rules,
            examples,
            classification: extra.classification,
            recommendation: extra.recommendation,
        };
        if !cfg.delimiter.is_ascii() {
            bail!("--delimiter must be a single ASCII character");
        }
        if cfg.mincov == 0 {
            bail!("--mincov must be at least 1");
        }
        if cfg.threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        for (flag, path) in [("rules", &cfg.rules), ("examples", &cfg.examples)] {
            if let Some(p) = path {
                if !p.is_file() {
                    bail!("--{flag}: `{}` does not exist", p.display());
                }
            }
        }
        Ok(cfg)
    }
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
