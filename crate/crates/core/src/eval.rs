//! Cross-validation harness: rule-classifier accuracy and PPV, action-rule
//! set characterization and recommendation accuracy judged by a verifier.

use std::fs::{self, File};
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{characterize, induce_action_rules, Direction, RuleSetReport};
use crate::data::{
    read_labels, stratified_folds, write_dataset, write_values, Dataset, Fold, Value,
};
use crate::error::{Error, Result};
use crate::quality::Measure;
use crate::recommend::{best_action_rule_transform, build_meta_table, induce_recommendations};
use crate::rules::{RuleClassifier, DEFAULT_MINCOV};

/// Default fold seed.
pub const DEFAULT_SEED: u64 = 43;
pub const DEFAULT_FOLDS: usize = 10;

/// Trainable classifier that judges transformed examples.
pub trait Verifier: Send + Sync {
    fn fit(&mut self, train: &Dataset) -> Result<()>;

    fn predict(&self, values: &[Value]) -> Result<usize>;

    fn predict_batch(&self, rows: &[Vec<Value>]) -> Result<Vec<usize>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

/// Voting rule classifier used as the default verifier.
#[derive(Debug, Clone)]
pub struct RuleVerifier {
    pub mincov: usize,
    pub measure: Measure,
    model: Option<RuleClassifier>,
}

impl RuleVerifier {
    pub fn new(mincov: usize, measure: Measure) -> Self {
        RuleVerifier {
            mincov,
            measure,
            model: None,
        }
    }
}

/// C2 rule classifier with mincov 5.
pub fn default_verifier() -> RuleVerifier {
    RuleVerifier::new(DEFAULT_MINCOV, Measure::C2)
}

impl Verifier for RuleVerifier {
    fn fit(&mut self, train: &Dataset) -> Result<()> {
        self.model = Some(RuleClassifier::train(
            train,
            self.mincov,
            self.measure,
            self.measure,
            self.measure,
        ));
        Ok(())
    }

    fn predict(&self, values: &[Value]) -> Result<usize> {
        self.model
            .as_ref()
            .map(|m| m.predict(values))
            .ok_or(Error::UnfittedVerifier)
    }
}

/// Verifier backed by an external program invoked as
/// `program [args..] <train.csv> <examples.csv> <predictions.txt>`. The
/// program reads the labelled training file and the unlabelled examples and
/// writes one class label per line.
#[derive(Debug, Clone)]
pub struct ExternalVerifier {
    pub program: PathBuf,
    pub args: Vec<String>,
    train: Option<Dataset>,
}

static EXCHANGE_COUNTER: AtomicUsize = AtomicUsize::new(0);

impl ExternalVerifier {
    pub fn new(program: impl Into<PathBuf>, args: Vec<String>) -> Self {
        ExternalVerifier {
            program: program.into(),
            args,
            train: None,
        }
    }
}

impl Verifier for ExternalVerifier {
    fn fit(&mut self, train: &Dataset) -> Result<()> {
        self.train = Some(train.clone());
        Ok(())
    }

    fn predict(&self, values: &[Value]) -> Result<usize> {
        Ok(self.predict_batch(&[values.to_vec()])?[0])
    }

    fn predict_batch(&self, rows: &[Vec<Value>]) -> Result<Vec<usize>> {
        let train = self.train.as_ref().ok_or(Error::UnfittedVerifier)?;
        if rows.is_empty() {
            return Ok(Vec::new());
        }
        let dir = std::env::temp_dir().join(format!(
            "actrules-verifier-{}-{}",
            std::process::id(),
            EXCHANGE_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::create_dir_all(&dir)?;
        let train_path = dir.join("train.csv");
        let rows_path = dir.join("examples.csv");
        let out_path = dir.join("predictions.txt");
        write_dataset(File::create(&train_path)?, train)?;
        write_values(File::create(&rows_path)?, train, rows)?;
        let status = Command::new(&self.program)
            .args(&self.args)
            .arg(&train_path)
            .arg(&rows_path)
            .arg(&out_path)
            .status()?;
        let result = if !status.success() {
            Err(Error::Verifier(format!(
                "`{}` exited with {status}",
                self.program.display()
            )))
        } else {
            let labels = read_labels(File::open(&out_path)?, train)?;
            if labels.len() == rows.len() {
                Ok(labels)
            } else {
                Err(Error::Verifier(format!(
                    "expected {} predictions, got {}",
                    rows.len(),
                    labels.len()
                )))
            }
        };
        let _ = fs::remove_dir_all(&dir);
        result
    }
}

/// Fraction of examples predicted `cls` whose actual class is `cls`;
/// `None` when nothing was predicted `cls`. Pairs are (predicted, actual).
pub fn ppv(predictions: &[(usize, usize)], cls: usize) -> Option<f64> {
    let predicted: Vec<_> = predictions.iter().filter(|(p, _)| *p == cls).collect();
    if predicted.is_empty() {
        return None;
    }
    let hits = predicted.iter().filter(|(_, a)| *a == cls).count();
    Some(hits as f64 / predicted.len() as f64)
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Mean of the present values; `None` when all are absent.
fn mean_present(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.into_iter().flatten().collect();
    (!present.is_empty()).then(|| mean(present))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationConfig {
    pub folds: usize,
    pub seed: u64,
    pub grow: Measure,
    pub prune: Measure,
    pub vote: Measure,
    pub mincov: usize,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        ClassificationConfig {
            folds: DEFAULT_FOLDS,
            seed: DEFAULT_SEED,
            grow: Measure::C2,
            prune: Measure::C2,
            vote: Measure::C2,
            mincov: DEFAULT_MINCOV,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationFold {
    pub fold: usize,
    pub test_size: usize,
    pub accuracy: f64,
    /// Per class, in dataset class order.
    pub ppv: Vec<Option<f64>>,
    pub rules: Vec<usize>,
    #[serde(skip)]
    pub runtime: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub config: ClassificationConfig,
    pub classes: Vec<String>,
    pub folds: Vec<ClassificationFold>,
    pub accuracy: f64,
    /// Mean over the folds where the class was predicted at least once.
    pub ppv: Vec<Option<f64>>,
    pub rules: Vec<f64>,
}

pub fn run_classification_experiment(
    ds: &Dataset,
    cfg: &ClassificationConfig,
) -> Result<ClassificationReport> {
    let folds = stratified_folds(ds, cfg.folds, cfg.seed)?;
    let records: Vec<ClassificationFold> = folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| classification_fold(i, fold, cfg))
        .collect();
    let nc = ds.classes().len();
    Ok(ClassificationReport {
        config: *cfg,
        classes: ds.classes().to_vec(),
        accuracy: mean(records.iter().map(|f| f.accuracy)),
        ppv: (0..nc)
            .map(|c| mean_present(records.iter().map(|f| f.ppv[c])))
            .collect(),
        rules: (0..nc)
            .map(|c| mean(records.iter().map(|f| f.rules[c] as f64)))
            .collect(),
        folds: records,
    })
}

fn classification_fold(i: usize, fold: &Fold, cfg: &ClassificationConfig) -> ClassificationFold {
    let start = Instant::now();
    let model = RuleClassifier::train(&fold.train, cfg.mincov, cfg.grow, cfg.prune, cfg.vote);
    let pairs: Vec<(usize, usize)> = fold
        .test
        .examples()
        .iter()
        .map(|e| (model.predict(&e.values), e.label))
        .collect();
    let correct = pairs.iter().filter(|(p, a)| p == a).count();
    let nc = fold.train.classes().len();
    ClassificationFold {
        fold: i,
        test_size: pairs.len(),
        accuracy: correct as f64 / pairs.len() as f64,
        ppv: (0..nc).map(|c| ppv(&pairs, c)).collect(),
        rules: model.rule_sets.iter().map(|rs| rs.rules.len()).collect(),
        runtime: start.elapsed(),
    }
}

/// How a source-class test example is transformed before verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Actions of the best covering action rule.
    BestRule,
    /// Top recommendation induced over the meta-table.
    Recommendation,
    /// No change; baseline.
    Identity,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::BestRule => "best-rule",
            Strategy::Recommendation => "recommendation",
            Strategy::Identity => "identity",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "best-rule" | "best_rule" | "bestrule" => Ok(Strategy::BestRule),
            "recommendation" => Ok(Strategy::Recommendation),
            "identity" => Ok(Strategy::Identity),
            _ => Err(format!(
                "unknown strategy `{s}` (expected best-rule, recommendation or identity)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationConfig {
    pub folds: usize,
    pub seed: u64,
    pub direction: Direction,
    pub grow: Measure,
    pub prune: Measure,
    pub mincov: usize,
    pub source: usize,
    pub target: usize,
    pub strategies: Vec<Strategy>,
    pub max_recs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyFold {
    pub strategy: Strategy,
    /// Source-class test examples; the accuracy denominator.
    pub examples: usize,
    /// Examples the strategy could not transform.
    pub failures: usize,
    /// Examples the verifier assigned to the target class.
    pub hits: usize,
    /// `100 · hits / examples`, failures included.
    pub accuracy: f64,
    /// `100 · hits / (examples − failures)`.
    pub covered_accuracy: Option<f64>,
    /// Mean number of changed attributes per transformed example.
    pub changes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationFold {
    pub fold: usize,
    pub rule_set: RuleSetReport,
    pub strategies: Vec<StrategyFold>,
    #[serde(skip)]
    pub runtime: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub accuracy: f64,
    pub covered_accuracy: Option<f64>,
    pub failures: f64,
    pub changes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationReport {
    pub config: RecommendationConfig,
    pub source: String,
    pub target: String,
    pub folds: Vec<RecommendationFold>,
    pub rule_set: RuleSetReport,
    pub strategies: Vec<StrategySummary>,
}

pub fn run_recommendation_experiment<V: Verifier + Clone>(
    ds: &Dataset,
    cfg: &RecommendationConfig,
    verifier: &V,
) -> Result<RecommendationReport> {
    if cfg.source == cfg.target {
        return Err(Error::SameClasses(ds.class_name(cfg.source).to_string()));
    }
    let folds = stratified_folds(ds, cfg.folds, cfg.seed)?;
    let records = folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| recommendation_fold(i, fold, cfg, verifier.clone()))
        .collect::<Result<Vec<_>>>()?;
    let strategies = cfg
        .strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| StrategySummary {
            strategy,
            accuracy: mean(records.iter().map(|f| f.strategies[s].accuracy)),
            covered_accuracy: mean_present(
                records.iter().map(|f| f.strategies[s].covered_accuracy),
            ),
            failures: mean(records.iter().map(|f| f.strategies[s].failures as f64)),
            changes: mean(records.iter().map(|f| f.strategies[s].changes)),
        })
        .collect();
    Ok(RecommendationReport {
        config: cfg.clone(),
        source: ds.class_name(cfg.source).to_string(),
        target: ds.class_name(cfg.target).to_string(),
        rule_set: mean_report(records.iter().map(|f| &f.rule_set)),
        strategies,
        folds: records,
    })
}

/// Field-wise mean of rule-set reports.
pub fn mean_report<'a>(reports: impl IntoIterator<Item = &'a RuleSetReport>) -> RuleSetReport {
    let reports: Vec<&RuleSetReport> = reports.into_iter().collect();
    let m = |f: fn(&RuleSetReport) -> f64| mean(reports.iter().map(|r| f(r)));
    RuleSetReport {
        rules: m(|r| r.rules),
        conditions: m(|r| r.conditions),
        actions: m(|r| r.actions),
        source_precision: m(|r| r.source_precision),
        target_precision: m(|r| r.target_precision),
        source_coverage: m(|r| r.source_coverage),
        target_coverage: m(|r| r.target_coverage),
        significant_source: m(|r| r.significant_source),
        significant_target: m(|r| r.significant_target),
    }
}

fn recommendation_fold<V: Verifier>(
    i: usize,
    fold: &Fold,
    cfg: &RecommendationConfig,
    mut verifier: V,
) -> Result<RecommendationFold> {
    let start = Instant::now();
    let train = &fold.train;
    let set = induce_action_rules(
        train,
        cfg.source,
        cfg.target,
        cfg.direction,
        cfg.mincov,
        cfg.grow,
        cfg.prune,
    )?;
    verifier.fit(train)?;
    let sources: Vec<&[Value]> = fold
        .test
        .examples()
        .iter()
        .filter(|e| e.label == cfg.source)
        .map(|e| e.values.as_slice())
        .collect();
    let meta = if cfg.strategies.contains(&Strategy::Recommendation) {
        Some(build_meta_table(&set.rules, train)?)
    } else {
        None
    };
    let mut strategies = Vec::new();
    for &strategy in &cfg.strategies {
        let transformed: Vec<Option<Vec<Value>>> = sources
            .iter()
            .map(|x| match strategy {
                Strategy::Identity => Some(x.to_vec()),
                Strategy::BestRule => best_action_rule_transform(&set.rules, x, cfg.prune, train),
                Strategy::Recommendation => {
                    let mt = meta.as_ref().expect("meta-table built for this strategy");
                    induce_recommendations(
                        mt,
                        train,
                        x,
                        cfg.target,
                        cfg.mincov,
                        cfg.prune,
                        cfg.max_recs,
                    )
                    .first()
                    .map(|r| r.realize(x))
                }
            })
            .collect();
        let rows: Vec<Vec<Value>> = transformed.iter().flatten().cloned().collect();
        let predictions = verifier.predict_batch(&rows)?;
        let hits = predictions.iter().filter(|&&p| p == cfg.target).count();
        let changes = sources.iter().zip(&transformed).filter_map(|(x, t)| {
            t.as_ref()
                .map(|t| x.iter().zip(t).filter(|(a, b)| a != b).count() as f64)
        });
        let examples = sources.len();
        let failures = examples - rows.len();
        strategies.push(StrategyFold {
            strategy,
            examples,
            failures,
            hits,
            accuracy: if examples == 0 {
                0.0
            } else {
                100.0 * hits as f64 / examples as f64
            },
            covered_accuracy: (!rows.is_empty()).then(|| 100.0 * hits as f64 / rows.len() as f64),
            changes: mean(changes),
        });
    }
    Ok(RecommendationFold {
        fold: i,
        rule_set: characterize(&set),
        strategies,
        runtime: start.elapsed(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.6}"))
}

impl ClassificationReport {
    /// One row per fold plus a `mean` row: accuracy and PPV per class.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["fold".to_string(), "accuracy".into()];
        header.extend(self.classes.iter().map(|c| format!("ppv_{c}")));
        header.extend(self.classes.iter().map(|c| format!("rules_{c}")));
        w.write_record(&header)?;
        for f in &self.folds {
            let mut rec = vec![f.fold.to_string(), format!("{:.6}", f.accuracy)];
            rec.extend(f.ppv.iter().map(|&p| opt(p)));
            rec.extend(f.rules.iter().map(|r| r.to_string()));
            w.write_record(&rec)?;
        }
        let mut rec = vec!["mean".to_string(), format!("{:.6}", self.accuracy)];
        rec.extend(self.ppv.iter().map(|&p| opt(p)));
        rec.extend(self.rules.iter().map(|r| format!("{r:.6}")));
        w.write_record(&rec)?;
        w.flush()?;
        Ok(())
    }

    /// Wall-clock time per fold in milliseconds.
    pub fn write_timings<W: Write>(&self, writer: W) -> Result<()> {
        write_timings(writer, self.folds.iter().map(|f| f.runtime))
    }
}

const REPORT_COLUMNS: [&str; 9] = [
    "rules",
    "conditions",
    "actions",
    "precision_source",
    "precision_target",
    "coverage_source",
    "coverage_target",
    "significant_source",
    "significant_target",
];

fn report_fields(r: &RuleSetReport) -> [f64; 9] {
    [
        r.rules,
        r.conditions,
        r.actions,
        r.source_precision,
        r.target_precision,
        r.source_coverage,
        r.target_coverage,
        r.significant_source,
        r.significant_target,
    ]
}

impl RecommendationReport {
    /// Rule-set characterization per fold plus a `mean` row.
    pub fn write_rule_set_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["fold"];
        header.extend(REPORT_COLUMNS);
        w.write_record(&header)?;
        let rows = self
            .folds
            .iter()
            .map(|f| (f.fold.to_string(), &f.rule_set))
            .chain(std::iter::once(("mean".to_string(), &self.rule_set)));
        for (label, r) in rows {
            let mut rec = vec![label];
            rec.extend(report_fields(r).iter().map(|v| format!("{v:.6}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Recommendation accuracy per fold and strategy plus `mean` rows.
    pub fn write_accuracy_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "fold",
            "strategy",
            "examples",
            "failures",
            "accuracy",
            "covered_accuracy",
            "changes",
        ])?;
        for f in &self.folds {
            for s in &f.strategies {
                w.write_record([
                    f.fold.to_string(),
                    s.strategy.name().to_string(),
                    s.examples.to_string(),
                    s.failures.to_string(),
                    format!("{:.6}", s.accuracy),
                    opt(s.covered_accuracy),
                    format!("{:.6}", s.changes),
                ])?;
            }
        }
        for s in &self.strategies {
            w.write_record([
                "mean".to_string(),
                s.strategy.name().to_string(),
                String::new(),
                format!("{:.6}", s.failures),
                format!("{:.6}", s.accuracy),
                opt(s.covered_accuracy),
                format!("{:.6}", s.changes),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_timings<W: Write>(&self, writer: W) -> Result<()> {
        write_timings(writer, self.folds.iter().map(|f| f.runtime))
    }
}

fn write_timings<W: Write>(writer: W, runtimes: impl Iterator<Item = Duration>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["fold", "millis"])?;
    for (i, d) in runtimes.enumerate() {
        w.write_record([i.to_string(), format!("{:.3}", d.as_secs_f64() * 1000.0)])?;
    }
    w.flush()?;
    Ok(())
}
