use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use actrules::action::{characterize, induce_action_rules, ActionRuleSet};
use actrules::data::{load_dataset_with_delimiter, load_queries, Query};
use actrules::dump::{ActionRuleSetDump, RuleSetDump};
use actrules::eval::{
    default_verifier, run_classification_experiment, run_recommendation_experiment,
    ClassificationConfig, ClassificationReport, RecommendationConfig, RecommendationReport,
};
use actrules::recommend::{best_action_rule_transform, build_meta_table, induce_recommendations};
use actrules::rules::induce_rules;
use actrules::{Dataset, RuleSetReport, Schema, Strategy, Value};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::{Mode, RunConfig};

fn load_training(cfg: &RunConfig) -> Result<Dataset> {
    let schema = Schema::read(
        File::open(&cfg.schema).with_context(|| format!("opening {}", cfg.schema.display()))?,
    )
    .with_context(|| format!("schema {}", cfg.schema.display()))?;
    let data = File::open(&cfg.data).with_context(|| format!("opening {}", cfg.data.display()))?;
    load_dataset_with_delimiter(data, &schema, cfg.delimiter as u8)
        .with_context(|| format!("loading {}", cfg.data.display()))
}

fn class_arg(ds: &Dataset, name: &Option<String>, flag: &str) -> Result<usize> {
    let name = name
        .as_deref()
        .with_context(|| format!("--{flag} is required"))?;
    ds.class_index(name).with_context(|| {
        format!(
            "--{flag}: class `{name}` not in {} (classes: {})",
            ds.decision_name(),
            ds.classes().join(", ")
        )
    })
}

/// Source/target pair, defaulting to the two classes of a binary dataset
/// in class order.
fn class_pair(ds: &Dataset, cfg: &RunConfig) -> Result<(usize, usize)> {
    if cfg.source.is_none() && cfg.target.is_none() && ds.classes().len() == 2 {
        return Ok((0, 1));
    }
    Ok((
        class_arg(ds, &cfg.source, "source")?,
        class_arg(ds, &cfg.target, "target")?,
    ))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Rule text preceded by a `# config:` line echoing the run configuration.
fn write_rule_text(path: &Path, cfg: &RunConfig, rules: &str) -> Result<()> {
    write_text(
        path,
        &format!("# config: {}\n{rules}", serde_json::to_string(cfg)?),
    )
}

fn create_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))
}

#[derive(Serialize)]
struct ClassificationRulesFile<'a> {
    config: &'a RunConfig,
    rule_sets: Vec<RuleSetDump>,
}

#[derive(Serialize, Deserialize)]
pub struct ActionRulesFile<C> {
    pub config: C,
    pub rule_set: ActionRuleSetDump,
    pub report: RuleSetReport,
}

pub fn induce(cfg: &RunConfig) -> Result<()> {
    let ds = load_training(cfg)?;
    create_out(cfg)?;
    match cfg.mode {
        Mode::Classification => {
            let sets: Vec<_> = (0..ds.classes().len())
                .map(|c| {
                    induce_rules(
                        &ds,
                        c,
                        cfg.mincov,
                        cfg.grow_measure,
                        cfg.prune_measure,
                        cfg.prune_measure,
                    )
                })
                .collect();
            let mut text = String::new();
            for rs in &sets {
                for r in &rs.rules {
                    text.push_str(&r.display(&ds).to_string());
                    text.push('\n');
                }
            }
            write_rule_text(&cfg.out.join("rules.txt"), cfg, &text)?;
            write_json(
                &cfg.out.join("rules.json"),
                &ClassificationRulesFile {
                    config: cfg,
                    rule_sets: sets.iter().map(|rs| RuleSetDump::new(rs, &ds)).collect(),
                },
            )?;
            println!("class\trules\tconditions\tprecision\tcoverage");
            for rs in &sets {
                let k = rs.rules.len().max(1) as f64;
                let conds: usize = rs.rules.iter().map(|r| r.premise.len()).sum();
                let prec: f64 = rs.rules.iter().map(|r| r.stats.precision()).sum();
                let cov: f64 = rs.rules.iter().map(|r| r.stats.coverage()).sum();
                println!(
                    "{}\t{}\t{:.2}\t{:.3}\t{:.3}",
                    ds.class_name(rs.target),
                    rs.rules.len(),
                    conds as f64 / k,
                    prec / k,
                    cov / k
                );
            }
        }
        Mode::Action => {
            let source = class_arg(&ds, &cfg.source, "source")?;
            let target = class_arg(&ds, &cfg.target, "target")?;
            let set = induce_action_rules(
                &ds,
                source,
                target,
                cfg.direction,
                cfg.mincov,
                cfg.grow_measure,
                cfg.prune_measure,
            )?;
            let report = characterize(&set);
            let text: String = set
                .rules
                .iter()
                .map(|r| format!("{}\n", r.display(&ds)))
                .collect();
            write_rule_text(&cfg.out.join("action_rules.txt"), cfg, &text)?;
            write_json(
                &cfg.out.join("action_rules.json"),
                &ActionRulesFile {
                    config: cfg,
                    rule_set: ActionRuleSetDump::new(&set, &ds),
                    report,
                },
            )?;
            print_report(&report);
        }
    }
    Ok(())
}

fn print_report(r: &RuleSetReport) {
    println!("rules\tconditions\tactions\tprec_S\tprec_T\tcov_S\tcov_T\tsig_S\tsig_T");
    println!(
        "{:.2}\t{:.2}\t{:.2}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.2}\t{:.2}",
        r.rules,
        r.conditions,
        r.actions,
        r.source_precision,
        r.target_precision,
        r.source_coverage,
        r.target_coverage,
        r.significant_source,
        r.significant_target
    );
}

#[derive(Serialize)]
struct ActionRecord {
    attribute: String,
    from: String,
    to: String,
    value: String,
}

#[derive(Serialize)]
struct RecommendationRecord {
    conditions: Vec<String>,
    quality: f64,
    target_covered: u64,
    others_covered: u64,
    actions: Vec<ActionRecord>,
}

#[derive(Serialize)]
struct ExampleRecord {
    example: usize,
    /// `recommended`, `already-target-like` or `no-recommendation`.
    status: &'static str,
    recommendations: Vec<RecommendationRecord>,
    realized: Option<Vec<String>>,
}

#[derive(Serialize)]
struct RecommendationsFile<'a> {
    config: &'a RunConfig,
    target: String,
    examples: Vec<ExampleRecord>,
}

fn load_examples(cfg: &RunConfig, ds: &Dataset) -> Result<Vec<Query>> {
    let path = cfg.examples.as_ref().context("--examples is required")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    load_queries(text.as_bytes(), ds, cfg.delimiter as u8)
        .with_context(|| format!("loading {}", path.display()))
}

pub fn recommend(cfg: &RunConfig) -> Result<()> {
    let ds = load_training(cfg)?;
    let rules_path = cfg.rules.as_ref().context("--rules is required")?;
    let file: ActionRulesFile<serde_json::Value> = serde_json::from_reader(
        File::open(rules_path).with_context(|| format!("opening {}", rules_path.display()))?,
    )
    .with_context(|| format!("parsing {}", rules_path.display()))?;
    let set: ActionRuleSet = file.rule_set.bind(&ds).with_context(|| {
        format!(
            "rules in {} do not match {}",
            rules_path.display(),
            cfg.schema.display()
        )
    })?;
    let target = match &cfg.target {
        Some(_) => class_arg(&ds, &cfg.target, "target")?,
        None => set.target_class,
    };
    let queries = load_examples(cfg, &ds)?;
    let best_rule = cfg.strategies.first() == Some(&Strategy::BestRule);
    let mt = build_meta_table(&set.rules, &ds)?;
    create_out(cfg)?;

    let fmt_row = |row: &[Value]| -> Vec<String> {
        row.iter()
            .enumerate()
            .map(|(a, &v)| ds.format_value(a, v))
            .collect()
    };
    let mut records = Vec::with_capacity(queries.len());
    for (i, q) in queries.iter().enumerate() {
        let x = &q.values;
        let record = if best_rule {
            match best_action_rule_transform(&set.rules, x, cfg.prune_measure, &ds) {
                Some(t) => ExampleRecord {
                    example: i,
                    status: if &t == x {
                        "already-target-like"
                    } else {
                        "recommended"
                    },
                    recommendations: Vec::new(),
                    realized: Some(fmt_row(&t)),
                },
                None => ExampleRecord {
                    example: i,
                    status: "no-recommendation",
                    recommendations: Vec::new(),
                    realized: None,
                },
            }
        } else {
            let recs = induce_recommendations(
                &mt,
                &ds,
                x,
                target,
                cfg.mincov,
                cfg.prune_measure,
                cfg.max_recs,
            );
            let status = match recs.first() {
                None => "no-recommendation",
                Some(r) if r.actions.is_empty() => "already-target-like",
                Some(_) => "recommended",
            };
            ExampleRecord {
                example: i,
                status,
                realized: recs.first().map(|r| fmt_row(&r.realize(x))),
                recommendations: recs
                    .iter()
                    .map(|r| RecommendationRecord {
                        conditions: r
                            .conditions
                            .iter()
                            .map(|c| c.display(&mt).to_string())
                            .collect(),
                        quality: r.quality,
                        target_covered: r.target_covered,
                        others_covered: r.others_covered,
                        actions: r
                            .actions
                            .iter()
                            .map(|a| ActionRecord {
                                attribute: ds.attribute(a.attribute).name.clone(),
                                from: a.from.clone(),
                                to: a.to.clone(),
                                value: ds.format_value(a.attribute, a.value),
                            })
                            .collect(),
                    })
                    .collect(),
            }
        };
        match record.recommendations.first() {
            Some(r) if !r.actions.is_empty() => {
                let acts: Vec<String> = r
                    .actions
                    .iter()
                    .map(|a| format!("{}: {} -> {} (:= {})", a.attribute, a.from, a.to, a.value))
                    .collect();
                println!("{i}\t{}\t{}", record.status, acts.join("; "));
            }
            _ => println!(
                "{i}\t{}{}",
                record.status,
                record
                    .realized
                    .as_ref()
                    .map_or(String::new(), |r| format!("\t{}", r.join(",")))
            ),
        }
        records.push(record);
    }
    write_json(
        &cfg.out.join("recommendations.json"),
        &RecommendationsFile {
            config: cfg,
            target: ds.class_name(target).to_string(),
            examples: records,
        },
    )
}

#[derive(Serialize)]
struct EvaluationFile<'a> {
    config: &'a RunConfig,
    dataset: String,
    classification: Option<&'a ClassificationReport>,
    recommendation: Option<&'a RecommendationReport>,
}

pub fn evaluate(cfg: &RunConfig) -> Result<()> {
    let ds = load_training(cfg)?;
    let (classification, recommendation) = match (cfg.classification, cfg.recommendation) {
        (false, false) => (true, true),
        flags => flags,
    };
    let dataset = cfg.data.display().to_string();
    let class_report = if classification {
        let cc = ClassificationConfig {
            folds: cfg.folds,
            seed: cfg.seed,
            grow: cfg.grow_measure,
            prune: cfg.prune_measure,
            vote: cfg.prune_measure,
            mincov: cfg.mincov,
        };
        Some(
            run_classification_experiment(&ds, &cc)
                .with_context(|| format!("dataset {dataset}"))?,
        )
    } else {
        None
    };
    let rec_report = if recommendation {
        let (source, target) = class_pair(&ds, cfg)?;
        if source == target {
            bail!("--source and --target must differ");
        }
        let rc = RecommendationConfig {
            folds: cfg.folds,
            seed: cfg.seed,
            direction: cfg.direction,
            grow: cfg.grow_measure,
            prune: cfg.prune_measure,
            mincov: cfg.mincov,
            source,
            target,
            strategies: cfg.strategies.clone(),
            max_recs: cfg.max_recs,
        };
        Some(
            run_recommendation_experiment(&ds, &rc, &default_verifier())
                .with_context(|| format!("dataset {dataset}"))?,
        )
    } else {
        None
    };
    create_out(cfg)?;
    write_json(
        &cfg.out.join("report.json"),
        &EvaluationFile {
            config: cfg,
            dataset,
            classification: class_report.as_ref(),
            recommendation: rec_report.as_ref(),
        },
    )?;
    let mut timings = String::from("experiment,fold,millis\n");
    if let Some(r) = &class_report {
        r.write_csv(File::create(cfg.out.join("classification.csv"))?)?;
        let mut buf = Vec::new();
        r.write_timings(&mut buf)?;
        append_timings(&mut timings, "classification", &buf);
        println!("classification accuracy {:.4}", r.accuracy);
        for (c, p) in ds.classes().iter().zip(&r.ppv) {
            println!(
                "  ppv {c}: {}",
                p.map_or("-".to_string(), |p| format!("{p:.4}"))
            );
        }
    }
    if let Some(r) = &rec_report {
        r.write_rule_set_csv(File::create(cfg.out.join("rule_set.csv"))?)?;
        r.write_accuracy_csv(File::create(cfg.out.join("recommendation.csv"))?)?;
        let mut buf = Vec::new();
        r.write_timings(&mut buf)?;
        append_timings(&mut timings, "recommendation", &buf);
        println!(
            "action rules {} -> {} ({})",
            r.source, r.target, cfg.direction
        );
        print_report(&r.rule_set);
        for s in &r.strategies {
            println!(
                "recommendation accuracy [{}] {:.2}% (covered only: {})",
                s.strategy.name(),
                s.accuracy,
                s.covered_accuracy
                    .map_or("-".to_string(), |a| format!("{a:.2}%"))
            );
        }
    }
    // Wall-clock times vary run to run, so they stay out of report.json.
    write_text(&cfg.out.join("timings.csv"), &timings)
}

fn append_timings(out: &mut String, experiment: &str, csv: &[u8]) {
    for line in String::from_utf8_lossy(csv).lines().skip(1) {
        out.push_str(experiment);
        out.push(',');
        out.push_str(line);
        out.push('\n');
    }
}
