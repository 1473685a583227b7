//! Brute-force references for the Fisher test, the greedy condition search
//! and recommendation optimality.

use actrules::action::induce_action_rules;
use actrules::recommend::{
    build_meta_table, induce_recommendations, MetaCondition, MetaKind, MetaRegion, MetaTable,
};
use actrules::rules::{possible_conditions, AttributeScope, RuleLearner};
use actrules::{fisher_p_value, Condition, ConfusionMatrix, Dataset, Direction, Measure, Value};

use super::random_dataset;

fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact one-sided p-value by summing hypergeometric table counts.
pub fn fisher_by_enumeration(cm: &ConfusionMatrix) -> f64 {
    let draws = cm.p + cm.n;
    let mut tail = 0u128;
    let mut all = 0u128;
    for x in 0..=draws.min(cm.pos) {
        if draws - x > cm.neg {
            continue;
        }
        let ways = choose(cm.pos, x) * choose(cm.neg, draws - x);
        all += ways;
        if x >= cm.p {
            tail += ways;
        }
    }
    tail as f64 / all as f64
}

/// Largest deviation from enumeration over every matrix with P, N <= 8.
pub fn fisher_max_error() -> f64 {
    let mut worst = 0.0f64;
    for pos in 0..=8u64 {
        for neg in 0..=8u64 {
            if pos + neg == 0 {
                continue;
            }
            for p in 0..=pos {
                for n in 0..=neg {
                    let cm = ConfusionMatrix::new(p, n, pos, neg);
                    worst = worst.max((fisher_p_value(&cm) - fisher_by_enumeration(&cm)).abs());
                }
            }
        }
    }
    worst
}

/// Argmax over `possible_conditions`, evaluating each extended premise
/// from scratch. Ties: strictly larger coverage, else the earlier candidate.
fn brute_force_step(
    ds: &Dataset,
    premise: &[Condition],
    class: usize,
    uncovered: &[bool],
    mincov: usize,
    m: Measure,
    incumbent: (f64, u64),
) -> Option<(Condition, f64, u64)> {
    let covered: Vec<usize> = (0..ds.len())
        .filter(|&i| premise.iter().all(|c| c.holds(&ds.examples()[i].values)))
        .collect();
    let pos = ds.class_count(class) as u64;
    let neg = ds.len() as u64 - pos;
    let mut best: Option<(Condition, f64, u64)> = None;
    let mut bar = incumbent;
    for cond in possible_conditions(ds, &covered, AttributeScope::All) {
        let inside: Vec<usize> = covered
            .iter()
            .copied()
            .filter(|&i| cond.holds(&ds.examples()[i].values))
            .collect();
        let fresh = inside.iter().filter(|&&i| uncovered[i]).count();
        if fresh < mincov {
            continue;
        }
        let p = inside
            .iter()
            .filter(|&&i| ds.examples()[i].label == class)
            .count() as u64;
        let n = inside.len() as u64 - p;
        let q = m.evaluate(&ConfusionMatrix::new(p, n, pos, neg));
        if q > bar.0 || (q == bar.0 && p + n > bar.1) {
            bar = (q, p + n);
            best = Some((cond, q, p + n));
        }
    }
    best
}

/// Grows rules on `ds` and compares every step with the brute-force argmax.
/// Returns the first mismatch as text.
pub fn check_grow(
    ds: &Dataset,
    class: usize,
    mincov: usize,
    m: Measure,
    uncovered: &[bool],
) -> Result<usize, String> {
    let learner = RuleLearner::new(ds, class, mincov, m, m);
    let (_, steps) = learner.grow(&[], uncovered);
    let mut premise = Vec::new();
    let mut incumbent = (f64::NEG_INFINITY, 0);
    for (k, step) in steps.iter().enumerate() {
        match brute_force_step(ds, &premise, class, uncovered, mincov, m, incumbent) {
            Some((c, q, cov)) if c == step.condition && q == step.quality => {
                premise.push(c);
                incumbent = (q, cov);
            }
            other => {
                return Err(format!(
                    "step {k}: learner {:?}, oracle {:?}",
                    step.condition, other
                ))
            }
        }
    }
    if let Some(extra) = brute_force_step(ds, &premise, class, uncovered, mincov, m, incumbent) {
        return Err(format!(
            "learner stopped, oracle continues with {:?}",
            extra.0
        ));
    }
    Ok(steps.len())
}

/// Runs `check_grow` on `datasets` random datasets (<= 30 examples, <= 4
/// attributes), cycling through the measures and both classes, with a full
/// and a partially cleared uncovered mask.
pub fn grow_oracle(datasets: u64) -> Result<usize, String> {
    let mut steps = 0;
    for seed in 0..datasets {
        let ds = random_dataset(1000 + seed, 30, 4);
        let m = Measure::ALL[seed as usize % Measure::ALL.len()];
        let mincov = 1 + seed as usize % 3;
        for class in 0..2 {
            let full: Vec<bool> = ds.examples().iter().map(|e| e.label == class).collect();
            let partial: Vec<bool> = full
                .iter()
                .enumerate()
                .map(|(i, &u)| u && i % 3 != 0)
                .collect();
            for mask in [full, partial] {
                steps += check_grow(&ds, class, mincov, m, &mask)
                    .map_err(|e| format!("seed {seed}, class {class}, {m}: {e}"))?;
            }
        }
    }
    Ok(steps)
}

fn region_holds(meta: usize, region: Option<MetaRegion>, row: &[Value]) -> bool {
    region.is_none_or(|region| MetaCondition { meta, region }.holds(row))
}

/// Every non-empty region with at most one condition per meta-attribute;
/// stable meta-attributes only get regions containing `meta_x`.
fn all_regions(mt: &MetaTable, meta_x: &[Value]) -> Vec<Vec<Option<MetaRegion>>> {
    let mut out: Vec<Vec<Option<MetaRegion>>> = vec![Vec::new()];
    for (i, m) in mt.attributes.iter().enumerate() {
        let mut options = vec![None];
        match &m.kind {
            MetaKind::Nominal => options
                .extend((0..mt.mapped.attribute(i).domain.len()).map(|v| Some(MetaRegion::Is(v)))),
            MetaKind::Intervals { cuts, .. } => {
                // The full range 1..=k is the same region as no condition.
                let k = cuts.len() + 1;
                for lo in 1..=k {
                    options.extend(
                        (lo..=k)
                            .filter(|&hi| lo > 1 || hi < k)
                            .map(|hi| Some(MetaRegion::Ids { lo, hi })),
                    );
                }
            }
        }
        if mt.mapped.attribute(i).is_stable() {
            options.retain(|r| region_holds(i, *r, meta_x));
        }
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |r| {
                    let mut p = prefix.clone();
                    p.push(*r);
                    p
                })
            })
            .collect();
    }
    out.retain(|r| r.iter().any(Option::is_some));
    out
}

fn region_counts(mt: &MetaTable, region: &[Option<MetaRegion>], target: usize) -> (u64, u64) {
    let mut counts = (0, 0);
    for e in mt.mapped.examples() {
        if region
            .iter()
            .enumerate()
            .all(|(i, r)| region_holds(i, *r, &e.values))
        {
            if e.label == target {
                counts.0 += 1;
            } else {
                counts.1 += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Default)]
pub struct ParetoOutcome {
    pub checked: usize,
    pub dominated: usize,
    pub first: Option<String>,
}

/// Compares the top recommendation for every source example against all
/// regions of small meta-tables (<= 3 meta-attributes, <= 6 values each)
/// built from Backward C2 rules on random datasets.
pub fn pareto_oracle(seeds: u64) -> ParetoOutcome {
    let mut out = ParetoOutcome::default();
    for seed in 0..seeds {
        let ds = random_dataset(seed, 30, 3);
        let Ok(set) =
            induce_action_rules(&ds, 0, 1, Direction::Backward, 2, Measure::C2, Measure::C2)
        else {
            continue;
        };
        let Ok(mt) = build_meta_table(&set.rules, &ds) else {
            continue;
        };
        if mt.attributes.is_empty() || mt.attributes.iter().any(|m| m.arity(&ds) > 6) {
            continue;
        }
        for e in ds.examples().iter().filter(|e| e.label == 0) {
            let recs = induce_recommendations(&mt, &ds, &e.values, 1, 2, Measure::C2, 3);
            let Some(top) = recs.first() else { continue };
            let (p, n) = (top.target_covered, top.others_covered);
            let meta_x = mt.to_meta(&e.values);
            out.checked += 1;
            let better = all_regions(&mt, &meta_x).into_iter().find_map(|r| {
                let (rp, rn) = region_counts(&mt, &r, 1);
                (rp >= p && rn <= n && (rp > p || rn < n)).then(|| {
                    let conds: Vec<String> = r
                        .iter()
                        .enumerate()
                        .filter_map(|(meta, region)| {
                            region.map(|region| {
                                MetaCondition { meta, region }.display(&mt).to_string()
                            })
                        })
                        .collect();
                    format!("{} covers ({rp}, {rn})", conds.join(" AND "))
                })
            });
            if let Some(b) = better {
                out.dominated += 1;
                out.first.get_or_insert_with(|| {
                    let top: Vec<String> = top
                        .conditions
                        .iter()
                        .map(|c| c.display(&mt).to_string())
                        .collect();
                    format!(
                        "seed {seed}: top {} covers ({p}, {n}), {b}",
                        top.join(" AND ")
                    )
                });
            }
        }
    }
    out
}
