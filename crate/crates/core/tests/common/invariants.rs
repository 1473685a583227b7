//! Property checks shared by the proptest suite and the acceptance sweep.
//! Each returns a description of the first violation.

use actrules::action::{
    induce_action_rules, normalize, prune_action_rule, ActionKind, ActionLearner, ActionRule,
};
use actrules::recommend::{build_meta_table, induce_recommendations, interval_of, MetaKind};
use actrules::rules::{
    classify, covered_indices, merge_conditions, prune_rule, ClassificationRule, RuleClassifier,
    RuleLearner,
};
use actrules::{fdr_adjust, Condition, Dataset, Direction, Measure};

use super::random_dataset;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fresh_count(ds: &Dataset, premise: &[Condition], uncovered: &mut [bool]) -> usize {
    let mut fresh = 0;
    for i in covered_indices(ds, premise) {
        if uncovered[i] {
            uncovered[i] = false;
            fresh += 1;
        }
    }
    fresh
}

/// Replays classification and action-rule induction: each rule covers at
/// least `mincov` examples still uncovered when it was created.
pub fn mincov(seed: u64, mincov: usize, m: Measure) -> Check {
    let ds = random_dataset(seed, 30, 4);
    for class in 0..2 {
        let rs = RuleLearner::new(&ds, class, mincov, m, m).induce(m);
        let mut uncovered: Vec<bool> = ds.examples().iter().map(|e| e.label == class).collect();
        for (k, r) in rs.rules.iter().enumerate() {
            ensure!(
                fresh_count(&ds, &r.premise, &mut uncovered) >= mincov,
                "class {class} rule {k}"
            );
        }
    }
    for direction in [Direction::Forward, Direction::Backward] {
        let set =
            induce_action_rules(&ds, 0, 1, direction, mincov, m, m).map_err(|e| e.to_string())?;
        let driving = match direction {
            Direction::Forward => 0,
            Direction::Backward => 1,
        };
        let mut uncovered: Vec<bool> = ds.examples().iter().map(|e| e.label == driving).collect();
        for (k, r) in set.rules.iter().enumerate() {
            let part = match direction {
                Direction::Forward => r.source_conditions(),
                Direction::Backward => r.target_conditions(),
            };
            ensure!(
                fresh_count(&ds, &part, &mut uncovered) >= mincov,
                "{direction} rule {k}"
            );
            ensure!(
                r.stats.source.covered() >= 1 && r.stats.target.covered() >= 1,
                "{direction} rule {k} has an empty part"
            );
        }
    }
    Ok(())
}

fn by_debug(v: &mut [Condition]) {
    v.sort_by_key(|c| format!("{c:?}"));
}

/// `pruned` equals the merge of some subset of `original` on every attribute.
fn only_removes(original: &[Condition], pruned: &[Condition], attributes: usize) -> bool {
    (0..attributes).all(|a| {
        let orig: Vec<Condition> = original
            .iter()
            .filter(|c| c.attribute == a)
            .copied()
            .collect();
        let mut kept: Vec<Condition> = pruned
            .iter()
            .filter(|c| c.attribute == a)
            .copied()
            .collect();
        by_debug(&mut kept);
        (0u32..1 << orig.len()).any(|mask| {
            let subset: Vec<Condition> = orig
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| *c)
                .collect();
            let mut merged = merge_conditions(&subset);
            by_debug(&mut merged);
            merged == kept
        })
    })
}

/// Pruning never lowers quality; action pruning keeps both parts' quality
/// and only removes conditions.
pub fn pruning(seed: u64, grow: Measure, prune: Measure) -> Check {
    let ds = random_dataset(seed, 30, 4);
    for class in 0..2 {
        let uncovered: Vec<bool> = ds.examples().iter().map(|e| e.label == class).collect();
        let (grown, _) = RuleLearner::new(&ds, class, 1, grow, prune).grow(&[], &uncovered);
        let before = ClassificationRule::evaluated(grown, class, &ds, prune);
        let after = prune_rule(&before, &ds, prune);
        ensure!(
            after.quality >= before.quality,
            "class {class}: {} -> {}",
            before.quality,
            after.quality
        );
    }
    for direction in [Direction::Forward, Direction::Backward] {
        let learner = ActionLearner::new(&ds, 0, 1, 1, grow, prune);
        let driving = usize::from(direction == Direction::Backward);
        let uncovered: Vec<bool> = ds.examples().iter().map(|e| e.label == driving).collect();
        let (grown, _) = learner.grow(&[], &uncovered, direction);
        if grown.is_empty() {
            continue;
        }
        let before = learner.evaluate(grown);
        let after = prune_action_rule(&before, &ds, prune, prune);
        ensure!(
            after.source_quality >= before.source_quality,
            "{direction}: source quality dropped"
        );
        ensure!(
            after.target_quality >= before.target_quality,
            "{direction}: target quality dropped"
        );
        ensure!(!after.premise.is_empty(), "{direction}: empty premise");
        let n = ds.attributes().len();
        ensure!(
            only_removes(&before.source_conditions(), &after.source_conditions(), n)
                && only_removes(&before.target_conditions(), &after.target_conditions(), n),
            "{direction}: pruning added a condition"
        );
    }
    Ok(())
}

/// Every action on a stable attribute is a constraint, and stored stats
/// match a recomputation.
pub fn stable_only_constrain(seed: u64, m: Measure, mincov: usize) -> Check {
    let ds = random_dataset(seed, 30, 4);
    for direction in [Direction::Forward, Direction::Backward] {
        for (s, t) in [(0, 1), (1, 0)] {
            let set = induce_action_rules(&ds, s, t, direction, mincov, m, m)
                .map_err(|e| e.to_string())?;
            for r in &set.rules {
                for a in &r.premise {
                    ensure!(
                        !ds.attribute(a.attribute).is_stable()
                            || a.kind() == ActionKind::Constraint,
                        "{direction}: {:?} on stable attribute",
                        a
                    );
                }
                let again = ActionRule::evaluated(normalize(&r.premise), s, t, &ds, m, m);
                ensure!(again.stats == r.stats, "{direction}: stored stats differ");
            }
        }
    }
    Ok(())
}

/// Every training value falls in exactly one interval of its meta-attribute.
pub fn meta_partition(seed: u64) -> Check {
    let ds = random_dataset(seed, 30, 3);
    let set = induce_action_rules(&ds, 0, 1, Direction::Backward, 2, Measure::C2, Measure::C2)
        .map_err(|e| e.to_string())?;
    let mt = build_meta_table(&set.rules, &ds).map_err(|e| e.to_string())?;
    for m in &mt.attributes {
        let MetaKind::Intervals { cuts, .. } = &m.kind else {
            continue;
        };
        for e in ds.examples() {
            let v = e.values[m.base]
                .as_numeric()
                .ok_or("nominal value on a numeric attribute")?;
            let containing: Vec<usize> = (1..=cuts.len() + 1)
                .filter(|&j| (j == 1 || v > cuts[j - 2]) && (j > cuts.len() || v <= cuts[j - 1]))
                .collect();
            ensure!(
                containing == vec![interval_of(cuts, v)],
                "{v} in {containing:?}"
            );
        }
    }
    Ok(())
}

/// Realized examples satisfy every condition of their recommendation,
/// stable attributes are untouched and the list is sorted by quality.
pub fn realize_satisfies(seed: u64, m: Measure) -> Check {
    let ds = random_dataset(seed, 30, 3);
    let set = induce_action_rules(&ds, 0, 1, Direction::Backward, 2, Measure::C2, Measure::C2)
        .map_err(|e| e.to_string())?;
    let mt = build_meta_table(&set.rules, &ds).map_err(|e| e.to_string())?;
    for e in ds.examples().iter().filter(|e| e.label == 0) {
        let recs = induce_recommendations(&mt, &ds, &e.values, 1, 2, m, 3);
        ensure!(
            recs.windows(2).all(|w| w[0].quality >= w[1].quality),
            "unsorted recommendations"
        );
        for rec in &recs {
            let realized = rec.realize(&e.values);
            let meta = mt.to_meta(&realized);
            for c in &rec.conditions {
                ensure!(c.holds(&meta), "{c:?} fails on {meta:?}");
            }
            for (a, (before, after)) in e.values.iter().zip(&realized).enumerate() {
                ensure!(
                    !ds.attribute(a).is_stable() || before == after,
                    "stable attribute {a} changed"
                );
            }
        }
    }
    Ok(())
}

/// Reordering rule sets and the rules inside them leaves predictions alone.
pub fn classify_order(seed: u64, m: Measure, k: usize) -> Check {
    let ds = random_dataset(seed, 30, 4);
    let model = RuleClassifier::train(&ds, 1, m, m, m);
    let mut shuffled = model.rule_sets.clone();
    shuffled.reverse();
    for rs in &mut shuffled {
        if !rs.rules.is_empty() {
            let len = rs.rules.len();
            rs.rules.rotate_left(k % len);
            rs.rules.reverse();
        }
    }
    for (i, e) in ds.examples().iter().enumerate() {
        ensure!(
            classify(&model.rule_sets, &e.values, m, model.default_class)
                == classify(&shuffled, &e.values, m, model.default_class),
            "example {i}"
        );
    }
    Ok(())
}

/// Adjusting a permuted input permutes the output identically.
pub fn fdr_equivariant(ps: &[f64], perm: &[usize]) -> Check {
    let q = fdr_adjust(ps);
    let shuffled: Vec<f64> = perm.iter().map(|&i| ps[i]).collect();
    let qs = fdr_adjust(&shuffled);
    for (j, &i) in perm.iter().enumerate() {
        ensure!(qs[j] == q[i], "position {j}: {} vs {}", qs[j], q[i]);
    }
    for (&p, &adj) in ps.iter().zip(&q) {
        ensure!(
            adj >= p * (1.0 - 1e-12) && adj <= 1.0,
            "{p} adjusted to {adj}"
        );
    }
    Ok(())
}
