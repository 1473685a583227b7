//! Classification rules: greedy growing, pruning, the separate-and-conquer
//! loop and unordered voting.

mod condition;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Value};
use crate::quality::{fdr_adjust, fisher_p_value, ConfusionMatrix, Measure};

pub use condition::{merge_conditions, premise_holds, Condition, ConditionDisplay, Relation};
pub use search::{possible_conditions, AttributeScope, Candidate, ConditionSearch, Incumbent};

/// Default minimum number of previously uncovered examples per rule.
pub const DEFAULT_MINCOV: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRule {
    pub premise: Vec<Condition>,
    pub conclusion: usize,
    pub stats: ConfusionMatrix,
    pub quality: f64,
    /// FDR-adjusted Fisher p-value, filled in when the rule set is finalized.
    pub significance: Option<f64>,
}

impl ClassificationRule {
    /// Rule with stats and quality computed on `ds`.
    pub fn evaluated(premise: Vec<Condition>, conclusion: usize, ds: &Dataset, m: Measure) -> Self {
        let stats = confusion(ds, &premise, conclusion);
        ClassificationRule {
            premise,
            conclusion,
            stats,
            quality: m.evaluate(&stats),
            significance: None,
        }
    }

    pub fn covers(&self, values: &[Value]) -> bool {
        premise_holds(&self.premise, values)
    }

    pub fn display<'a>(&'a self, ds: &'a Dataset) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, ds }
    }
}

pub fn covers(premise: &[Condition], values: &[Value]) -> bool {
    premise_holds(premise, values)
}

/// Indices of the examples of `ds` satisfying `premise`.
pub fn covered_indices(ds: &Dataset, premise: &[Condition]) -> Vec<usize> {
    ds.examples()
        .iter()
        .enumerate()
        .filter(|(_, e)| premise_holds(premise, &e.values))
        .map(|(i, _)| i)
        .collect()
}

/// Confusion matrix of `premise` for class `positive` over the whole dataset.
pub fn confusion(ds: &Dataset, premise: &[Condition], positive: usize) -> ConfusionMatrix {
    let (mut p, mut n) = (0, 0);
    for e in ds.examples() {
        if premise_holds(premise, &e.values) {
            if e.label == positive {
                p += 1;
            } else {
                n += 1;
            }
        }
    }
    let pos = ds.class_count(positive) as u64;
    ConfusionMatrix::new(p, n, pos, ds.len() as u64 - pos)
}

pub fn premise_quality(ds: &Dataset, premise: &[Condition], positive: usize, m: Measure) -> f64 {
    m.evaluate(&confusion(ds, premise, positive))
}

/// One accepted growing step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowStep {
    pub condition: Condition,
    pub quality: f64,
    pub stats: ConfusionMatrix,
}

/// Settings for growing, pruning and inducing rules of one class.
pub struct RuleLearner<'a> {
    pub train: &'a Dataset,
    pub class: usize,
    pub mincov: usize,
    pub grow_measure: Measure,
    pub prune_measure: Measure,
    /// Extra admissibility test applied to every candidate condition.
    pub filter: Option<&'a dyn Fn(&Condition) -> bool>,
}

impl<'a> RuleLearner<'a> {
    pub fn new(
        train: &'a Dataset,
        class: usize,
        mincov: usize,
        grow: Measure,
        prune: Measure,
    ) -> Self {
        RuleLearner {
            train,
            class,
            mincov,
            grow_measure: grow,
            prune_measure: prune,
            filter: None,
        }
    }

    /// Greedily appends the best admissible condition while quality strictly
    /// improves. `uncovered` flags the examples that count towards mincov.
    pub fn grow(&self, seed: &[Condition], uncovered: &[bool]) -> (Vec<Condition>, Vec<GrowStep>) {
        let mut premise = seed.to_vec();
        let mut steps = Vec::new();
        let mut covered = covered_indices(self.train, &premise);
        let mut search =
            ConditionSearch::new(self.train, self.class, self.grow_measure, self.mincov)
                .uncovered(uncovered);
        if let Some(f) = self.filter {
            search = search.filter(f);
        }
        let mut incumbent = Incumbent::NONE;
        while let Some(best) = search.best(&covered, incumbent) {
            incumbent = Incumbent {
                quality: best.quality,
                covered: best.covered(),
            };
            premise.push(best.condition);
            covered.retain(|&i| best.condition.holds(&self.train.examples()[i].values));
            steps.push(GrowStep {
                condition: best.condition,
                quality: best.quality,
                stats: best.stats,
            });
        }
        (premise, steps)
    }

    /// Removes conditions while quality does not decrease, taking the
    /// largest gain each pass (ties: most recently added), down to one
    /// condition; then merges numeric conditions per attribute.
    pub fn prune(&self, premise: &[Condition]) -> Vec<Condition> {
        let mut current = premise.to_vec();
        let mut quality = premise_quality(self.train, &current, self.class, self.prune_measure);
        while current.len() > 1 {
            let mut choice: Option<(usize, f64)> = None;
            for idx in (0..current.len()).rev() {
                let mut trial = current.clone();
                trial.remove(idx);
                let q = premise_quality(self.train, &trial, self.class, self.prune_measure);
                if q >= quality && choice.is_none_or(|(_, best)| q > best) {
                    choice = Some((idx, q));
                }
            }
            match choice {
                Some((idx, q)) => {
                    current.remove(idx);
                    quality = q;
                }
                None => break,
            }
        }
        merge_conditions(&current)
    }

    pub fn induce(&self, voting: Measure) -> RuleSet {
        let mut uncovered: Vec<bool> = self
            .train
            .examples()
            .iter()
            .map(|e| e.label == self.class)
            .collect();
        let mut rules = Vec::new();
        while uncovered.iter().filter(|&&u| u).count() >= self.mincov {
            let (grown, _) = self.grow(&[], &uncovered);
            if grown.is_empty() {
                break;
            }
            let pruned = self.prune(&grown);
            if !remove_covered(self.train, &pruned, &mut uncovered) {
                break;
            }
            rules.push(ClassificationRule::evaluated(
                pruned,
                self.class,
                self.train,
                self.prune_measure,
            ));
        }
        let mut rs = RuleSet {
            rules,
            target: self.class,
            voting,
            default_class: self.train.majority_class(),
        };
        rs.finalize();
        rs
    }
}

/// Clears `uncovered` for every example covered by `premise`; returns
/// whether anything was cleared. Negatives are never flagged in the mask,
/// so only positives leave the uncovered set.
pub fn remove_covered(ds: &Dataset, premise: &[Condition], uncovered: &mut [bool]) -> bool {
    let mut any = false;
    for (i, e) in ds.examples().iter().enumerate() {
        if uncovered[i] && premise_holds(premise, &e.values) {
            uncovered[i] = false;
            any = true;
        }
    }
    any
}

pub fn grow_rule(
    seed: &[Condition],
    train: &Dataset,
    class: usize,
    uncovered: &[bool],
    mincov: usize,
    m: Measure,
) -> ClassificationRule {
    let learner = RuleLearner::new(train, class, mincov, m, m);
    let (premise, _) = learner.grow(seed, uncovered);
    ClassificationRule::evaluated(premise, class, train, m)
}

pub fn prune_rule(rule: &ClassificationRule, train: &Dataset, m: Measure) -> ClassificationRule {
    let learner = RuleLearner::new(train, rule.conclusion, 1, m, m);
    ClassificationRule::evaluated(learner.prune(&rule.premise), rule.conclusion, train, m)
}

pub fn induce_rules(
    train: &Dataset,
    target: usize,
    mincov: usize,
    grow_m: Measure,
    prune_m: Measure,
    voting_m: Measure,
) -> RuleSet {
    RuleLearner::new(train, target, mincov, grow_m, prune_m).induce(voting_m)
}

/// Rules concluding one class. Rule order carries no meaning for
/// classification; it records induction order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<ClassificationRule>,
    pub target: usize,
    pub voting: Measure,
    pub default_class: usize,
}

impl RuleSet {
    /// Attaches BH-adjusted Fisher p-values to every rule.
    pub fn finalize(&mut self) {
        let raw: Vec<f64> = self
            .rules
            .iter()
            .map(|r| fisher_p_value(&r.stats))
            .collect();
        for (r, q) in self.rules.iter_mut().zip(fdr_adjust(&raw)) {
            r.significance = Some(q);
        }
    }
}

/// Sums the `voting` quality of the covering rules per class and returns the
/// class with the largest sum (ties: earlier class). Falls back to
/// `default_class` when nothing covers `values`.
pub fn classify(
    rule_sets: &[RuleSet],
    values: &[Value],
    voting: Measure,
    default_class: usize,
) -> usize {
    let mut votes: Vec<Option<f64>> = Vec::new();
    for rs in rule_sets {
        for r in &rs.rules {
            if r.covers(values) {
                if votes.len() <= r.conclusion {
                    votes.resize(r.conclusion + 1, None);
                }
                let v = voting.evaluate(&r.stats);
                votes[r.conclusion] = Some(votes[r.conclusion].unwrap_or(0.0) + v);
            }
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for (c, v) in votes.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((c, v));
            }
        }
    }
    best.map_or(default_class, |(c, _)| c)
}

/// Voting classifier over one rule set per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleClassifier {
    pub rule_sets: Vec<RuleSet>,
    pub voting: Measure,
    pub default_class: usize,
}

impl RuleClassifier {
    pub fn train(
        train: &Dataset,
        mincov: usize,
        grow: Measure,
        prune: Measure,
        voting: Measure,
    ) -> Self {
        let rule_sets = (0..train.classes().len())
            .map(|c| induce_rules(train, c, mincov, grow, prune, voting))
            .collect();
        RuleClassifier {
            rule_sets,
            voting,
            default_class: train.majority_class(),
        }
    }

    pub fn predict(&self, values: &[Value]) -> usize {
        classify(&self.rule_sets, values, self.voting, self.default_class)
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a ClassificationRule,
    ds: &'a Dataset,
}

pub(crate) fn write_premise(
    f: &mut fmt::Formatter<'_>,
    ds: &Dataset,
    premise: &[Condition],
) -> fmt::Result {
    if premise.is_empty() {
        return write!(f, "TRUE");
    }
    for (i, c) in premise.iter().enumerate() {
        if i > 0 {
            write!(f, " AND ")?;
        }
        write!(f, "{}", c.display(ds))?;
    }
    Ok(())
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        write!(f, "IF ")?;
        write_premise(f, self.ds, &r.premise)?;
        write!(
            f,
            " THEN {} [{} {} {} {} {:.4} {}]",
            self.ds.class_name(r.conclusion),
            r.stats.p,
            r.stats.n,
            r.stats.pos,
            r.stats.neg,
            r.quality,
            r.significance
                .map_or("-".to_string(), |s| format!("{s:.3e}"))
        )
    }
}
