//! Action rules: Forward and Backward growing, three-way action pruning and
//! the per-class-pair covering loop.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::quality::{fdr_adjust, fisher_p_value, ConfusionMatrix, Measure};
use crate::rules::{
    confusion, covered_indices, merge_conditions, remove_covered, AttributeScope,
    ClassificationRule, Condition, ConditionSearch, Incumbent,
};

/// Source-to-target change on one attribute. Source only is a constraint,
/// target only is a narrowing action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementaryAction {
    pub attribute: usize,
    pub source: Option<Condition>,
    pub target: Option<Condition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Change,
    Constraint,
    Narrowing,
}

impl ElementaryAction {
    pub fn change(source: Condition, target: Condition) -> Self {
        debug_assert_eq!(source.attribute, target.attribute);
        ElementaryAction {
            attribute: source.attribute,
            source: Some(source),
            target: Some(target),
        }
    }

    pub fn constraint(source: Condition) -> Self {
        ElementaryAction {
            attribute: source.attribute,
            source: Some(source),
            target: None,
        }
    }

    pub fn narrowing(target: Condition) -> Self {
        ElementaryAction {
            attribute: target.attribute,
            source: None,
            target: Some(target),
        }
    }

    pub fn kind(&self) -> ActionKind {
        match (self.source, self.target) {
            (Some(_), Some(_)) => ActionKind::Change,
            (Some(_), None) => ActionKind::Constraint,
            (None, Some(_)) => ActionKind::Narrowing,
            (None, None) => unreachable!("elementary action with no condition"),
        }
    }

    pub fn condition_count(&self) -> usize {
        self.source.is_some() as usize + self.target.is_some() as usize
    }
}

/// Coverage statistics of the two parts of an action rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionStats {
    pub source: ConfusionMatrix,
    pub target: ConfusionMatrix,
}

impl ActionStats {
    pub fn counts(&self) -> (u64, u64, u64, u64) {
        (self.source.p, self.source.n, self.target.p, self.target.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRule {
    pub premise: Vec<ElementaryAction>,
    pub source_class: usize,
    pub target_class: usize,
    pub stats: ActionStats,
    pub source_quality: f64,
    pub target_quality: f64,
}

impl ActionRule {
    pub fn evaluated(
        premise: Vec<ElementaryAction>,
        source_class: usize,
        target_class: usize,
        ds: &Dataset,
        m_s: Measure,
        m_t: Measure,
    ) -> Self {
        let source = confusion(ds, &source_conditions(&premise), source_class);
        let target = confusion(ds, &target_conditions(&premise), target_class);
        ActionRule {
            premise,
            source_class,
            target_class,
            stats: ActionStats { source, target },
            source_quality: m_s.evaluate(&source),
            target_quality: m_t.evaluate(&target),
        }
    }

    pub fn source_conditions(&self) -> Vec<Condition> {
        source_conditions(&self.premise)
    }

    pub fn target_conditions(&self) -> Vec<Condition> {
        target_conditions(&self.premise)
    }

    pub fn source_part(&self) -> ClassificationRule {
        ClassificationRule {
            premise: self.source_conditions(),
            conclusion: self.source_class,
            stats: self.stats.source,
            quality: self.source_quality,
            significance: None,
        }
    }

    pub fn target_part(&self) -> ClassificationRule {
        ClassificationRule {
            premise: self.target_conditions(),
            conclusion: self.target_class,
            stats: self.stats.target,
            quality: self.target_quality,
            significance: None,
        }
    }

    pub fn display<'a>(&'a self, ds: &'a Dataset) -> ActionRuleDisplay<'a> {
        ActionRuleDisplay { rule: self, ds }
    }
}

fn source_conditions(premise: &[ElementaryAction]) -> Vec<Condition> {
    premise.iter().filter_map(|a| a.source).collect()
}

fn target_conditions(premise: &[ElementaryAction]) -> Vec<Condition> {
    premise.iter().filter_map(|a| a.target).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            _ => Err(format!(
                "unknown direction `{s}` (expected forward or backward)"
            )),
        }
    }
}

/// Conditions chosen in one growing iteration with the qualities of the
/// extended source and target parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionGrowStep {
    pub source: Option<Condition>,
    pub target: Option<Condition>,
    pub source_quality: f64,
    pub target_quality: f64,
}

/// Settings shared by growing, pruning and the covering loop for one
/// (source, target) class pair.
#[derive(Debug, Clone, Copy)]
pub struct ActionLearner<'a> {
    pub train: &'a Dataset,
    pub source_class: usize,
    pub target_class: usize,
    pub mincov: usize,
    pub source_measure: Measure,
    pub target_measure: Measure,
    pub prune_measure: Measure,
}

impl<'a> ActionLearner<'a> {
    pub fn new(
        train: &'a Dataset,
        source_class: usize,
        target_class: usize,
        mincov: usize,
        grow: Measure,
        prune: Measure,
    ) -> Self {
        ActionLearner {
            train,
            source_class,
            target_class,
            mincov,
            source_measure: grow,
            target_measure: grow,
            prune_measure: prune,
        }
    }

    /// Forward growing. `uncovered` flags source-class examples not yet
    /// covered by an earlier rule's source part.
    pub fn grow_forward(
        &self,
        seed: &[ElementaryAction],
        uncovered: &[bool],
    ) -> (Vec<ElementaryAction>, Vec<ActionGrowStep>) {
        self.grow(seed, uncovered, Direction::Forward)
    }

    /// Backward growing. `uncovered` flags target-class examples not yet
    /// covered by an earlier rule's target part.
    pub fn grow_backward(
        &self,
        seed: &[ElementaryAction],
        uncovered: &[bool],
    ) -> (Vec<ElementaryAction>, Vec<ActionGrowStep>) {
        self.grow(seed, uncovered, Direction::Backward)
    }

    pub fn grow(
        &self,
        seed: &[ElementaryAction],
        uncovered: &[bool],
        direction: Direction,
    ) -> (Vec<ElementaryAction>, Vec<ActionGrowStep>) {
        let ds = self.train;
        let mut premise = seed.to_vec();
        let mut steps = Vec::new();
        let mut source_cov = covered_indices(ds, &source_conditions(&premise));
        let mut target_cov = covered_indices(ds, &target_conditions(&premise));
        let source_search =
            ConditionSearch::new(ds, self.source_class, self.source_measure, self.mincov);
        let target_search =
            ConditionSearch::new(ds, self.target_class, self.target_measure, self.mincov);

        // Only the driving part has to keep improving; the other side is
        // searched afresh on the chosen attribute every iteration.
        let mut incumbent = Incumbent::NONE;
        loop {
            let (source, target) = match direction {
                Direction::Forward => {
                    let Some(best) = ConditionSearch {
                        uncovered: Some(uncovered),
                        ..source_search
                    }
                    .best(&source_cov, incumbent) else {
                        break;
                    };
                    incumbent = Incumbent {
                        quality: best.quality,
                        covered: best.covered(),
                    };
                    let a = best.condition.attribute;
                    let target = if ds.attribute(a).is_stable() {
                        None
                    } else {
                        ConditionSearch {
                            scope: AttributeScope::Only(a),
                            ..target_search
                        }
                        .best(&target_cov, Incumbent::NONE)
                        .map(|c| c.condition)
                    };
                    (Some(best.condition), target)
                }
                Direction::Backward => {
                    let Some(best) = ConditionSearch {
                        uncovered: Some(uncovered),
                        scope: AttributeScope::Flexible,
                        ..target_search
                    }
                    .best(&target_cov, incumbent) else {
                        break;
                    };
                    incumbent = Incumbent {
                        quality: best.quality,
                        covered: best.covered(),
                    };
                    let a = best.condition.attribute;
                    let source = ConditionSearch {
                        scope: AttributeScope::Only(a),
                        ..source_search
                    }
                    .best(&source_cov, Incumbent::NONE)
                    .map(|c| c.condition);
                    (source, Some(best.condition))
                }
            };
            let action = ElementaryAction {
                attribute: source.or(target).map(|c| c.attribute).unwrap_or_default(),
                source,
                target,
            };
            premise.push(action);
            if let Some(s) = source {
                source_cov.retain(|&i| s.holds(&ds.examples()[i].values));
            }
            if let Some(t) = target {
                target_cov.retain(|&i| t.holds(&ds.examples()[i].values));
            }
            let sq = self.source_measure.evaluate(&confusion(
                ds,
                &source_conditions(&premise),
                self.source_class,
            ));
            let tq = self.target_measure.evaluate(&confusion(
                ds,
                &target_conditions(&premise),
                self.target_class,
            ));
            steps.push(ActionGrowStep {
                source,
                target,
                source_quality: sq,
                target_quality: tq,
            });
        }
        (premise, steps)
    }

    fn part_qualities(&self, premise: &[ElementaryAction]) -> (f64, f64) {
        let ds = self.train;
        let s = confusion(ds, &source_conditions(premise), self.source_class);
        let t = confusion(ds, &target_conditions(premise), self.target_class);
        (
            self.prune_measure.evaluate(&s),
            self.prune_measure.evaluate(&t),
        )
    }

    pub fn prune(&self, premise: &[ElementaryAction]) -> Vec<ElementaryAction> {
        prune_with(premise, |p| self.part_qualities(p))
    }

    /// Grows, prunes and normalizes one rule against `uncovered`.
    pub fn learn_rule(&self, uncovered: &[bool], direction: Direction) -> Option<ActionRule> {
        let (grown, _) = self.grow(&[], uncovered, direction);
        if grown.is_empty() {
            return None;
        }
        let pruned = normalize(&self.prune(&grown));
        Some(self.evaluate(pruned))
    }

    pub fn evaluate(&self, premise: Vec<ElementaryAction>) -> ActionRule {
        ActionRule::evaluated(
            premise,
            self.source_class,
            self.target_class,
            self.train,
            self.prune_measure,
            self.prune_measure,
        )
    }

    pub fn induce(&self, direction: Direction) -> ActionRuleSet {
        let ds = self.train;
        let driving = match direction {
            Direction::Forward => self.source_class,
            Direction::Backward => self.target_class,
        };
        let mut uncovered: Vec<bool> = ds.examples().iter().map(|e| e.label == driving).collect();
        let mut rules = Vec::new();
        while uncovered.iter().filter(|&&u| u).count() >= self.mincov {
            let Some(rule) = self.learn_rule(&uncovered, direction) else {
                break;
            };
            let part = match direction {
                Direction::Forward => rule.source_conditions(),
                Direction::Backward => rule.target_conditions(),
            };
            if !remove_covered(ds, &part, &mut uncovered) {
                break;
            }
            rules.push(rule);
        }
        ActionRuleSet {
            rules,
            direction,
            source_class: self.source_class,
            target_class: self.target_class,
            grow_measure: self.source_measure,
            prune_measure: self.prune_measure,
            mincov: self.mincov,
        }
    }
}

/// Merges the source conditions and the target conditions of every
/// attribute into one action per attribute (more only when distinct
/// nominal conditions survive merging).
pub fn merge_actions(premise: &[ElementaryAction]) -> Vec<ElementaryAction> {
    let mut out = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for act in premise {
        if seen.contains(&act.attribute) {
            continue;
        }
        seen.push(act.attribute);
        let on_attr = || premise.iter().filter(|o| o.attribute == act.attribute);
        let sources = merge_conditions(&on_attr().filter_map(|o| o.source).collect::<Vec<_>>());
        let targets = merge_conditions(&on_attr().filter_map(|o| o.target).collect::<Vec<_>>());
        for i in 0..sources.len().max(targets.len()) {
            out.push(ElementaryAction {
                attribute: act.attribute,
                source: sources.get(i).copied(),
                target: targets.get(i).copied(),
            });
        }
    }
    out
}

/// Turns identity actions `w -> w` into constraints `w`.
pub fn normalize(premise: &[ElementaryAction]) -> Vec<ElementaryAction> {
    merge_actions(premise)
        .into_iter()
        .map(|mut a| {
            if a.source.is_some() && a.source == a.target {
                a.target = None;
            }
            a
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn grow_action_rule_forward(
    seed: &[ElementaryAction],
    train: &Dataset,
    source_class: usize,
    target_class: usize,
    uncovered_s: &[bool],
    mincov: usize,
    m_s: Measure,
    m_t: Measure,
) -> ActionRule {
    let learner = ActionLearner {
        target_measure: m_t,
        ..ActionLearner::new(train, source_class, target_class, mincov, m_s, m_s)
    };
    let (premise, _) = learner.grow_forward(seed, uncovered_s);
    ActionRule::evaluated(premise, source_class, target_class, train, m_s, m_t)
}

#[allow(clippy::too_many_arguments)]
pub fn grow_action_rule_backward(
    seed: &[ElementaryAction],
    train: &Dataset,
    source_class: usize,
    target_class: usize,
    uncovered_t: &[bool],
    mincov: usize,
    m_s: Measure,
    m_t: Measure,
) -> ActionRule {
    let learner = ActionLearner {
        target_measure: m_t,
        ..ActionLearner::new(train, source_class, target_class, mincov, m_s, m_s)
    };
    let (premise, _) = learner.grow_backward(seed, uncovered_t);
    ActionRule::evaluated(premise, source_class, target_class, train, m_s, m_t)
}

/// Prunes with `m_s` on the source part and `m_t` on the target part.
pub fn prune_action_rule(
    rule: &ActionRule,
    train: &Dataset,
    m_s: Measure,
    m_t: Measure,
) -> ActionRule {
    let quals = |p: &[ElementaryAction]| {
        let s = confusion(train, &source_conditions(p), rule.source_class);
        let t = confusion(train, &target_conditions(p), rule.target_class);
        (m_s.evaluate(&s), m_t.evaluate(&t))
    };
    let pruned = prune_with(&rule.premise, quals);
    ActionRule::evaluated(
        pruned,
        rule.source_class,
        rule.target_class,
        train,
        m_s,
        m_t,
    )
}

/// Removes whole actions, source sides or target sides while neither part
/// loses quality, taking the edit with the largest summed gain on each pass.
/// Actions added later are tried first and win ties; within an action the
/// order is whole, source side, target side. The premise never becomes
/// empty. Both parts are merged per attribute afterwards.
fn prune_with(
    premise: &[ElementaryAction],
    quals: impl Fn(&[ElementaryAction]) -> (f64, f64),
) -> Vec<ElementaryAction> {
    let mut current = premise.to_vec();
    let (mut qs, mut qt) = quals(&current);
    loop {
        let mut choice: Option<(Vec<ElementaryAction>, f64, f64, f64)> = None;
        for idx in (0..current.len()).rev() {
            let act = current[idx];
            let mut edits: Vec<Vec<ElementaryAction>> = Vec::with_capacity(3);
            if current.len() > 1 {
                let mut whole = current.clone();
                whole.remove(idx);
                edits.push(whole);
            }
            if act.kind() == ActionKind::Change {
                let mut no_source = current.clone();
                no_source[idx].source = None;
                edits.push(no_source);
                let mut no_target = current.clone();
                no_target[idx].target = None;
                edits.push(no_target);
            }
            for edit in edits {
                let (ns, nt) = quals(&edit);
                if ns < qs || nt < qt {
                    continue;
                }
                let gain = (ns - qs) + (nt - qt);
                if choice.as_ref().is_none_or(|c| gain > c.1) {
                    choice = Some((edit, gain, ns, nt));
                }
            }
        }
        match choice {
            Some((edit, _, ns, nt)) => {
                current = edit;
                qs = ns;
                qt = nt;
            }
            None => break,
        }
    }
    merge_actions(&current)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRuleSet {
    pub rules: Vec<ActionRule>,
    pub direction: Direction,
    pub source_class: usize,
    pub target_class: usize,
    pub grow_measure: Measure,
    pub prune_measure: Measure,
    pub mincov: usize,
}

/// Action rules moving examples from `source` to `target`.
pub fn induce_action_rules(
    train: &Dataset,
    source: usize,
    target: usize,
    direction: Direction,
    mincov: usize,
    grow: Measure,
    prune: Measure,
) -> Result<ActionRuleSet> {
    let n = train.classes().len();
    for c in [source, target] {
        if c >= n {
            return Err(Error::UnknownClass(c.to_string()));
        }
        if train.class_count(c) == 0 {
            return Err(Error::UnknownClass(train.class_name(c).to_string()));
        }
    }
    if source == target {
        return Err(Error::SameClasses(train.class_name(source).to_string()));
    }
    Ok(ActionLearner::new(train, source, target, mincov, grow, prune).induce(direction))
}

/// Averages over the rules of one set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RuleSetReport {
    pub rules: f64,
    pub conditions: f64,
    pub actions: f64,
    pub source_precision: f64,
    pub target_precision: f64,
    pub source_coverage: f64,
    pub target_coverage: f64,
    pub significant_source: f64,
    pub significant_target: f64,
}

/// Adjusted p-value below which a rule part counts as significant.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Characterizes a rule set. Stats are taken from the rules as stored, so
/// they refer to the set's training data.
pub fn characterize(ars: &ActionRuleSet) -> RuleSetReport {
    let k = ars.rules.len();
    if k == 0 {
        return RuleSetReport::default();
    }
    let kf = k as f64;
    let mean = |f: &dyn Fn(&ActionRule) -> f64| ars.rules.iter().map(f).sum::<f64>() / kf;
    let significant = |cms: Vec<ConfusionMatrix>| {
        let raw: Vec<f64> = cms.iter().map(fisher_p_value).collect();
        fdr_adjust(&raw)
            .iter()
            .filter(|&&q| q < SIGNIFICANCE_LEVEL)
            .count() as f64
            / kf
    };
    RuleSetReport {
        rules: kf,
        conditions: mean(&|r| r.premise.iter().map(|a| a.condition_count()).sum::<usize>() as f64),
        actions: mean(&|r| {
            r.premise
                .iter()
                .filter(|a| a.kind() == ActionKind::Change)
                .count() as f64
        }),
        source_precision: mean(&|r| r.stats.source.precision()),
        target_precision: mean(&|r| r.stats.target.precision()),
        source_coverage: mean(&|r| r.stats.source.coverage()),
        target_coverage: mean(&|r| r.stats.target.coverage()),
        significant_source: significant(ars.rules.iter().map(|r| r.stats.source).collect()),
        significant_target: significant(ars.rules.iter().map(|r| r.stats.target).collect()),
    }
}

pub struct ActionRuleDisplay<'a> {
    rule: &'a ActionRule,
    ds: &'a Dataset,
}

impl fmt::Display for ActionRuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        let ds = self.ds;
        write!(f, "IF ")?;
        if r.premise.is_empty() {
            write!(f, "TRUE")?;
        }
        for (i, a) in r.premise.iter().enumerate() {
            if i > 0 {
                write!(f, " AND ")?;
            }
            match (a.source, a.target) {
                (Some(s), Some(t)) => write!(f, "({} -> {})", s.display(ds), t.display(ds))?,
                (Some(s), None) => write!(f, "{}", s.display(ds))?,
                (None, Some(t)) => write!(f, "(-> {})", t.display(ds))?,
                (None, None) => {}
            }
        }
        let (ps, ns, pt, nt) = r.stats.counts();
        write!(
            f,
            " THEN {} -> {} [{ps} {ns} {pt} {nt} {:.4} {:.4}]",
            ds.class_name(r.source_class),
            ds.class_name(r.target_class),
            r.source_quality,
            r.target_quality
        )
    }
}
