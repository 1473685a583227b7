//! Meta-table built from the thresholds of an action-rule set, per-example
//! recommendation induction over it, and realization of attribute values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action::ActionRule;
use crate::data::{format_number, Attribute, AttributeKind, Dataset, Example, Value};
use crate::error::Result;
use crate::quality::Measure;
use crate::rules::{Condition, Relation, RuleLearner};

/// Default number of recommendations kept per example.
pub const DEFAULT_MAX_RECS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetaKind {
    /// Nominal attribute copied as is.
    Nominal,
    /// Numeric attribute discretized at `cuts`. Interval `j` (1-based) is
    /// `(cut_{j-1}, cut_j]` with `cut_0 = min` and the last interval
    /// `(cut_k, max)`.
    Intervals { cuts: Vec<f64>, min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaAttribute {
    pub base: usize,
    pub kind: MetaKind,
}

impl MetaAttribute {
    /// Number of meta-values.
    pub fn arity(&self, train: &Dataset) -> usize {
        match &self.kind {
            MetaKind::Nominal => train.attribute(self.base).domain.len(),
            MetaKind::Intervals { cuts, .. } => cuts.len() + 1,
        }
    }

    /// Real bounds `(lower, upper)` of interval `id`, open ends replaced by
    /// the training min/max.
    pub fn bounds(&self, id: usize) -> Option<(f64, f64)> {
        let MetaKind::Intervals { cuts, min, max } = &self.kind else {
            return None;
        };
        let lower = if id <= 1 { *min } else { cuts[id - 2] };
        let upper = if id > cuts.len() { *max } else { cuts[id - 1] };
        Some((lower, upper))
    }
}

/// Interval id of `v`: one plus the number of cuts strictly below it. Values
/// outside the training range fall into the first or last interval.
pub fn interval_of(cuts: &[f64], v: f64) -> usize {
    1 + cuts.partition_point(|&c| c < v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaTable {
    pub attributes: Vec<MetaAttribute>,
    /// Training examples mapped onto the meta-attributes; interval ids are
    /// stored as numeric values.
    pub mapped: Dataset,
}

/// Meta-attributes for every attribute used by `rules`, in attribute order.
pub fn build_meta_table(rules: &[ActionRule], train: &Dataset) -> Result<MetaTable> {
    let mut used: Vec<Vec<Condition>> = vec![Vec::new(); train.attributes().len()];
    for r in rules {
        for a in &r.premise {
            used[a.attribute].extend(a.source.iter().chain(a.target.iter()).copied());
        }
    }
    let mut attributes = Vec::new();
    for (a, conds) in used.iter().enumerate() {
        if conds.is_empty() {
            continue;
        }
        let kind = match train.attribute(a).kind {
            AttributeKind::Nominal => MetaKind::Nominal,
            AttributeKind::Numeric => {
                let mut cuts: Vec<f64> = conds.iter().flat_map(|c| c.thresholds()).collect();
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let (min, max) = train.range(a).unwrap_or((0.0, 0.0));
                MetaKind::Intervals { cuts, min, max }
            }
        };
        attributes.push(MetaAttribute { base: a, kind });
    }
    let meta_attrs: Vec<Attribute> = attributes
        .iter()
        .map(|m| {
            let base = train.attribute(m.base);
            match m.kind {
                MetaKind::Nominal => base.clone(),
                MetaKind::Intervals { .. } => Attribute::numeric(&base.name, base.mutability),
            }
        })
        .collect();
    let examples = train
        .examples()
        .iter()
        .map(|e| Example {
            values: map_values(&attributes, &e.values),
            label: e.label,
        })
        .collect();
    let mapped = Dataset::new(
        meta_attrs,
        examples,
        train.classes().to_vec(),
        train.decision_name(),
    )?;
    Ok(MetaTable { attributes, mapped })
}

fn map_values(attributes: &[MetaAttribute], values: &[Value]) -> Vec<Value> {
    attributes
        .iter()
        .map(|m| match (&m.kind, values[m.base]) {
            (MetaKind::Intervals { cuts, .. }, Value::Numeric(v)) => {
                Value::Numeric(interval_of(cuts, v) as f64)
            }
            (_, v) => v,
        })
        .collect()
}

impl MetaTable {
    /// Meta-example covering `values` (a row of the original schema).
    pub fn to_meta(&self, values: &[Value]) -> Vec<Value> {
        map_values(&self.attributes, values)
    }

    /// Every cell of the meta-table, first attribute varying slowest.
    pub fn meta_examples(&self) -> Vec<Vec<Value>> {
        let mut out: Vec<Vec<Value>> = vec![Vec::new()];
        for (i, m) in self.attributes.iter().enumerate() {
            let arity = match &m.kind {
                MetaKind::Nominal => self.mapped.attribute(i).domain.len(),
                MetaKind::Intervals { cuts, .. } => cuts.len() + 1,
            };
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..arity).map(move |v| {
                        let mut row = prefix.clone();
                        row.push(match m.kind {
                            MetaKind::Nominal => Value::Nominal(v),
                            MetaKind::Intervals { .. } => Value::Numeric((v + 1) as f64),
                        });
                        row
                    })
                })
                .collect();
        }
        out
    }

    /// Renders a meta-value: nominal value names, interval ids as numbers.
    pub fn format_meta(&self, meta: &[Value]) -> Vec<String> {
        meta.iter()
            .enumerate()
            .map(|(i, v)| match *v {
                Value::Nominal(x) => self.mapped.attribute(i).domain[x].clone(),
                Value::Numeric(id) => format_number(id),
            })
            .collect()
    }
}

/// Region of one meta-attribute required by a recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetaRegion {
    /// Nominal value index.
    Is(usize),
    /// Interval ids `lo..=hi`.
    Ids { lo: usize, hi: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaCondition {
    /// Index into the meta-table attributes.
    pub meta: usize,
    pub region: MetaRegion,
}

impl MetaCondition {
    fn from_condition(c: &Condition, mt: &MetaTable) -> Self {
        let arity = match &mt.attributes[c.attribute].kind {
            MetaKind::Intervals { cuts, .. } => cuts.len() + 1,
            MetaKind::Nominal => 0,
        };
        // Thresholds on ids are midpoints between observed ids.
        let first_at_least = |t: f64| t.ceil() as usize;
        let region = match c.relation {
            Relation::Equals(v) => MetaRegion::Is(v),
            Relation::Less(t) => MetaRegion::Ids {
                lo: 1,
                hi: first_at_least(t) - 1,
            },
            Relation::GreaterEq(t) => MetaRegion::Ids {
                lo: first_at_least(t),
                hi: arity,
            },
            Relation::Within(lo, hi) => MetaRegion::Ids {
                lo: first_at_least(lo),
                hi: first_at_least(hi) - 1,
            },
        };
        MetaCondition {
            meta: c.attribute,
            region,
        }
    }

    pub fn holds(&self, meta: &[Value]) -> bool {
        match (self.region, meta[self.meta]) {
            (MetaRegion::Is(v), Value::Nominal(x)) => v == x,
            (MetaRegion::Ids { lo, hi }, Value::Numeric(id)) => {
                let id = id as usize;
                lo <= id && id <= hi
            }
            _ => false,
        }
    }

    pub fn display<'a>(&'a self, mt: &'a MetaTable) -> MetaConditionDisplay<'a> {
        MetaConditionDisplay { cond: self, mt }
    }
}

pub struct MetaConditionDisplay<'a> {
    cond: &'a MetaCondition,
    mt: &'a MetaTable,
}

impl fmt::Display for MetaConditionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = &self.mt.mapped.attribute(self.cond.meta).name;
        match self.cond.region {
            MetaRegion::Is(v) => write!(
                f,
                "{name}={}",
                self.mt.mapped.attribute(self.cond.meta).domain[v]
            ),
            MetaRegion::Ids { lo, hi } if lo == hi => write!(f, "{name}={lo}"),
            MetaRegion::Ids { lo, hi } => write!(f, "{name} in {lo}..{hi}"),
        }
    }
}

/// Real interval covered by interval ids `lo..=hi`, as text.
fn describe_ids(m: &MetaAttribute, lo: usize, hi: usize) -> String {
    let MetaKind::Intervals { cuts, .. } = &m.kind else {
        return String::new();
    };
    let left = if lo <= 1 {
        "min".to_string()
    } else {
        format_number(cuts[lo - 2])
    };
    if hi > cuts.len() {
        format!("({left}, max)")
    } else {
        format!("({left}, {}]", format_number(cuts[hi - 1]))
    }
}

/// Change one attribute must undergo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendedAction {
    pub attribute: usize,
    pub from: String,
    pub to: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub conditions: Vec<MetaCondition>,
    pub quality: f64,
    /// Training examples of the target class inside the recommended region.
    pub target_covered: u64,
    /// Training examples of the other classes inside it.
    pub others_covered: u64,
    /// Actions for the conditions the example violates, in condition order.
    pub actions: Vec<RecommendedAction>,
}

impl Recommendation {
    /// Applies the actions to `values`.
    pub fn realize(&self, values: &[Value]) -> Vec<Value> {
        let mut out = values.to_vec();
        for a in &self.actions {
            out[a.attribute] = a.value;
        }
        out
    }
}

/// Value inside interval ids `lo..=hi`: the midpoint of its real span, or a
/// boundary value when the span is degenerate on the training data.
fn interval_value(m: &MetaAttribute, lo: usize, hi: usize) -> f64 {
    let MetaKind::Intervals { cuts, .. } = &m.kind else {
        unreachable!("interval value on a nominal meta-attribute")
    };
    let lower = m.bounds(lo).map_or(0.0, |b| b.0);
    let upper = m.bounds(hi).map_or(0.0, |b| b.1);
    let mid = (lower + upper) / 2.0;
    let id = interval_of(cuts, mid);
    if lo <= id && id <= hi {
        return mid;
    }
    if hi <= cuts.len() {
        cuts[hi - 1]
    } else {
        cuts[cuts.len() - 1].next_up()
    }
}

fn action_for(
    mt: &MetaTable,
    train: &Dataset,
    cond: &MetaCondition,
    x: &[Value],
) -> RecommendedAction {
    let m = &mt.attributes[cond.meta];
    let base = m.base;
    let current = mt.to_meta(x)[cond.meta];
    match cond.region {
        MetaRegion::Is(v) => RecommendedAction {
            attribute: base,
            from: train.format_value(base, x[base]),
            to: train.attribute(base).domain[v].clone(),
            value: Value::Nominal(v),
        },
        MetaRegion::Ids { lo, hi } => {
            let id = current.as_numeric().unwrap_or(1.0) as usize;
            RecommendedAction {
                attribute: base,
                from: describe_ids(m, id, id),
                to: describe_ids(m, lo, hi),
                value: Value::Numeric(interval_value(m, lo, hi)),
            }
        }
    }
}

/// Recommendations moving `x` into class `target`, best first.
///
/// Rules for `target` are induced on the meta-mapped training examples;
/// conditions on stable attributes are admissible only when `x` already
/// satisfies them. Each rule is one recommendation.
pub fn induce_recommendations(
    mt: &MetaTable,
    train: &Dataset,
    x: &[Value],
    target: usize,
    mincov: usize,
    m: Measure,
    max_recs: usize,
) -> Vec<Recommendation> {
    if mt.attributes.is_empty() || mt.mapped.class_count(target) == 0 {
        return Vec::new();
    }
    let meta_x = mt.to_meta(x);
    let mapped = &mt.mapped;
    let admissible = |c: &Condition| !mapped.attribute(c.attribute).is_stable() || c.holds(&meta_x);
    let learner = RuleLearner {
        filter: Some(&admissible),
        ..RuleLearner::new(mapped, target, mincov, m, m)
    };
    let set = learner.induce(m);
    let mut recs: Vec<Recommendation> = set
        .rules
        .iter()
        .map(|r| {
            let conditions: Vec<MetaCondition> = r
                .premise
                .iter()
                .map(|c| MetaCondition::from_condition(c, mt))
                .collect();
            let actions = conditions
                .iter()
                .filter(|c| !c.holds(&meta_x))
                .map(|c| action_for(mt, train, c, x))
                .collect();
            Recommendation {
                conditions,
                quality: r.quality,
                target_covered: r.stats.p,
                others_covered: r.stats.n,
                actions,
            }
        })
        .collect();
    // Stable sort keeps induction order among equal qualities.
    recs.sort_by(|a, b| b.quality.total_cmp(&a.quality));
    recs.truncate(max_recs);
    recs
}

/// Value satisfying a target condition, preferring the midpoint of its
/// region within the training range.
pub fn realize_condition(c: &Condition, train: &Dataset) -> Value {
    let (min, max) = train.range(c.attribute).unwrap_or((0.0, 0.0));
    match c.relation {
        Relation::Equals(v) => Value::Nominal(v),
        Relation::Less(t) => {
            let v = (min + t) / 2.0;
            Value::Numeric(if v < t { v } else { t.next_down() })
        }
        Relation::GreaterEq(t) => {
            let v = (t + max) / 2.0;
            Value::Numeric(if v >= t { v } else { t })
        }
        Relation::Within(lo, hi) => Value::Numeric((lo + hi) / 2.0),
    }
}

/// Applies the actions of the covering rule whose source part scores best
/// under `m` (ties: larger `p_S`, then earlier rule). Targets `x` already
/// satisfies are left alone. `None` when no source part covers `x`.
pub fn best_action_rule_transform(
    rules: &[ActionRule],
    x: &[Value],
    m: Measure,
    train: &Dataset,
) -> Option<Vec<Value>> {
    let mut best: Option<(&ActionRule, f64)> = None;
    for r in rules {
        if !r.source_conditions().iter().all(|c| c.holds(x)) {
            continue;
        }
        let q = m.evaluate(&r.stats.source);
        let better =
            best.is_none_or(|(b, bq)| q > bq || (q == bq && r.stats.source.p > b.stats.source.p));
        if better {
            best = Some((r, q));
        }
    }
    let (rule, _) = best?;
    let mut out = x.to_vec();
    for a in &rule.premise {
        if let Some(t) = a.target {
            if !t.holds(&out) {
                out[a.attribute] = realize_condition(&t, train);
            }
        }
    }
    Some(out)
}
