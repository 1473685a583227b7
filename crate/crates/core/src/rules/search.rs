//! Candidate condition generation and the greedy best-condition scan shared
//! by classification growing, both action-rule directions and
//! recommendation induction.
//!
//! Candidates are visited in a fixed order: attributes ascending; nominal
//! values in domain order; numeric thresholds ascending with `a < t` before
//! `a >= t`. A candidate replaces the incumbent only when its quality is
//! strictly higher, or equal with strictly larger coverage, so the first of
//! several fully tied candidates wins.

use crate::data::{AttributeKind, Dataset, Value};
use crate::quality::{ConfusionMatrix, Measure};

use super::condition::Condition;

/// Which attributes a scan may build conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeScope {
    All,
    Only(usize),
    Flexible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub condition: Condition,
    pub quality: f64,
    pub stats: ConfusionMatrix,
}

impl Candidate {
    pub fn covered(&self) -> u64 {
        self.stats.covered()
    }
}

/// Incumbent a candidate must beat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incumbent {
    pub quality: f64,
    pub covered: u64,
}

impl Incumbent {
    pub const NONE: Incumbent = Incumbent {
        quality: f64::NEG_INFINITY,
        covered: 0,
    };

    pub fn beaten_by(&self, quality: f64, covered: u64) -> bool {
        quality > self.quality || (quality == self.quality && covered > self.covered)
    }
}

pub struct ConditionSearch<'a> {
    pub ds: &'a Dataset,
    pub positive: usize,
    pub measure: Measure,
    pub mincov: usize,
    /// When set, mincov counts only covered examples flagged here.
    pub uncovered: Option<&'a [bool]>,
    pub scope: AttributeScope,
    pub filter: Option<&'a dyn Fn(&Condition) -> bool>,
}

impl<'a> ConditionSearch<'a> {
    pub fn new(ds: &'a Dataset, positive: usize, measure: Measure, mincov: usize) -> Self {
        ConditionSearch {
            ds,
            positive,
            measure,
            mincov,
            uncovered: None,
            scope: AttributeScope::All,
            filter: None,
        }
    }

    pub fn uncovered(mut self, mask: &'a [bool]) -> Self {
        self.uncovered = Some(mask);
        self
    }

    pub fn scope(mut self, scope: AttributeScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn filter(mut self, filter: &'a dyn Fn(&Condition) -> bool) -> Self {
        self.filter = Some(filter);
        self
    }

    fn in_scope(&self, attribute: usize) -> bool {
        match self.scope {
            AttributeScope::All => true,
            AttributeScope::Only(a) => a == attribute,
            AttributeScope::Flexible => !self.ds.attribute(attribute).is_stable(),
        }
    }

    fn totals(&self) -> (u64, u64) {
        let pos = self.ds.class_count(self.positive) as u64;
        (pos, self.ds.len() as u64 - pos)
    }

    /// Best admissible condition for extending a rule that covers `covered`
    /// (indices into the dataset), or `None` if nothing beats `incumbent`.
    pub fn best(&self, covered: &[usize], incumbent: Incumbent) -> Option<Candidate> {
        let (pos, neg) = self.totals();
        let mut best: Option<Candidate> = None;
        let mut bar = incumbent;
        let mut consider = |cond: Condition, p: u64, n: u64, fresh: u64| {
            if fresh < self.mincov as u64 {
                return;
            }
            if let Some(f) = self.filter {
                if !f(&cond) {
                    return;
                }
            }
            let stats = ConfusionMatrix::new(p, n, pos, neg);
            let q = self.measure.evaluate(&stats);
            if bar.beaten_by(q, p + n) {
                bar = Incumbent {
                    quality: q,
                    covered: p + n,
                };
                best = Some(Candidate {
                    condition: cond,
                    quality: q,
                    stats,
                });
            }
        };
        let examples = self.ds.examples();
        let fresh_of = |i: usize| self.uncovered.is_none_or(|m| m[i]);

        for a in 0..self.ds.attributes().len() {
            if !self.in_scope(a) {
                continue;
            }
            let attr = self.ds.attribute(a);
            match attr.kind {
                AttributeKind::Nominal => {
                    let k = attr.domain.len();
                    let mut counts = vec![(0u64, 0u64, 0u64); k];
                    for &i in covered {
                        if let Value::Nominal(v) = examples[i].values[a] {
                            let slot = &mut counts[v];
                            if examples[i].label == self.positive {
                                slot.0 += 1;
                            } else {
                                slot.1 += 1;
                            }
                            if fresh_of(i) {
                                slot.2 += 1;
                            }
                        }
                    }
                    for (v, &(p, n, fresh)) in counts.iter().enumerate() {
                        consider(Condition::equals(a, v), p, n, fresh);
                    }
                }
                AttributeKind::Numeric => {
                    let mut cells: Vec<(f64, bool, bool)> = covered
                        .iter()
                        .filter_map(|&i| {
                            examples[i].values[a]
                                .as_numeric()
                                .map(|x| (x, examples[i].label == self.positive, fresh_of(i)))
                        })
                        .collect();
                    cells.sort_by(|x, y| x.0.total_cmp(&y.0));
                    let (tp, tn, tf) = cells.iter().fold((0, 0, 0), |acc, c| {
                        (acc.0 + c.1 as u64, acc.1 + !c.1 as u64, acc.2 + c.2 as u64)
                    });
                    let (mut lp, mut ln, mut lf) = (0u64, 0u64, 0u64);
                    let mut j = 0;
                    while j < cells.len() {
                        let v = cells[j].0;
                        while j < cells.len() && cells[j].0 == v {
                            lp += cells[j].1 as u64;
                            ln += !cells[j].1 as u64;
                            lf += cells[j].2 as u64;
                            j += 1;
                        }
                        if j == cells.len() {
                            break;
                        }
                        let t = (v + cells[j].0) / 2.0;
                        consider(Condition::less(a, t), lp, ln, lf);
                        consider(Condition::greater_eq(a, t), tp - lp, tn - ln, tf - lf);
                    }
                }
            }
        }
        best
    }
}

/// Every candidate condition for a rule covering `covered`, in scan order.
pub fn possible_conditions(
    ds: &Dataset,
    covered: &[usize],
    scope: AttributeScope,
) -> Vec<Condition> {
    let mut out = Vec::new();
    for a in 0..ds.attributes().len() {
        let allowed = match scope {
            AttributeScope::All => true,
            AttributeScope::Only(x) => x == a,
            AttributeScope::Flexible => !ds.attribute(a).is_stable(),
        };
        if !allowed {
            continue;
        }
        let attr = ds.attribute(a);
        match attr.kind {
            AttributeKind::Nominal => {
                out.extend((0..attr.domain.len()).map(|v| Condition::equals(a, v)));
            }
            AttributeKind::Numeric => {
                let mut vals: Vec<f64> = covered
                    .iter()
                    .filter_map(|&i| ds.examples()[i].values[a].as_numeric())
                    .collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                for w in vals.windows(2) {
                    let t = (w[0] + w[1]) / 2.0;
                    out.push(Condition::less(a, t));
                    out.push(Condition::greater_eq(a, t));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, Example, Mutability};

    fn numeric_ds(values: &[f64]) -> Dataset {
        let examples = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Example {
                values: vec![Value::Numeric(v), Value::Nominal(i % 2)],
                label: i % 2,
            })
            .collect();
        Dataset::new(
            vec![
                Attribute::numeric("a", Mutability::Flexible),
                Attribute::nominal("b", Mutability::Flexible, &["Yes", "No"]),
            ],
            examples,
            vec!["p".into(), "q".into()],
            "d",
        )
        .unwrap()
    }

    #[test]
    fn adjacent_means_become_thresholds() {
        let ds = numeric_ds(&[5.0, 2.0, 3.0, 3.0]);
        let all: Vec<usize> = (0..ds.len()).collect();
        let conds = possible_conditions(&ds, &all, AttributeScope::Only(0));
        assert_eq!(
            conds,
            vec![
                Condition::less(0, 2.5),
                Condition::greater_eq(0, 2.5),
                Condition::less(0, 4.0),
                Condition::greater_eq(0, 4.0),
            ]
        );
    }

    #[test]
    fn nominal_conditions_follow_domain() {
        let ds = numeric_ds(&[1.0, 2.0]);
        let conds = possible_conditions(&ds, &[0, 1], AttributeScope::Only(1));
        assert_eq!(
            conds,
            vec![Condition::equals(1, 0), Condition::equals(1, 1)]
        );
    }

    #[test]
    fn single_value_yields_no_numeric_condition() {
        let ds = numeric_ds(&[7.0, 7.0, 7.0]);
        let all: Vec<usize> = (0..ds.len()).collect();
        assert!(possible_conditions(&ds, &all, AttributeScope::Only(0)).is_empty());
    }

    #[test]
    fn mincov_rejects_small_candidates() {
        let ds = numeric_ds(&[1.0, 2.0, 3.0, 4.0]);
        let all: Vec<usize> = (0..ds.len()).collect();
        let s = ConditionSearch::new(&ds, 0, Measure::Precision, 5);
        assert!(s.best(&all, Incumbent::NONE).is_none());
        let s = ConditionSearch::new(&ds, 0, Measure::Precision, 1);
        let best = s.best(&all, Incumbent::NONE).unwrap();
        // b=Yes isolates class p exactly.
        assert_eq!(best.condition, Condition::equals(1, 0));
        assert_eq!(best.quality, 1.0);
    }
}
