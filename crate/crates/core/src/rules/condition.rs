use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{format_number, AttributeKind, Dataset, Value};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Relation {
    /// Nominal equality; the payload indexes the attribute domain.
    Equals(usize),
    Less(f64),
    GreaterEq(f64),
    /// Half-open interval `[lower, upper)`, produced by merging.
    Within(f64, f64),
}

/// Elementary condition `attribute relation value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: usize,
    pub relation: Relation,
}

impl Condition {
    pub fn equals(attribute: usize, value: usize) -> Self {
        Condition {
            attribute,
            relation: Relation::Equals(value),
        }
    }

    pub fn less(attribute: usize, threshold: f64) -> Self {
        Condition {
            attribute,
            relation: Relation::Less(threshold),
        }
    }

    pub fn greater_eq(attribute: usize, threshold: f64) -> Self {
        Condition {
            attribute,
            relation: Relation::GreaterEq(threshold),
        }
    }

    pub fn within(attribute: usize, lower: f64, upper: f64) -> Self {
        Condition {
            attribute,
            relation: Relation::Within(lower, upper),
        }
    }

    pub fn holds_on(&self, value: Value) -> bool {
        match (self.relation, value) {
            (Relation::Equals(v), Value::Nominal(x)) => v == x,
            (Relation::Less(t), Value::Numeric(x)) => x < t,
            (Relation::GreaterEq(t), Value::Numeric(x)) => x >= t,
            (Relation::Within(lo, hi), Value::Numeric(x)) => x >= lo && x < hi,
            _ => false,
        }
    }

    pub fn holds(&self, values: &[Value]) -> bool {
        self.holds_on(values[self.attribute])
    }

    /// Equality goes with nominal attributes, the rest with numeric ones.
    pub fn fits(&self, ds: &Dataset) -> bool {
        let kind = ds.attribute(self.attribute).kind;
        matches!(
            (self.relation, kind),
            (Relation::Equals(_), AttributeKind::Nominal)
                | (Relation::Less(_), AttributeKind::Numeric)
                | (Relation::GreaterEq(_), AttributeKind::Numeric)
                | (Relation::Within(_, _), AttributeKind::Numeric)
        )
    }

    /// Numeric thresholds mentioned by the condition.
    pub fn thresholds(&self) -> Vec<f64> {
        match self.relation {
            Relation::Equals(_) => Vec::new(),
            Relation::Less(t) | Relation::GreaterEq(t) => vec![t],
            Relation::Within(lo, hi) => vec![lo, hi],
        }
    }

    pub fn display<'a>(&'a self, ds: &'a Dataset) -> ConditionDisplay<'a> {
        ConditionDisplay { cond: self, ds }
    }
}

pub struct ConditionDisplay<'a> {
    cond: &'a Condition,
    ds: &'a Dataset,
}

impl fmt::Display for ConditionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let attr = self.ds.attribute(self.cond.attribute);
        match self.cond.relation {
            Relation::Equals(v) => write!(f, "{}={}", attr.name, attr.domain[v]),
            Relation::Less(t) => write!(f, "{}<{}", attr.name, format_number(t)),
            Relation::GreaterEq(t) => write!(f, "{}>={}", attr.name, format_number(t)),
            Relation::Within(lo, hi) => write!(
                f,
                "{} in [{}, {})",
                attr.name,
                format_number(lo),
                format_number(hi)
            ),
        }
    }
}

pub fn premise_holds(premise: &[Condition], values: &[Value]) -> bool {
    premise.iter().all(|c| c.holds(values))
}

/// Collapses numeric conditions on the same attribute into one bound or
/// interval and drops repeated nominal conditions. Coverage is unchanged.
/// Attributes keep the position of their first condition.
pub fn merge_conditions(premise: &[Condition]) -> Vec<Condition> {
    let mut out: Vec<Condition> = Vec::new();
    let mut done: Vec<usize> = Vec::new();
    for c in premise {
        if done.contains(&c.attribute) {
            continue;
        }
        done.push(c.attribute);
        let same: Vec<&Condition> = premise
            .iter()
            .filter(|o| o.attribute == c.attribute)
            .collect();
        let mut lower: Option<f64> = None;
        let mut upper: Option<f64> = None;
        for o in &same {
            match o.relation {
                Relation::Equals(_) => {
                    if !out.contains(o) {
                        out.push(**o);
                    }
                }
                Relation::Less(t) => upper = Some(upper.map_or(t, |u| u.min(t))),
                Relation::GreaterEq(t) => lower = Some(lower.map_or(t, |l| l.max(t))),
                Relation::Within(lo, hi) => {
                    lower = Some(lower.map_or(lo, |l| l.max(lo)));
                    upper = Some(upper.map_or(hi, |u| u.min(hi)));
                }
            }
        }
        match (lower, upper) {
            (Some(lo), Some(hi)) => out.push(Condition::within(c.attribute, lo, hi)),
            (Some(lo), None) => out.push(Condition::greater_eq(c.attribute, lo)),
            (None, Some(hi)) => out.push(Condition::less(c.attribute, hi)),
            (None, None) => {}
        }
    }
    out
}
