//! Structured, name-keyed form of rule sets for files exchanged between
//! commands. Attribute values and classes are stored by name so a dump can
//! be bound to any dataset with the same schema.

use serde::{Deserialize, Serialize};

use crate::action::{ActionRule, ActionRuleSet, ActionStats, Direction, ElementaryAction};
use crate::data::{AttributeKind, Dataset};
use crate::error::{Error, Result};
use crate::quality::{ConfusionMatrix, Measure};
use crate::rules::{ClassificationRule, Condition, Relation, RuleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum ConditionDump {
    #[serde(rename = "=")]
    Equals { attribute: String, value: String },
    #[serde(rename = "<")]
    Less { attribute: String, threshold: f64 },
    #[serde(rename = ">=")]
    GreaterEq { attribute: String, threshold: f64 },
    #[serde(rename = "in")]
    Within {
        attribute: String,
        lower: f64,
        upper: f64,
    },
}

impl ConditionDump {
    pub fn new(c: &Condition, ds: &Dataset) -> Self {
        let attr = ds.attribute(c.attribute);
        let attribute = attr.name.clone();
        match c.relation {
            Relation::Equals(v) => ConditionDump::Equals {
                attribute,
                value: attr.domain[v].clone(),
            },
            Relation::Less(threshold) => ConditionDump::Less {
                attribute,
                threshold,
            },
            Relation::GreaterEq(threshold) => ConditionDump::GreaterEq {
                attribute,
                threshold,
            },
            Relation::Within(lower, upper) => ConditionDump::Within {
                attribute,
                lower,
                upper,
            },
        }
    }

    fn attribute(&self) -> &str {
        match self {
            ConditionDump::Equals { attribute, .. }
            | ConditionDump::Less { attribute, .. }
            | ConditionDump::GreaterEq { attribute, .. }
            | ConditionDump::Within { attribute, .. } => attribute,
        }
    }

    pub fn bind(&self, ds: &Dataset) -> Result<Condition> {
        let name = self.attribute();
        let a = ds
            .attribute_index(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("unknown attribute `{name}`")))?;
        let attr = ds.attribute(a);
        let relation = match self {
            ConditionDump::Equals { value, .. } => {
                Relation::Equals(attr.value_index(value).ok_or_else(|| {
                    Error::SchemaMismatch(format!("value `{value}` not in the domain of `{name}`"))
                })?)
            }
            ConditionDump::Less { threshold, .. } => Relation::Less(*threshold),
            ConditionDump::GreaterEq { threshold, .. } => Relation::GreaterEq(*threshold),
            ConditionDump::Within { lower, upper, .. } => Relation::Within(*lower, *upper),
        };
        let c = Condition {
            attribute: a,
            relation,
        };
        if !c.fits(ds) {
            let kind = match attr.kind {
                AttributeKind::Nominal => "nominal",
                AttributeKind::Numeric => "numeric",
            };
            return Err(Error::SchemaMismatch(format!(
                "condition does not fit {kind} attribute `{name}`"
            )));
        }
        Ok(c)
    }
}

fn bind_class(name: &str, ds: &Dataset) -> Result<usize> {
    ds.class_index(name)
        .ok_or_else(|| Error::SchemaMismatch(format!("unknown class `{name}`")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRuleDump {
    pub text: String,
    pub premise: Vec<ConditionDump>,
    pub conclusion: String,
    pub stats: ConfusionMatrix,
    pub quality: f64,
    pub significance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSetDump {
    pub target: String,
    pub voting: Measure,
    pub default_class: String,
    pub rules: Vec<ClassificationRuleDump>,
}

impl RuleSetDump {
    pub fn new(rs: &RuleSet, ds: &Dataset) -> Self {
        RuleSetDump {
            target: ds.class_name(rs.target).to_string(),
            voting: rs.voting,
            default_class: ds.class_name(rs.default_class).to_string(),
            rules: rs
                .rules
                .iter()
                .map(|r| ClassificationRuleDump {
                    text: r.display(ds).to_string(),
                    premise: r
                        .premise
                        .iter()
                        .map(|c| ConditionDump::new(c, ds))
                        .collect(),
                    conclusion: ds.class_name(r.conclusion).to_string(),
                    stats: r.stats,
                    quality: r.quality,
                    significance: r.significance,
                })
                .collect(),
        }
    }

    pub fn bind(&self, ds: &Dataset) -> Result<RuleSet> {
        let rules = self
            .rules
            .iter()
            .map(|r| {
                Ok(ClassificationRule {
                    premise: r
                        .premise
                        .iter()
                        .map(|c| c.bind(ds))
                        .collect::<Result<_>>()?,
                    conclusion: bind_class(&r.conclusion, ds)?,
                    stats: r.stats,
                    quality: r.quality,
                    significance: r.significance,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RuleSet {
            rules,
            target: bind_class(&self.target, ds)?,
            voting: self.voting,
            default_class: bind_class(&self.default_class, ds)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDump {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<ConditionDump>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ConditionDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRuleDump {
    pub text: String,
    pub premise: Vec<ActionDump>,
    pub stats: ActionStats,
    pub source_quality: f64,
    pub target_quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRuleSetDump {
    pub direction: Direction,
    pub source: String,
    pub target: String,
    pub grow_measure: Measure,
    pub prune_measure: Measure,
    pub mincov: usize,
    pub rules: Vec<ActionRuleDump>,
}

impl ActionRuleSetDump {
    pub fn new(set: &ActionRuleSet, ds: &Dataset) -> Self {
        let cond = |c: &Option<Condition>| c.as_ref().map(|c| ConditionDump::new(c, ds));
        ActionRuleSetDump {
            direction: set.direction,
            source: ds.class_name(set.source_class).to_string(),
            target: ds.class_name(set.target_class).to_string(),
            grow_measure: set.grow_measure,
            prune_measure: set.prune_measure,
            mincov: set.mincov,
            rules: set
                .rules
                .iter()
                .map(|r| ActionRuleDump {
                    text: r.display(ds).to_string(),
                    premise: r
                        .premise
                        .iter()
                        .map(|a| ActionDump {
                            source: cond(&a.source),
                            target: cond(&a.target),
                        })
                        .collect(),
                    stats: r.stats,
                    source_quality: r.source_quality,
                    target_quality: r.target_quality,
                })
                .collect(),
        }
    }

    pub fn bind(&self, ds: &Dataset) -> Result<ActionRuleSet> {
        let source_class = bind_class(&self.source, ds)?;
        let target_class = bind_class(&self.target, ds)?;
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let mut premise = Vec::with_capacity(r.premise.len());
            for a in &r.premise {
                let source = a.source.as_ref().map(|c| c.bind(ds)).transpose()?;
                let target = a.target.as_ref().map(|c| c.bind(ds)).transpose()?;
                let attribute = match (source, target) {
                    (Some(s), Some(t)) if s.attribute != t.attribute => {
                        return Err(Error::SchemaMismatch(
                            "elementary action mixes two attributes".into(),
                        ))
                    }
                    (Some(c), _) | (None, Some(c)) => c.attribute,
                    (None, None) => {
                        return Err(Error::SchemaMismatch("empty elementary action".into()))
                    }
                };
                premise.push(ElementaryAction {
                    attribute,
                    source,
                    target,
                });
            }
            rules.push(ActionRule {
                premise,
                source_class,
                target_class,
                stats: r.stats,
                source_quality: r.source_quality,
                target_quality: r.target_quality,
            });
        }
        Ok(ActionRuleSet {
            rules,
            direction: self.direction,
            source_class,
            target_class,
            grow_measure: self.grow_measure,
            prune_measure: self.prune_measure,
            mincov: self.mincov,
        })
    }
}
