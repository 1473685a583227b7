//! Separate-and-conquer induction of classification and action rules,
//! meta-table recommendations and a cross-validation harness.
//!
//! ```
//! use actrules::{Attribute, Dataset, Example, Measure, Mutability, Value};
//! use actrules::rules::induce_rules;
//!
//! let examples = (0..12)
//!     .map(|i| Example { values: vec![Value::Numeric(i as f64)], label: usize::from(i >= 6) })
//!     .collect();
//! let ds = Dataset::new(
//!     vec![Attribute::numeric("x", Mutability::Flexible)],
//!     examples,
//!     vec!["low".into(), "high".into()],
//!     "class",
//! )
//! .unwrap();
//! let rs = induce_rules(&ds, 1, 5, Measure::C2, Measure::C2, Measure::C2);
//! assert_eq!(rs.rules[0].display(&ds).to_string().split(" [").next(), Some("IF x>=5.5 THEN high"));
//! ```

pub mod action;
pub mod data;
pub mod dump;
pub mod error;
pub mod eval;
pub mod quality;
pub mod recommend;
pub mod rules;

pub use action::{ActionRule, ActionRuleSet, Direction, ElementaryAction, RuleSetReport};
pub use data::{
    Attribute, AttributeKind, Dataset, Example, Mutability, Query, Role, Schema, Value,
};
pub use error::{Error, Result};
pub use eval::{default_verifier, Strategy, Verifier};
pub use quality::{fdr_adjust, fisher_p_value, ConfusionMatrix, Measure};
pub use recommend::{MetaTable, Recommendation};
pub use rules::{ClassificationRule, Condition, Relation, RuleSet};
