#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;

use actrules::action::{ActionRule, ElementaryAction};
use actrules::data::{load_dataset, Schema};
use actrules::{Attribute, Condition, Dataset, Example, Measure, Mutability, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn load(name: &str) -> Dataset {
    let dir = data_dir();
    let schema = Schema::read(File::open(dir.join(format!("{name}.schema"))).unwrap()).unwrap();
    load_dataset(
        File::open(dir.join(format!("{name}.csv"))).unwrap(),
        &schema,
    )
    .unwrap()
}

pub fn eq(ds: &Dataset, attr: &str, value: &str) -> Condition {
    let a = ds.attribute_index(attr).unwrap();
    Condition::equals(a, ds.attribute(a).value_index(value).unwrap())
}

/// The stated grown Monk1 rule (a1=1 -> a1=3) (a2=2 -> a2=3) (a6=2 -> a6=2).
pub fn monk1_grown_rule(ds: &Dataset, m: Measure) -> ActionRule {
    let premise = vec![
        ElementaryAction::change(eq(ds, "a1", "1"), eq(ds, "a1", "3")),
        ElementaryAction::change(eq(ds, "a2", "2"), eq(ds, "a2", "3")),
        ElementaryAction::change(eq(ds, "a6", "2"), eq(ds, "a6", "2")),
    ];
    ActionRule::evaluated(
        premise,
        ds.class_index("0").unwrap(),
        ds.class_index("1").unwrap(),
        ds,
        m,
        m,
    )
}

/// Small random dataset: up to `max_attrs` attributes mixing nominal (2-3
/// values) and numeric (few distinct values, so ties occur), two classes.
pub fn random_dataset(seed: u64, max_rows: usize, max_attrs: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rng.random_range(6..=max_rows);
    let n_attrs = rng.random_range(1..=max_attrs);
    let mut attributes = Vec::new();
    for i in 0..n_attrs {
        let mutability = if rng.random_bool(0.25) {
            Mutability::Stable
        } else {
            Mutability::Flexible
        };
        if rng.random_bool(0.5) {
            let k = rng.random_range(2..=3);
            let names: Vec<String> = (0..k).map(|v| format!("v{v}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            attributes.push(Attribute::nominal(&format!("n{i}"), mutability, &refs));
        } else {
            attributes.push(Attribute::numeric(&format!("x{i}"), mutability));
        }
    }
    let examples = (0..rows)
        .map(|r| {
            let values = attributes
                .iter()
                .map(|a| match a.domain.len() {
                    0 => Value::Numeric(rng.random_range(0..6) as f64 * 0.5),
                    k => Value::Nominal(rng.random_range(0..k)),
                })
                .collect();
            let label = if r < 2 { r } else { rng.random_range(0..2) };
            Example { values, label }
        })
        .collect();
    Dataset::new(
        attributes,
        examples,
        vec!["c0".into(), "c1".into()],
        "class",
    )
    .unwrap()
}

/// Training set for the tonsils example: body temperature (numeric) and
/// pus on tonsils (No, Yes), classes ill = Yes / No.
pub fn tonsils() -> Dataset {
    let rows = [
        (39.0, 1, 0),
        (38.5, 1, 0),
        (38.2, 0, 0),
        (37.8, 0, 0),
        (37.9, 1, 0),
        (36.4, 0, 1),
        (36.5, 0, 1),
        (36.9, 0, 1),
        (36.2, 0, 1),
        (36.8, 1, 1),
    ];
    let examples = rows
        .iter()
        .map(|&(t, p, l)| Example {
            values: vec![Value::Numeric(t), Value::Nominal(p)],
            label: l,
        })
        .collect();
    Dataset::new(
        vec![
            Attribute::numeric("body_temperature", Mutability::Flexible),
            Attribute::nominal("pus_on_tonsils", Mutability::Flexible, &["No", "Yes"]),
        ],
        examples,
        vec!["Yes".into(), "No".into()],
        "ill",
    )
    .unwrap()
}

/// r1: (t>=38 -> t<36.6) AND (pus=Yes -> pus=No); r2: (t>=37.5 -> t<37) AND pus=No.
pub fn tonsils_rules(ds: &Dataset) -> Vec<ActionRule> {
    let r1 = vec![
        ElementaryAction::change(Condition::greater_eq(0, 38.0), Condition::less(0, 36.6)),
        ElementaryAction::change(
            eq(ds, "pus_on_tonsils", "Yes"),
            eq(ds, "pus_on_tonsils", "No"),
        ),
    ];
    let r2 = vec![
        ElementaryAction::change(Condition::greater_eq(0, 37.5), Condition::less(0, 37.0)),
        ElementaryAction::constraint(eq(ds, "pus_on_tonsils", "No")),
    ];
    [r1, r2]
        .into_iter()
        .map(|p| ActionRule::evaluated(p, 0, 1, ds, Measure::C2, Measure::C2))
        .collect()
}

/// Diabetes-like training set: Plas separates the classes (negatives in
/// 89..=122, positives in 155..=199), Mass is noise, Age is stable.
pub fn diabetes() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut examples = Vec::new();
    for i in 0..60 {
        let negative = i % 2 == 0;
        let plas = if i == 0 {
            89.0
        } else if negative {
            rng.random_range(90..=122) as f64
        } else {
            rng.random_range(155..=199) as f64
        };
        examples.push(Example {
            values: vec![
                Value::Numeric(plas),
                Value::Numeric(rng.random_range(20..=40) as f64 + 0.5),
                Value::Numeric(rng.random_range(21..=60) as f64),
            ],
            label: usize::from(negative),
        });
    }
    Dataset::new(
        vec![
            Attribute::numeric("Plas", Mutability::Flexible),
            Attribute::numeric("Mass", Mutability::Flexible),
            Attribute::numeric("Age", Mutability::Stable),
        ],
        examples,
        vec!["positive".into(), "negative".into()],
        "class",
    )
    .unwrap()
}

/// r1: (Plas>=154 -> Plas<123); r2: (Mass>=32 -> Mass<30) AND Age>=29.
pub fn diabetes_rules(ds: &Dataset) -> Vec<ActionRule> {
    let r1 = vec![ElementaryAction::change(
        Condition::greater_eq(0, 154.0),
        Condition::less(0, 123.0),
    )];
    let r2 = vec![
        ElementaryAction::change(Condition::greater_eq(1, 32.0), Condition::less(1, 30.0)),
        ElementaryAction::constraint(Condition::greater_eq(2, 29.0)),
    ];
    [r1, r2]
        .into_iter()
        .map(|p| ActionRule::evaluated(p, 0, 1, ds, Measure::C2, Measure::C2))
        .collect()
}

pub mod invariants;
pub mod oracle;
