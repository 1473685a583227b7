//! Synthetic inputs for the benchmarks.

use actrules::{Attribute, Dataset, Example, Mutability, Value};

/// `rows` examples over `nominal` three-valued and `numeric` real attributes,
/// labelled by a noisy threshold on the first numeric attribute. A small LCG
/// keeps the data identical across runs without extra dependencies.
pub fn synthetic(rows: usize, nominal: usize, numeric: usize) -> Dataset {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = move || {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        (state >> 33) as f64 / (1u64 << 31) as f64
    };
    let mut attributes = Vec::new();
    for i in 0..nominal {
        attributes.push(Attribute::nominal(
            &format!("n{i}"),
            Mutability::Flexible,
            &["a", "b", "c"],
        ));
    }
    for i in 0..numeric {
        attributes.push(Attribute::numeric(&format!("x{i}"), Mutability::Flexible));
    }
    let mut examples = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut values = Vec::with_capacity(nominal + numeric);
        for _ in 0..nominal {
            values.push(Value::Nominal((next() * 3.0) as usize % 3));
        }
        for _ in 0..numeric {
            values.push(Value::Numeric((next() * 1000.0).round() / 10.0));
        }
        let signal = match values.get(nominal) {
            Some(Value::Numeric(x)) => *x > 50.0,
            _ => matches!(values.first(), Some(Value::Nominal(0))),
        };
        let label = if r < 2 {
            r
        } else {
            usize::from(signal ^ (next() < 0.1))
        };
        examples.push(Example { values, label });
    }
    Dataset::new(
        attributes,
        examples,
        vec!["neg".into(), "pos".into()],
        "class",
    )
    .expect("synthetic data has both classes")
}
