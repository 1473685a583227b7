mod common;

use actrules::action::{ActionRule, ElementaryAction};
use actrules::recommend::{
    build_meta_table, induce_recommendations, interval_of, MetaKind, MetaTable,
};
use actrules::{Condition, Measure, Value};

use common::{diabetes, diabetes_rules, tonsils, tonsils_rules};

fn cuts(mt: &MetaTable, meta: usize) -> Vec<f64> {
    match &mt.attributes[meta].kind {
        MetaKind::Intervals { cuts, .. } => cuts.clone(),
        MetaKind::Nominal => panic!("nominal meta-attribute"),
    }
}

#[test]
fn cuts_are_the_sorted_distinct_thresholds() {
    let ds = diabetes();
    let premise = vec![
        ElementaryAction::change(Condition::less(0, 3.0), Condition::greater_eq(0, 5.0)),
        ElementaryAction::change(Condition::greater_eq(0, 7.0), Condition::less(0, 6.0)),
        ElementaryAction::constraint(Condition::less(0, 3.0)),
    ];
    let r = ActionRule::evaluated(premise, 0, 1, &ds, Measure::C2, Measure::C2);
    let mt = build_meta_table(&[r], &ds).unwrap();
    assert_eq!(cuts(&mt, 0), vec![3.0, 5.0, 6.0, 7.0]);
    assert_eq!(mt.attributes[0].arity(&ds), 5);
    assert_eq!(interval_of(&[3.0, 5.0, 6.0, 7.0], 6.5), 4);
}

#[test]
fn tonsils_meta_table() {
    let ds = tonsils();
    let mt = build_meta_table(&tonsils_rules(&ds), &ds).unwrap();
    assert_eq!(cuts(&mt, 0), vec![36.6, 37.0, 37.5, 38.0]);
    let cells: Vec<Vec<String>> = mt
        .meta_examples()
        .iter()
        .map(|m| mt.format_meta(m))
        .collect();
    let expected: Vec<Vec<String>> = (1..=5)
        .flat_map(|i| ["No", "Yes"].map(|p| vec![i.to_string(), p.to_string()]))
        .collect();
    assert_eq!(cells, expected);
    let x = [Value::Numeric(39.0), Value::Nominal(1)];
    assert_eq!(mt.format_meta(&mt.to_meta(&x)), vec!["5", "Yes"]);
    // (36.6, 37] is id 2.
    assert_eq!(
        mt.to_meta(&[Value::Numeric(37.0), Value::Nominal(0)])[0],
        Value::Numeric(2.0)
    );
}

#[test]
fn diabetes_walk_through() {
    let ds = diabetes();
    assert_eq!(ds.range(0).unwrap().0, 89.0);
    let mt = build_meta_table(&diabetes_rules(&ds), &ds).unwrap();
    assert_eq!(cuts(&mt, 0), vec![123.0, 154.0]);
    let x = [
        Value::Numeric(183.0),
        Value::Numeric(23.3),
        Value::Numeric(32.0),
    ];
    assert_eq!(mt.to_meta(&x)[0], Value::Numeric(3.0));
    let recs = induce_recommendations(&mt, &ds, &x, 1, 5, Measure::C2, 3);
    let top = &recs[0];
    assert_eq!(top.actions.len(), 1);
    let action = &top.actions[0];
    assert_eq!(ds.attribute(action.attribute).name, "Plas");
    assert_eq!(action.from, "(154, max)");
    assert_eq!(action.to, "(min, 123]");
    let v = action.value.as_numeric().unwrap();
    assert!((v - 106.0).abs() <= 0.5, "{v}");
    assert_eq!(top.realize(&x)[1..], x[1..]);
}

#[test]
fn example_already_in_the_region_needs_no_action() {
    let ds = diabetes();
    let mt = build_meta_table(&diabetes_rules(&ds), &ds).unwrap();
    let x = [
        Value::Numeric(100.0),
        Value::Numeric(23.3),
        Value::Numeric(32.0),
    ];
    let recs = induce_recommendations(&mt, &ds, &x, 1, 5, Measure::C2, 3);
    assert!(recs[0].actions.is_empty());
}
