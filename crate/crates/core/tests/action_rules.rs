mod common;

use actrules::action::{
    characterize, induce_action_rules, normalize, prune_action_rule, ActionKind, ActionLearner,
    ActionRule, ActionRuleSet,
};
use actrules::recommend::best_action_rule_transform;
use actrules::rules::confusion;
use actrules::{Direction, Measure, Value};

use common::{eq, load, monk1_grown_rule};

#[test]
fn monk1_stated_rule_stats() {
    let ds = load("monk1");
    let raw = monk1_grown_rule(&ds, Measure::Precision);
    // Read literally, a6=2 -> a6=2 also restricts the target part.
    assert_eq!(raw.stats.counts(), (9, 1, 12, 0));
    let r = ActionRule::evaluated(
        normalize(&raw.premise),
        raw.source_class,
        raw.target_class,
        &ds,
        Measure::Precision,
        Measure::Precision,
    );
    assert_eq!(r.premise[2].kind(), ActionKind::Constraint);
    assert_eq!(r.stats.counts(), (9, 1, 17, 0));
    assert!((r.source_quality - 0.9).abs() < 1e-12);
    assert_eq!(r.target_quality, 1.0);
}

#[test]
fn monk1_rss_pruning() {
    let ds = load("monk1");
    let grown = monk1_grown_rule(&ds, Measure::Rss);
    let pruned = prune_action_rule(&grown, &ds, Measure::Rss, Measure::Rss);
    assert_eq!(
        pruned
            .display(&ds)
            .to_string()
            .split(" THEN")
            .next()
            .unwrap(),
        "IF (a1=1 -> a1=3) AND (-> a2=3)"
    );
    assert_eq!(pruned.stats.counts(), (31, 14, 17, 0));
    assert!(pruned.source_quality >= grown.source_quality);
    assert!(pruned.target_quality >= grown.target_quality);
}

#[test]
fn monk1_parts_and_characterization() {
    let ds = load("monk1");
    let pruned = prune_action_rule(
        &monk1_grown_rule(&ds, Measure::Rss),
        &ds,
        Measure::Rss,
        Measure::Rss,
    );
    let s = pruned.source_part();
    let t = pruned.target_part();
    assert_eq!(s.premise, vec![eq(&ds, "a1", "1")]);
    assert_eq!(t.premise, vec![eq(&ds, "a1", "3"), eq(&ds, "a2", "3")]);
    assert_eq!(s.conclusion, ds.class_index("0").unwrap());
    assert_eq!(t.conclusion, ds.class_index("1").unwrap());
    let set = ActionRuleSet {
        rules: vec![pruned],
        direction: Direction::Forward,
        source_class: 0,
        target_class: 1,
        grow_measure: Measure::Precision,
        prune_measure: Measure::Rss,
        mincov: 5,
    };
    let report = characterize(&set);
    assert_eq!(report.rules, 1.0);
    assert_eq!(report.conditions, 3.0);
    assert_eq!(report.actions, 1.0);
    assert!((report.source_precision - 31.0 / 45.0).abs() < 1e-12);
    assert_eq!(report.target_precision, 1.0);
    assert!((report.source_coverage - 31.0 / 62.0).abs() < 1e-12);
}

#[test]
fn best_rule_applies_the_target_part() {
    let ds = load("monk1");
    let pruned = prune_action_rule(
        &monk1_grown_rule(&ds, Measure::Rss),
        &ds,
        Measure::Rss,
        Measure::Rss,
    );
    let a1 = ds.attribute_index("a1").unwrap();
    let a2 = ds.attribute_index("a2").unwrap();
    let x = ds
        .examples()
        .iter()
        .find(|e| pruned.source_part().covers(&e.values) && !eq(&ds, "a2", "3").holds(&e.values))
        .unwrap();
    let out =
        best_action_rule_transform(std::slice::from_ref(&pruned), &x.values, Measure::Rss, &ds)
            .unwrap();
    assert_eq!(
        out[a1],
        Value::Nominal(ds.attribute(a1).value_index("3").unwrap())
    );
    assert_eq!(
        out[a2],
        Value::Nominal(ds.attribute(a2).value_index("3").unwrap())
    );
    for (i, (before, after)) in x.values.iter().zip(&out).enumerate() {
        if i != a1 && i != a2 {
            assert_eq!(before, after);
        }
    }
    let other = ds
        .examples()
        .iter()
        .find(|e| !pruned.source_part().covers(&e.values))
        .unwrap();
    assert!(best_action_rule_transform(&[pruned], &other.values, Measure::Rss, &ds).is_none());
}

#[test]
fn induced_sets_respect_coverage_and_stats() {
    for name in ["monk1", "vote", "iris-reduced"] {
        let ds = load(name);
        for direction in [Direction::Forward, Direction::Backward] {
            let set =
                induce_action_rules(&ds, 0, 1, direction, 5, Measure::C2, Measure::C2).unwrap();
            assert!(!set.rules.is_empty(), "{name} {direction}");
            for r in &set.rules {
                let s = confusion(&ds, &r.source_conditions(), 0);
                let t = confusion(&ds, &r.target_conditions(), 1);
                assert_eq!((s, t), (r.stats.source, r.stats.target));
                assert!(s.covered() >= 1 && t.covered() >= 1, "{name} {direction}");
                for a in &r.premise {
                    if ds.attribute(a.attribute).is_stable() {
                        assert_eq!(a.kind(), ActionKind::Constraint);
                    }
                }
            }
        }
    }
}

#[test]
fn forward_grow_trace_on_monk1() {
    let ds = load("monk1");
    let learner = ActionLearner::new(&ds, 0, 1, 5, Measure::Precision, Measure::Precision);
    let uncovered: Vec<bool> = ds.examples().iter().map(|e| e.label == 0).collect();
    let (premise, steps) = learner.grow(&[], &uncovered, Direction::Forward);
    assert_eq!(premise.len(), steps.len());
    // Source quality strictly improves step by step.
    for w in steps.windows(2) {
        assert!(w[1].source_quality > w[0].source_quality);
    }
}
