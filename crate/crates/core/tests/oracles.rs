mod common;

use actrules::ConfusionMatrix;
use common::oracle::{fisher_by_enumeration, fisher_max_error, grow_oracle};

#[test]
fn enumeration_reference_is_sane() {
    assert_eq!(
        fisher_by_enumeration(&ConfusionMatrix::new(5, 0, 5, 5)),
        1.0 / 252.0
    );
    assert_eq!(
        fisher_by_enumeration(&ConfusionMatrix::new(0, 3, 4, 4)),
        1.0
    );
}

#[test]
fn fisher_matches_enumeration() {
    let err = fisher_max_error();
    assert!(err <= 1e-12, "{err:e}");
}

#[test]
fn grow_matches_brute_force() {
    let steps = grow_oracle(20).unwrap();
    assert!(steps > 20, "{steps}");
}
