mod common;

use common::criteria::{comp3_strategy, golden, prop_comp3, COMP3_CASES, GOLDEN};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: COMP3_CASES, ..ProptestConfig::default() })]

    #[test]
    fn flattened_derivability_matches_flattened_support((u, theta, phi, w) in comp3_strategy()) {
        prop_comp3(&u, &theta, &phi, w)?;
    }
}

fn check(name: &str) {
    let (_, gamma, phi) = GOLDEN.iter().find(|g| g.0 == name).unwrap();
    let (got, want) = golden(name, gamma, phi);
    assert_eq!(got, want, "golden file {name} differs");
}

#[test]
fn golden_implication() {
    check("implication");
}

#[test]
fn golden_conjunction() {
    check("conjunction");
}

#[test]
fn golden_disjunction() {
    check("disjunction");
}
