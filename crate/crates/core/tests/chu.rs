mod common;

use common::criteria::{chu_sweep, chu_witness};

#[test]
fn flashlight_passes_and_mutant_fails_with_witness() {
    chu_witness().unwrap();
}

#[test]
fn chu_equivalence_up_to_complexity_seven() {
    let n = chu_sweep().unwrap_or_else(|e| panic!("{e}"));
    assert!(n > 1_000_000);
}
