mod common;

#[test]
fn provable_sequents_are_supported_in_every_base() {
    if let Err(e) = common::criteria::soundness() {
        panic!("{e}");
    }
}
