mod common;

use common::criteria::*;
use common::gen;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: META_CASES, ..ProptestConfig::default() })]

    #[test]
    fn cut_composes_derivations(u in gen::universe(), ctx in proptest::collection::vec(gen::iatom(), 0..3),
                                i in 0..8usize, j in 0..8usize) {
        prop_cut(&u, &ctx, i, j)?;
    }

    #[test]
    fn derivability_is_monotone(u in gen::universe(), ctx in proptest::collection::vec(gen::iatom(), 0..3),
                                more in proptest::collection::vec(gen::iatom(), 0..3), goal in gen::iatom()) {
        prop_monotone(&u, &ctx, &more, &goal)?;
    }

    #[test]
    fn sites_are_axiom_bases(u in gen::universe(), ctx in proptest::collection::vec(gen::iatom(), 0..4), goal in gen::iatom()) {
        prop_site_base(&u, &ctx, &goal)?;
    }

    #[test]
    fn compound_elimination_preserves_support(u in gen::universe(), body in gen::plain(2), l in 0..3usize, b in 0..2u8,
                                               w in 0..3usize) {
        prop_compound(&u, &body, l, b, w)?;
    }

    #[test]
    fn empty_site_matches_site_free_support(u in gen::universe(), theta in proptest::collection::vec(gen::formula(2), 0..2),
                                            phi in gen::formula(2), w in 0..3usize) {
        prop_empty_site(&u, &theta, &phi, w)?;
    }

    #[test]
    fn implication_agrees_with_sequent(u in gen::universe(), a in gen::formula(2), c in gen::formula(2), w in 0..3usize,
                                       s in proptest::collection::vec(gen::iatom(), 0..2)) {
        prop_implication(&u, &a, &c, w, &s)?;
    }
}
