//! Proptest strategies producing DSL text for small random universes.

use proptest::prelude::*;

pub const PREDS: [&str; 3] = ["p", "q", "r"];

pub fn iatom() -> impl Strategy<Value = String> {
    (0..3usize, 0..2u8).prop_map(|(p, b)| format!("<{},{}>", PREDS[p], b))
}

pub fn rule() -> impl Strategy<Value = String> {
    let premise = (proptest::option::weighted(0.3, iatom()), iatom()).prop_map(|(h, g)| match h {
        Some(h) => format!("({h} => {g})"),
        None => g,
    });
    (proptest::collection::vec(premise, 0..=2), iatom()).prop_map(|(ps, c)| format!("{} => {c}.", ps.join(", ")))
}

pub fn rules(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(rule(), 0..=max).prop_map(|v| v.join(" "))
}

/// A universe text with named bases A and B and a small candidate pool.
pub fn universe() -> impl Strategy<Value = String> {
    let axiom = iatom().prop_map(|a| format!("=> {a}."));
    let cand = prop_oneof![2 => axiom, 1 => rule()];
    (rules(3), rules(3), proptest::collection::vec(cand, 0..=3)).prop_map(|(a, b, c)| {
        format!("pred p/0 q/0 r/0\nbase A {{ {a} }}\nbase B {{ {b} }}\ncandidates {{ {} }}\n", c.join(" "))
    })
}

pub fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        8 => (0..3usize, 0..3usize, 0..2u8)
            .prop_map(|(x, l, b)| format!("<{} @ {}, {b}>", PREDS[x], ["empty", "A", "B"][l])),
        1 => Just("bot".to_string()),
    ]
}

/// Propositional formulas with at most `connectives` binary connectives.
pub fn formula(connectives: u32) -> BoxedStrategy<String> {
    leaf()
        .prop_recursive(connectives, connectives * 2 + 1, 2, |inner| {
            (inner.clone(), inner, 0..3usize).prop_map(|(a, b, op)| format!("({a} {} {b})", ["&", "|", "->"][op]))
        })
        .boxed()
}

pub fn plain(depth: u32) -> BoxedStrategy<String> {
    (0..3usize)
        .prop_map(|x| PREDS[x].to_string())
        .prop_recursive(depth, 8, 2, |inner| {
            (inner.clone(), inner, 0..3usize).prop_map(|(a, b, op)| format!("({a} {} {b})", ["&", "|", "->"][op]))
        })
        .boxed()
}
