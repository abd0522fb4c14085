//! Brute-force oracles shared by the integration and acceptance suites.
//! Nothing here calls into the derivability engine.
#![allow(dead_code)]

pub mod criteria;
pub mod gen;

/// The core crate's directory, whichever crate includes these helpers.
pub fn core_dir() -> std::path::PathBuf {
    let here = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    if here.join("tests/golden").is_dir() {
        here
    } else {
        here.join("../core")
    }
}

use inferon::syntax::{Atom, InfAtom, Polarity, Premise, Rule, Site};
use std::collections::BTreeSet;

/// The four inferonic atoms of the exhaustive class, as bit positions 0..4.
pub const ATOMS: [(&str, Polarity); 4] =
    [("p", Polarity::One), ("p", Polarity::Zero), ("q", Polarity::One), ("r", Polarity::One)];

/// A rule over bit positions: premises are (hypothesis mask, goal bit).
#[derive(Clone, Debug)]
pub struct MaskRule {
    pub premises: Vec<(u8, u8)>,
    pub concl: u8,
}

/// 64 rules of levels 0 to 2 over the four atoms.
pub fn pool() -> Vec<MaskRule> {
    let mut out = Vec::new();
    let r = |premises: Vec<(u8, u8)>, concl| MaskRule { premises, concl };
    for z in 0..4 {
        out.push(r(vec![], z));
    }
    for x in 0..4 {
        for y in 0..4 {
            if x != y {
                out.push(r(vec![(0, x)], y));
            }
        }
    }
    for x in 0..4 {
        for y in x + 1..4 {
            for z in 0..4 {
                if z != x && z != y {
                    out.push(r(vec![(0, x), (0, y)], z));
                }
            }
        }
    }
    for x in 0..4u8 {
        for y in 0..4 {
            if x == y {
                continue;
            }
            // (x ⇒ y) ⇒ z for every z, y excluded: discharge into a fresh conclusion or back into x.
            for z in 0..4 {
                if z != y {
                    out.push(r(vec![(1 << x, y)], z));
                }
            }
        }
    }
    assert_eq!(out.len(), 64);
    out
}

pub fn iatom(bit: u8) -> InfAtom {
    let (p, pol) = ATOMS[bit as usize];
    InfAtom { atom: Atom::prop(p), pol }
}

pub fn to_rule(r: &MaskRule) -> Rule {
    let premises = r
        .premises
        .iter()
        .map(|&(h, g)| Premise { hyps: (0..4).filter(|b| h & (1 << b) != 0).map(iatom).collect(), goal: iatom(g) })
        .collect();
    Rule { premises, concl: iatom(r.concl) }
}

pub fn to_site(mask: u8) -> Site {
    Site((0..4).filter(|b| mask & (1 << b) != 0).map(iatom).collect::<BTreeSet<_>>())
}

/// Closures of all 16 contexts at once, by saturating a table until nothing changes.
pub fn closures(rules: &[&MaskRule]) -> [u8; 16] {
    let mut cl: [u8; 16] = std::array::from_fn(|s| s as u8);
    loop {
        let mut changed = false;
        for s in 0..16 {
            for r in rules {
                if cl[s] & (1 << r.concl) != 0 {
                    continue;
                }
                let fires = r.premises.iter().all(|&(h, g)| cl[s | h as usize] & (1 << g) != 0);
                if fires {
                    cl[s] |= 1 << r.concl;
                    changed = true;
                }
            }
        }
        if !changed {
            return cl;
        }
    }
}

/// Every subset of `0..n` with at most `k` elements, in lexicographic order.
pub fn small_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Compares the engine with the oracle on every base of at most four pool
/// rules, every context and every goal. Returns (questions asked, mismatches).
pub fn exhaustive_derive_sweep() -> (usize, Vec<String>) {
    let pool = pool();
    let rules: Vec<Rule> = pool.iter().map(to_rule).collect();
    let sites: Vec<Site> = (0..16u8).map(to_site).collect();
    let goals: Vec<InfAtom> = (0..4u8).map(iatom).collect();
    let mut asked = 0;
    let mut bad = Vec::new();
    for pick in small_subsets(pool.len(), 4) {
        let expected = closures(&pick.iter().map(|&i| &pool[i]).collect::<Vec<_>>());
        let mut engine = inferon::derive::Engine::new(pick.iter().map(|&i| &rules[i]));
        for (s, site) in sites.iter().enumerate() {
            for (g, goal) in goals.iter().enumerate() {
                asked += 1;
                let want = expected[s] & (1 << g) != 0;
                if engine.derives(site, goal) != want && bad.len() < 20 {
                    bad.push(format!("rules {pick:?}, context {site}, goal {goal}: oracle says {want}"));
                }
            }
        }
    }
    (asked, bad)
}
