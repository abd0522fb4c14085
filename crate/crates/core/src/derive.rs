//! Exact atomic derivability `𝔓 ⊢_B ι` for finite bases with hypothetical premises.
//!
//! The closure of a context is a monotone fixpoint computed in rounds. A premise
//! that discharges hypotheses outside the current context is decided by the
//! closure of the enlarged context, which is strictly bigger, so the recursion
//! is well founded. The round in which an atom first appears is its rank; tree
//! extraction only descends to premises of smaller rank and therefore terminates.

use crate::error::{Error, Result};
use crate::syntax::{Base, InfAtom, Rule, Site, Universe};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationTree {
    /// The conclusion is a context member or a hypothesis discharged below.
    Ref(InfAtom),
    App { rule: Rule, premises: Vec<Discharge> },
}

/// One premise subtree together with the hypotheses it may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discharge {
    pub hyps: BTreeSet<InfAtom>,
    pub tree: DerivationTree,
}

impl DerivationTree {
    pub fn conclusion(&self) -> &InfAtom {
        match self {
            DerivationTree::Ref(a) => a,
            DerivationTree::App { rule, .. } => &rule.concl,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            DerivationTree::Ref(_) => 1,
            DerivationTree::App { premises, .. } => 1 + premises.iter().map(|d| d.tree.size()).sum::<usize>(),
        }
    }

    fn replay(&self, base: &Base, avail: &BTreeSet<InfAtom>) -> std::result::Result<(), String> {
        match self {
            DerivationTree::Ref(a) if avail.contains(a) => Ok(()),
            DerivationTree::Ref(a) => Err(format!("{a} is neither in the context nor discharged")),
            DerivationTree::App { rule, premises } => {
                if !base.rules.contains(rule) {
                    return Err(format!("rule `{rule}` is not in base {}", base.name));
                }
                if rule.premises.len() != premises.len() {
                    return Err(format!("rule `{rule}` applied to {} premises", premises.len()));
                }
                for (want, got) in rule.premises.iter().zip(premises) {
                    if want.hyps != got.hyps || want.goal != *got.tree.conclusion() {
                        return Err(format!("premise `{want}` of `{rule}` is not matched"));
                    }
                    let mut inner = avail.clone();
                    inner.extend(got.hyps.iter().cloned());
                    got.tree.replay(base, &inner)?;
                }
                Ok(())
            }
        }
    }

    /// Replaces open occurrences of `p` by `d`.
    fn plug(&self, p: &InfAtom, d: &DerivationTree, discharged: bool) -> DerivationTree {
        match self {
            DerivationTree::Ref(a) if a == p && !discharged => d.clone(),
            DerivationTree::Ref(_) => self.clone(),
            DerivationTree::App { rule, premises } => DerivationTree::App {
                rule: rule.clone(),
                premises: premises
                    .iter()
                    .map(|x| Discharge {
                        hyps: x.hyps.clone(),
                        tree: x.tree.plug(p, d, discharged || x.hyps.contains(p)),
                    })
                    .collect(),
            },
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            DerivationTree::Ref(a) => writeln!(f, "{pad}{a}  [Ref]"),
            DerivationTree::App { rule, premises } => {
                writeln!(f, "{pad}{}  [App {rule}]", rule.concl)?;
                premises.iter().try_for_each(|d| d.tree.write(f, indent + 1))
            }
        }
    }
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// A derivation tree together with the base and context it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub base: Base,
    pub context: Site,
    pub tree: DerivationTree,
}

impl Derivation {
    pub fn conclusion(&self) -> &InfAtom {
        self.tree.conclusion()
    }

    /// Independent replay: checks every step against the base and the available atoms.
    pub fn check(&self) -> std::result::Result<(), String> {
        self.tree.replay(&self.base, &self.context.0)
    }
}

#[derive(Clone, Debug)]
struct CompiledRule {
    premises: Vec<(Vec<u32>, u32)>,
    concl: u32,
}

#[derive(Debug, Default)]
struct Closure {
    rank: HashMap<u32, u32>,
}

/// Derivability engine for one fixed rule set. Closures are memoised per
/// context, so repeated queries against the same base are cheap.
#[derive(Debug)]
pub struct Engine {
    ids: HashMap<InfAtom, u32>,
    atoms: Vec<InfAtom>,
    rules: Rc<Vec<CompiledRule>>,
    source: Vec<Rule>,
    memo: HashMap<Vec<u32>, Rc<Closure>>,
}

impl Engine {
    /// Rules keep the order given; that order is the tie-break for extraction.
    pub fn new<'a>(rules: impl IntoIterator<Item = &'a Rule>) -> Engine {
        let mut e = Engine {
            ids: HashMap::new(),
            atoms: Vec::new(),
            rules: Rc::new(Vec::new()),
            source: Vec::new(),
            memo: HashMap::new(),
        };
        let mut compiled = Vec::new();
        for r in rules {
            let premises = r
                .premises
                .iter()
                .map(|p| {
                    let mut h: Vec<u32> = p.hyps.iter().map(|a| e.intern(a)).collect();
                    h.sort_unstable();
                    (h, e.intern(&p.goal))
                })
                .collect();
            compiled.push(CompiledRule { premises, concl: e.intern(&r.concl) });
            e.source.push(r.clone());
        }
        e.rules = Rc::new(compiled);
        e
    }

    pub fn for_base(base: &Base) -> Engine {
        Engine::new(&base.rules)
    }

    fn intern(&mut self, a: &InfAtom) -> u32 {
        if let Some(&i) = self.ids.get(a) {
            return i;
        }
        let i = self.atoms.len() as u32;
        self.atoms.push(a.clone());
        self.ids.insert(a.clone(), i);
        i
    }

    fn context_ids(&mut self, context: &Site) -> Vec<u32> {
        let mut v: Vec<u32> = context.iter().map(|a| self.intern(a)).collect();
        v.sort_unstable();
        v
    }

    fn closure(&mut self, ctx: &[u32]) -> Rc<Closure> {
        if let Some(c) = self.memo.get(ctx) {
            return c.clone();
        }
        let rules = self.rules.clone();
        let mut hypothetical: Vec<Vec<Option<bool>>> = Vec::with_capacity(rules.len());
        for r in rules.iter() {
            let mut row = Vec::with_capacity(r.premises.len());
            for (hyps, goal) in &r.premises {
                if hyps.iter().all(|h| ctx.binary_search(h).is_ok()) {
                    row.push(None);
                } else {
                    let ext = merge(ctx, hyps);
                    row.push(Some(self.closure(&ext).rank.contains_key(goal)));
                }
            }
            hypothetical.push(row);
        }
        let mut rank: HashMap<u32, u32> = ctx.iter().map(|&a| (a, 0)).collect();
        let mut round = 0;
        loop {
            round += 1;
            let mut fresh = Vec::new();
            for (r, row) in rules.iter().zip(&hypothetical) {
                if rank.contains_key(&r.concl) || fresh.contains(&r.concl) {
                    continue;
                }
                let fires = r.premises.iter().zip(row).all(|((_, g), h)| match h {
                    Some(b) => *b,
                    None => rank.contains_key(g),
                });
                if fires {
                    fresh.push(r.concl);
                }
            }
            if fresh.is_empty() {
                break;
            }
            for c in fresh {
                rank.insert(c, round);
            }
        }
        let c = Rc::new(Closure { rank });
        self.memo.insert(ctx.to_vec(), c.clone());
        c
    }

    pub fn derives(&mut self, context: &Site, goal: &InfAtom) -> bool {
        let Some(&g) = self.ids.get(goal) else {
            return context.contains(goal);
        };
        let ctx = self.context_ids(context);
        self.closure(&ctx).rank.contains_key(&g)
    }

    /// Every atom derivable from the context.
    pub fn closure_of(&mut self, context: &Site) -> BTreeSet<InfAtom> {
        let ctx = self.context_ids(context);
        let c = self.closure(&ctx);
        c.rank.keys().map(|&i| self.atoms[i as usize].clone()).collect()
    }

    pub fn tree(&mut self, context: &Site, goal: &InfAtom) -> Option<DerivationTree> {
        if context.contains(goal) {
            return Some(DerivationTree::Ref(goal.clone()));
        }
        let g = *self.ids.get(goal)?;
        let ctx = self.context_ids(context);
        self.extract(&ctx, g)
    }

    fn extract(&mut self, ctx: &[u32], goal: u32) -> Option<DerivationTree> {
        if ctx.binary_search(&goal).is_ok() {
            return Some(DerivationTree::Ref(self.atoms[goal as usize].clone()));
        }
        let here = self.closure(ctx);
        let r = *here.rank.get(&goal)?;
        let rules = self.rules.clone();
        for (ri, rule) in rules.iter().enumerate().filter(|(_, x)| x.concl == goal) {
            let mut plan = Vec::new();
            let mut ok = true;
            for (hyps, g) in &rule.premises {
                let ext = merge(ctx, hyps);
                let fine = if ext.len() == ctx.len() {
                    here.rank.get(g).is_some_and(|&k| k < r)
                } else {
                    self.closure(&ext).rank.contains_key(g)
                };
                if !fine {
                    ok = false;
                    break;
                }
                plan.push((ext, *g));
            }
            if !ok {
                continue;
            }
            let mut premises = Vec::new();
            for ((ext, g), (hyps, _)) in plan.into_iter().zip(&rule.premises) {
                let tree = self.extract(&ext, g)?;
                let hyps = hyps.iter().map(|&h| self.atoms[h as usize].clone()).collect();
                premises.push(Discharge { hyps, tree });
            }
            return Some(DerivationTree::App { rule: self.source[ri].clone(), premises });
        }
        None
    }
}

fn merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn derives(base: &Base, context: &Site, goal: &InfAtom) -> bool {
    Engine::for_base(base).derives(context, goal)
}

pub fn derivation(base: &Base, context: &Site, goal: &InfAtom) -> Option<Derivation> {
    let tree = Engine::for_base(base).tree(context, goal)?;
    Some(Derivation { base: base.clone(), context: context.clone(), tree })
}

/// Everything derivable in `base` from `context`.
pub fn closure(base: &Base, context: &Site) -> BTreeSet<InfAtom> {
    Engine::for_base(base).closure_of(context)
}

/// From `𝔓 ⊢ p` and `𝔔, p ⊢ q` builds `𝔓, 𝔔 ⊢ q` by substituting the first
/// derivation for the open uses of `p` in the second.
pub fn cut(d1: &Derivation, d2: &Derivation) -> Result<Derivation> {
    if d1.base != d2.base {
        return Err(Error::BaseMismatch);
    }
    let p = d1.conclusion().clone();
    let mut rest = d2.context.clone();
    rest.0.remove(&p);
    Ok(Derivation {
        base: d1.base.clone(),
        context: d1.context.union(&rest),
        tree: d2.tree.plug(&p, &d1.tree, false),
    })
}

/// An atom derivable with both polarities, if any.
pub fn clash(base: &Base, u: &Universe) -> Option<InfAtom> {
    let d = closure(base, &Site::empty());
    d.iter()
        .filter(|a| a.pol == crate::syntax::Polarity::One && u.preds.contains_key(&a.atom.pred))
        .find(|a| d.contains(&InfAtom { atom: a.atom.clone(), pol: crate::syntax::Polarity::Zero }))
        .cloned()
}

pub fn consistent(base: &Base, u: &Universe) -> bool {
    clash(base, u).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Polarity, Premise};

    fn a(p: &str) -> InfAtom {
        InfAtom::prop(p, Polarity::One)
    }

    fn hyp(h: &[&str], g: &str) -> Premise {
        Premise { hyps: h.iter().map(|x| a(x)).collect(), goal: a(g) }
    }

    #[test]
    fn smoke_and_fire() {
        let b = Base::new("B+P1", [Rule::simple([a("P1")], a("P2")), Rule::axiom(a("P1"))]);
        let d = derivation(&b, &Site::empty(), &a("P2")).unwrap();
        d.check().unwrap();
        let DerivationTree::App { rule, premises } = &d.tree else { panic!() };
        assert_eq!(rule.level(), 1);
        assert!(matches!(&premises[0].tree, DerivationTree::App { rule, .. } if rule.level() == 0));
    }

    #[test]
    fn reflexivity_is_a_single_leaf() {
        let ctx: Site = [a("x")].into_iter().collect();
        let d = derivation(&Base::empty(), &ctx, &a("x")).unwrap();
        assert_eq!(d.tree, DerivationTree::Ref(a("x")));
        assert!(derivation(&Base::empty(), &Site::empty(), &a("x")).is_none());
    }

    #[test]
    fn hypothetical_premise_needs_its_support() {
        let level2 = Rule { premises: vec![hyp(&["p"], "q")], concl: a("r") };
        let with = Base::new("N", [level2.clone(), Rule::simple([a("p")], a("q"))]);
        let without = Base::new("N", [level2]);
        assert!(derives(&with, &Site::empty(), &a("r")));
        assert!(!derives(&without, &Site::empty(), &a("r")));
        derivation(&with, &Site::empty(), &a("r")).unwrap().check().unwrap();
    }

    #[test]
    fn cut_into_a_leaf_returns_the_first_derivation() {
        let b = Base::new("A", [Rule::axiom(a("p")), Rule::simple([a("p")], a("q"))]);
        let d1 = derivation(&b, &Site::empty(), &a("p")).unwrap();
        let ctx: Site = [a("p")].into_iter().collect();
        let leaf = Derivation { base: b.clone(), context: ctx.clone(), tree: DerivationTree::Ref(a("p")) };
        assert_eq!(cut(&d1, &leaf).unwrap().tree, d1.tree);
        let app = Derivation {
            base: b.clone(),
            context: ctx,
            tree: DerivationTree::App {
                rule: Rule::simple([a("p")], a("q")),
                premises: vec![Discharge { hyps: BTreeSet::new(), tree: DerivationTree::Ref(a("p")) }],
            },
        };
        let c = cut(&d1, &app).unwrap();
        c.check().unwrap();
        assert!(c.context.is_empty());
        let other = Derivation { base: Base::empty(), ..app };
        assert_eq!(cut(&d1, &other), Err(Error::BaseMismatch));
    }

    #[test]
    fn consistency() {
        let u = {
            let mut u = Universe::default();
            u.declare_pred("p", 0).unwrap();
            u
        };
        assert!(consistent(&Base::empty(), &u));
        let clash_base = Base::new("C", [Rule::axiom(InfAtom::prop("p", Polarity::Zero)), Rule::axiom(a("p"))]);
        assert!(!consistent(&clash_base, &u));
    }

    #[test]
    fn a_discharged_hypothesis_closes_a_branch() {
        // ((p => p) => q) needs nothing but Ref under the discharge.
        let b = Base::new("I", [Rule { premises: vec![hyp(&["p"], "p")], concl: a("q") }]);
        let d = derivation(&b, &Site::empty(), &a("q")).unwrap();
        d.check().unwrap();
        assert_eq!(d.tree.size(), 2);
    }
}
