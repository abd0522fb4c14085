//! Flattening maps and the base 𝒩 that encodes NJ as base rules.
//!
//! Compound formulas receive fresh atoms `#f0`, `#f1`, ... in order of size.
//! An extended atom `⟨P,b⟩_𝒫` with a non-empty local base is represented by
//! the mangled predicate `P@𝒫`; bottom flattens to the reserved atom `#bot`.

use crate::derive;
use crate::error::{Error, Result};
use crate::semantics::{self, Evaluator};
use crate::syntax::{name, Atom, Base, BaseRef, Formula, InfAtom, Inferon, Polarity, Premise, Rule, Site, Universe};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub const BOT_ATOM: &str = "#bot";

#[derive(Clone, Debug)]
pub struct FlatMap {
    /// Γ′ ordered by size, then structurally.
    pub domain: Vec<Formula>,
    pub vocabulary: Vec<InfAtom>,
    flat: BTreeMap<Formula, Formula>,
    minus: BTreeMap<Formula, InfAtom>,
    natural: BTreeMap<Formula, Formula>,
    natural_minus: BTreeMap<InfAtom, Formula>,
    extended: BTreeMap<InfAtom, (InfAtom, BaseRef)>,
}

fn size(f: &Formula) -> usize {
    1 + f.children().iter().map(|c| size(c)).sum::<usize>()
}

fn collect(f: &Formula, out: &mut BTreeSet<Formula>) -> Result<()> {
    match f {
        Formula::ForAll(..) | Formula::Exists(..) | Formula::Box(..) | Formula::Diamond(..) => {
            Err(Error::Unsupported(format!("flattening needs a propositional formula, got `{f}`")))
        }
        _ => {
            out.insert(f.clone());
            f.children().into_iter().try_for_each(|c| collect(c, out))
        }
    }
}

impl FlatMap {
    /// `φ♭`.
    pub fn flat(&self, f: &Formula) -> Option<&Formula> {
        self.flat.get(f)
    }

    /// `φ♭⁻`.
    pub fn minus(&self, f: &Formula) -> Option<&InfAtom> {
        self.minus.get(f)
    }

    /// `♮`, inverse of `♭`.
    pub fn natural(&self, f: &Formula) -> Option<&Formula> {
        self.natural.get(f)
    }

    /// `♮⁻`, inverse of `♭⁻`.
    pub fn natural_minus(&self, a: &InfAtom) -> Option<&Formula> {
        self.natural_minus.get(a)
    }

    /// For a mangled atom, the plain atom and the local base it stands for.
    pub fn extended(&self, a: &InfAtom) -> Option<&(InfAtom, BaseRef)> {
        self.extended.get(a)
    }

    pub fn bot_atom() -> InfAtom {
        InfAtom::prop(BOT_ATOM, Polarity::One)
    }

    /// Whether `φ♭⁻` holds outright in `base`.
    fn holds(&self, base: &Base, a: &InfAtom) -> bool {
        let empty = Site::empty();
        if *a == Self::bot_atom() {
            // Bottom at base level: every quantified inferonic atom, fresh ones included.
            return self.vocabulary.iter().chain(&fresh_pair()).all(|v| derive::derives(base, &empty, v));
        }
        match self.extended.get(a) {
            Some((plain, local)) => derive::derives(&base.union(local), &empty, plain),
            None => derive::derives(base, &empty, a),
        }
    }
}

fn fresh_pair() -> [InfAtom; 2] {
    Polarity::BOTH.map(|p| InfAtom::prop(crate::syntax::FRESH, p))
}

/// Builds `♭`, `♭⁻` and their inverses over the subformula closure of `Γ ∪ {φ}`.
pub fn flatten(u: &Universe, gamma: &[Formula], phi: &Formula) -> Result<FlatMap> {
    let mut set = BTreeSet::new();
    for f in gamma.iter().chain(std::iter::once(phi)) {
        collect(&f.expand()?, &mut set)?;
    }
    let mut domain: Vec<Formula> = set.into_iter().collect();
    domain.sort_by(|a, b| size(a).cmp(&size(b)).then_with(|| a.cmp(b)));
    let mut fm = FlatMap {
        domain: Vec::new(),
        vocabulary: u.vocabulary(),
        flat: BTreeMap::new(),
        minus: BTreeMap::new(),
        natural: BTreeMap::new(),
        natural_minus: BTreeMap::new(),
        extended: BTreeMap::new(),
    };
    let empty: BaseRef = Arc::new(Base::empty());
    let mut fresh = 0usize;
    for f in &domain {
        let (flat, minus) = match f {
            Formula::Bot => (Formula::Bot, FlatMap::bot_atom()),
            Formula::Inferon(i) => {
                let plain = i.iatom()?;
                let minus = if i.base.is_empty() {
                    plain
                } else {
                    let mangled = InfAtom {
                        atom: Atom { pred: name(&format!("{}@{}", i.atom.pred, i.base.name)), args: i.atom.args.clone() },
                        pol: i.pol,
                    };
                    fm.extended.insert(mangled.clone(), (plain, i.base.clone()));
                    mangled
                };
                (f.clone(), minus)
            }
            _ => {
                let a = Atom::prop(&format!("#f{fresh}"));
                fresh += 1;
                (
                    Formula::Inferon(Inferon::new(a.clone(), empty.clone(), Polarity::One)),
                    InfAtom { atom: a, pol: Polarity::One },
                )
            }
        };
        fm.natural.insert(flat.clone(), f.clone());
        fm.natural_minus.insert(minus.clone(), f.clone());
        fm.flat.insert(f.clone(), flat);
        fm.minus.insert(f.clone(), minus);
    }
    fm.domain = domain;
    Ok(fm)
}

/// The base 𝒩: rule schemas 1 to 9 instantiated over the domain and vocabulary.
pub fn build_base_n(fm: &FlatMap) -> Base {
    let m = |f: &Formula| fm.minus[f].clone();
    let bare = Premise::bare;
    let hyp = |h: InfAtom, g: InfAtom| Premise { hyps: BTreeSet::from([h]), goal: g };
    let rule = |premises: Vec<Premise>, concl: InfAtom| Rule { premises, concl };
    let mut rules = BTreeSet::new();
    for f in &fm.domain {
        match f {
            Formula::Implies(a, b) => {
                let (a, b, ab) = (m(a), m(b), m(f));
                rules.insert(rule(vec![hyp(a.clone(), b.clone())], ab.clone()));
                rules.insert(rule(vec![bare(ab), bare(a)], b));
            }
            Formula::And(a, b) => {
                let (a, b, ab) = (m(a), m(b), m(f));
                rules.insert(rule(vec![bare(a.clone()), bare(b.clone())], ab.clone()));
                rules.insert(rule(vec![bare(ab.clone())], a));
                rules.insert(rule(vec![bare(ab)], b));
            }
            Formula::Or(a, b) => {
                let (a, b, ab) = (m(a), m(b), m(f));
                rules.insert(rule(vec![bare(a.clone())], ab.clone()));
                rules.insert(rule(vec![bare(b.clone())], ab.clone()));
                for p in &fm.vocabulary {
                    rules.insert(rule(
                        vec![bare(ab.clone()), hyp(a.clone(), p.clone()), hyp(b.clone(), p.clone())],
                        p.clone(),
                    ));
                }
            }
            _ => {}
        }
    }
    for p in &fm.vocabulary {
        rules.insert(rule(vec![bare(FlatMap::bot_atom())], p.clone()));
    }
    Base::new("N", rules)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comp3Report {
    /// `Γ♭⁻ ⊢_ℬ φ♭⁻`, read through the extension characterization.
    pub derivable: bool,
    /// `Γ♭ ⊩_ℬ φ♭`.
    pub supported: bool,
    pub agree: bool,
    /// First extension on which the derivability side fails, if any.
    pub witness: Option<Vec<String>>,
}

/// Evaluates both sides of the flattened equivalence at `base`.
///
/// The derivability side enumerates extensions directly and asks [`derive`];
/// the support side goes through the evaluator, sites included.
pub fn check_comp3(u: &Universe, gamma: &[Formula], phi: &Formula, base: &Base, cfg: &semantics::Config) -> Result<Comp3Report> {
    let fm = flatten(u, gamma, phi)?;
    let g_minus: Vec<InfAtom> = gamma.iter().map(|g| Ok(fm.minus[&g.expand()?].clone())).collect::<Result<_>>()?;
    let phi_e = phi.expand()?;
    let goal = fm.minus[&phi_e].clone();

    let mut witness = None;
    for ext in semantics::extensions(u, base)? {
        if g_minus.iter().all(|a| fm.holds(&ext, a)) && !fm.holds(&ext, &goal) {
            let have: BTreeSet<&Rule> = base.rules.iter().collect();
            witness = Some(ext.rules.iter().filter(|r| !have.contains(r)).map(|r| r.to_string()).collect());
            break;
        }
    }
    let derivable = witness.is_none();

    let g_flat: Vec<Formula> = gamma.iter().map(|g| Ok(fm.flat[&g.expand()?].clone())).collect::<Result<_>>()?;
    let supported = Evaluator::new(u, cfg.clone()).sequent(base, &Site::empty(), &g_flat, &fm.flat[&phi_e])?;
    Ok(Comp3Report { derivable, supported, agree: derivable == supported, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_model, Model};

    fn model() -> Model {
        parse_model("base E { }\nbase P { => <p,1>. }\npred q/0\ncandidates { => <q,1>. }").unwrap()
    }

    #[test]
    fn fixed_points_and_injectivity() {
        let mut m = model();
        let i = parse_formula(&mut m, "<p @ P,1>").unwrap();
        let j = parse_formula(&mut m, "<q @ E,1>").unwrap();
        let c = Formula::and(i.clone(), j.clone());
        let fm = flatten(&m.universe, &[Formula::Bot], &c).unwrap();
        assert_eq!(fm.flat(&i), Some(&i));
        assert_eq!(fm.flat(&Formula::Bot), Some(&Formula::Bot));
        let cf = fm.flat(&c).unwrap();
        assert!(cf != &i && cf != &j);
        for f in &fm.domain {
            assert_eq!(fm.natural(fm.flat(f).unwrap()), Some(f));
            assert_eq!(fm.natural_minus(fm.minus(f).unwrap()), Some(f));
        }
        assert_eq!(fm.minus(&j).unwrap().to_string(), "<q,1>");
        assert_eq!(fm.minus(&i).unwrap().to_string(), "<p@P,1>");
        let q = parse_formula(&mut m, "all x. <q @ E,1>").unwrap();
        assert!(flatten(&m.universe, &[], &q).is_err());
    }

    #[test]
    fn implication_rules_once_each() {
        let mut m = model();
        let f = parse_formula(&mut m, "<q @ E,1> -> <q @ E,0>").unwrap();
        let n = build_base_n(&flatten(&m.universe, &[], &f).unwrap());
        let non9: Vec<_> = n.rules.iter().filter(|r| r.premises.first().map(|p| p.goal.atom.pred.as_ref()) != Some(BOT_ATOM)).collect();
        assert_eq!(non9.len(), 2);
        assert_eq!(n.rules.len(), 2 + m.universe.vocabulary().len());
    }

    #[test]
    fn comp3_trivial_cases() {
        let mut m = model();
        let i = parse_formula(&mut m, "<p @ P,1>").unwrap();
        let q = parse_formula(&mut m, "<q @ E,1>").unwrap();
        let cfg = semantics::Config::default();
        let r = check_comp3(&m.universe, &[], &i, &Base::empty(), &cfg).unwrap();
        assert!(r.derivable && r.supported && r.agree);
        let r = check_comp3(&m.universe, std::slice::from_ref(&q), &q, &Base::empty(), &cfg).unwrap();
        assert!(r.agree && r.derivable);
        let r = check_comp3(&m.universe, &[], &q, &Base::empty(), &cfg).unwrap();
        assert!(r.agree && !r.derivable);
    }
}
