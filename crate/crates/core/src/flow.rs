//! Inferomorphisms, channels over stocks, and site channels.
//!
//! A pre-inferomorphism `f: 𝒫 → 𝒫′` over `ℬ` carries a finite partial term map
//! `f∨` and a predicate renaming `f∧` (identity off its table). The Chu
//! condition is checked in the orientation used by the equivalence proof:
//! `⊢_{𝒞∪𝒫} R(f∨ t)` iff `⊢_{𝒞∪𝒫′} (f∧ R)(t)`.

use crate::derive;
use crate::error::{Error, Result};
use crate::semantics::{self, Evaluator};
use crate::syntax::{
    name, ChannelDecl, MorphismDecl, StockDecl, Atom, Base, BaseRef, Formula, InfAtom, Inferon, Model, Name, Polarity, Premise, Rule, Site, Term, Universe,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreInferomorphism {
    pub name: Name,
    pub source: BaseRef,
    pub target: BaseRef,
    pub ambient: BaseRef,
    pub down: BTreeMap<Term, Term>,
    pub up: BTreeMap<Name, Name>,
}

impl From<&MorphismDecl> for PreInferomorphism {
    fn from(d: &MorphismDecl) -> Self {
        PreInferomorphism {
            name: d.name.clone(),
            source: d.source.clone(),
            target: d.target.clone(),
            ambient: d.ambient.clone(),
            down: d.down.clone(),
            up: d.up.clone(),
        }
    }
}

impl PreInferomorphism {
    /// The identity on `base`, with `f∨` the identity on the given terms.
    pub fn identity(base: &BaseRef, ambient: &BaseRef, terms: &[Term]) -> PreInferomorphism {
        PreInferomorphism {
            name: name(&format!("id_{}", base.name)),
            source: base.clone(),
            target: base.clone(),
            ambient: ambient.clone(),
            down: terms.iter().map(|t| (t.clone(), t.clone())).collect(),
            up: BTreeMap::new(),
        }
    }

    pub fn up_pred(&self, p: &Name) -> Name {
        self.up.get(p).cloned().unwrap_or_else(|| p.clone())
    }

    pub fn down_term(&self, t: &Term) -> Option<Term> {
        self.down.get(t).cloned()
    }

    /// Checks arities of the renaming and closedness of the term table.
    pub fn validate(&self, u: &Universe) -> Result<()> {
        for (a, b) in &self.up {
            let (na, nb) = (u.preds.get(a), u.preds.get(b));
            match (na, nb) {
                (Some(x), Some(y)) if x == y => {}
                (Some(x), Some(y)) => {
                    return Err(Error::Arity { symbol: b.to_string(), expected: *x, found: *y });
                }
                _ => return Err(Error::Unresolved { kind: "predicate", name: format!("{a} or {b}") }),
            }
        }
        for (a, b) in &self.down {
            if !a.is_closed() || !b.is_closed() {
                return Err(Error::Flow(format!("term table of `{}` must map closed terms", self.name)));
            }
        }
        Ok(())
    }

    /// `f g` for `f: 𝒫 → 𝒫′` and `g: 𝒫′ → 𝒫″`.
    pub fn compose(&self, g: &PreInferomorphism) -> Result<PreInferomorphism> {
        if *self.target != *g.source {
            return Err(Error::Endpoint(format!("`{}` ends at {} but `{}` starts at {}", self.name, self.target.name, g.name, g.source.name)));
        }
        if *self.ambient != *g.ambient {
            return Err(Error::Endpoint("morphisms over different ambient bases".into()));
        }
        let down = g
            .down
            .iter()
            .filter_map(|(t, mid)| self.down_term(mid).map(|x| (t.clone(), x)))
            .collect();
        let mut preds: BTreeSet<Name> = self.up.keys().cloned().collect();
        preds.extend(g.up.keys().cloned());
        let up = preds
            .into_iter()
            .map(|p| {
                let q = g.up_pred(&self.up_pred(&p));
                (p, q)
            })
            .filter(|(p, q)| p != q)
            .collect();
        Ok(PreInferomorphism {
            name: name(&format!("{};{}", self.name, g.name)),
            source: self.source.clone(),
            target: g.target.clone(),
            ambient: self.ambient.clone(),
            down,
            up,
        })
    }

    fn on_source(&self, i: &Inferon) -> bool {
        *i.base == *self.source
    }

    /// `ι^{f,∧}`.
    pub fn up_inferon(&self, i: &Inferon) -> Inferon {
        if !self.on_source(i) {
            return i.clone();
        }
        Inferon::new(Atom { pred: self.up_pred(&i.atom.pred), args: i.atom.args.clone() }, self.target.clone(), i.pol)
    }

    /// `ι^{f,∨}`, absent when some argument is outside the term table.
    pub fn down_inferon(&self, i: &Inferon) -> Option<Inferon> {
        if !self.on_source(i) {
            return Some(i.clone());
        }
        let args = i.atom.args.iter().map(|t| self.down_term(t)).collect::<Option<Vec<_>>>()?;
        Some(Inferon::new(Atom { pred: i.atom.pred.clone(), args }, i.base.clone(), i.pol))
    }

    /// `φ^{f,∧}`; compound inferons are expanded first.
    pub fn apply_up(&self, f: &Formula) -> Result<Formula> {
        self.apply(f, &mut |i| Ok(Some(self.up_inferon(i))), true).map(|o| o.expect("up map is total"))
    }

    /// `φ^{f,∨}`, `None` where some required `f∨(t)` is undefined.
    pub fn apply_down(&self, f: &Formula) -> Result<Option<Formula>> {
        self.apply(f, &mut |i| Ok(self.down_inferon(i)), false)
    }

    fn apply(
        &self,
        f: &Formula,
        leaf: &mut dyn FnMut(&Inferon) -> Result<Option<Inferon>>,
        quantifiers_ok: bool,
    ) -> Result<Option<Formula>> {
        let two = |a: &Formula, b: &Formula, k: fn(Formula, Formula) -> Formula, leaf: &mut dyn FnMut(&Inferon) -> Result<Option<Inferon>>| {
            let x = self.apply(a, leaf, quantifiers_ok)?;
            let y = self.apply(b, leaf, quantifiers_ok)?;
            Ok(x.zip(y).map(|(x, y)| k(x, y)))
        };
        match f {
            Formula::Inferon(i) => Ok(leaf(i)?.map(Formula::Inferon)),
            Formula::Compound { .. } => self.apply(&f.expand()?, leaf, quantifiers_ok),
            Formula::Bot => Ok(Some(Formula::Bot)),
            Formula::And(a, b) => two(a, b, Formula::and, leaf),
            Formula::Or(a, b) => two(a, b, Formula::or, leaf),
            Formula::Implies(a, b) => two(a, b, Formula::implies, leaf),
            Formula::ForAll(v, b) | Formula::Exists(v, b) if quantifiers_ok => {
                let inner = self.apply(b, leaf, quantifiers_ok)?;
                Ok(inner.map(|x| match f {
                    Formula::ForAll(..) => Formula::ForAll(v.clone(), Box::new(x)),
                    _ => Formula::Exists(v.clone(), Box::new(x)),
                }))
            }
            Formula::ForAll(..) | Formula::Exists(..) => {
                Err(Error::Unsupported(format!("the term map does not act on bound variables in `{f}`")))
            }
            Formula::Box(..) | Formula::Diamond(..) => {
                Err(Error::Unsupported(format!("morphisms do not act on modal formula `{f}`")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChuWitness {
    pub extension: Vec<String>,
    pub predicate: String,
    pub terms: Vec<String>,
    pub polarity: u8,
    /// Which side derives: `"source"` when only `⊢_{𝒞∪𝒫} R(f∨ t)` holds.
    pub holds_on: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChuReport {
    pub morphism: String,
    pub passed: bool,
    pub instances: usize,
    pub witness: Option<ChuWitness>,
}

/// Checks the Chu condition for every pool extension of the ambient base,
/// every renamed predicate and every tuple over the term table's domain.
pub fn check_chu(f: &PreInferomorphism, u: &Universe) -> Result<ChuReport> {
    f.validate(u)?;
    let dom: Vec<Term> = f.down.keys().cloned().collect();
    let preds: Vec<(Name, usize)> = f.up.keys().map(|p| (p.clone(), u.preds[p])).collect();
    let empty = Site::empty();
    let mut instances = 0;
    for c in semantics::extensions(u, &f.ambient)? {
        let (cs, ct) = (c.union(&f.source), c.union(&f.target));
        let (mut es, mut et) = (derive::Engine::for_base(&cs), derive::Engine::for_base(&ct));
        for (r, n) in &preds {
            let up = f.up_pred(r);
            for tuple in crate::syntax::tuples(&dom, *n) {
                let mapped: Vec<Term> = tuple.iter().map(|t| f.down[t].clone()).collect();
                for pol in Polarity::BOTH {
                    instances += 1;
                    let left = es.derives(&empty, &InfAtom { atom: Atom { pred: r.clone(), args: mapped.clone() }, pol });
                    let right = et.derives(&empty, &InfAtom { atom: Atom { pred: up.clone(), args: tuple.clone() }, pol });
                    if left != right {
                        let have: BTreeSet<&Rule> = f.ambient.rules.iter().collect();
                        return Ok(ChuReport {
                            morphism: f.name.to_string(),
                            passed: false,
                            instances,
                            witness: Some(ChuWitness {
                                extension: c.rules.iter().filter(|r| !have.contains(r)).map(|r| r.to_string()).collect(),
                                predicate: r.to_string(),
                                terms: tuple.iter().map(|t| t.to_string()).collect(),
                                polarity: pol.bit(),
                                holds_on: if left { "source" } else { "target" },
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(ChuReport { morphism: f.name.to_string(), passed: true, instances, witness: None })
}

/// Every closed inferon of the universe over its named bases.
pub fn universe_inferons(u: &Universe) -> Vec<Inferon> {
    let mut out = Vec::new();
    for b in u.distinct_bases() {
        for ia in u.vocabulary() {
            out.push(Inferon::new(ia.atom, b.clone(), ia.pol));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiReport {
    pub quasi: bool,
    /// Targets were restricted to a reachable subset rather than all inferons.
    pub restricted: bool,
    pub missed_up: Option<String>,
    pub missed_down: Option<String>,
}

/// Surjectivity of both induced inferon maps onto `targets` (default: every universe inferon).
pub fn is_quasi(f: &PreInferomorphism, u: &Universe, targets: Option<&BTreeSet<Inferon>>) -> QuasiReport {
    let all = universe_inferons(u);
    let up: BTreeSet<Inferon> = all.iter().map(|i| f.up_inferon(i)).collect();
    let down: BTreeSet<Inferon> = all.iter().filter_map(|i| f.down_inferon(i)).collect();
    let wanted: Vec<Inferon> = match targets {
        Some(t) => t.iter().cloned().collect(),
        None => all,
    };
    let show = |i: &Inferon| Formula::Inferon(i.clone()).to_string();
    let missed_up = wanted.iter().find(|i| !up.contains(i)).map(show);
    let missed_down = wanted.iter().find(|i| !down.contains(i)).map(show);
    QuasiReport { quasi: missed_up.is_none() && missed_down.is_none(), restricted: targets.is_some(), missed_up, missed_down }
}

/// Inferons named anywhere in the model's formulas and checks.
pub fn reachable_inferons(m: &Model) -> BTreeSet<Inferon> {
    let mut out = BTreeSet::new();
    let mut add = |f: &Formula| {
        if let Ok(s) = f.expand().and_then(|e| e.inferons()) {
            out.extend(s.into_iter().filter(|i| i.atom.is_closed()));
        }
    };
    m.formulas.values().for_each(&mut add);
    for c in &m.checks {
        use crate::syntax::Judgement as J;
        match &c.judgement {
            J::Support { antecedents, consequent, .. }
            | J::Valid { antecedents, consequent }
            | J::Prove { antecedents, consequent }
            | J::Comp3 { antecedents, consequent, .. } => {
                antecedents.iter().for_each(&mut add);
                add(consequent);
            }
            J::Constraint { left, right, conclusion, .. } => {
                add(left);
                add(right);
                add(conclusion);
            }
            _ => {}
        }
    }
    out
}

/// Both sides of the Chu equivalence for one sequent; `None` where the down image is undefined.
pub fn chu_equivalence(
    f: &PreInferomorphism,
    ev: &mut Evaluator<'_>,
    theta: &[Formula],
    phi: &Formula,
) -> Result<Option<(bool, bool)>> {
    let mut down = Vec::new();
    for t in theta.iter().chain(std::iter::once(phi)) {
        match f.apply_down(t)? {
            Some(x) => down.push(x),
            None => return Ok(None),
        }
    }
    let up: Vec<Formula> = theta.iter().chain(std::iter::once(phi)).map(|t| f.apply_up(t)).collect::<Result<_>>()?;
    let empty = Site::empty();
    let (dphi, dth) = down.split_last().expect("non-empty");
    let (uphi, uth) = up.split_last().expect("non-empty");
    let a = ev.sequent(&f.ambient, &empty, dth, dphi)?;
    let b = ev.sequent(&f.ambient, &empty, uth, uphi)?;
    Ok(Some((a, b)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stock {
    pub name: Name,
    pub base: BaseRef,
    pub terms: BTreeSet<Term>,
}

impl Stock {
    pub fn new(d: &StockDecl, u: &Universe) -> Result<Stock> {
        let closed: BTreeSet<Term> = u.closed_terms().into_iter().collect();
        if let Some(t) = d.terms.iter().find(|t| !closed.contains(t)) {
            return Err(Error::Flow(format!("stock `{}` names `{t}`, not a closed term of the universe", d.name)));
        }
        Ok(Stock { name: d.name.clone(), base: d.base.clone(), terms: d.terms.clone() })
    }
}

#[derive(Clone, Debug)]
pub struct Leg {
    pub morphism: PreInferomorphism,
    pub stock: Stock,
}

#[derive(Clone, Debug)]
pub struct StockChannel {
    pub name: Name,
    pub core: Stock,
    pub legs: Vec<Leg>,
}

impl StockChannel {
    /// Resolves a declared channel and checks each leg is an inferomorphism into the core.
    pub fn resolve(m: &Model, d: &ChannelDecl) -> Result<StockChannel> {
        let u = &m.universe;
        let core = Stock::new(m.stock(&d.core)?, u)?;
        let mut legs = Vec::new();
        for (mn, sn) in &d.legs {
            let f = PreInferomorphism::from(m.morphism(mn)?);
            f.validate(u)?;
            let stock = Stock::new(m.stock(sn)?, u)?;
            let bad = |why: String| Err(Error::Flow(format!("leg `{mn}` of channel `{}`: {why}", d.name)));
            if *f.source != *stock.base {
                return bad(format!("source base {} differs from stock base {}", f.source.name, stock.base.name));
            }
            if *f.target != *core.base {
                return bad(format!("target base {} differs from core base {}", f.target.name, core.base.name));
            }
            let dom: BTreeSet<Term> = f.down.keys().cloned().collect();
            if dom != core.terms {
                return bad("term table domain differs from the core terms".into());
            }
            if let Some(t) = f.down.values().find(|t| !stock.terms.contains(t)) {
                return bad(format!("`{t}` lies outside stock `{}`", stock.name));
            }
            if let Some(l) = legs.first() {
                let l: &Leg = l;
                if *l.morphism.ambient != *f.ambient {
                    return bad("legs over different ambient bases".into());
                }
            }
            legs.push(Leg { morphism: f, stock });
        }
        Ok(StockChannel { name: d.name.clone(), core, legs })
    }

    pub fn leg(&self, morphism: &str) -> Result<&Leg> {
        self.legs
            .iter()
            .find(|l| &*l.morphism.name == morphism)
            .ok_or_else(|| Error::Unresolved { kind: "channel leg", name: morphism.to_string() })
    }

    /// The least core term projecting to both tokens.
    pub fn connected(&self, i: &str, ti: &Term, j: &str, tj: &Term) -> Result<Option<Term>> {
        let (f, g) = (&self.leg(i)?.morphism, &self.leg(j)?.morphism);
        Ok(self
            .core
            .terms
            .iter()
            .find(|t| f.down_term(t).as_ref() == Some(ti) && g.down_term(t).as_ref() == Some(tj))
            .cloned())
    }

    /// Whether `⟨R(t) @ 𝒫, b⟩` carries the information that `⟨S(t′) @ 𝒫′, b⟩`.
    pub fn carries(
        &self,
        ev: &mut Evaluator<'_>,
        (fi, r, t): (&str, &Name, &Term),
        (gi, s, t2): (&str, &Name, &Term),
        pol: Polarity,
    ) -> Result<bool> {
        let u = ev.universe();
        for p in [r, s] {
            match u.preds.get(p) {
                Some(1) => {}
                Some(&n) => return Err(Error::Arity { symbol: p.to_string(), expected: 1, found: n }),
                None => return Err(Error::Unresolved { kind: "predicate", name: p.to_string() }),
            }
        }
        let (f, g) = (&self.leg(fi)?.morphism, &self.leg(gi)?.morphism);
        if !self.leg(fi)?.stock.terms.contains(t) || !self.leg(gi)?.stock.terms.contains(t2) {
            return Ok(false);
        }
        if self.connected(fi, t, gi, t2)?.is_none() {
            return Ok(false);
        }
        let core = &self.core.base;
        let empty = Site::empty();
        for c in &self.core.terms {
            let ante = Formula::Inferon(Inferon::new(Atom::new(&f.up_pred(r), vec![c.clone()]), core.clone(), pol));
            let cons = Formula::Inferon(Inferon::new(Atom::new(&g.up_pred(s), vec![c.clone()]), core.clone(), pol));
            if !ev.sequent(&f.ambient, &empty, &[ante], &cons)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The base `{ ⇒ ι | ι ∈ site }`.
pub fn base_of(site: &Site) -> Base {
    Base::new(
        &format!("base{site}"),
        site.iter().map(|a| Rule { premises: Vec::<Premise>::new(), concl: a.clone() }),
    )
}

pub fn base_of_named(label: &str, site: &Site) -> BaseRef {
    let mut b = base_of(site);
    b.name = name(&format!("base({label})"));
    Arc::new(b)
}

/// An inclusion of sites labelled by what it adds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteChannel {
    pub source: Site,
    pub target: Site,
    pub label: Site,
}

impl SiteChannel {
    pub fn new(source: Site, target: Site) -> Result<SiteChannel> {
        if !source.is_subset(&target) {
            return Err(Error::Flow(format!("{source} is not included in {target}")));
        }
        let label = target.minus(&source);
        Ok(SiteChannel { source, target, label })
    }

    pub fn identity(site: Site) -> SiteChannel {
        SiteChannel { source: site.clone(), target: site, label: Site::empty() }
    }

    pub fn compose(&self, next: &SiteChannel) -> Result<SiteChannel> {
        if self.target != next.source {
            return Err(Error::Endpoint(format!("{} does not meet {}", self.target, next.source)));
        }
        Ok(SiteChannel { source: self.source.clone(), target: next.target.clone(), label: self.label.union(&next.label) })
    }
}

/// Composes a chain of inclusions `S₀ ⇝ S₁ ⇝ ... ⇝ Sₙ`.
pub fn compose_chain(sites: &[Site]) -> Result<SiteChannel> {
    let first = sites.first().ok_or_else(|| Error::Flow("empty inclusion chain".into()))?;
    let mut acc = SiteChannel::identity(first.clone());
    for w in sites.windows(2) {
        acc = acc.compose(&SiteChannel::new(w[0].clone(), w[1].clone())?)?;
    }
    Ok(acc)
}
