//! Terms, atoms, rules, bases, inferons, formulas, sites and universes.

mod model;
mod parse;
mod print;

pub use model::{Check, ChannelDecl, Judgement, Model, MorphismDecl, StockDecl};
pub use parse::{parse_base_expr, parse_formula, parse_iatom, parse_model, parse_site_expr};
pub use print::{print_base, print_model, print_site};

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Name),
    Var(Name),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn constant(s: &str) -> Term {
        Term::Const(name(s))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    /// Nesting depth of function applications; constants sit at depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn subst(&self, var: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if &**v == var => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(var, t)).collect()),
            other => other.clone(),
        }
    }

    fn vars_into(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
            Term::Const(_) => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Name,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: name(pred), args }
    }

    pub fn prop(pred: &str) -> Atom {
        Atom::new(pred, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_closed(&self) -> bool {
        self.args.iter().all(Term::is_closed)
    }

    pub fn subst(&self, var: &str, t: &Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.subst(var, t)).collect() }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|a| a.vars_into(&mut out));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Zero,
    One,
}

impl Polarity {
    pub const BOTH: [Polarity; 2] = [Polarity::Zero, Polarity::One];

    pub fn bit(self) -> u8 {
        match self {
            Polarity::Zero => 0,
            Polarity::One => 1,
        }
    }
}

/// A closed atom with a polarity: the unit of derivability in a base.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfAtom {
    pub atom: Atom,
    pub pol: Polarity,
}

impl InfAtom {
    pub fn new(atom: Atom, pol: Polarity) -> Result<InfAtom> {
        if !atom.is_closed() {
            return Err(Error::OpenAtom(atom.to_string()));
        }
        Ok(InfAtom { atom, pol })
    }

    /// Propositional shorthand used throughout tests and generated bases.
    pub fn prop(pred: &str, pol: Polarity) -> InfAtom {
        InfAtom { atom: Atom::prop(pred), pol }
    }
}

/// One premise `(hyps => goal)`; bare `goal` when `hyps` is empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Premise {
    pub hyps: BTreeSet<InfAtom>,
    pub goal: InfAtom,
}

impl Premise {
    pub fn bare(goal: InfAtom) -> Premise {
        Premise { hyps: BTreeSet::new(), goal }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub premises: Vec<Premise>,
    pub concl: InfAtom,
}

impl Rule {
    pub fn axiom(concl: InfAtom) -> Rule {
        Rule { premises: Vec::new(), concl }
    }

    pub fn simple(premises: impl IntoIterator<Item = InfAtom>, concl: InfAtom) -> Rule {
        Rule { premises: premises.into_iter().map(Premise::bare).collect(), concl }
    }

    /// 0 for axioms, 1 when no premise discharges anything, 2 otherwise.
    pub fn level(&self) -> u8 {
        if self.premises.is_empty() {
            0
        } else if self.premises.iter().all(|p| p.hyps.is_empty()) {
            1
        } else {
            2
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &InfAtom> {
        self.premises
            .iter()
            .flat_map(|p| p.hyps.iter().chain(std::iter::once(&p.goal)))
            .chain(std::iter::once(&self.concl))
    }
}

/// A named finite rule set. Equality, ordering and hashing look only at the rules.
#[derive(Clone, Debug)]
pub struct Base {
    pub name: Name,
    pub rules: BTreeSet<Rule>,
}

pub type BaseRef = Arc<Base>;

impl Base {
    pub const EMPTY: &'static str = "empty";

    pub fn new(name_: &str, rules: impl IntoIterator<Item = Rule>) -> Base {
        Base { name: name(name_), rules: rules.into_iter().collect() }
    }

    pub fn empty() -> Base {
        Base::new(Base::EMPTY, [])
    }

    pub fn union(&self, other: &Base) -> Base {
        let mut parts: BTreeSet<&str> =
            self.name.split('+').chain(other.name.split('+')).filter(|p| *p != Base::EMPTY).collect();
        if parts.is_empty() {
            parts.insert(Base::EMPTY);
        }
        let joined = parts.into_iter().collect::<Vec<_>>().join("+");
        Base {
            name: name(&joined),
            rules: self.rules.union(&other.rules).cloned().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules in index order; the index of a rule is its position here.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules.iter().enumerate()
    }
}

impl PartialEq for Base {
    fn eq(&self, other: &Base) -> bool {
        self.rules == other.rules
    }
}

impl Eq for Base {}

impl PartialOrd for Base {
    fn partial_cmp(&self, other: &Base) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Base {
    fn cmp(&self, other: &Base) -> std::cmp::Ordering {
        self.rules.cmp(&other.rules)
    }
}

impl Hash for Base {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.rules.hash(h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Inferon {
    pub atom: Atom,
    pub base: BaseRef,
    pub pol: Polarity,
}

impl Inferon {
    pub fn new(atom: Atom, base: BaseRef, pol: Polarity) -> Inferon {
        Inferon { atom, base, pol }
    }

    pub fn iatom(&self) -> Result<InfAtom> {
        InfAtom::new(self.atom.clone(), self.pol)
    }
}

/// Bodies of compound inferons: connectives over bare atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Plain {
    Atom(Atom),
    Bot,
    And(Box<Plain>, Box<Plain>),
    Or(Box<Plain>, Box<Plain>),
    Implies(Box<Plain>, Box<Plain>),
    ForAll(Name, Box<Plain>),
    Exists(Name, Box<Plain>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Inferon(Inferon),
    Compound { body: Plain, base: BaseRef, pol: Polarity },
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll(Name, Box<Formula>),
    Exists(Name, Box<Formula>),
    Box(Name, Box<Formula>),
    Diamond(Name, Box<Formula>),
}

impl Formula {
    pub fn inferon(atom: Atom, base: &BaseRef, pol: Polarity) -> Formula {
        Formula::Inferon(Inferon::new(atom, base.clone(), pol))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::ForAll(name(v), Box::new(body))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(name(v), Box::new(body))
    }

    /// Intuitionistic negation, `a -> bot`.
    pub fn negation(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bot)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.free_into(&mut BTreeSet::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut BTreeSet<Name>, out: &mut BTreeSet<Name>) {
        let under = |v: &Name, body: &Formula, bound: &mut BTreeSet<Name>, out: &mut BTreeSet<Name>| {
            let fresh = bound.insert(v.clone());
            body.free_into(bound, out);
            if fresh {
                bound.remove(v);
            }
        };
        match self {
            Formula::Inferon(i) => out.extend(i.atom.vars().into_iter().filter(|v| !bound.contains(v))),
            Formula::Compound { body, .. } => {
                let mut inner = BTreeSet::new();
                plain_free(body, &mut BTreeSet::new(), &mut inner);
                out.extend(inner.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => under(v, body, bound, out),
            Formula::Box(_, body) | Formula::Diamond(_, body) => body.free_into(bound, out),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_modality(&self) -> bool {
        match self {
            Formula::Box(..) | Formula::Diamond(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_modality() || b.has_modality(),
            Formula::ForAll(_, b) | Formula::Exists(_, b) => b.has_modality(),
            _ => false,
        }
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::ForAll(..) | Formula::Exists(..) => true,
            Formula::Compound { body, .. } => plain_has_quantifier(body),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_quantifier() || b.has_quantifier(),
            Formula::Box(_, b) | Formula::Diamond(_, b) => b.has_quantifier(),
            _ => false,
        }
    }

    /// Capture-avoiding only in the sense that capture is reported, never silently performed.
    pub fn subst(&self, var: &str, t: &Term) -> Result<Formula> {
        let mut tv = BTreeSet::new();
        t.vars_into(&mut tv);
        self.subst_checked(var, t, &tv)
    }

    fn subst_checked(&self, var: &str, t: &Term, tv: &BTreeSet<Name>) -> Result<Formula> {
        let rec = |f: &Formula| f.subst_checked(var, t, tv).map(Box::new);
        Ok(match self {
            Formula::Inferon(i) => Formula::Inferon(Inferon::new(i.atom.subst(var, t), i.base.clone(), i.pol)),
            Formula::Compound { body, base, pol } => Formula::Compound {
                body: plain_subst(body, var, t, tv)?,
                base: base.clone(),
                pol: *pol,
            },
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::And(rec(a)?, rec(b)?),
            Formula::Or(a, b) => Formula::Or(rec(a)?, rec(b)?),
            Formula::Implies(a, b) => Formula::Implies(rec(a)?, rec(b)?),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let body = if &**v == var {
                    body.clone()
                } else if tv.contains(v) && body.free_vars().contains(var) {
                    return Err(Error::Capture(var.to_string()));
                } else {
                    rec(body)?
                };
                match self {
                    Formula::ForAll(..) => Formula::ForAll(v.clone(), body),
                    _ => Formula::Exists(v.clone(), body),
                }
            }
            Formula::Box(a, body) => Formula::Box(a.clone(), rec(body)?),
            Formula::Diamond(a, body) => Formula::Diamond(a.clone(), rec(body)?),
        })
    }

    /// Complexity measure used for the Chu-equivalence induction.
    pub fn gamma(&self) -> Result<usize> {
        Ok(match self {
            Formula::Inferon(_) | Formula::Bot => 1,
            Formula::Compound { .. } => self.expand()?.gamma()?,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.gamma()? + b.gamma()?,
            Formula::ForAll(_, b) => 1 + b.gamma()?,
            Formula::Exists(_, b) => 2 + b.gamma()?,
            Formula::Box(..) | Formula::Diamond(..) => {
                return Err(Error::Unsupported("complexity is undefined on modal formulas".into()))
            }
        })
    }

    /// Rewrites every compound inferon into a formula over plain inferons.
    pub fn expand(&self) -> Result<Formula> {
        let rec = |f: &Formula| f.expand().map(Box::new);
        Ok(match self {
            Formula::Compound { body, base, pol } => expand_compound(body, base, *pol)?,
            Formula::Inferon(_) | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::And(rec(a)?, rec(b)?),
            Formula::Or(a, b) => Formula::Or(rec(a)?, rec(b)?),
            Formula::Implies(a, b) => Formula::Implies(rec(a)?, rec(b)?),
            Formula::ForAll(v, b) => Formula::ForAll(v.clone(), rec(b)?),
            Formula::Exists(v, b) => Formula::Exists(v.clone(), rec(b)?),
            Formula::Box(a, b) => Formula::Box(a.clone(), rec(b)?),
            Formula::Diamond(a, b) => Formula::Diamond(a.clone(), rec(b)?),
        })
    }

    /// Immediate subformulas, quantifier bodies left open.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
            Formula::ForAll(_, b) | Formula::Exists(_, b) | Formula::Box(_, b) | Formula::Diamond(_, b) => vec![b],
            _ => Vec::new(),
        }
    }

    /// Every plain inferon occurring in the formula, compounds expanded.
    pub fn inferons(&self) -> Result<BTreeSet<Inferon>> {
        fn go(f: &Formula, out: &mut BTreeSet<Inferon>) {
            match f {
                Formula::Inferon(i) => {
                    out.insert(i.clone());
                }
                _ => f.children().into_iter().for_each(|c| go(c, out)),
            }
        }
        let mut out = BTreeSet::new();
        go(&self.expand()?, &mut out);
        Ok(out)
    }
}

fn plain_free(p: &Plain, bound: &mut BTreeSet<Name>, out: &mut BTreeSet<Name>) {
    match p {
        Plain::Atom(a) => out.extend(a.vars().into_iter().filter(|v| !bound.contains(v))),
        Plain::Bot => {}
        Plain::And(a, b) | Plain::Or(a, b) | Plain::Implies(a, b) => {
            plain_free(a, bound, out);
            plain_free(b, bound, out);
        }
        Plain::ForAll(v, b) | Plain::Exists(v, b) => {
            let fresh = bound.insert(v.clone());
            plain_free(b, bound, out);
            if fresh {
                bound.remove(v);
            }
        }
    }
}

fn plain_has_quantifier(p: &Plain) -> bool {
    match p {
        Plain::ForAll(..) | Plain::Exists(..) => true,
        Plain::And(a, b) | Plain::Or(a, b) | Plain::Implies(a, b) => plain_has_quantifier(a) || plain_has_quantifier(b),
        _ => false,
    }
}

fn plain_subst(p: &Plain, var: &str, t: &Term, tv: &BTreeSet<Name>) -> Result<Plain> {
    let rec = |q: &Plain| plain_subst(q, var, t, tv).map(Box::new);
    Ok(match p {
        Plain::Atom(a) => Plain::Atom(a.subst(var, t)),
        Plain::Bot => Plain::Bot,
        Plain::And(a, b) => Plain::And(rec(a)?, rec(b)?),
        Plain::Or(a, b) => Plain::Or(rec(a)?, rec(b)?),
        Plain::Implies(a, b) => Plain::Implies(rec(a)?, rec(b)?),
        Plain::ForAll(v, b) | Plain::Exists(v, b) => {
            let body = if &**v == var {
                b.clone()
            } else {
                let mut fv = BTreeSet::new();
                plain_free(b, &mut BTreeSet::new(), &mut fv);
                if tv.contains(v) && fv.contains(var) {
                    return Err(Error::Capture(var.to_string()));
                }
                rec(b)?
            };
            match p {
                Plain::ForAll(..) => Plain::ForAll(v.clone(), body),
                _ => Plain::Exists(v.clone(), body),
            }
        }
    })
}

/// The compound-inferon rewrite table, applied recursively down to atomic bodies.
pub fn expand_compound(body: &Plain, base: &BaseRef, pol: Polarity) -> Result<Formula> {
    use Polarity::{One, Zero};
    let e = |p: &Plain, b: Polarity| expand_compound(p, base, b);
    Ok(match (body, pol) {
        (Plain::Atom(a), b) => Formula::inferon(a.clone(), base, b),
        (Plain::Bot, _) => return Err(Error::Unsupported("`bot` inside a compound inferon".into())),
        (Plain::And(x, y), One) => Formula::and(e(x, One)?, e(y, One)?),
        (Plain::And(x, y), Zero) => Formula::or(e(x, Zero)?, e(y, Zero)?),
        (Plain::Or(x, y), One) => Formula::or(e(x, One)?, e(y, One)?),
        (Plain::Or(x, y), Zero) => Formula::and(e(x, Zero)?, e(y, Zero)?),
        (Plain::Implies(x, y), One) => Formula::implies(e(x, One)?, e(y, One)?),
        (Plain::Implies(x, y), Zero) => Formula::and(e(x, One)?, e(y, Zero)?),
        (Plain::ForAll(v, x), One) => Formula::ForAll(v.clone(), Box::new(e(x, One)?)),
        (Plain::ForAll(v, x), Zero) => Formula::Exists(v.clone(), Box::new(e(x, Zero)?)),
        (Plain::Exists(v, x), One) => Formula::Exists(v.clone(), Box::new(e(x, One)?)),
        (Plain::Exists(v, x), Zero) => Formula::ForAll(v.clone(), Box::new(e(x, Zero)?)),
    })
}

/// γ(Θ, φ) = 1 + max of γ over Θ ∪ {φ}.
pub fn gamma_sequent(theta: &[Formula], phi: &Formula) -> Result<usize> {
    let mut m = phi.gamma()?;
    for f in theta {
        m = m.max(f.gamma()?);
    }
    Ok(1 + m)
}

/// A finite context of inferonic atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(pub BTreeSet<InfAtom>);

impl Site {
    pub fn empty() -> Site {
        Site::default()
    }

    pub fn union(&self, other: &Site) -> Site {
        Site(self.0.union(&other.0).cloned().collect())
    }

    pub fn minus(&self, other: &Site) -> Site {
        Site(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &Site) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn contains(&self, a: &InfAtom) -> bool {
        self.0.contains(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &InfAtom> {
        self.0.iter()
    }
}

impl FromIterator<InfAtom> for Site {
    fn from_iter<I: IntoIterator<Item = InfAtom>>(it: I) -> Site {
        Site(it.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub name: Name,
    pub bases: Vec<BaseRef>,
}

/// The finite vocabulary, term stock and extension pool that make every
/// quantifier of the semantics decidable.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    pub preds: BTreeMap<Name, usize>,
    pub constants: BTreeSet<Name>,
    pub functions: BTreeMap<Name, usize>,
    pub depth: usize,
    pub candidates: BTreeSet<Rule>,
    pub agents: BTreeMap<Name, Agent>,
    pub bases: BTreeMap<Name, BaseRef>,
}

/// Predicate of the reserved letter standing in for the unbounded supply of
/// atoms no rule mentions. `#` cannot occur in parsed identifiers.
pub const FRESH: &str = "#fresh";

impl Universe {
    /// All closed terms up to the depth bound, ordered by depth and then structurally.
    pub fn closed_terms(&self) -> Vec<Term> {
        let mut layers: Vec<Vec<Term>> = vec![self.constants.iter().map(|c| Term::Const(c.clone())).collect()];
        for d in 1..=self.depth {
            let all: Vec<Term> = layers.iter().flatten().cloned().collect();
            let mut layer = BTreeSet::new();
            for (f, &n) in &self.functions {
                for args in tuples(&all, n) {
                    if args.iter().any(|a| a.depth() == d - 1) {
                        layer.insert(Term::App(f.clone(), args));
                    }
                }
            }
            layers.push(layer.into_iter().collect());
        }
        layers.into_iter().flatten().collect()
    }

    /// Every closed atom over the declared predicates.
    pub fn atoms(&self) -> Vec<Atom> {
        let terms = self.closed_terms();
        let mut out = Vec::new();
        for (p, &n) in &self.preds {
            for args in tuples(&terms, n) {
                out.push(Atom { pred: p.clone(), args });
            }
        }
        out
    }

    pub fn vocabulary(&self) -> Vec<InfAtom> {
        self.atoms()
            .into_iter()
            .flat_map(|a| Polarity::BOTH.map(|pol| InfAtom { atom: a.clone(), pol }))
            .collect()
    }

    /// The vocabulary plus the two reserved fresh inferonic atoms.
    pub fn vocabulary_with_fresh(&self) -> Vec<InfAtom> {
        let mut v = self.vocabulary();
        v.extend(Polarity::BOTH.map(|pol| InfAtom::prop(FRESH, pol)));
        v
    }

    pub fn base(&self, n: &str) -> Result<BaseRef> {
        if n == Base::EMPTY {
            return Ok(Arc::new(Base::empty()));
        }
        self.bases.get(n).cloned().ok_or_else(|| Error::Unresolved { kind: "base", name: n.to_string() })
    }

    /// Resolves `A+B+...` to the union of the named bases.
    pub fn resolve_union(&self, expr: &str) -> Result<BaseRef> {
        let mut acc: Option<Base> = None;
        for part in expr.split('+').map(str::trim) {
            let b = self.base(part)?;
            acc = Some(match acc {
                None => (*b).clone(),
                Some(a) => a.union(&b),
            });
        }
        acc.map(Arc::new).ok_or_else(|| Error::Unresolved { kind: "base", name: expr.to_string() })
    }

    pub fn agent(&self, n: &str) -> Result<&Agent> {
        self.agents.get(n).ok_or_else(|| Error::Unresolved { kind: "agent", name: n.to_string() })
    }

    /// Distinct named bases (structurally deduplicated), the empty base first.
    pub fn distinct_bases(&self) -> Vec<BaseRef> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let empty: BaseRef = Arc::new(Base::empty());
        for b in std::iter::once(&empty).chain(self.bases.values()) {
            if seen.insert(b.rules.clone()) {
                out.push(b.clone());
            }
        }
        out
    }

    pub fn declare_pred(&mut self, p: &str, n: usize) -> Result<()> {
        declare(&mut self.preds, p, n)
    }

    pub fn declare_fun(&mut self, f: &str, n: usize) -> Result<()> {
        declare(&mut self.functions, f, n)
    }

    /// Checks that an atom uses declared symbols at the right arities and stays within the depth bound.
    pub fn check_atom(&self, a: &Atom) -> Result<()> {
        match self.preds.get(&a.pred) {
            None => return Err(Error::Unresolved { kind: "predicate", name: a.pred.to_string() }),
            Some(&n) if n != a.arity() => {
                return Err(Error::Arity { symbol: a.pred.to_string(), expected: n, found: a.arity() })
            }
            _ => {}
        }
        a.args.iter().try_for_each(|t| self.check_term(t))
    }

    pub fn check_term(&self, t: &Term) -> Result<()> {
        match t {
            Term::Const(c) if !self.constants.contains(c) => {
                Err(Error::Unresolved { kind: "constant", name: c.to_string() })
            }
            Term::App(f, args) => {
                let n = *self
                    .functions
                    .get(f)
                    .ok_or_else(|| Error::Unresolved { kind: "function", name: f.to_string() })?;
                if n != args.len() {
                    return Err(Error::Arity { symbol: f.to_string(), expected: n, found: args.len() });
                }
                if t.is_closed() && t.depth() > self.depth {
                    return Err(Error::Unsupported(format!("term `{t}` exceeds the depth bound {}", self.depth)));
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            _ => Ok(()),
        }
    }

    pub fn check_rule(&self, r: &Rule) -> Result<()> {
        r.atoms().try_for_each(|a| self.check_atom(&a.atom))
    }
}

fn declare(table: &mut BTreeMap<Name, usize>, s: &str, n: usize) -> Result<()> {
    match table.get(s) {
        Some(&m) if m != n => Err(Error::Arity { symbol: s.to_string(), expected: m, found: n }),
        _ => {
            table.insert(name(s), n);
            Ok(())
        }
    }
}

/// All `n`-tuples over `items` in lexicographic order.
pub fn tuples<T: Clone>(items: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect();
    }
    out
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}
