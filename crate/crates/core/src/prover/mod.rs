//! Natural deduction with the (Inferon) axiom.
//!
//! Search runs over sequents `Γ ⊢ φ` with `Γ` a set. Invertible steps are
//! applied eagerly; implication elimination, disjunction and existential
//! introduction branch. Quantifier rules range over the finite closed-term
//! domain of the universe, so `∀I` and `∃E` take one subproof per term and no
//! eigenvariable is ever introduced.

pub mod flatten;

pub use flatten::{build_base_n, check_comp3, flatten, Comp3Report, FlatMap};

use crate::error::{Error, Result};
use crate::semantics::{self, Evaluator};
use crate::syntax::{Base, Formula, Inferon, Site, Term, Universe};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProverConfig {
    pub max_depth: usize,
    pub node_budget: u64,
    pub eval: semantics::Config,
}

impl Default for ProverConfig {
    fn default() -> ProverConfig {
        ProverConfig { max_depth: 24, node_budget: 2_000_000, eval: semantics::Config::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NjProof {
    Ax(Formula),
    Inferon(Inferon),
    BotE(Box<NjProof>, Formula),
    AndI(Box<NjProof>, Box<NjProof>),
    AndE1(Box<NjProof>),
    AndE2(Box<NjProof>),
    OrI1(Box<NjProof>, Formula),
    OrI2(Formula, Box<NjProof>),
    OrE { major: Box<NjProof>, left: Box<NjProof>, right: Box<NjProof> },
    ImpI(Formula, Box<NjProof>),
    ImpE(Box<NjProof>, Box<NjProof>),
    AllI { formula: Formula, cases: Vec<(Term, NjProof)> },
    AllE(Box<NjProof>, Term),
    ExI { formula: Formula, term: Term, proof: Box<NjProof> },
    ExE { major: Box<NjProof>, conclusion: Formula, cases: Vec<(Term, NjProof)> },
}

type Ctx = BTreeSet<Formula>;

fn bx(p: NjProof) -> Box<NjProof> {
    Box::new(p)
}

fn instance(f: &Formula, t: &Term) -> Result<Formula> {
    match f {
        Formula::ForAll(v, b) | Formula::Exists(v, b) => b.subst(v, t),
        _ => Err(Error::Unsupported(format!("`{f}` is not quantified"))),
    }
}

impl NjProof {
    pub fn rule(&self) -> &'static str {
        match self {
            NjProof::Ax(_) => "Ax",
            NjProof::Inferon(_) => "Inferon",
            NjProof::BotE(..) => "⊥E",
            NjProof::AndI(..) => "∧I",
            NjProof::AndE1(_) => "∧E1",
            NjProof::AndE2(_) => "∧E2",
            NjProof::OrI1(..) => "∨I1",
            NjProof::OrI2(..) => "∨I2",
            NjProof::OrE { .. } => "∨E",
            NjProof::ImpI(..) => "⊃I",
            NjProof::ImpE(..) => "⊃E",
            NjProof::AllI { .. } => "∀I",
            NjProof::AllE(..) => "∀E",
            NjProof::ExI { .. } => "∃I",
            NjProof::ExE { .. } => "∃E",
        }
    }

    pub fn size(&self) -> usize {
        1 + self.subproofs().iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn subproofs(&self) -> Vec<&NjProof> {
        match self {
            NjProof::Ax(_) | NjProof::Inferon(_) => Vec::new(),
            NjProof::BotE(p, _)
            | NjProof::AndE1(p)
            | NjProof::AndE2(p)
            | NjProof::OrI1(p, _)
            | NjProof::OrI2(_, p)
            | NjProof::ImpI(_, p)
            | NjProof::AllE(p, _)
            | NjProof::ExI { proof: p, .. } => vec![p],
            NjProof::AndI(a, b) | NjProof::ImpE(a, b) => vec![a, b],
            NjProof::OrE { major, left, right } => vec![major, left, right],
            NjProof::AllI { cases, .. } => cases.iter().map(|(_, p)| p).collect(),
            NjProof::ExE { major, cases, .. } => std::iter::once(&**major).chain(cases.iter().map(|(_, p)| p)).collect(),
        }
    }

    /// Every (Inferon) leaf, for certificate inspection.
    pub fn inferon_leaves(&self) -> Vec<&Inferon> {
        match self {
            NjProof::Inferon(i) => vec![i],
            _ => self.subproofs().into_iter().flat_map(|p| p.inferon_leaves()).collect(),
        }
    }

    /// Replaces each `Ax(target)` leaf with `with`; sound because contexts only grow upward.
    fn replace(self, target: &Formula, with: &NjProof) -> NjProof {
        let r = |p: Box<NjProof>| bx(p.replace(target, with));
        match self {
            NjProof::Ax(f) if &f == target => with.clone(),
            NjProof::Ax(_) | NjProof::Inferon(_) => self,
            NjProof::BotE(p, f) => NjProof::BotE(r(p), f),
            NjProof::AndI(a, b) => NjProof::AndI(r(a), r(b)),
            NjProof::AndE1(p) => NjProof::AndE1(r(p)),
            NjProof::AndE2(p) => NjProof::AndE2(r(p)),
            NjProof::OrI1(p, f) => NjProof::OrI1(r(p), f),
            NjProof::OrI2(f, p) => NjProof::OrI2(f, r(p)),
            NjProof::OrE { major, left, right } => NjProof::OrE { major: r(major), left: r(left), right: r(right) },
            NjProof::ImpI(f, p) => NjProof::ImpI(f, r(p)),
            NjProof::ImpE(a, b) => NjProof::ImpE(r(a), r(b)),
            NjProof::AllI { formula, cases } => NjProof::AllI {
                formula,
                cases: cases.into_iter().map(|(t, p)| (t, p.replace(target, with))).collect(),
            },
            NjProof::AllE(p, t) => NjProof::AllE(r(p), t),
            NjProof::ExI { formula, term, proof } => NjProof::ExI { formula, term, proof: r(proof) },
            NjProof::ExE { major, conclusion, cases } => NjProof::ExE {
                major: r(major),
                conclusion,
                cases: cases.into_iter().map(|(t, p)| (t, p.replace(target, with))).collect(),
            },
        }
    }

    /// Checks the proof under `ctx` and returns its conclusion.
    ///
    /// `leaf` decides the (Inferon) side condition for a context and goal.
    pub fn check(
        &self,
        ctx: &Ctx,
        terms: &[Term],
        leaf: &mut dyn FnMut(&Ctx, &Inferon) -> Result<bool>,
    ) -> std::result::Result<Formula, String> {
        let err = |m: String| Err(m);
        let with = |f: &Formula| {
            let mut c = ctx.clone();
            c.insert(f.clone());
            c
        };
        let same_terms = |cases: &[(Term, NjProof)]| {
            cases.len() == terms.len() && cases.iter().zip(terms).all(|((a, _), b)| a == b)
        };
        match self {
            NjProof::Ax(f) => {
                if ctx.contains(f) {
                    Ok(f.clone())
                } else {
                    err(format!("Ax: `{f}` is not a hypothesis"))
                }
            }
            NjProof::Inferon(i) => match leaf(ctx, i) {
                Ok(true) => Ok(Formula::Inferon(i.clone())),
                Ok(false) => err(format!("Inferon: side condition fails for `{}`", Formula::Inferon(i.clone()))),
                Err(e) => err(e.to_string()),
            },
            NjProof::BotE(p, f) => match p.check(ctx, terms, leaf)? {
                Formula::Bot => Ok(f.clone()),
                g => err(format!("⊥E: premise proves `{g}`")),
            },
            NjProof::AndI(a, b) => Ok(Formula::and(a.check(ctx, terms, leaf)?, b.check(ctx, terms, leaf)?)),
            NjProof::AndE1(p) | NjProof::AndE2(p) => match p.check(ctx, terms, leaf)? {
                Formula::And(a, b) => Ok(if matches!(self, NjProof::AndE1(_)) { *a } else { *b }),
                g => err(format!("∧E: premise proves `{g}`")),
            },
            NjProof::OrI1(p, r) => Ok(Formula::or(p.check(ctx, terms, leaf)?, r.clone())),
            NjProof::OrI2(l, p) => Ok(Formula::or(l.clone(), p.check(ctx, terms, leaf)?)),
            NjProof::OrE { major, left, right } => match major.check(ctx, terms, leaf)? {
                Formula::Or(a, b) => {
                    let x = left.check(&with(&a), terms, leaf)?;
                    let y = right.check(&with(&b), terms, leaf)?;
                    if x == y {
                        Ok(x)
                    } else {
                        err(format!("∨E: branches prove `{x}` and `{y}`"))
                    }
                }
                g => err(format!("∨E: major premise proves `{g}`")),
            },
            NjProof::ImpI(a, p) => Ok(Formula::implies(a.clone(), p.check(&with(a), terms, leaf)?)),
            NjProof::ImpE(m, p) => match m.check(ctx, terms, leaf)? {
                Formula::Implies(a, b) => {
                    let x = p.check(ctx, terms, leaf)?;
                    if x == *a {
                        Ok(*b)
                    } else {
                        err(format!("⊃E: minor premise proves `{x}`, expected `{a}`"))
                    }
                }
                g => err(format!("⊃E: major premise proves `{g}`")),
            },
            NjProof::AllI { formula, cases } => {
                if !matches!(formula, Formula::ForAll(..)) || !same_terms(cases) {
                    return err(format!("∀I: cases do not cover the term domain for `{formula}`"));
                }
                for (t, p) in cases {
                    let want = instance(formula, t).map_err(|e| e.to_string())?;
                    let got = p.check(ctx, terms, leaf)?;
                    if got != want {
                        return err(format!("∀I: case {t} proves `{got}`"));
                    }
                }
                Ok(formula.clone())
            }
            NjProof::AllE(p, t) => match p.check(ctx, terms, leaf)? {
                f @ Formula::ForAll(..) if terms.contains(t) => instance(&f, t).map_err(|e| e.to_string()),
                g => err(format!("∀E: premise proves `{g}`")),
            },
            NjProof::ExI { formula, term, proof } => {
                if !matches!(formula, Formula::Exists(..)) || !terms.contains(term) {
                    return err(format!("∃I: bad witness {term} for `{formula}`"));
                }
                let want = instance(formula, term).map_err(|e| e.to_string())?;
                let got = proof.check(ctx, terms, leaf)?;
                if got == want {
                    Ok(formula.clone())
                } else {
                    err(format!("∃I: premise proves `{got}`"))
                }
            }
            NjProof::ExE { major, conclusion, cases } => {
                let f = major.check(ctx, terms, leaf)?;
                if !matches!(f, Formula::Exists(..)) || !same_terms(cases) {
                    return err(format!("∃E: major premise proves `{f}`"));
                }
                for (t, p) in cases {
                    let hyp = instance(&f, t).map_err(|e| e.to_string())?;
                    let got = p.check(&with(&hyp), terms, leaf)?;
                    if &got != conclusion {
                        return err(format!("∃E: case {t} proves `{got}`"));
                    }
                }
                Ok(conclusion.clone())
            }
        }
    }

    fn fmt_indent(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            NjProof::Ax(x) => writeln!(f, "{pad}Ax {x}"),
            NjProof::Inferon(i) => writeln!(f, "{pad}Inferon {}", Formula::Inferon(i.clone())),
            NjProof::ImpI(a, _) => writeln!(f, "{pad}⊃I [{a}]"),
            NjProof::AllE(_, t) => writeln!(f, "{pad}∀E {t}"),
            NjProof::ExI { term, .. } => writeln!(f, "{pad}∃I {term}"),
            NjProof::BotE(_, g) => writeln!(f, "{pad}⊥E {g}"),
            other => writeln!(f, "{pad}{}", other.rule()),
        }?;
        for p in self.subproofs() {
            p.fmt_indent(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for NjProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indent(f, 0)
    }
}

/// Decides the (Inferon) side condition by bounded enumeration.
///
/// The extensions of the local base range over every named base joined with
/// every subset of the candidate pool.
pub struct SideCondition<'u> {
    ev: Evaluator<'u>,
    cache: HashMap<(Vec<Formula>, Inferon), bool>,
}

impl<'u> SideCondition<'u> {
    pub fn new(u: &'u Universe, cfg: semantics::Config) -> SideCondition<'u> {
        SideCondition { ev: Evaluator::new(u, cfg), cache: HashMap::new() }
    }

    pub fn holds(&mut self, ctx: &Ctx, goal: &Inferon) -> Result<bool> {
        let key = (ctx.iter().cloned().collect::<Vec<_>>(), goal.clone());
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let atom = goal.iatom()?;
        let empty = Site::empty();
        let mut ok = true;
        'outer: for n in self.ev.universe().distinct_bases() {
            let start = goal.base.union(&n);
            for x in self.ev.extensions(&start)? {
                let mut all = true;
                for phi in ctx {
                    if !self.ev.support(&x, &empty, phi)? {
                        all = false;
                        break;
                    }
                }
                if all && !crate::derive::derives(&x, &empty, &atom) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        self.cache.insert(key, ok);
        Ok(ok)
    }
}

struct Search<'u> {
    side: SideCondition<'u>,
    terms: Vec<Term>,
    cfg: ProverConfig,
    nodes: u64,
    cutoffs: u64,
    loops: u64,
    proved: HashMap<(Ctx, Formula), NjProof>,
    failed: HashSet<(Ctx, Formula)>,
    path: HashSet<(Ctx, Formula)>,
}

impl<'u> Search<'u> {
    fn prove(&mut self, ctx: &Ctx, goal: &Formula, depth: usize) -> Result<Option<NjProof>> {
        let key = (ctx.clone(), goal.clone());
        if let Some(p) = self.proved.get(&key) {
            return Ok(Some(p.clone()));
        }
        if self.failed.contains(&key) {
            return Ok(None);
        }
        if self.path.contains(&key) {
            self.loops += 1;
            return Ok(None);
        }
        if depth == 0 {
            self.cutoffs += 1;
            return Ok(None);
        }
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            return Err(Error::Budget(self.cfg.node_budget));
        }
        let before = (self.cutoffs, self.loops);
        self.path.insert(key.clone());
        let found = self.step(ctx, goal, depth);
        self.path.remove(&key);
        let found = found?;
        match &found {
            Some(p) => {
                self.proved.insert(key, p.clone());
            }
            None if (self.cutoffs, self.loops) == before => {
                self.failed.insert(key);
            }
            None => {}
        }
        Ok(found)
    }

    fn step(&mut self, ctx: &Ctx, goal: &Formula, depth: usize) -> Result<Option<NjProof>> {
        if ctx.contains(goal) {
            return Ok(Some(NjProof::Ax(goal.clone())));
        }
        if ctx.contains(&Formula::Bot) {
            return Ok(Some(NjProof::BotE(bx(NjProof::Ax(Formula::Bot)), goal.clone())));
        }
        let d = depth - 1;

        // Invertible left rules.
        let pick = ctx.iter().find(|f| matches!(f, Formula::And(..) | Formula::Or(..) | Formula::ForAll(..) | Formula::Exists(..)));
        if let Some(h) = pick.cloned() {
            let mut rest = ctx.clone();
            rest.remove(&h);
            let ax = NjProof::Ax(h.clone());
            return Ok(match &h {
                Formula::And(a, b) => {
                    let mut c = rest;
                    c.insert((**a).clone());
                    c.insert((**b).clone());
                    self.prove(&c, goal, d)?.map(|p| {
                        p.replace(a, &NjProof::AndE1(bx(ax.clone()))).replace(b, &NjProof::AndE2(bx(ax.clone())))
                    })
                }
                Formula::Or(a, b) => {
                    let (mut l, mut r) = (rest.clone(), rest);
                    l.insert((**a).clone());
                    r.insert((**b).clone());
                    match self.prove(&l, goal, d)? {
                        None => None,
                        Some(left) => self.prove(&r, goal, d)?.map(|right| NjProof::OrE {
                            major: bx(ax.clone()),
                            left: bx(left),
                            right: bx(right),
                        }),
                    }
                }
                Formula::ForAll(..) => {
                    let mut c = rest;
                    let mut insts = Vec::new();
                    for t in self.terms.clone() {
                        let i = instance(&h, &t)?;
                        c.insert(i.clone());
                        insts.push((t, i));
                    }
                    self.prove(&c, goal, d)?.map(|mut p| {
                        for (t, i) in &insts {
                            p = p.replace(i, &NjProof::AllE(bx(ax.clone()), t.clone()));
                        }
                        p
                    })
                }
                _ => {
                    let mut cases = Vec::new();
                    for t in self.terms.clone() {
                        let mut c = rest.clone();
                        c.insert(instance(&h, &t)?);
                        match self.prove(&c, goal, d)? {
                            Some(p) => cases.push((t, p)),
                            None => return Ok(None),
                        }
                    }
                    Some(NjProof::ExE { major: bx(ax), conclusion: goal.clone(), cases })
                }
            });
        }

        // Invertible right rules.
        match goal {
            Formula::And(a, b) => {
                let Some(x) = self.prove(ctx, a, d)? else { return Ok(None) };
                return Ok(self.prove(ctx, b, d)?.map(|y| NjProof::AndI(bx(x), bx(y))));
            }
            Formula::Implies(a, b) => {
                let mut c = ctx.clone();
                c.insert((**a).clone());
                return Ok(self.prove(&c, b, d)?.map(|p| NjProof::ImpI((**a).clone(), bx(p))));
            }
            Formula::ForAll(..) => {
                let mut cases = Vec::new();
                for t in self.terms.clone() {
                    match self.prove(ctx, &instance(goal, &t)?, d)? {
                        Some(p) => cases.push((t, p)),
                        None => return Ok(None),
                    }
                }
                return Ok(Some(NjProof::AllI { formula: goal.clone(), cases }));
            }
            Formula::Inferon(i) if self.side.holds(ctx, i)? => {
                return Ok(Some(NjProof::Inferon(i.clone())));
            }
            _ => {}
        }

        // Branching rules.
        match goal {
            Formula::Or(a, b) => {
                if let Some(p) = self.prove(ctx, a, d)? {
                    return Ok(Some(NjProof::OrI1(bx(p), (**b).clone())));
                }
                if let Some(p) = self.prove(ctx, b, d)? {
                    return Ok(Some(NjProof::OrI2((**a).clone(), bx(p))));
                }
            }
            Formula::Exists(..) => {
                for t in self.terms.clone() {
                    if let Some(p) = self.prove(ctx, &instance(goal, &t)?, d)? {
                        return Ok(Some(NjProof::ExI { formula: goal.clone(), term: t, proof: bx(p) }));
                    }
                }
            }
            _ => {}
        }
        let imps: Vec<Formula> = ctx.iter().filter(|f| matches!(f, Formula::Implies(..))).cloned().collect();
        for h in imps {
            let Formula::Implies(a, b) = &h else { unreachable!() };
            let Some(pa) = self.prove(ctx, a, d)? else { continue };
            let mut c = ctx.clone();
            c.remove(&h);
            c.insert((**b).clone());
            if let Some(pb) = self.prove(&c, goal, d)? {
                let use_b = NjProof::ImpE(bx(NjProof::Ax(h.clone())), bx(pa));
                return Ok(Some(pb.replace(b, &use_b)));
            }
        }
        Ok(None)
    }
}

fn prepare(gamma: &[Formula], phi: &Formula) -> Result<(Ctx, Formula)> {
    let mut ctx = Ctx::new();
    for f in gamma.iter().chain(std::iter::once(phi)) {
        if !f.is_closed() {
            return Err(Error::Unsupported(format!("open formula `{f}`")));
        }
    }
    for g in gamma {
        ctx.insert(g.expand()?);
    }
    Ok((ctx, phi.expand()?))
}

/// Searches for an NJ proof of `Γ ⊢ φ` with compound inferons expanded.
///
/// `Ok(None)` means the search space was exhausted; hitting the depth bound
/// without a proof is reported as [`Error::Budget`].
pub fn nj_prove(u: &Universe, gamma: &[Formula], phi: &Formula, cfg: &ProverConfig) -> Result<Option<NjProof>> {
    let (ctx, goal) = prepare(gamma, phi)?;
    let mut s = Search {
        side: SideCondition::new(u, cfg.eval.clone()),
        terms: u.closed_terms(),
        cfg: cfg.clone(),
        nodes: 0,
        cutoffs: 0,
        loops: 0,
        proved: HashMap::new(),
        failed: HashSet::new(),
        path: HashSet::new(),
    };
    let mut depth = 2;
    loop {
        let depth_now = depth.min(cfg.max_depth);
        s.cutoffs = 0;
        if let Some(p) = s.prove(&ctx, &goal, depth_now)? {
            return Ok(Some(p));
        }
        if s.cutoffs == 0 {
            return Ok(None);
        }
        if depth_now == cfg.max_depth {
            return Err(Error::Budget(cfg.max_depth as u64));
        }
        depth *= 2;
    }
}

/// Replays a proof with an independent side-condition checker.
pub fn check_proof(
    u: &Universe,
    gamma: &[Formula],
    phi: &Formula,
    proof: &NjProof,
    cfg: &semantics::Config,
) -> std::result::Result<(), String> {
    let (ctx, goal) = prepare(gamma, phi).map_err(|e| e.to_string())?;
    let mut side = SideCondition::new(u, cfg.clone());
    let terms = u.closed_terms();
    let got = proof.check(&ctx, &terms, &mut |c, i| side.holds(c, i))?;
    if got == goal {
        Ok(())
    } else {
        Err(format!("proof concludes `{got}`, expected `{goal}`"))
    }
}

/// Bases every universe query can meet: the named ones and all pool extensions of each.
pub fn universe_bases(u: &Universe) -> Result<Vec<Base>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in u.distinct_bases() {
        for b in semantics::extensions(u, &n)? {
            if seen.insert(b.rules.clone()) {
                out.push(b);
            }
        }
    }
    Ok(out)
}
