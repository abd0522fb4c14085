//! Bounded evaluation of the support relations.
//!
//! Every "for every extension" quantifier ranges over `W ∪ S` for `S` a subset
//! of the universe candidate pool; every "for every inferon" quantifier ranges
//! over the vocabulary (plus two fresh letters) paired with the empty base and
//! each named base; every "for every site" quantifier ranges over subsets of the
//! atoms the pool can assert outright. Atomic leaves are decided exactly by
//! [`crate::derive`].

use crate::derive::Engine;
use crate::error::{Error, Result};
use crate::syntax::{Atom, Base, BaseRef, Formula, InfAtom, Name, Polarity, Rule, Site, Term, Universe};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

pub use crate::syntax::expand_compound;

/// Above this many assertable atoms the site quantifier drops to singletons.
pub const SITE_VOCABULARY_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    /// Largest number of pool rules added in one extension step; `None` is unbounded.
    pub ext_bound: Option<usize>,
    /// Largest quantified site; `None` picks all subsets or singletons by vocabulary size.
    pub site_bound: Option<usize>,
    pub step_budget: u64,
    /// Thread the site parameter through the sequent clause.
    pub contextual: bool,
}

impl Default for Config {
    fn default() -> Config {
        Config { ext_bound: None, site_bound: None, step_budget: 50_000_000, contextual: true }
    }
}

/// A single support question.
#[derive(Clone, Debug)]
pub struct Query {
    pub base: BaseRef,
    pub site: Site,
    pub antecedents: Vec<Formula>,
    pub consequent: Formula,
}

/// A counterexample or a positive certificate attached to one clause.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extension: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inferon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent_base: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub clause: &'static str,
    pub formula: String,
    pub site: String,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Trace>,
}

impl Trace {
    /// Checks that each recorded verdict follows from its children by its clause.
    pub fn replays(&self) -> bool {
        let kids = self.children.iter().all(Trace::replays);
        let local = match self.clause {
            "And" => self.verdict == self.children.iter().all(|c| c.verdict) || self.children.len() < 2,
            "Inf" | "Implies" if !self.verdict => {
                self.witness.is_some()
                    && self.children.last().is_some_and(|c| !c.verdict)
                    && self.children[..self.children.len() - 1].iter().all(|c| c.verdict)
            }
            "ForAll" | "Box" if !self.verdict => self.witness.is_some() && self.children.iter().any(|c| !c.verdict),
            "Diamond" if self.verdict => self.witness.is_some() && self.children.iter().any(|c| c.verdict),
            "Or" | "Exists" | "Bot" if !self.verdict => self.witness.as_ref().is_some_and(|w| w.inferon.is_some()),
            _ => true,
        };
        kids && local
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Judgment {
    pub verdict: bool,
    pub trace: Trace,
}

impl Judgment {
    pub fn replays(&self) -> bool {
        self.trace.verdict == self.verdict && self.trace.replays()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.trace.witness.as_ref()
    }
}

type W = u32;
type S = u32;
type E = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Leaf { atom: Atom, pol: Polarity, local: W },
    Bot,
    And(E, E),
    Or(E, E),
    Imp(E, E),
    All(Name, E),
    Ex(Name, E),
    Box(u32, E),
    Dia(u32, E),
}

pub struct Evaluator<'u> {
    u: &'u Universe,
    cfg: Config,
    rule_ids: HashMap<Rule, u32>,
    rules: Vec<Rule>,
    world_ids: HashMap<Vec<u32>, W>,
    worlds: Vec<Vec<u32>>,
    world_names: HashMap<W, Name>,
    site_ids: HashMap<Site, S>,
    sites: Vec<Site>,
    node_ids: HashMap<Node, E>,
    nodes: Vec<Node>,
    agents: Vec<(Name, Vec<W>)>,
    pool: Vec<u32>,
    terms: Vec<Term>,
    range: Vec<E>,
    site_range: Vec<S>,
    engines: HashMap<W, Engine>,
    unions: HashMap<(W, W), W>,
    ext_cache: HashMap<W, Rc<Vec<W>>>,
    substs: HashMap<(E, Name, Term), E>,
    memo: HashMap<(W, S, E), bool>,
    seq_memo: HashMap<(W, S, Vec<E>, E), bool>,
    steps: u64,
    warnings: Vec<String>,
}

impl<'u> Evaluator<'u> {
    pub fn new(u: &'u Universe, cfg: Config) -> Evaluator<'u> {
        let mut ev = Evaluator {
            u,
            cfg,
            rule_ids: HashMap::new(),
            rules: Vec::new(),
            world_ids: HashMap::new(),
            worlds: Vec::new(),
            world_names: HashMap::new(),
            site_ids: HashMap::new(),
            sites: Vec::new(),
            node_ids: HashMap::new(),
            nodes: Vec::new(),
            agents: Vec::new(),
            pool: Vec::new(),
            terms: u.closed_terms(),
            range: Vec::new(),
            site_range: Vec::new(),
            engines: HashMap::new(),
            unions: HashMap::new(),
            ext_cache: HashMap::new(),
            substs: HashMap::new(),
            memo: HashMap::new(),
            seq_memo: HashMap::new(),
            steps: 0,
            warnings: Vec::new(),
        };
        ev.pool = u.candidates.iter().map(|r| ev.rule_id(r)).collect();
        ev.pool.sort_unstable();
        for a in u.agents.values() {
            let ws = a.bases.iter().map(|b| ev.world(b)).collect();
            ev.agents.push((a.name.clone(), ws));
        }
        let bases: Vec<W> = u.distinct_bases().iter().map(|b| ev.world(b)).collect();
        let vocab = u.vocabulary_with_fresh();
        for &w in &bases {
            for ia in &vocab {
                let e = ev.node(Node::Leaf { atom: ia.atom.clone(), pol: ia.pol, local: w });
                ev.range.push(e);
            }
        }
        ev.site_range = if ev.cfg.contextual { ev.build_site_range() } else { vec![ev.site_id(&Site::empty())] };
        ev
    }

    pub fn universe(&self) -> &Universe {
        self.u
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Atoms the candidate pool can assert outright; quantified sites are drawn from these.
    pub fn site_vocabulary(&self) -> Vec<InfAtom> {
        let set: BTreeSet<InfAtom> =
            self.u.candidates.iter().filter(|r| r.premises.is_empty()).map(|r| r.concl.clone()).collect();
        set.into_iter().collect()
    }

    fn build_site_range(&mut self) -> Vec<S> {
        let vocab = self.site_vocabulary();
        let bound = match self.cfg.site_bound {
            Some(b) => b,
            None if vocab.len() <= SITE_VOCABULARY_LIMIT => vocab.len(),
            None => {
                self.warnings.push(format!(
                    "site vocabulary has {} atoms; quantified sites limited to singletons",
                    vocab.len()
                ));
                1
            }
        };
        subsets(vocab.len(), bound)
            .into_iter()
            .map(|idx| {
                let s: Site = idx.into_iter().map(|i| vocab[i].clone()).collect();
                self.site_id(&s)
            })
            .collect()
    }

    /// The quantified sites, in enumeration order.
    pub fn quantified_sites(&self) -> Vec<Site> {
        self.site_range.iter().map(|&s| self.sites[s as usize].clone()).collect()
    }

    fn rule_id(&mut self, r: &Rule) -> u32 {
        if let Some(&i) = self.rule_ids.get(r) {
            return i;
        }
        let i = self.rules.len() as u32;
        self.rules.push(r.clone());
        self.rule_ids.insert(r.clone(), i);
        i
    }

    fn world_of_ids(&mut self, mut ids: Vec<u32>) -> W {
        ids.sort_unstable();
        ids.dedup();
        if let Some(&w) = self.world_ids.get(&ids) {
            return w;
        }
        let w = self.worlds.len() as W;
        self.worlds.push(ids.clone());
        self.world_ids.insert(ids, w);
        w
    }

    fn world(&mut self, b: &Base) -> W {
        let ids = b.rules.iter().map(|r| self.rule_id(r)).collect();
        let w = self.world_of_ids(ids);
        self.world_names.entry(w).or_insert_with(|| b.name.clone());
        w
    }

    fn base_of(&self, w: W) -> Base {
        let name = self.world_names.get(&w).cloned().unwrap_or_else(|| crate::syntax::name("anonymous"));
        Base { name, rules: self.worlds[w as usize].iter().map(|&i| self.rules[i as usize].clone()).collect() }
    }

    fn union(&mut self, a: W, b: W) -> W {
        if a == b {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&w) = self.unions.get(&key) {
            return w;
        }
        let ids = self.worlds[a as usize].iter().chain(&self.worlds[b as usize]).copied().collect();
        let w = self.world_of_ids(ids);
        self.unions.insert(key, w);
        w
    }

    fn site_id(&mut self, s: &Site) -> S {
        if let Some(&i) = self.site_ids.get(s) {
            return i;
        }
        let i = self.sites.len() as S;
        self.sites.push(s.clone());
        self.site_ids.insert(s.clone(), i);
        i
    }

    fn site_union(&mut self, a: S, b: S) -> S {
        if a == b || self.sites[b as usize].is_empty() {
            return a;
        }
        if self.sites[a as usize].is_empty() {
            return b;
        }
        let s = self.sites[a as usize].union(&self.sites[b as usize]);
        self.site_id(&s)
    }

    fn node(&mut self, n: Node) -> E {
        if let Some(&e) = self.node_ids.get(&n) {
            return e;
        }
        let e = self.nodes.len() as E;
        self.nodes.push(n.clone());
        self.node_ids.insert(n, e);
        e
    }

    fn compile(&mut self, f: &Formula) -> Result<E> {
        let n = match f {
            Formula::Inferon(i) => {
                let local = self.world(&i.base);
                Node::Leaf { atom: i.atom.clone(), pol: i.pol, local }
            }
            Formula::Compound { .. } => return self.compile(&f.expand()?),
            Formula::Bot => Node::Bot,
            Formula::And(a, b) => Node::And(self.compile(a)?, self.compile(b)?),
            Formula::Or(a, b) => Node::Or(self.compile(a)?, self.compile(b)?),
            Formula::Implies(a, b) => Node::Imp(self.compile(a)?, self.compile(b)?),
            Formula::ForAll(v, b) => Node::All(v.clone(), self.compile(b)?),
            Formula::Exists(v, b) => Node::Ex(v.clone(), self.compile(b)?),
            Formula::Box(a, b) | Formula::Diamond(a, b) => {
                let idx = self
                    .agents
                    .iter()
                    .position(|(n, _)| n == a)
                    .ok_or_else(|| Error::Unresolved { kind: "agent", name: a.to_string() })?
                    as u32;
                if self.agents[idx as usize].1.is_empty() {
                    return Err(Error::Unsupported(format!("agent `{a}` has no bases")));
                }
                let body = self.compile(b)?;
                if matches!(f, Formula::Box(..)) {
                    Node::Box(idx, body)
                } else {
                    Node::Dia(idx, body)
                }
            }
        };
        Ok(self.node(n))
    }

    fn subst(&mut self, e: E, var: &Name, t: &Term) -> E {
        let key = (e, var.clone(), t.clone());
        if let Some(&r) = self.substs.get(&key) {
            return r;
        }
        let n = self.nodes[e as usize].clone();
        let out = match n {
            Node::Leaf { atom, pol, local } => {
                let a = atom.subst(var, t);
                if a == atom {
                    e
                } else {
                    self.node(Node::Leaf { atom: a, pol, local })
                }
            }
            Node::Bot => e,
            Node::And(a, b) | Node::Or(a, b) | Node::Imp(a, b) => {
                let (x, y) = (self.subst(a, var, t), self.subst(b, var, t));
                self.node(match self.nodes[e as usize] {
                    Node::And(..) => Node::And(x, y),
                    Node::Or(..) => Node::Or(x, y),
                    _ => Node::Imp(x, y),
                })
            }
            Node::All(v, _) | Node::Ex(v, _) if v == *var => e,
            Node::All(v, b) => {
                let b = self.subst(b, var, t);
                self.node(Node::All(v, b))
            }
            Node::Ex(v, b) => {
                let b = self.subst(b, var, t);
                self.node(Node::Ex(v, b))
            }
            Node::Box(a, b) => {
                let b = self.subst(b, var, t);
                self.node(Node::Box(a, b))
            }
            Node::Dia(a, b) => {
                let b = self.subst(b, var, t);
                self.node(Node::Dia(a, b))
            }
        };
        self.substs.insert(key, out);
        out
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.cfg.step_budget {
            return Err(Error::Budget(self.cfg.step_budget));
        }
        Ok(())
    }

    /// Extensions `w ∪ S`, smallest `S` first; `w` itself comes first.
    fn ext(&mut self, w: W) -> Result<Rc<Vec<W>>> {
        if let Some(x) = self.ext_cache.get(&w) {
            return Ok(x.clone());
        }
        let have = &self.worlds[w as usize];
        let missing: Vec<u32> = self.pool.iter().copied().filter(|r| have.binary_search(r).is_err()).collect();
        let bound = self.cfg.ext_bound.unwrap_or(missing.len()).min(missing.len());
        if self.cfg.ext_bound.is_none() && missing.len() > 20 {
            return Err(Error::Unsupported(format!(
                "{} candidate rules give too many extensions; set an extension bound",
                missing.len()
            )));
        }
        let mut out = Vec::new();
        for idx in subsets(missing.len(), bound) {
            let mut ids = self.worlds[w as usize].clone();
            ids.extend(idx.into_iter().map(|i| missing[i]));
            out.push(self.world_of_ids(ids));
        }
        let out = Rc::new(out);
        self.ext_cache.insert(w, out.clone());
        Ok(out)
    }

    fn leaf(&mut self, w: W, s: S, atom: &Atom, pol: Polarity, local: W) -> Result<bool> {
        if !atom.is_closed() {
            return Err(Error::OpenAtom(atom.to_string()));
        }
        let world = self.union(w, local);
        let site = self.sites[s as usize].clone();
        let engine = match self.engines.entry(world) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                let rules: Vec<&Rule> = self.worlds[world as usize].iter().map(|&i| &self.rules[i as usize]).collect();
                v.insert(Engine::new(rules))
            }
        };
        Ok(engine.derives(&site, &InfAtom { atom: atom.clone(), pol }))
    }

    fn sup(&mut self, w: W, s: S, e: E) -> Result<bool> {
        if let Some(&v) = self.memo.get(&(w, s, e)) {
            return Ok(v);
        }
        self.tick()?;
        let v = match self.nodes[e as usize].clone() {
            Node::Leaf { atom, pol, local } => self.leaf(w, s, &atom, pol, local)?,
            Node::And(a, b) => self.sup(w, s, a)? && self.sup(w, s, b)?,
            Node::Imp(a, b) => self.seq(w, s, &[a], b)?,
            Node::Or(a, b) => self.or_witness(w, s, a, b)?.is_none(),
            Node::Bot => self.bot_witness(w, s)?.is_none(),
            Node::All(v, b) => self.all_witness(w, s, &v, b)?.is_none(),
            Node::Ex(v, b) => self.ex_witness(w, s, &v, b)?.is_none(),
            Node::Box(a, b) => self.box_witness(w, s, a, b, false)?.is_none(),
            Node::Dia(a, b) => self.box_witness(w, s, a, b, true)?.is_some(),
        };
        self.memo.insert((w, s, e), v);
        Ok(v)
    }

    fn seq(&mut self, w: W, s: S, ants: &[E], c: E) -> Result<bool> {
        Ok(self.seq_witness(w, s, ants, c)?.is_none())
    }

    /// The first extension and site where the antecedents hold but the consequent fails.
    fn seq_witness(&mut self, w: W, s: S, ants: &[E], c: E) -> Result<Option<(W, S)>> {
        if ants.is_empty() {
            return Ok(if self.sup(w, s, c)? { None } else { Some((w, s)) });
        }
        let mut key_ants = ants.to_vec();
        key_ants.sort_unstable();
        key_ants.dedup();
        let key = (w, s, key_ants, c);
        if self.seq_memo.get(&key) == Some(&true) {
            return Ok(None);
        }
        self.tick()?;
        let sites = self.site_range.clone();
        let mut found = None;
        'outer: for &d in self.ext(w)?.iter() {
            for &p in &sites {
                let mut all = true;
                for &a in ants {
                    if !self.sup(d, p, a)? {
                        all = false;
                        break;
                    }
                }
                if all {
                    let sp = self.site_union(s, p);
                    if !self.sup(d, sp, c)? {
                        found = Some((d, p));
                        break 'outer;
                    }
                }
            }
        }
        self.seq_memo.insert(key, found.is_none());
        Ok(found)
    }

    fn or_witness(&mut self, w: W, s: S, a: E, b: E) -> Result<Option<(W, E)>> {
        let range = self.range.clone();
        for &c in self.ext(w)?.iter() {
            for &i in &range {
                if self.sup(c, s, i)? {
                    continue;
                }
                if self.seq(c, s, &[a], i)? && self.seq(c, s, &[b], i)? {
                    return Ok(Some((c, i)));
                }
            }
        }
        Ok(None)
    }

    fn bot_witness(&mut self, w: W, s: S) -> Result<Option<E>> {
        let range = self.range.clone();
        for &i in &range {
            if !self.sup(w, s, i)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn all_witness(&mut self, w: W, s: S, v: &Name, b: E) -> Result<Option<(Term, E)>> {
        for t in self.terms.clone() {
            let inst = self.subst(b, v, &t);
            if !self.sup(w, s, inst)? {
                return Ok(Some((t, inst)));
            }
        }
        Ok(None)
    }

    fn ex_witness(&mut self, w: W, s: S, v: &Name, b: E) -> Result<Option<(W, E)>> {
        let insts: Vec<E> = self.terms.clone().iter().map(|t| self.subst(b, v, t)).collect();
        let range = self.range.clone();
        for &c in self.ext(w)?.iter() {
            'iota: for &i in &range {
                if self.sup(c, s, i)? {
                    continue;
                }
                for &x in &insts {
                    if !self.seq(c, s, &[x], i)? {
                        continue 'iota;
                    }
                }
                return Ok(Some((c, i)));
            }
        }
        Ok(None)
    }

    /// For boxes the first agent base that fails; for diamonds the first that succeeds.
    fn box_witness(&mut self, w: W, s: S, a: u32, b: E, diamond: bool) -> Result<Option<W>> {
        let bases = self.agents[a as usize].1.clone();
        for base in bases {
            let x = self.union(w, base);
            if self.sup(x, s, b)? == diamond {
                return Ok(Some(base));
            }
        }
        Ok(None)
    }

    // ---- public surface ----

    /// `⊩^site_base φ`.
    pub fn support(&mut self, base: &Base, site: &Site, phi: &Formula) -> Result<bool> {
        self.sequent(base, site, &[], phi)
    }

    /// `Θ ⊩^site_base φ`.
    pub fn sequent(&mut self, base: &Base, site: &Site, theta: &[Formula], phi: &Formula) -> Result<bool> {
        let (w, s, ants, c) = self.prepare(base, site, theta, phi)?;
        self.seq(w, s, &ants, c)
    }

    fn prepare(&mut self, base: &Base, site: &Site, theta: &[Formula], phi: &Formula) -> Result<(W, S, Vec<E>, E)> {
        for f in theta.iter().chain(std::iter::once(phi)) {
            if !f.is_closed() {
                return Err(Error::Unsupported(format!("open formula `{f}`")));
            }
        }
        let w = self.world(base);
        let s = self.site_id(site);
        let ants = theta.iter().map(|f| self.compile(f)).collect::<Result<Vec<_>>>()?;
        let c = self.compile(phi)?;
        Ok((w, s, ants, c))
    }

    /// Evaluates and records a trace down to `depth` clause levels.
    pub fn judge(&mut self, base: &Base, site: &Site, theta: &[Formula], phi: &Formula, depth: usize) -> Result<Judgment> {
        let (w, s, ants, c) = self.prepare(base, site, theta, phi)?;
        let verdict = self.seq(w, s, &ants, c)?;
        let trace = if ants.is_empty() {
            self.explain(w, w, s, c, depth)?
        } else {
            self.explain_seq(w, s, &ants, c, depth)?
        };
        Ok(Judgment { verdict, trace })
    }

    /// Θ ⊩ φ in every base drawn from the candidate pool.
    pub fn valid(&mut self, theta: &[Formula], phi: &Formula, depth: usize) -> Result<Judgment> {
        let empty = Base::empty();
        let (w, _, ants, c) = self.prepare(&empty, &Site::empty(), theta, phi)?;
        let s = self.site_id(&Site::empty());
        for &b in self.ext(w)?.iter() {
            if !self.seq(b, s, &ants, c)? {
                let mut trace = if ants.is_empty() {
                    self.explain(b, b, s, c, depth)?
                } else {
                    self.explain_seq(b, s, &ants, c, depth)?
                };
                let base = self.base_of(b);
                let w = trace.witness.get_or_insert_with(Witness::default);
                if w.extension.is_empty() {
                    w.extension = base.rules.iter().map(|r| r.to_string()).collect();
                }
                return Ok(Judgment { verdict: false, trace });
            }
        }
        let trace = Trace {
            clause: "Validity",
            formula: show_sequent(theta, phi),
            site: Site::empty().to_string(),
            verdict: true,
            witness: None,
            children: Vec::new(),
        };
        Ok(Judgment { verdict: true, trace })
    }

    /// The bases `base ∪ S` for `S` drawn from the candidate pool.
    pub fn extensions(&mut self, base: &Base) -> Result<Vec<Base>> {
        let w = self.world(base);
        let name = base.name.clone();
        Ok(self
            .ext(w)?
            .iter()
            .map(|&x| {
                let mut b = self.base_of(x);
                b.name = name.clone();
                b
            })
            .collect())
    }

    fn show(&self, e: E) -> String {
        let wrap = |x: E| {
            let s = self.show(x);
            match self.nodes[x as usize] {
                Node::Leaf { .. } | Node::Bot | Node::Box(..) | Node::Dia(..) => s,
                _ => format!("({s})"),
            }
        };
        match &self.nodes[e as usize] {
            Node::Leaf { atom, pol, local } => {
                let n = self.world_names.get(local).map(|n| n.to_string()).unwrap_or_else(|| "?".into());
                format!("<{atom} @ {n}, {pol}>")
            }
            Node::Bot => "bot".into(),
            Node::And(a, b) => format!("{} & {}", wrap(*a), wrap(*b)),
            Node::Or(a, b) => format!("{} | {}", wrap(*a), wrap(*b)),
            Node::Imp(a, b) => format!("{} -> {}", wrap(*a), wrap(*b)),
            Node::All(v, b) => format!("all {v}. {}", self.show(*b)),
            Node::Ex(v, b) => format!("ex {v}. {}", self.show(*b)),
            Node::Box(a, b) => format!("[{}] {}", self.agents[*a as usize].0, wrap(*b)),
            Node::Dia(a, b) => format!("<{}> {}", self.agents[*a as usize].0, wrap(*b)),
        }
    }

    fn added(&self, from: W, to: W) -> Vec<String> {
        let have = &self.worlds[from as usize];
        self.worlds[to as usize]
            .iter()
            .filter(|r| have.binary_search(r).is_err())
            .map(|&r| self.rules[r as usize].to_string())
            .collect()
    }

    fn node_trace(&self, clause: &'static str, s: S, e: E, verdict: bool) -> Trace {
        Trace {
            clause,
            formula: self.show(e),
            site: self.sites[s as usize].to_string(),
            verdict,
            witness: None,
            children: Vec::new(),
        }
    }

    fn explain_seq(&mut self, w: W, s: S, ants: &[E], c: E, depth: usize) -> Result<Trace> {
        let verdict = self.seq(w, s, ants, c)?;
        let formula = format!(
            "{} |- {}",
            ants.iter().map(|&a| self.show(a)).collect::<Vec<_>>().join(", "),
            self.show(c)
        );
        let mut t = Trace {
            clause: "Inf",
            formula,
            site: self.sites[s as usize].to_string(),
            verdict,
            witness: None,
            children: Vec::new(),
        };
        if let Some((d, p)) = self.seq_witness(w, s, ants, c)? {
            t.witness = Some(Witness {
                extension: self.added(w, d),
                site: Some(self.sites[p as usize].to_string()),
                ..Witness::default()
            });
            if depth > 0 {
                for &a in ants {
                    t.children.push(self.explain(d, d, p, a, depth - 1)?);
                }
                let sp = self.site_union(s, p);
                t.children.push(self.explain(d, d, sp, c, depth - 1)?);
            }
        }
        Ok(t)
    }

    fn explain(&mut self, root: W, w: W, s: S, e: E, depth: usize) -> Result<Trace> {
        let verdict = self.sup(w, s, e)?;
        let node = self.nodes[e as usize].clone();
        let clause = match node {
            Node::Leaf { .. } => "At",
            Node::Bot => "Bot",
            Node::And(..) => "And",
            Node::Or(..) => "Or",
            Node::Imp(..) => "Implies",
            Node::All(..) => "ForAll",
            Node::Ex(..) => "Exists",
            Node::Box(..) => "Box",
            Node::Dia(..) => "Diamond",
        };
        let mut t = self.node_trace(clause, s, e, verdict);
        if w != root {
            let ext = self.added(root, w);
            if !ext.is_empty() && matches!(node, Node::Leaf { .. }) {
                t.witness = Some(Witness { extension: ext, ..Witness::default() });
            }
        }
        match node {
            Node::Leaf { .. } => {}
            Node::And(a, b) => {
                if depth > 0 {
                    t.children.push(self.explain(root, w, s, a, depth - 1)?);
                    if verdict || t.children[0].verdict {
                        t.children.push(self.explain(root, w, s, b, depth - 1)?);
                    }
                }
            }
            Node::Imp(a, b) => {
                if let Some((d, p)) = self.seq_witness(w, s, &[a], b)? {
                    t.witness = Some(Witness {
                        extension: self.added(w, d),
                        site: Some(self.sites[p as usize].to_string()),
                        ..Witness::default()
                    });
                    if depth > 0 {
                        t.children.push(self.explain(d, d, p, a, depth - 1)?);
                        let sp = self.site_union(s, p);
                        t.children.push(self.explain(d, d, sp, b, depth - 1)?);
                    }
                }
            }
            Node::Or(a, b) => {
                if let Some((c, i)) = self.or_witness(w, s, a, b)? {
                    t.witness =
                        Some(Witness { extension: self.added(w, c), inferon: Some(self.show(i)), ..Witness::default() });
                }
            }
            Node::Bot => {
                if let Some(i) = self.bot_witness(w, s)? {
                    t.witness = Some(Witness { inferon: Some(self.show(i)), ..Witness::default() });
                }
            }
            Node::All(v, b) => {
                if let Some((term, inst)) = self.all_witness(w, s, &v, b)? {
                    t.witness = Some(Witness { term: Some(term.to_string()), ..Witness::default() });
                    if depth > 0 {
                        t.children.push(self.explain(root, w, s, inst, depth - 1)?);
                    }
                }
            }
            Node::Ex(v, b) => {
                if let Some((c, i)) = self.ex_witness(w, s, &v, b)? {
                    t.witness =
                        Some(Witness { extension: self.added(w, c), inferon: Some(self.show(i)), ..Witness::default() });
                }
            }
            Node::Box(a, b) | Node::Dia(a, b) => {
                let diamond = matches!(node, Node::Dia(..));
                if let Some(base) = self.box_witness(w, s, a, b, diamond)? {
                    let name = self.world_names.get(&base).map(|n| n.to_string()).unwrap_or_default();
                    t.witness = Some(Witness { agent_base: Some(name), ..Witness::default() });
                    if depth > 0 {
                        let x = self.union(w, base);
                        t.children.push(self.explain(x, x, s, b, depth - 1)?);
                    }
                }
            }
        }
        Ok(t)
    }
}

fn show_sequent(theta: &[Formula], phi: &Formula) -> String {
    let ants: Vec<String> = theta.iter().map(|f| f.to_string()).collect();
    format!("{} |- {phi}", ants.join(", "))
}

/// Index sets of size at most `k` drawn from `0..n`, by size and then lexicographically.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&l| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The bases `base ∪ S` for `S ⊆` candidate pool, deduplicated, `base` first.
pub fn extensions(u: &Universe, base: &Base) -> Result<Vec<Base>> {
    Evaluator::new(u, Config::default()).extensions(base)
}

pub fn supports(u: &Universe, q: &Query, cfg: &Config) -> Result<Judgment> {
    let mut ev = Evaluator::new(u, cfg.clone());
    ev.judge(&q.base, &q.site, &[], &q.consequent, 4)
}

pub fn supports_sequent(u: &Universe, q: &Query, cfg: &Config) -> Result<Judgment> {
    let mut ev = Evaluator::new(u, cfg.clone());
    ev.judge(&q.base, &q.site, &q.antecedents, &q.consequent, 4)
}

pub fn validity(u: &Universe, theta: &[Formula], phi: &Formula, cfg: &Config) -> Result<Judgment> {
    Evaluator::new(u, cfg.clone()).valid(theta, phi, 4)
}
