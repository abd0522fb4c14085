//! Line-oriented DSL reader. Undeclared constants, functions and predicates are
//! declared on first use; later uses must agree on arity.

use super::model::{ChannelDecl, Check, Judgement, Model, MorphismDecl, StockDecl};
use super::{name, Agent, Atom, Base, BaseRef, Formula, InfAtom, Inferon, Name, Plain, Polarity, Premise, Rule, Site, Term};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 24] = [
    "|->", "=>", "->", "~>", "|-", "{", "}", "(", ")", "<", ">", ",", ".", "/", "&", "|", "[", "]", "@", "+", ":", "=",
    ";", "!",
];

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line: ln + 1, col });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| Error::Parse { line: ln + 1, col, message: "number too large".into() })?;
                out.push(Spanned { tok: Tok::Num(n), line: ln + 1, col });
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push(Spanned { tok: Tok::Sym(s), line: ln + 1, col });
                    i += s.chars().count();
                }
                None => {
                    return Err(Error::Parse { line: ln + 1, col, message: format!("unexpected character `{c}`") })
                }
            }
        }
    }
    let line = text.lines().count() + 1;
    out.push(Spanned { tok: Tok::Eof, line, col: 1 });
    Ok(out)
}

const KEYWORDS: [&str; 4] = ["bot", "all", "ex", "compound"];

struct Parser<'m> {
    toks: Vec<Spanned>,
    pos: usize,
    model: &'m mut Model,
    bound: Vec<Name>,
    max_depth: usize,
}

impl<'m> Parser<'m> {
    fn new(text: &str, model: &'m mut Model) -> Result<Parser<'m>> {
        Ok(Parser { toks: lex(text)?, pos: 0, model, bound: Vec::new(), max_depth: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse { line: t.line, col: t.col, message: message.into() })
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.at_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.at_kw(k);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn kw(&mut self, k: &str) -> Result<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(format!("expected `{k}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            t => self.err(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn num(&mut self) -> Result<u64> {
        match *self.peek() {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(n)
            }
            ref t => self.err(format!("expected number, found {}", describe(t))),
        }
    }

    fn pol(&mut self) -> Result<Polarity> {
        match *self.peek() {
            Tok::Num(0) => {
                self.pos += 1;
                Ok(Polarity::Zero)
            }
            Tok::Num(1) => {
                self.pos += 1;
                Ok(Polarity::One)
            }
            ref t => self.err(format!("expected polarity 0 or 1, found {}", describe(t))),
        }
    }

    fn wrap<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => {
                let t = &self.toks[self.pos.saturating_sub(1)];
                Error::Parse { line: t.line, col: t.col, message: other.to_string() }
            }
        })
    }

    // ---- declarations ----

    fn model(&mut self) -> Result<()> {
        let mut explicit_depth = None;
        while *self.peek() != Tok::Eof {
            let line = self.line();
            let kw = self.ident()?;
            match kw.as_str() {
                "const" => {
                    while matches!(self.peek(), Tok::Ident(_)) && self.line() == line {
                        let c = self.ident()?;
                        self.model.universe.constants.insert(name(&c));
                    }
                }
                "pred" | "fun" => {
                    while matches!(self.peek(), Tok::Ident(_)) && self.line() == line {
                        let s = self.ident()?;
                        self.sym("/")?;
                        let n = self.num()? as usize;
                        let r = if kw == "pred" {
                            self.model.universe.declare_pred(&s, n)
                        } else {
                            self.model.universe.declare_fun(&s, n)
                        };
                        self.wrap(r)?;
                    }
                }
                "depth" => explicit_depth = Some(self.num()? as usize),
                "base" => {
                    let n = self.ident()?;
                    if n == Base::EMPTY || self.model.universe.bases.contains_key(n.as_str()) {
                        return self.err(format!("base `{n}` is already defined"));
                    }
                    let rules = self.rule_block()?;
                    self.model.universe.bases.insert(name(&n), Arc::new(Base::new(&n, rules)));
                }
                "candidates" => {
                    let rules = self.rule_block()?;
                    self.model.universe.candidates.extend(rules);
                }
                "site" => {
                    let n = self.ident()?;
                    let s = if self.eat_sym("=") { self.site_expr()? } else { self.site_set()? };
                    self.model.sites.insert(name(&n), s);
                }
                "agent" => {
                    let n = self.ident()?;
                    self.sym("{")?;
                    let mut bases = vec![self.base_expr()?];
                    while self.eat_sym(",") {
                        bases.push(self.base_expr()?);
                    }
                    self.sym("}")?;
                    self.model.universe.agents.insert(name(&n), Agent { name: name(&n), bases });
                }
                "formula" => {
                    let n = self.ident()?;
                    self.sym("=")?;
                    let f = self.formula()?;
                    self.model.formulas.insert(name(&n), f);
                }
                "morphism" => self.morphism()?,
                "stock" => {
                    let n = self.ident()?;
                    self.sym("=")?;
                    let base = self.base_expr()?;
                    self.sym("{")?;
                    let mut terms = BTreeSet::new();
                    if !self.at_sym("}") {
                        terms.insert(self.term()?);
                        while self.eat_sym(",") {
                            terms.insert(self.term()?);
                        }
                    }
                    self.sym("}")?;
                    self.model.stocks.insert(name(&n), StockDecl { name: name(&n), base, terms });
                }
                "channel" => {
                    let n = self.ident()?;
                    self.kw("core")?;
                    let core = self.ident()?;
                    self.sym("{")?;
                    let mut legs = Vec::new();
                    loop {
                        let m = self.ident()?;
                        self.kw("from")?;
                        let s = self.ident()?;
                        legs.push((name(&m), name(&s)));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.sym("}")?;
                    self.model.channels.insert(name(&n), ChannelDecl { name: name(&n), core: name(&core), legs });
                }
                "check" => {
                    let n = self.ident()?;
                    self.sym(":")?;
                    let judgement = self.judgement()?;
                    self.kw("expect")?;
                    let expect = match self.ident()?.as_str() {
                        "true" => true,
                        "false" => false,
                        _ => return self.err("expected `true` or `false`"),
                    };
                    self.model.checks.push(Check { name: n, judgement, expect });
                }
                other => {
                    self.pos -= 1;
                    return self.err(format!("unknown declaration `{other}`"));
                }
            }
        }
        let u = &mut self.model.universe;
        u.depth = explicit_depth.unwrap_or(0).max(self.max_depth);
        if let Some(d) = explicit_depth {
            if self.max_depth > d {
                return Err(Error::Unsupported(format!("a term exceeds the declared depth bound {d}")));
            }
        }
        Ok(())
    }

    fn morphism(&mut self) -> Result<()> {
        let n = self.ident()?;
        self.sym(":")?;
        let source = self.base_expr()?;
        self.sym("->")?;
        let target = self.base_expr()?;
        self.kw("over")?;
        let ambient = self.base_expr()?;
        self.sym("{")?;
        let mut down = BTreeMap::new();
        let mut up = BTreeMap::new();
        while !self.eat_sym("}") {
            if self.eat_kw("down") {
                let t = self.term()?;
                self.sym("|->")?;
                let s = self.term()?;
                if down.insert(t.clone(), s).is_some() {
                    return self.err(format!("`{t}` is mapped twice"));
                }
            } else if self.eat_kw("up") {
                let r = self.ident()?;
                self.sym("|->")?;
                let s = self.ident()?;
                let (a, b) = (self.model.universe.preds.get(r.as_str()), self.model.universe.preds.get(s.as_str()));
                match (a, b) {
                    (Some(&x), Some(&y)) if x != y => {
                        return self.err(format!("`{r}` has arity {x} but `{s}` has arity {y}"))
                    }
                    (None, _) | (_, None) => {
                        return self.err(format!("predicates `{r}` and `{s}` must be declared before use in a morphism"))
                    }
                    _ => {}
                }
                if up.insert(name(&r), name(&s)).is_some() {
                    return self.err(format!("`{r}` is mapped twice"));
                }
            } else {
                return self.err("expected `down`, `up` or `}`");
            }
            while self.eat_sym(",") || self.eat_sym(";") || self.eat_sym(".") {}
        }
        self.model.morphisms.insert(name(&n), MorphismDecl { name: name(&n), source, target, ambient, down, up });
        Ok(())
    }

    fn judgement(&mut self) -> Result<Judgement> {
        let kind = self.ident()?;
        Ok(match kind.as_str() {
            "derive" => {
                let base = self.base_expr()?;
                let site = if self.eat_kw("at") { self.site_expr()? } else { Site::empty() };
                self.sym("|-")?;
                let goal = self.iatom()?;
                Judgement::Derive { base, site, goal }
            }
            "support" => {
                let base = self.base_expr()?;
                let site = if self.eat_kw("at") { self.site_expr()? } else { Site::empty() };
                self.sym(":")?;
                let (antecedents, consequent) = self.sequent()?;
                Judgement::Support { base, site, antecedents, consequent }
            }
            "valid" | "prove" => {
                let (antecedents, consequent) = self.sequent()?;
                if kind == "valid" {
                    Judgement::Valid { antecedents, consequent }
                } else {
                    Judgement::Prove { antecedents, consequent }
                }
            }
            "comp3" => {
                let base = self.base_expr()?;
                self.sym(":")?;
                let (antecedents, consequent) = self.sequent()?;
                Judgement::Comp3 { base, antecedents, consequent }
            }
            "consistent" => Judgement::Consistent { base: self.base_expr()? },
            "chu" => Judgement::Chu { morphism: name(&self.ident()?) },
            "quasi" => {
                let morphism = name(&self.ident()?);
                let reachable = if self.eat_kw("reachable") {
                    self.sym("{")?;
                    let mut set = BTreeSet::new();
                    loop {
                        match self.formula_unary()? {
                            Formula::Inferon(i) => set.insert(i),
                            _ => return self.err("reachable sets list inferons"),
                        };
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.sym("}")?;
                    Some(set)
                } else {
                    None
                };
                Judgement::Quasi { morphism, reachable }
            }
            "connected" => {
                let channel = name(&self.ident()?);
                let l = (name(&self.ident()?), self.term()?);
                let r = (name(&self.ident()?), self.term()?);
                Judgement::Connected { channel, left: l, right: r }
            }
            "carries" => {
                let channel = name(&self.ident()?);
                let l = (name(&self.ident()?), name(&self.ident()?), self.term()?);
                let r = (name(&self.ident()?), name(&self.ident()?), self.term()?);
                let pol = self.pol()?;
                Judgement::Carries { channel, left: l, right: r, pol }
            }
            "constraint" => {
                let base = self.base_expr()?;
                self.sym(":")?;
                let left = self.formula()?;
                self.sym(",")?;
                let right = self.formula()?;
                self.sym("=>")?;
                let conclusion = self.formula()?;
                Judgement::Constraint { base, left, right, conclusion }
            }
            "member" => {
                let atom = self.iatom()?;
                self.kw("in")?;
                Judgement::Member { atom, site: self.site_expr()? }
            }
            "inclusion" => {
                let mut chain = vec![self.site_expr()?];
                while self.eat_sym("~>") {
                    chain.push(self.site_expr()?);
                }
                if chain.len() < 2 {
                    return self.err("an inclusion needs at least two sites");
                }
                let label = if self.eat_kw("label") { Some(self.site_expr()?) } else { None };
                Judgement::Inclusion { chain, label }
            }
            other => {
                self.pos -= 1;
                return self.err(format!("unknown judgement `{other}`"));
            }
        })
    }

    fn sequent(&mut self) -> Result<(Vec<Formula>, Formula)> {
        let mut ants = Vec::new();
        if !self.at_sym("|-") {
            ants.push(self.formula()?);
            while self.eat_sym(",") {
                ants.push(self.formula()?);
            }
        }
        self.sym("|-")?;
        Ok((ants, self.formula()?))
    }

    // ---- rules, atoms, terms ----

    fn rule_block(&mut self) -> Result<Vec<Rule>> {
        self.sym("{")?;
        let mut rules = Vec::new();
        while !self.eat_sym("}") {
            let r = self.rule()?;
            if !rules.contains(&r) {
                rules.push(r);
            }
        }
        Ok(rules)
    }

    fn rule(&mut self) -> Result<Rule> {
        let mut premises = Vec::new();
        while !self.at_sym("=>") {
            if self.eat_sym("(") {
                let mut hyps = BTreeSet::new();
                while !self.at_sym("=>") {
                    hyps.insert(self.iatom()?);
                    self.eat_sym(",");
                }
                self.sym("=>")?;
                let goal = self.iatom()?;
                self.sym(")")?;
                premises.push(Premise { hyps, goal });
            } else if self.at_sym("<") {
                premises.push(Premise::bare(self.iatom()?));
            } else {
                return self.err(format!("expected a premise or `=>`, found {}", describe(self.peek())));
            }
            self.eat_sym(",");
        }
        self.sym("=>")?;
        let concl = self.iatom()?;
        self.sym(".")?;
        Ok(Rule { premises, concl })
    }

    fn iatom(&mut self) -> Result<InfAtom> {
        self.sym("<")?;
        let a = self.atom()?;
        self.sym(",")?;
        let pol = self.pol()?;
        self.sym(">")?;
        let r = InfAtom::new(a, pol);
        self.wrap(r)
    }

    fn atom(&mut self) -> Result<Atom> {
        let p = self.ident()?;
        if KEYWORDS.contains(&p.as_str()) {
            self.pos -= 1;
            return self.err(format!("`{p}` is reserved"));
        }
        let mut args = Vec::new();
        if self.eat_sym("(") {
            args.push(self.term()?);
            while self.eat_sym(",") {
                args.push(self.term()?);
            }
            self.sym(")")?;
        }
        let r = self.model.universe.declare_pred(&p, args.len());
        self.wrap(r)?;
        Ok(Atom { pred: name(&p), args })
    }

    fn term(&mut self) -> Result<Term> {
        let s = self.ident()?;
        if self.eat_sym("(") {
            let mut args = vec![self.term()?];
            while self.eat_sym(",") {
                args.push(self.term()?);
            }
            self.sym(")")?;
            let r = self.model.universe.declare_fun(&s, args.len());
            self.wrap(r)?;
            let t = Term::App(name(&s), args);
            self.max_depth = self.max_depth.max(t.depth());
            return Ok(t);
        }
        if self.bound.iter().any(|v| **v == *s) {
            return Ok(Term::Var(name(&s)));
        }
        if self.model.universe.functions.contains_key(s.as_str()) {
            return self.err(format!("function `{s}` used without arguments"));
        }
        self.model.universe.constants.insert(name(&s));
        Ok(Term::Const(name(&s)))
    }

    // ---- bases and sites ----

    fn base_expr(&mut self) -> Result<BaseRef> {
        let mut acc = self.base_item()?;
        while self.eat_sym("+") {
            let b = self.base_item()?;
            acc = Arc::new(acc.union(&b));
        }
        Ok(acc)
    }

    fn base_item(&mut self) -> Result<BaseRef> {
        let n = self.ident()?;
        if n == "base" && self.at_sym("(") {
            self.sym("(")?;
            let s = self.ident()?;
            self.sym(")")?;
            let site = self.wrap(self.model.site(&s).cloned())?;
            return Ok(Arc::new(Base::new(&format!("base({s})"), site.iter().cloned().map(Rule::axiom))));
        }
        let r = self.model.universe.base(&n);
        self.wrap(r)
    }

    fn site_expr(&mut self) -> Result<Site> {
        let mut acc = self.site_item()?;
        while self.eat_sym("+") {
            acc = acc.union(&self.site_item()?);
        }
        Ok(acc)
    }

    fn site_item(&mut self) -> Result<Site> {
        if self.at_sym("{") {
            return self.site_set();
        }
        let n = self.ident()?;
        let r = self.model.site(&n).cloned();
        self.wrap(r)
    }

    fn site_set(&mut self) -> Result<Site> {
        self.sym("{")?;
        let mut atoms = BTreeSet::new();
        if !self.at_sym("}") {
            atoms.insert(self.iatom()?);
            while self.eat_sym(",") {
                atoms.insert(self.iatom()?);
            }
        }
        self.sym("}")?;
        Ok(Site(atoms))
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.formula_or()?;
        if self.eat_sym("->") {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> Result<Formula> {
        let mut acc = self.formula_and()?;
        while self.eat_sym("|") {
            acc = Formula::or(acc, self.formula_and()?);
        }
        Ok(acc)
    }

    fn formula_and(&mut self) -> Result<Formula> {
        let mut acc = self.formula_unary()?;
        while self.eat_sym("&") {
            acc = Formula::and(acc, self.formula_unary()?);
        }
        Ok(acc)
    }

    fn binder(&mut self) -> Result<Name> {
        let v = name(&self.ident()?);
        self.sym(".")?;
        Ok(v)
    }

    fn formula_unary(&mut self) -> Result<Formula> {
        if self.eat_kw("bot") {
            return Ok(Formula::Bot);
        }
        if self.eat_sym("(") {
            let f = self.formula()?;
            self.sym(")")?;
            return Ok(f);
        }
        for (kw, universal) in [("all", true), ("ex", false)] {
            if self.eat_kw(kw) {
                let v = self.binder()?;
                self.bound.push(v.clone());
                let body = self.formula();
                self.bound.pop();
                let body = Box::new(body?);
                return Ok(if universal { Formula::ForAll(v, body) } else { Formula::Exists(v, body) });
            }
        }
        if self.eat_sym("[") {
            let a = self.ident()?;
            self.sym("]")?;
            self.check_agent(&a)?;
            return Ok(Formula::Box(name(&a), Box::new(self.formula_unary()?)));
        }
        if self.eat_kw("compound") {
            self.sym("<")?;
            let body = self.plain()?;
            self.sym("@")?;
            let base = self.base_expr()?;
            self.sym(",")?;
            let pol = self.pol()?;
            self.sym(">")?;
            return Ok(Formula::Compound { body, base, pol });
        }
        if self.at_sym("<") {
            if matches!(self.peek_at(1), Tok::Ident(_)) && matches!(self.peek_at(2), Tok::Sym(">")) {
                self.pos += 1;
                let a = self.ident()?;
                self.sym(">")?;
                self.check_agent(&a)?;
                return Ok(Formula::Diamond(name(&a), Box::new(self.formula_unary()?)));
            }
            self.sym("<")?;
            let atom = self.atom()?;
            self.sym("@")?;
            let base = self.base_expr()?;
            self.sym(",")?;
            let pol = self.pol()?;
            self.sym(">")?;
            return Ok(Formula::Inferon(Inferon::new(atom, base, pol)));
        }
        self.err(format!("expected a formula, found {}", describe(self.peek())))
    }

    fn check_agent(&mut self, a: &str) -> Result<()> {
        let r = self.model.universe.agent(a).map(|_| ());
        self.wrap(r)
    }

    fn plain(&mut self) -> Result<Plain> {
        let lhs = self.plain_or()?;
        if self.eat_sym("->") {
            return Ok(Plain::Implies(Box::new(lhs), Box::new(self.plain()?)));
        }
        Ok(lhs)
    }

    fn plain_or(&mut self) -> Result<Plain> {
        let mut acc = self.plain_and()?;
        while self.eat_sym("|") {
            acc = Plain::Or(Box::new(acc), Box::new(self.plain_and()?));
        }
        Ok(acc)
    }

    fn plain_and(&mut self) -> Result<Plain> {
        let mut acc = self.plain_unary()?;
        while self.eat_sym("&") {
            acc = Plain::And(Box::new(acc), Box::new(self.plain_unary()?));
        }
        Ok(acc)
    }

    fn plain_unary(&mut self) -> Result<Plain> {
        if self.eat_kw("bot") {
            return Ok(Plain::Bot);
        }
        if self.eat_sym("(") {
            let p = self.plain()?;
            self.sym(")")?;
            return Ok(p);
        }
        for (kw, universal) in [("all", true), ("ex", false)] {
            if self.eat_kw(kw) {
                let v = self.binder()?;
                self.bound.push(v.clone());
                let body = self.plain();
                self.bound.pop();
                let body = Box::new(body?);
                return Ok(if universal { Plain::ForAll(v, body) } else { Plain::Exists(v, body) });
            }
        }
        Ok(Plain::Atom(self.atom()?))
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {}", describe(self.peek())));
        }
        Ok(())
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let mut model = Model::default();
    let mut p = Parser::new(text, &mut model)?;
    p.model()?;
    for r in model.universe.candidates.iter() {
        model.universe.check_rule(r)?;
    }
    Ok(model)
}

/// Parses a standalone formula against an existing model's declarations.
/// Symbols not yet declared are added to the model.
pub fn parse_formula(model: &mut Model, text: &str) -> Result<Formula> {
    let mut p = Parser::new(text, model)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_iatom(model: &mut Model, text: &str) -> Result<InfAtom> {
    let mut p = Parser::new(text, model)?;
    let a = p.iatom()?;
    p.finish()?;
    Ok(a)
}

pub fn parse_base_expr(model: &Model, text: &str) -> Result<BaseRef> {
    let mut scratch = model.clone();
    let mut p = Parser::new(text, &mut scratch)?;
    let b = p.base_expr()?;
    p.finish()?;
    Ok(b)
}

pub fn parse_site_expr(model: &Model, text: &str) -> Result<Site> {
    let mut scratch = model.clone();
    let mut p = Parser::new(text, &mut scratch)?;
    let s = p.site_expr()?;
    p.finish()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_constraint_is_a_level_one_rule() {
        let m = parse_model("base B { <P1,1> => <P2,1>. }").unwrap();
        let b = m.universe.base("B").unwrap();
        assert_eq!(b.rules.len(), 1);
        assert_eq!(b.rules.iter().next().unwrap().level(), 1);
    }

    #[test]
    fn empty_base() {
        let m = parse_model("base E { }").unwrap();
        assert!(m.universe.base("E").unwrap().is_empty());
    }

    #[test]
    fn hypothetical_premise() {
        let m = parse_model("base N { (<p,1> => <q,1>) => <r,1>. }").unwrap();
        let r = m.universe.base("N").unwrap().rules.iter().next().unwrap().clone();
        assert_eq!(r.level(), 2);
        assert_eq!(r.premises[0].hyps.len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_model("base B {\n  <P1,1> => <P2,2>. }") {
            Err(Error::Parse { line: 2, col, .. }) => assert_eq!(col, 17),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_model("base B { <P(a),1> => <P,1>. }"), Err(Error::Parse { .. })));
        assert!(matches!(parse_model("check c : derive Z |- <p,1> expect true"), Err(Error::Parse { .. })));
    }

    #[test]
    fn precedence_and_binders() {
        let mut m = parse_model("base E { }").unwrap();
        let f = parse_formula(&mut m, "<p @ E,1> & <q @ E,1> | <r @ E,1> -> <s @ E,1> -> bot").unwrap();
        let Formula::Implies(l, r) = f else { panic!() };
        assert!(matches!(*l, Formula::Or(..)));
        assert!(matches!(*r, Formula::Implies(..)));
        let g = parse_formula(&mut m, "all x. <P(x) @ E,1> -> <Q(x) @ E,1>").unwrap();
        let Formula::ForAll(_, body) = g else { panic!() };
        assert!(matches!(*body, Formula::Implies(..)));
        assert!(!body.is_closed());
    }

    #[test]
    fn diamond_and_inferon_are_told_apart() {
        let mut m = parse_model("base E { }\nagent a { E }").unwrap();
        let f = parse_formula(&mut m, "<a> <a @ E, 1>").unwrap();
        assert!(matches!(f, Formula::Diamond(..)));
    }

    #[test]
    fn base_of_site_expression() {
        let m = parse_model("site S { <p,1>, <q,0> }\nbase B { }").unwrap();
        let b = m.base_expr("B+base(S)").unwrap();
        assert_eq!(b.rules.len(), 2);
        assert!(b.rules.iter().all(|r| r.level() == 0));
    }
}
