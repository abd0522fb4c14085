//! Canonical DSL text for every syntax value. Output re-parses to an equal value.

use super::model::{Judgement, Model};
use super::{Atom, Base, Formula, InfAtom, Inferon, Plain, Premise, Rule, Site, Term};
use std::fmt::{self, Display, Formatter, Write};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
            Term::App(g, args) => write!(f, "{g}({})", join(args, ",")),
        }
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            f.write_str(&self.pred)
        } else {
            write!(f, "{}({})", self.pred, join(&self.args, ","))
        }
    }
}

impl Display for InfAtom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.atom, self.pol)
    }
}

impl Display for Premise {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.hyps.is_empty() {
            write!(f, "{}", self.goal)
        } else {
            write!(f, "({} => {})", join(&self.hyps, ", "), self.goal)
        }
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.premises.is_empty() {
            write!(f, "=> {}.", self.concl)
        } else {
            write!(f, "{} => {}.", join(&self.premises, ", "), self.concl)
        }
    }
}

impl Display for Inferon {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "<{} @ {}, {}>", self.atom, self.base.name, self.pol)
    }
}

impl Display for Site {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("{ }")
        } else {
            write!(f, "{{ {} }}", join(&self.0, ", "))
        }
    }
}

/// Binding strength of the outermost operator; operands weaker than their slot get parentheses.
fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::ForAll(..) | Formula::Exists(..) => 0,
        _ => 4,
    }
}

fn plain_strength(p: &Plain) -> u8 {
    match p {
        Plain::Implies(..) => 1,
        Plain::Or(..) => 2,
        Plain::And(..) => 3,
        Plain::ForAll(..) | Plain::Exists(..) => 0,
        _ => 4,
    }
}

fn slot(f: &mut Formatter<'_>, x: &Formula, min: u8) -> fmt::Result {
    if strength(x) < min {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

fn plain_slot(f: &mut Formatter<'_>, x: &Plain, min: u8) -> fmt::Result {
    if plain_strength(x) < min {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Inferon(i) => write!(f, "{i}"),
            Formula::Compound { body, base, pol } => write!(f, "compound <{body} @ {}, {pol}>", base.name),
            Formula::Bot => f.write_str("bot"),
            Formula::And(a, b) => {
                slot(f, a, 3)?;
                f.write_str(" & ")?;
                slot(f, b, 4)
            }
            Formula::Or(a, b) => {
                slot(f, a, 2)?;
                f.write_str(" | ")?;
                slot(f, b, 3)
            }
            Formula::Implies(a, b) => {
                slot(f, a, 2)?;
                f.write_str(" -> ")?;
                slot(f, b, 1)
            }
            Formula::ForAll(v, b) => write!(f, "all {v}. {b}"),
            Formula::Exists(v, b) => write!(f, "ex {v}. {b}"),
            Formula::Box(a, b) => {
                write!(f, "[{a}] ")?;
                slot(f, b, 4)
            }
            Formula::Diamond(a, b) => {
                write!(f, "<{a}> ")?;
                slot(f, b, 4)
            }
        }
    }
}

impl Display for Plain {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Plain::Atom(a) => write!(f, "{a}"),
            Plain::Bot => f.write_str("bot"),
            Plain::And(a, b) => {
                plain_slot(f, a, 3)?;
                f.write_str(" & ")?;
                plain_slot(f, b, 4)
            }
            Plain::Or(a, b) => {
                plain_slot(f, a, 2)?;
                f.write_str(" | ")?;
                plain_slot(f, b, 3)
            }
            Plain::Implies(a, b) => {
                plain_slot(f, a, 2)?;
                f.write_str(" -> ")?;
                plain_slot(f, b, 1)
            }
            Plain::ForAll(v, b) => write!(f, "all {v}. {b}"),
            Plain::Exists(v, b) => write!(f, "ex {v}. {b}"),
        }
    }
}

fn join<T: Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn sequent(ants: &[Formula], cons: &Formula) -> String {
    if ants.is_empty() {
        format!("|- {cons}")
    } else {
        format!("{} |- {cons}", join(ants, ", "))
    }
}

fn at(site: &Site) -> String {
    if site.is_empty() {
        String::new()
    } else {
        format!(" at {site}")
    }
}

impl Display for Judgement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Judgement::Derive { base, site, goal } => write!(f, "derive {}{} |- {goal}", base.name, at(site)),
            Judgement::Support { base, site, antecedents, consequent } => {
                write!(f, "support {}{} : {}", base.name, at(site), sequent(antecedents, consequent))
            }
            Judgement::Valid { antecedents, consequent } => write!(f, "valid {}", sequent(antecedents, consequent)),
            Judgement::Prove { antecedents, consequent } => write!(f, "prove {}", sequent(antecedents, consequent)),
            Judgement::Comp3 { base, antecedents, consequent } => {
                write!(f, "comp3 {} : {}", base.name, sequent(antecedents, consequent))
            }
            Judgement::Consistent { base } => write!(f, "consistent {}", base.name),
            Judgement::Chu { morphism } => write!(f, "chu {morphism}"),
            Judgement::Quasi { morphism, reachable } => match reachable {
                None => write!(f, "quasi {morphism}"),
                Some(r) => write!(f, "quasi {morphism} reachable {{ {} }}", join(r, ", ")),
            },
            Judgement::Connected { channel, left, right } => {
                write!(f, "connected {channel} {} {} {} {}", left.0, left.1, right.0, right.1)
            }
            Judgement::Carries { channel, left, right, pol } => write!(
                f,
                "carries {channel} {} {} {} {} {} {} {pol}",
                left.0, left.1, left.2, right.0, right.1, right.2
            ),
            Judgement::Constraint { base, left, right, conclusion } => {
                write!(f, "constraint {} : {left}, {right} => {conclusion}", base.name)
            }
            Judgement::Member { atom, site } => write!(f, "member {atom} in {site}"),
            Judgement::Inclusion { chain, label } => {
                write!(f, "inclusion {}", join(chain, " ~> "))?;
                match label {
                    Some(l) => write!(f, " label {l}"),
                    None => Ok(()),
                }
            }
        }
    }
}

pub fn print_base(b: &Base) -> String {
    if b.rules.is_empty() {
        format!("base {} {{ }}", b.name)
    } else {
        format!("base {} {{ {} }}", b.name, join(&b.rules, " "))
    }
}

pub fn print_site(name: &str, s: &Site) -> String {
    format!("site {name} {s}")
}

/// The whole model as DSL text, declarations before uses.
pub fn print_model(m: &Model) -> String {
    let u = &m.universe;
    let mut out = String::new();
    if !u.constants.is_empty() {
        let _ = writeln!(out, "const {}", join(&u.constants, " "));
    }
    for (p, n) in &u.preds {
        let _ = writeln!(out, "pred {p}/{n}");
    }
    for (g, n) in &u.functions {
        let _ = writeln!(out, "fun {g}/{n}");
    }
    if u.depth > 0 {
        let _ = writeln!(out, "depth {}", u.depth);
    }
    for (n, s) in &m.sites {
        let _ = writeln!(out, "{}", print_site(n, s));
    }
    for (n, b) in &u.bases {
        // The stored name of a base may differ from its key after renaming; the key wins.
        let _ = writeln!(out, "{}", print_base(&Base { name: n.clone(), rules: b.rules.clone() }));
    }
    if !u.candidates.is_empty() {
        let _ = writeln!(out, "candidates {{ {} }}", join(&u.candidates, " "));
    }
    for a in u.agents.values() {
        let names: Vec<&str> = a.bases.iter().map(|b| &*b.name).collect();
        let _ = writeln!(out, "agent {} {{ {} }}", a.name, names.join(", "));
    }
    for (n, f) in &m.formulas {
        let _ = writeln!(out, "formula {n} = {f}");
    }
    for d in m.morphisms.values() {
        let mut items: Vec<String> = d.down.iter().map(|(t, s)| format!("down {t} |-> {s}")).collect();
        items.extend(d.up.iter().map(|(r, s)| format!("up {r} |-> {s}")));
        let _ = writeln!(
            out,
            "morphism {} : {} -> {} over {} {{ {} }}",
            d.name,
            d.source.name,
            d.target.name,
            d.ambient.name,
            items.join(", ")
        );
    }
    for s in m.stocks.values() {
        let _ = writeln!(out, "stock {} = {} {{ {} }}", s.name, s.base.name, join(&s.terms, ", "));
    }
    for c in m.channels.values() {
        let legs: Vec<String> = c.legs.iter().map(|(f, s)| format!("{f} from {s}")).collect();
        let _ = writeln!(out, "channel {} core {} {{ {} }}", c.name, c.core, legs.join(", "));
    }
    for c in &m.checks {
        let _ = writeln!(out, "check {} : {} expect {}", c.name, c.judgement, c.expect);
    }
    out
}
