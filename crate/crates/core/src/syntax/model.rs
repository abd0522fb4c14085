use super::{Base, BaseRef, Formula, InfAtom, Inferon, Name, Polarity, Site, Term, Universe};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: Name,
    pub source: BaseRef,
    pub target: BaseRef,
    pub ambient: BaseRef,
    pub down: BTreeMap<Term, Term>,
    pub up: BTreeMap<Name, Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StockDecl {
    pub name: Name,
    pub base: BaseRef,
    pub terms: BTreeSet<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: Name,
    pub core: Name,
    /// (morphism, source stock) per leg, in declaration order.
    pub legs: Vec<(Name, Name)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judgement {
    Derive { base: BaseRef, site: Site, goal: InfAtom },
    Support { base: BaseRef, site: Site, antecedents: Vec<Formula>, consequent: Formula },
    Valid { antecedents: Vec<Formula>, consequent: Formula },
    Prove { antecedents: Vec<Formula>, consequent: Formula },
    Comp3 { base: BaseRef, antecedents: Vec<Formula>, consequent: Formula },
    Consistent { base: BaseRef },
    Chu { morphism: Name },
    Quasi { morphism: Name, reachable: Option<BTreeSet<Inferon>> },
    Connected { channel: Name, left: (Name, Term), right: (Name, Term) },
    Carries { channel: Name, left: (Name, Name, Term), right: (Name, Name, Term), pol: Polarity },
    Constraint { base: BaseRef, left: Formula, right: Formula, conclusion: Formula },
    Member { atom: InfAtom, site: Site },
    Inclusion { chain: Vec<Site>, label: Option<Site> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub judgement: Judgement,
    pub expect: bool,
}

/// Everything a DSL file declares, fully resolved.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub universe: Universe,
    pub sites: BTreeMap<Name, Site>,
    pub formulas: BTreeMap<Name, Formula>,
    pub morphisms: BTreeMap<Name, MorphismDecl>,
    pub stocks: BTreeMap<Name, StockDecl>,
    pub channels: BTreeMap<Name, ChannelDecl>,
    pub checks: Vec<Check>,
}

impl Model {
    pub fn site(&self, n: &str) -> Result<&Site> {
        self.sites.get(n).ok_or_else(|| Error::Unresolved { kind: "site", name: n.to_string() })
    }

    pub fn morphism(&self, n: &str) -> Result<&MorphismDecl> {
        self.morphisms.get(n).ok_or_else(|| Error::Unresolved { kind: "morphism", name: n.to_string() })
    }

    pub fn stock(&self, n: &str) -> Result<&StockDecl> {
        self.stocks.get(n).ok_or_else(|| Error::Unresolved { kind: "stock", name: n.to_string() })
    }

    pub fn channel(&self, n: &str) -> Result<&ChannelDecl> {
        self.channels.get(n).ok_or_else(|| Error::Unresolved { kind: "channel", name: n.to_string() })
    }

    /// Resolves a command-line base expression such as `B+P1`.
    pub fn base_expr(&self, text: &str) -> Result<BaseRef> {
        super::parse::parse_base_expr(self, text)
    }

    pub fn site_expr(&self, text: &str) -> Result<Site> {
        super::parse::parse_site_expr(self, text)
    }

    /// Every rule of every named base, tagged by base name.
    pub fn shipped_rules(&self) -> Vec<(Name, super::Rule)> {
        self.universe
            .bases
            .iter()
            .flat_map(|(n, b)| b.rules.iter().map(move |r| (n.clone(), r.clone())))
            .collect()
    }

    /// A copy of the model with one rule removed from one named base, every
    /// reference to that base rebound to the reduced one.
    pub fn without_rule(&self, base: &str, rule: &super::Rule) -> Result<Model> {
        let old = self.universe.base(base)?;
        let mut reduced = (*old).clone();
        reduced.rules.remove(rule);
        let mut m = self.clone();
        m.universe.bases.insert(old.name.clone(), Arc::new(reduced));
        // Printing refers to bases by name, so re-parsing rebinds every use.
        let text = super::print::print_model(&m);
        super::parse::parse_model(&text)
    }
}

impl Default for Base {
    fn default() -> Base {
        Base::empty()
    }
}
