//! The worked-example corpus: DSL files with expected verdicts, and a runner.
//!
//! The files ship inside the library. Setting `INFERON_DATA_DIR` points the
//! loader at a directory whose `<name>.inf` files take precedence; any extra
//! `.inf` files there become runnable scenarios too.

use crate::derive;
use crate::error::{Error, Result};
use crate::flow::{self, PreInferomorphism, StockChannel};
use crate::prover::{self, ProverConfig};
use crate::semantics::Evaluator;
use crate::syntax::{parse_model, Judgement, Model, Rule};
use serde::Serialize;
use std::path::PathBuf;

pub const DATA_DIR_VAR: &str = "INFERON_DATA_DIR";

struct Shipped {
    name: &'static str,
    summary: &'static str,
    text: &'static str,
}

const SHIPPED: [Shipped; 6] = [
    Shipped {
        name: "smoke-fire",
        summary: "No smoke without fire: an attuned observer supports fire on the mountain",
        text: include_str!("../data/scenarios/smoke-fire.inf"),
    },
    Shipped {
        name: "modality",
        summary: "Inferential capability via modality: agents attuned or not to the constraint",
        text: include_str!("../data/scenarios/modality.inf"),
    },
    Shipped {
        name: "wise-men",
        summary: "The wise men: announcements go no, no, yes",
        text: include_str!("../data/scenarios/wise-men.inf"),
    },
    Shipped {
        name: "flashlight",
        summary: "Flashlight channel: a switch that is on carries the information that the bulb is lit",
        text: include_str!("../data/scenarios/flashlight.inf"),
    },
    Shipped {
        name: "access-control",
        summary: "Access control: password then token grants access, over all site pairs",
        text: include_str!("../data/scenarios/access-control.inf"),
    },
    Shipped {
        name: "airport",
        summary: "Airport security: sites along six locations and the reconciliation at the aircraft",
        text: include_str!("../data/scenarios/airport.inf"),
    },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub name: String,
    pub summary: String,
    pub source: String,
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_VAR).map(PathBuf::from).filter(|p| p.is_dir())
}

fn first_comment(text: &str) -> String {
    text.lines()
        .find_map(|l| l.trim().strip_prefix('#').map(|c| c.trim().to_string()))
        .unwrap_or_default()
}

/// The shipped scenarios, then any extra files from the data directory, sorted by name within each group.
pub fn list() -> Result<Vec<Entry>> {
    let dir = data_dir();
    let mut out: Vec<Entry> = SHIPPED
        .iter()
        .map(|s| {
            let overridden = dir.as_ref().map(|d| d.join(format!("{}.inf", s.name))).filter(|p| p.is_file());
            Entry {
                name: s.name.to_string(),
                summary: s.summary.to_string(),
                source: overridden.map_or_else(|| "builtin".to_string(), |p| p.display().to_string()),
            }
        })
        .collect();
    if let Some(d) = dir {
        let mut extra = Vec::new();
        let entries = std::fs::read_dir(&d).map_err(|e| Error::Io(format!("{}: {e}", d.display())))?;
        for e in entries {
            let path = e.map_err(|e| Error::Io(e.to_string()))?.path();
            let stem = match (path.extension().and_then(|x| x.to_str()), path.file_stem().and_then(|x| x.to_str())) {
                (Some("inf"), Some(stem)) => stem.to_string(),
                _ => continue,
            };
            if SHIPPED.iter().any(|s| s.name == stem) {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            extra.push(Entry { name: stem, summary: first_comment(&text), source: path.display().to_string() });
        }
        extra.sort_by(|a, b| a.name.cmp(&b.name));
        out.extend(extra);
    }
    Ok(out)
}

/// The DSL text of a scenario.
pub fn source(name: &str) -> Result<String> {
    if let Some(d) = data_dir() {
        let path = d.join(format!("{name}.inf"));
        if path.is_file() {
            return std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())));
        }
    }
    SHIPPED
        .iter()
        .find(|s| s.name == name)
        .map(|s| s.text.to_string())
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

pub fn load(name: &str) -> Result<Model> {
    parse_model(&source(name)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub check: String,
    pub judgement: String,
    pub expected: bool,
    /// `None` when evaluation failed.
    pub actual: Option<bool>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub budget: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub passed: bool,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| !o.pass)
    }

    pub fn hit_budget(&self) -> bool {
        self.outcomes.iter().any(|o| o.budget)
    }
}

pub fn run(name: &str, cfg: &ProverConfig) -> Result<Report> {
    Ok(run_model(name, &load(name)?, cfg))
}

/// Evaluates every check of a model against its expected verdict.
pub fn run_model(label: &str, m: &Model, cfg: &ProverConfig) -> Report {
    let mut ev = Evaluator::new(&m.universe, cfg.eval.clone());
    let outcomes: Vec<Outcome> = m
        .checks
        .iter()
        .map(|c| {
            let (actual, detail, error, budget) = match evaluate(m, &mut ev, &c.judgement, cfg) {
                Ok((v, d)) => (Some(v), d, None, false),
                Err(e) => (None, None, Some(e.to_string()), e.is_budget()),
            };
            Outcome {
                check: c.name.clone(),
                judgement: c.judgement.to_string(),
                expected: c.expect,
                actual,
                pass: actual == Some(c.expect),
                detail,
                error,
                budget,
            }
        })
        .collect();
    Report { scenario: label.to_string(), passed: outcomes.iter().all(|o| o.pass), outcomes }
}

/// The verdict of one judgement plus a short explanation where one is cheap.
pub fn evaluate(m: &Model, ev: &mut Evaluator<'_>, j: &Judgement, cfg: &ProverConfig) -> Result<(bool, Option<String>)> {
    let u = &m.universe;
    Ok(match j {
        Judgement::Derive { base, site, goal } => match derive::derivation(base, site, goal) {
            Some(d) => (true, Some(format!("derivation of size {}", d.tree.size()))),
            None => (false, None),
        },
        Judgement::Support { base, site, antecedents, consequent } => {
            let v = ev.sequent(base, site, antecedents, consequent)?;
            let detail = if v {
                None
            } else {
                let jd = ev.judge(base, site, antecedents, consequent, 1)?;
                jd.witness().map(|w| serde_json::to_string(w).unwrap_or_default())
            };
            (v, detail)
        }
        Judgement::Valid { antecedents, consequent } => {
            let jd = ev.valid(antecedents, consequent, 1)?;
            let detail = jd.witness().map(|w| serde_json::to_string(w).unwrap_or_default());
            (jd.verdict, detail)
        }
        Judgement::Prove { antecedents, consequent } => match prover::nj_prove(u, antecedents, consequent, cfg)? {
            Some(p) => {
                prover::check_proof(u, antecedents, consequent, &p, &cfg.eval).map_err(Error::Unsupported)?;
                (true, Some(format!("proof with {} rule applications", p.size())))
            }
            None => (false, None),
        },
        Judgement::Comp3 { base, antecedents, consequent } => {
            let r = prover::check_comp3(u, antecedents, consequent, base, &cfg.eval)?;
            (r.agree, Some(format!("derivable={} supported={}", r.derivable, r.supported)))
        }
        Judgement::Consistent { base } => match derive::clash(base, u) {
            Some(a) => (false, Some(format!("derives both polarities of {}", a.atom))),
            None => (true, None),
        },
        Judgement::Chu { morphism } => {
            let r = flow::check_chu(&PreInferomorphism::from(m.morphism(morphism)?), u)?;
            let detail = r.witness.as_ref().map(|w| serde_json::to_string(w).unwrap_or_default());
            (r.passed, detail)
        }
        Judgement::Quasi { morphism, reachable } => {
            let r = flow::is_quasi(&PreInferomorphism::from(m.morphism(morphism)?), u, reachable.as_ref());
            let detail = r.missed_up.as_ref().or(r.missed_down.as_ref()).map(|i| format!("misses {i}"));
            (r.quasi, detail)
        }
        Judgement::Connected { channel, left, right } => {
            let ch = StockChannel::resolve(m, m.channel(channel)?)?;
            match ch.connected(&left.0, &left.1, &right.0, &right.1)? {
                Some(t) => (true, Some(format!("via {t}"))),
                None => (false, None),
            }
        }
        Judgement::Carries { channel, left, right, pol } => {
            let ch = StockChannel::resolve(m, m.channel(channel)?)?;
            let v = ch.carries(ev, (&left.0, &left.1, &left.2), (&right.0, &right.1, &right.2), *pol)?;
            (v, None)
        }
        Judgement::Constraint { base, left, right, conclusion } => {
            let sites = ev.quantified_sites();
            for p in &sites {
                if !ev.support(base, p, left)? {
                    continue;
                }
                for q in &sites {
                    if ev.support(base, q, right)? && !ev.support(base, &p.union(q), conclusion)? {
                        return Ok((false, Some(format!("fails at sites {p} and {q}"))));
                    }
                }
            }
            (true, Some(format!("{} site pairs", sites.len() * sites.len())))
        }
        Judgement::Member { atom, site } => (site.contains(atom), None),
        Judgement::Inclusion { chain, label } => match flow::compose_chain(chain) {
            Ok(ch) => match label {
                Some(l) if *l != ch.label => (false, Some(format!("label is {}", ch.label))),
                _ => (true, Some(format!("label {}", ch.label))),
            },
            Err(e @ (Error::Flow(_) | Error::Endpoint(_))) => (false, Some(e.to_string())),
            Err(e) => return Err(e),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ablation {
    pub base: String,
    pub rule: String,
    /// Checks whose verdict no longer matches once the rule is removed.
    pub broken: Vec<String>,
}

/// Removes each named-base rule in turn and reruns the checks.
pub fn ablate(m: &Model, cfg: &ProverConfig) -> Result<Vec<Ablation>> {
    let mut out = Vec::new();
    for (base, rule) in m.shipped_rules() {
        let reduced = m.without_rule(&base, &rule)?;
        let report = run_model("ablation", &reduced, cfg);
        out.push(Ablation {
            base: base.to_string(),
            rule: Rule::to_string(&rule),
            broken: report.failures().map(|o| o.check.clone()).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_shipped_file_parses() {
        for s in &SHIPPED {
            let m = parse_model(s.text).unwrap_or_else(|e| panic!("{}: {e}", s.name));
            assert!(!m.checks.is_empty(), "{}", s.name);
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(load("no-such-example"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn smoke_fire_passes() {
        let r = run("smoke-fire", &ProverConfig::default()).unwrap();
        assert!(r.passed, "{:#?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn a_flipped_expectation_is_reported() {
        let mut m = load("smoke-fire").unwrap();
        m.checks[0].expect = !m.checks[0].expect;
        let r = run_model("flipped", &m, &ProverConfig::default());
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
    }
}
