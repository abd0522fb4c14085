//! One routine per acceptance criterion. Each returns a short summary on
//! success and the list of failures otherwise, so the same body backs both
//! the per-crate suites and the printed acceptance run.

use super::gen;
use inferon::derive;
use inferon::flow::{base_of, check_chu, chu_equivalence, reachable_inferons, PreInferomorphism};
use inferon::prover::{self, build_base_n, check_comp3, flatten, ProverConfig};
use inferon::scenarios;
use inferon::semantics::{Config, Evaluator};
use inferon::syntax::{
    gamma_sequent, parse_formula, parse_iatom, parse_model, print_base, Base, Formula, InfAtom, Model, Plain, Site,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config as RunnerConfig, TestCaseError, TestRunner};
use std::time::Instant;

pub type Verdict = Result<String, String>;

fn fail(bad: Vec<String>) -> Result<(), String> {
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("\n"))
    }
}

fn connectives(f: &Formula) -> usize {
    f.children().iter().map(|c| 1 + connectives(c)).sum()
}

// ---- scenarios ------------------------------------------------------------

pub fn scenario_fidelity() -> Verdict {
    let start = Instant::now();
    let cfg = ProverConfig::default();
    let mut bad = Vec::new();
    let mut checks = 0;
    let names: Vec<String> = scenarios::list().map_err(|e| e.to_string())?.into_iter().map(|e| e.name).collect();
    for n in &names {
        let r = scenarios::run(n, &cfg).map_err(|e| e.to_string())?;
        checks += r.outcomes.len();
        for o in r.failures() {
            bad.push(format!("{}/{}: expected {} got {:?} {:?} {:?}", r.scenario, o.check, o.expected, o.actual, o.detail, o.error));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        bad.push(format!("corpus took {secs:.1} s"));
    }
    fail(bad)?;
    Ok(format!("{} scenarios, {checks} checks, {secs:.1} s", names.len()))
}

// ---- derivability oracle --------------------------------------------------

pub fn derive_oracle() -> Verdict {
    let start = Instant::now();
    let (asked, bad) = super::exhaustive_derive_sweep();
    let secs = start.elapsed().as_secs_f64();
    let mut bad = bad;
    if asked != 679_121 * 16 * 4 {
        bad.push(format!("asked {asked} queries"));
    }
    if secs >= 300.0 {
        bad.push(format!("sweep took {secs:.1} s"));
    }
    fail(bad)?;
    Ok(format!("{asked} queries, 0 mismatches, {secs:.1} s"))
}

// ---- metatheory -----------------------------------------------------------

pub const META_CASES: u32 = 256;

pub fn model(text: &str) -> Model {
    parse_model(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn base(m: &Model, n: &str) -> Base {
    (*m.universe.base(n).unwrap()).clone()
}

fn site(m: &mut Model, atoms: &[String]) -> Site {
    atoms.iter().map(|a| parse_iatom(m, a).unwrap()).collect()
}

const WORLDS: [&str; 3] = ["empty", "A", "B"];

/// The compound rewrite, one connective deep, written out here rather than borrowed.
fn one_step(body: &Plain, f: &Formula) -> Option<Formula> {
    let Formula::Compound { base, pol, .. } = f else { return None };
    let c = |p: &Plain, b| Formula::Compound { body: p.clone(), base: base.clone(), pol: b };
    use inferon::syntax::Polarity::{One, Zero};
    Some(match (body, pol) {
        (Plain::And(x, y), One) => Formula::and(c(x, One), c(y, One)),
        (Plain::And(x, y), Zero) => Formula::or(c(x, Zero), c(y, Zero)),
        (Plain::Or(x, y), One) => Formula::or(c(x, One), c(y, One)),
        (Plain::Or(x, y), Zero) => Formula::and(c(x, Zero), c(y, Zero)),
        (Plain::Implies(x, y), One) => Formula::implies(c(x, One), c(y, One)),
        (Plain::Implies(x, y), Zero) => Formula::and(c(x, One), c(y, Zero)),
        _ => return None,
    })
}

pub fn prop_cut(u: &str, ctx: &[String], i: usize, j: usize) -> Result<(), TestCaseError> {
    let mut m = model(u);
    let bb = base(&m, "A").union(&base(&m, "B"));
    let g = site(&mut m, ctx);
    // Prefer cut formulas the context does not already contain.
    let pick = |set: Vec<InfAtom>, k: usize| if set.is_empty() { None } else { Some(set[k % set.len()].clone()) };
    let fresh = |c: &Site| derive::closure(&bb, c).into_iter().filter(|x| !c.contains(x)).collect::<Vec<_>>();
    let Some(pa) = pick(fresh(&g), i) else { return Ok(()) };
    let with_a = g.union(&Site([pa.clone()].into_iter().collect()));
    let Some(pb) = pick(derive::closure(&bb, &with_a).into_iter().collect(), j) else { return Ok(()) };
    let d1 = derive::derivation(&bb, &g, &pa).unwrap();
    let d2 = derive::derivation(&bb, &with_a, &pb).unwrap();
    let d = derive::cut(&d1, &d2).unwrap();
    prop_assert_eq!(d.conclusion(), &pb);
    prop_assert!(d.check().is_ok(), "{:?}", d.check());
    prop_assert!(d.context.is_subset(&g));
    prop_assert!(derive::derives(&bb, &g, &pb));
    Ok(())
}

pub fn prop_monotone(u: &str, ctx: &[String], more: &[String], goal: &str) -> Result<(), TestCaseError> {
    let mut m = model(u);
    let (a, b) = (base(&m, "A"), base(&m, "B"));
    let (g, h) = (site(&mut m, ctx), site(&mut m, more));
    let goal = parse_iatom(&mut m, goal).unwrap();
    if derive::derives(&a, &g, &goal) {
        prop_assert!(derive::derives(&a.union(&b), &g.union(&h), &goal));
    }
    Ok(())
}

pub fn prop_site_base(u: &str, ctx: &[String], goal: &str) -> Result<(), TestCaseError> {
    let mut m = model(u);
    let a = base(&m, "A").union(&base(&m, "B"));
    let s = site(&mut m, ctx);
    let goal = parse_iatom(&mut m, goal).unwrap();
    prop_assert_eq!(derive::derives(&a, &s, &goal), derive::derives(&a.union(&base_of(&s)), &Site::empty(), &goal));
    Ok(())
}

pub fn prop_compound(u: &str, body: &str, l: usize, b: u8, w: usize) -> Result<(), TestCaseError> {
    let mut m = model(u);
    let text = format!("compound <{body} @ {}, {b}>", WORLDS[l]);
    let f = parse_formula(&mut m, &text).unwrap();
    let Formula::Compound { body: p, .. } = &f else { unreachable!() };
    let world = base(&m, WORLDS[w]);
    let mut ev = Evaluator::new(&m.universe, Config::default());
    let whole = ev.support(&world, &Site::empty(), &f).unwrap();
    if let Some(step) = one_step(p, &f) {
        prop_assert_eq!(whole, ev.support(&world, &Site::empty(), &step).unwrap(), "{} vs {}", f, step);
    }
    prop_assert_eq!(whole, ev.support(&world, &Site::empty(), &f.expand().unwrap()).unwrap());
    Ok(())
}

pub fn prop_empty_site(u: &str, theta: &[String], phi: &str, w: usize) -> Result<(), TestCaseError> {
    let mut m = model(u);
    let th: Vec<Formula> = theta.iter().map(|t| parse_formula(&mut m, t).unwrap()).collect();
    let ph = parse_formula(&mut m, phi).unwrap();
    let world = base(&m, WORLDS[w]);
    let mut ctx = Evaluator::new(&m.universe, Config::default());
    let mut flat = Evaluator::new(&m.universe, Config { contextual: false, ..Config::default() });
    prop_assert_eq!(
        ctx.sequent(&world, &Site::empty(), &th, &ph).unwrap(),
        flat.sequent(&world, &Site::empty(), &th, &ph).unwrap()
    );
    Ok(())
}

pub fn prop_implication(u: &str, a: &str, c: &str, w: usize, s: &[String]) -> Result<(), TestCaseError> {
    let mut m = model(u);
    let (fa, fc) = (parse_formula(&mut m, a).unwrap(), parse_formula(&mut m, c).unwrap());
    let world = base(&m, WORLDS[w]);
    let st = site(&mut m, s);
    let mut ev = Evaluator::new(&m.universe, Config::default());
    let imp = ev.support(&world, &st, &Formula::implies(fa.clone(), fc.clone())).unwrap();
    prop_assert_eq!(imp, ev.sequent(&world, &st, &[fa], &fc).unwrap());
    Ok(())
}

fn atoms(n: usize) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec(gen::iatom(), 0..n)
}

fn run_prop<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(RunnerConfig { cases: META_CASES, failure_persistence: None, ..RunnerConfig::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

pub fn metatheory() -> Verdict {
    let mut bad = Vec::new();
    let mut note = |r: Result<(), String>| {
        if let Err(e) = r {
            bad.push(e);
        }
    };
    note(run_prop("cut", (gen::universe(), atoms(3), 0..8usize, 0..8usize), |(u, c, i, j)| prop_cut(&u, &c, i, j)));
    note(run_prop("monotonicity", (gen::universe(), atoms(3), atoms(3), gen::iatom()), |(u, c, h, g)| {
        prop_monotone(&u, &c, &h, &g)
    }));
    note(run_prop("site/base", (gen::universe(), atoms(4), gen::iatom()), |(u, c, g)| prop_site_base(&u, &c, &g)));
    note(run_prop("compound", (gen::universe(), gen::plain(2), 0..3usize, 0..2u8, 0..3usize), |(u, p, l, b, w)| {
        prop_compound(&u, &p, l, b, w)
    }));
    note(run_prop(
        "empty site",
        (gen::universe(), proptest::collection::vec(gen::formula(2), 0..2), gen::formula(2), 0..3usize),
        |(u, t, p, w)| prop_empty_site(&u, &t, &p, w),
    ));
    note(run_prop("implication", (gen::universe(), gen::formula(2), gen::formula(2), 0..3usize, atoms(2)), |(u, a, c, w, s)| {
        prop_implication(&u, &a, &c, w, &s)
    }));
    fail(bad)?;
    Ok(format!("6 properties x {META_CASES} cases"))
}

// ---- soundness ------------------------------------------------------------

#[derive(Clone, Debug)]
enum Shape {
    Leaf(usize),
    Bin(usize, Box<Shape>, Box<Shape>),
}

fn shape(connectives: u32) -> BoxedStrategy<Shape> {
    (0..64usize)
        .prop_map(Shape::Leaf)
        .prop_recursive(connectives, connectives * 2 + 1, 2, |inner| {
            (0..3usize, inner.clone(), inner).prop_map(|(o, a, b)| Shape::Bin(o, Box::new(a), Box::new(b)))
        })
        .boxed()
}

fn build(s: &Shape, leaves: &[Formula]) -> Formula {
    match s {
        Shape::Leaf(i) => leaves[i % leaves.len()].clone(),
        Shape::Bin(o, a, b) => {
            let (a, b) = (build(a, leaves), build(b, leaves));
            [Formula::and, Formula::or, Formula::implies][*o](a, b)
        }
    }
}

pub fn soundness() -> Verdict {
    let mut runner = TestRunner::deterministic();
    let cfg = ProverConfig { max_depth: 12, ..ProverConfig::default() };
    let strategy = (proptest::collection::vec(shape(2), 0..=2), shape(3));
    let mut proved = 0;
    let mut tried = 0;
    let mut bad = Vec::new();
    // The wise-men universe has hundreds of bases, so it contributes fewer sequents.
    for (name, quota) in [("smoke-fire", 28), ("modality", 28), ("wise-men", 12), ("flashlight", 28), ("access-control", 28)] {
        let m = scenarios::load(name).map_err(|e| e.to_string())?;
        let mut leaves: Vec<Formula> = reachable_inferons(&m).into_iter().map(Formula::Inferon).collect();
        leaves.push(Formula::Bot);
        let bases = prover::universe_bases(&m.universe).map_err(|e| e.to_string())?;
        let mut ev = Evaluator::new(&m.universe, cfg.eval.clone());
        let mut here = 0;
        while here < quota && tried < 20_000 {
            tried += 1;
            let (ts, ps) = strategy.new_tree(&mut runner).unwrap().current();
            let theta: Vec<Formula> = ts.iter().map(|s| build(s, &leaves)).collect();
            let phi = build(&ps, &leaves);
            if theta.iter().chain([&phi]).map(connectives).sum::<usize>() > 4 {
                continue;
            }
            let Ok(Some(proof)) = prover::nj_prove(&m.universe, &theta, &phi, &cfg) else { continue };
            if let Err(e) = prover::check_proof(&m.universe, &theta, &phi, &proof, &cfg.eval) {
                bad.push(format!("{name}: proof of {phi} does not replay: {e}"));
            }
            here += 1;
            for b in &bases {
                if !ev.sequent(b, &Site::empty(), &theta, &phi).unwrap() {
                    bad.push(format!("{name}: {theta:?} |- {phi} fails at {}", b.name));
                }
            }
        }
        proved += here;
    }
    if proved < 100 {
        bad.push(format!("only {proved} provable sequents in {tried} attempts"));
    }
    fail(bad)?;
    Ok(format!("{proved} provable sequents, 0 counterexamples"))
}

// ---- completeness machinery -----------------------------------------------

pub const COMP3_CASES: u32 = 96;

pub fn prop_comp3(u: &str, theta: &[String], phi: &str, w: usize) -> Result<(), TestCaseError> {
    let mut m = parse_model(u).unwrap();
    let th: Vec<Formula> = theta.iter().map(|t| parse_formula(&mut m, t).unwrap()).collect();
    let ph = parse_formula(&mut m, phi).unwrap();
    prop_assume!(th.iter().chain([&ph]).map(connectives).sum::<usize>() <= 3);
    let n = build_base_n(&flatten(&m.universe, &th, &ph).unwrap());
    let world = m.universe.base(WORLDS[w]).unwrap().union(&n);
    let r = check_comp3(&m.universe, &th, &ph, &world, &Config::default()).unwrap();
    prop_assert!(r.agree, "{:?} |- {}: {:?}", th, ph, r);
    Ok(())
}

pub fn comp3_strategy() -> impl Strategy<Value = (String, Vec<String>, String, usize)> {
    (gen::universe(), proptest::collection::vec(gen::formula(1), 0..=1), gen::formula(2), 0..3usize)
}

pub const GOLDEN: [(&str, &[&str], &str); 3] = [
    ("implication", &[], "<p @ empty, 1> -> <q @ empty, 1>"),
    ("conjunction", &["<p @ empty, 1>"], "<p @ empty, 1> & <q @ empty, 0>"),
    ("disjunction", &[], "<p @ empty, 1> | bot"),
];

/// The printed 𝒩 for a hand-checked domain next to its golden file.
pub fn golden(name: &str, gamma: &[&str], phi: &str) -> (String, String) {
    let mut m = parse_model("pred p/0 q/0").unwrap();
    let g: Vec<Formula> = gamma.iter().map(|s| parse_formula(&mut m, s).unwrap()).collect();
    let f = parse_formula(&mut m, phi).unwrap();
    let fm = flatten(&m.universe, &g, &f).unwrap();
    let mut text = String::new();
    for d in &fm.domain {
        text.push_str(&format!("# {} ~ {}\n", fm.minus(d).unwrap(), d));
    }
    text.push_str(&print_base(&build_base_n(&fm)));
    text.push('\n');
    let path = format!("{}/tests/golden/{name}.txt", super::core_dir().display());
    if std::env::var_os("INFERON_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    (text, want)
}

pub fn completeness() -> Verdict {
    let mut bad = Vec::new();
    let mut runner = TestRunner::new(RunnerConfig { cases: COMP3_CASES, failure_persistence: None, ..RunnerConfig::default() });
    if let Err(e) = runner.run(&comp3_strategy(), |(u, t, p, w)| prop_comp3(&u, &t, &p, w)) {
        bad.push(format!("comp3: {e}"));
    }
    for (name, gamma, phi) in GOLDEN {
        let (got, want) = golden(name, gamma, phi);
        if got != want {
            bad.push(format!("golden file {name} differs"));
        }
    }
    fail(bad)?;
    Ok(format!("{COMP3_CASES} comp3 instances, {} golden files", GOLDEN.len()))
}

// ---- Chu condition --------------------------------------------------------

fn morphism(m: &Model, n: &str) -> PreInferomorphism {
    PreInferomorphism::from(m.morphism(n).unwrap())
}

pub fn chu_witness() -> Result<(), String> {
    let m = scenarios::load("flashlight").map_err(|e| e.to_string())?;
    if !check_chu(&morphism(&m, "f"), &m.universe).map_err(|e| e.to_string())?.passed {
        return Err("flashlight f fails the Chu condition".into());
    }
    let r = check_chu(&morphism(&m, "fm"), &m.universe).map_err(|e| e.to_string())?;
    match r.witness {
        Some(w) if !r.passed && (w.predicate.as_str(), w.polarity, w.holds_on) == ("ON", 1, "source") => Ok(()),
        other => Err(format!("mutant: passed {} witness {other:?}", r.passed)),
    }
}

/// Every formula with at most `nodes` nodes over the leaves, using ∧, ∨, ⊃.
fn formulas(leaves: &[Formula], nodes: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(), leaves.to_vec()];
    for n in 2..=nodes {
        let mut here = Vec::new();
        for left in 1..n - 1 {
            let right = n - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    here.push(Formula::and(a.clone(), b.clone()));
                    here.push(Formula::or(a.clone(), b.clone()));
                    here.push(Formula::implies(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(here);
    }
    by_size.into_iter().flatten().collect()
}

/// Down and up readings agree on every sequent of the enumeration; returns the count.
pub fn chu_sweep() -> Result<usize, String> {
    let mut m = scenarios::load("flashlight").map_err(|e| e.to_string())?;
    let leaves: Vec<Formula> = ["<ON(fl) @ Psw, 1>", "<ON(fl) @ Psw, 0>", "<LIT(b) @ Pbulb, 1>", "bot"]
        .iter()
        .map(|s| parse_formula(&mut m, s).unwrap())
        .collect();
    let f = morphism(&m, "f");
    let mut ev = Evaluator::new(&m.universe, Config::default());
    let all = formulas(&leaves, 5);
    let mut checked = 0;
    let mut bad = Vec::new();
    let singletons = all.iter().map(|t| vec![t.clone()]);
    for theta in std::iter::once(Vec::new()).chain(singletons) {
        for phi in &all {
            if gamma_sequent(&theta, phi).unwrap() > 7 {
                bad.push(format!("{theta:?} |- {phi} exceeds complexity 7"));
            }
            match chu_equivalence(&f, &mut ev, &theta, phi).map_err(|e| e.to_string())? {
                Some((down, up)) => {
                    checked += 1;
                    if down != up {
                        bad.push(format!("{theta:?} |- {phi}: down {down}, up {up}"));
                    }
                }
                None => bad.push(format!("{phi} has no down image")),
            }
        }
    }
    if checked != all.len() * (all.len() + 1) {
        bad.push(format!("checked {checked} sequents"));
    }
    fail(bad)?;
    Ok(checked)
}

pub fn chu() -> Verdict {
    chu_witness()?;
    let n = chu_sweep()?;
    Ok(format!("flashlight passes, mutant fails at ON, {n} sequents agree"))
}
