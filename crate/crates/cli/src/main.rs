//! `inferon`: derivability, support, proof search, flow checks and the example corpus.
//!
//! Exit codes: 0 verdict true or all checks pass, 1 verdict false or a check
//! mismatch, 2 usage, parse or input error, 3 budget exhausted.

use clap::{Args, Parser, Subcommand};
use inferon::flow::{self, PreInferomorphism};
use inferon::prover::{self, ProverConfig};
use inferon::scenarios;
use inferon::semantics::{self, Evaluator};
use inferon::syntax::{parse_formula, parse_iatom, parse_model, Model, Site};
use inferon::Error;
use serde::Serialize;
use serde_json::{json, Value};
use std::process::ExitCode;

const SCHEMA: &str = "inferon-report/1";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "inferon", version, about = "Inferonic bases, base-extension support and information flow")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    /// Prover depth limit.
    #[arg(long, global = true, default_value_t = 24)]
    depth: usize,
    /// Largest quantified site.
    #[arg(long, global = true)]
    site_bound: Option<usize>,
    /// Largest number of pool rules per base extension.
    #[arg(long, global = true)]
    ext_bound: Option<usize>,
    /// Include an evaluation trace.
    #[arg(long, global = true)]
    trace: bool,
    /// Emit a JSON report on standard output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every `check` declared in a model file.
    Check {
        model: String,
    },
    /// Derivability of an inferonic atom in a base, optionally at a site.
    Derive {
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value = "empty")]
        base: String,
        #[arg(long)]
        site: Option<String>,
        #[arg(long)]
        goal: String,
    },
    /// Support of a formula, or of a sequent when antecedents are given.
    Support {
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value = "empty")]
        base: String,
        #[arg(long)]
        site: Option<String>,
        #[arg(long = "antecedent")]
        antecedents: Vec<String>,
        #[arg(long)]
        formula: String,
    },
    /// NJ proof search with the inferon axiom.
    Prove {
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "antecedent")]
        antecedents: Vec<String>,
        #[arg(long)]
        formula: String,
    },
    /// Inferomorphism and site-channel checks.
    Flow {
        #[command(subcommand)]
        what: FlowCmd,
    },
    /// The worked-example corpus.
    Scenario {
        #[command(subcommand)]
        what: ScenarioCmd,
    },
    /// Report the environment and confirm every scenario file parses.
    Doctor,
}

#[derive(Subcommand)]
enum FlowCmd {
    /// The Chu condition for a declared morphism.
    Chu {
        #[arg(long)]
        model: String,
        #[arg(long)]
        morphism: String,
    },
    /// Surjectivity of the induced inferon maps.
    Quasi {
        #[arg(long)]
        model: String,
        #[arg(long)]
        morphism: String,
    },
    /// Composes a chain of site inclusions, e.g. `S1,S2,S3`.
    Sites {
        #[arg(long)]
        model: String,
        #[arg(long, value_delimiter = ',')]
        chain: Vec<String>,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    List,
    Run {
        /// A scenario name; omit with `--all`.
        name: Option<String>,
        #[arg(long)]
        all: bool,
        /// Also remove each shipped rule in turn and report the checks it breaks.
        #[arg(long)]
        ablate: bool,
    },
}

/// How a command ended, before mapping to an exit code.
enum Outcome {
    Verdict(bool),
    Failed(Halt),
}

/// Errors that stop a command: library failures, or checks that ran out of budget.
enum Halt {
    Lib(Error),
    Exhausted(Vec<String>),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Lib(e)
    }
}

impl Opts {
    fn prover(&self) -> ProverConfig {
        ProverConfig {
            max_depth: self.depth,
            eval: semantics::Config { ext_bound: self.ext_bound, site_bound: self.site_bound, ..semantics::Config::default() },
            ..ProverConfig::default()
        }
    }

    fn config_json(&self) -> Value {
        let p = self.prover();
        json!({ "max_depth": p.max_depth, "node_budget": p.node_budget, "eval": p.eval })
    }
}

fn read_model(path: Option<&str>) -> Result<Model, Error> {
    match path {
        None => Ok(Model::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{p}: {e}")))?;
            parse_model(&text).map_err(|e| match e {
                Error::Parse { line, col, message } => Error::Parse { line, col, message: format!("{p}: {message}") },
                other => other,
            })
        }
    }
}

fn site(m: &Model, s: &Option<String>) -> Result<Site, Error> {
    s.as_deref().map_or(Ok(Site::empty()), |t| m.site_expr(t))
}

fn report(opts: &Opts, command: &str, query: Value, verdict: bool, extra: Value) {
    if opts.json {
        let mut v = json!({
            "schema": SCHEMA,
            "version": VERSION,
            "command": command,
            "query": query,
            "verdict": verdict,
            "config": opts.config_json(),
        });
        if let (Value::Object(o), Value::Object(x)) = (&mut v, extra) {
            o.extend(x.into_iter().filter(|(_, v)| !v.is_null()));
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("reports serialize"));
    } else {
        println!("{command}: {verdict}");
        if let Value::Object(x) = extra {
            for (k, v) in x.into_iter().filter(|(_, v)| !v.is_null()) {
                match v {
                    Value::String(s) => println!("  {k}: {}", s.replace('\n', "\n    ")),
                    other => println!("  {k}: {}", serde_json::to_string_pretty(&other).expect("serializable")),
                }
            }
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn run(cli: &Cli) -> Outcome {
    match body(cli) {
        Ok(v) => Outcome::Verdict(v),
        Err(e) => Outcome::Failed(e),
    }
}

fn body(cli: &Cli) -> Result<bool, Halt> {
    let opts = &cli.opts;
    let cfg = opts.prover();
    match &cli.cmd {
        Cmd::Check { model } => {
            let m = read_model(Some(model))?;
            let r = scenarios::run_model(model, &m, &cfg);
            let reports = [r];
            scenario_output(opts, &reports, None)?;
            finish_reports(&reports)
        }
        Cmd::Derive { model, base, site: s, goal } => {
            let mut m = read_model(model.as_deref())?;
            let b = m.base_expr(base)?;
            let st = site(&m, s)?;
            let g = parse_iatom(&mut m, goal)?;
            let d = inferon::derive::derivation(&b, &st, &g);
            let query = json!({ "base": b.name.to_string(), "site": st.to_string(), "goal": g.to_string() });
            let extra = json!({ "derivation": (opts.trace).then(|| d.as_ref().map(|d| d.tree.to_string())).flatten() });
            report(opts, "derive", query, d.is_some(), extra);
            Ok(d.is_some())
        }
        Cmd::Support { model, base, site: s, antecedents, formula } => {
            let mut m = read_model(model.as_deref())?;
            let b = m.base_expr(base)?;
            let st = site(&m, s)?;
            let theta = antecedents.iter().map(|a| parse_formula(&mut m, a)).collect::<Result<Vec<_>, _>>()?;
            let phi = parse_formula(&mut m, formula)?;
            let mut ev = Evaluator::new(&m.universe, cfg.eval.clone());
            let depth = if opts.trace { 6 } else { 1 };
            let j = ev.judge(&b, &st, &theta, &phi, depth)?;
            let query = json!({
                "base": b.name.to_string(),
                "site": st.to_string(),
                "antecedents": theta.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "consequent": phi.to_string(),
            });
            let extra = json!({
                "witness": j.witness().map(to_value),
                "trace": opts.trace.then(|| to_value(&j.trace)),
                "warnings": (!ev.warnings().is_empty()).then(|| to_value(&ev.warnings())),
            });
            report(opts, "support", query, j.verdict, extra);
            Ok(j.verdict)
        }
        Cmd::Prove { model, antecedents, formula } => {
            let mut m = read_model(model.as_deref())?;
            let theta = antecedents.iter().map(|a| parse_formula(&mut m, a)).collect::<Result<Vec<_>, _>>()?;
            let phi = parse_formula(&mut m, formula)?;
            let proof = prover::nj_prove(&m.universe, &theta, &phi, &cfg)?;
            if let Some(p) = &proof {
                prover::check_proof(&m.universe, &theta, &phi, p, &cfg.eval).map_err(Error::Unsupported)?;
            }
            let query = json!({
                "antecedents": theta.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "consequent": phi.to_string(),
            });
            let extra = json!({
                "proof_size": proof.as_ref().map(|p| p.size()),
                "proof": opts.trace.then(|| proof.as_ref().map(|p| p.to_string())).flatten(),
            });
            report(opts, "prove", query, proof.is_some(), extra);
            Ok(proof.is_some())
        }
        Cmd::Flow { what } => flow_cmd(opts, what),
        Cmd::Scenario { what } => match what {
            ScenarioCmd::List => {
                let entries = scenarios::list()?;
                if opts.json {
                    let v = json!({ "schema": SCHEMA, "version": VERSION, "command": "scenario list", "scenarios": entries });
                    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
                } else {
                    for e in &entries {
                        println!("{:<16} {}", e.name, e.summary);
                    }
                }
                Ok(true)
            }
            ScenarioCmd::Run { name, all, ablate } => {
                let names: Vec<String> = match (name, all) {
                    (Some(n), false) => vec![n.clone()],
                    (None, true) => scenarios::list()?.into_iter().map(|e| e.name).collect(),
                    _ => return Err(Error::Unsupported("give a scenario name or --all".into()).into()),
                };
                let mut reports = Vec::new();
                let mut ablations = Vec::new();
                for n in &names {
                    let m = scenarios::load(n)?;
                    reports.push(scenarios::run_model(n, &m, &cfg));
                    if *ablate {
                        ablations.push(json!({ "scenario": n, "rules": scenarios::ablate(&m, &cfg)? }));
                    }
                }
                scenario_output(opts, &reports, ablate.then_some(ablations))?;
                finish_reports(&reports)
            }
        },
        Cmd::Doctor => {
            let dir = std::env::var(scenarios::DATA_DIR_VAR).ok();
            let mut rows = Vec::new();
            let mut ok = true;
            for e in scenarios::list()? {
                let parsed = scenarios::load(&e.name);
                ok &= parsed.is_ok();
                rows.push(json!({
                    "name": e.name,
                    "source": e.source,
                    "checks": parsed.as_ref().ok().map(|m| m.checks.len()),
                    "error": parsed.err().map(|x| x.to_string()),
                }));
            }
            if opts.json {
                let v = json!({
                    "schema": SCHEMA, "version": VERSION, "command": "doctor",
                    "data_dir": dir, "scenarios": rows, "config": opts.config_json(), "verdict": ok,
                });
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                println!("inferon {VERSION}");
                println!("data directory: {}", dir.as_deref().unwrap_or("(builtin only)"));
                for r in &rows {
                    let status = match &r["error"] {
                        Value::String(s) => format!("error: {s}"),
                        _ => format!("{} checks", r["checks"]),
                    };
                    println!("  {:<16} {:<10} {}", r["name"].as_str().unwrap_or(""), status, r["source"].as_str().unwrap_or(""));
                }
            }
            Ok(ok)
        }
    }
}

fn flow_cmd(opts: &Opts, what: &FlowCmd) -> Result<bool, Halt> {
    match what {
        FlowCmd::Chu { model, morphism } => {
            let m = read_model(Some(model))?;
            let f = PreInferomorphism::from(m.morphism(morphism)?);
            let r = flow::check_chu(&f, &m.universe)?;
            let extra = json!({ "instances": r.instances, "witness": r.witness.as_ref().map(to_value) });
            report(opts, "flow chu", json!({ "morphism": morphism }), r.passed, extra);
            Ok(r.passed)
        }
        FlowCmd::Quasi { model, morphism } => {
            let m = read_model(Some(model))?;
            let f = PreInferomorphism::from(m.morphism(morphism)?);
            let r = flow::is_quasi(&f, &m.universe, None);
            let extra = json!({ "missed_up": r.missed_up, "missed_down": r.missed_down });
            report(opts, "flow quasi", json!({ "morphism": morphism }), r.quasi, extra);
            Ok(r.quasi)
        }
        FlowCmd::Sites { model, chain } => {
            let m = read_model(Some(model))?;
            let sites = chain.iter().map(|s| m.site_expr(s)).collect::<Result<Vec<_>, _>>()?;
            let query = json!({ "chain": chain });
            match flow::compose_chain(&sites) {
                Ok(ch) => {
                    report(opts, "flow sites", query, true, json!({ "label": ch.label.to_string() }));
                    Ok(true)
                }
                Err(e @ (Error::Flow(_) | Error::Endpoint(_))) => {
                    report(opts, "flow sites", query, false, json!({ "reason": e.to_string() }));
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn scenario_output(opts: &Opts, reports: &[scenarios::Report], ablations: Option<Vec<Value>>) -> Result<(), Error> {
    if opts.json {
        let mut v = json!({
            "schema": SCHEMA,
            "version": VERSION,
            "command": "scenario run",
            "verdict": reports.iter().all(|r| r.passed),
            "reports": reports,
            "config": opts.config_json(),
        });
        if let Some(a) = ablations {
            v["ablation"] = Value::Array(a);
        }
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        return Ok(());
    }
    for r in reports {
        println!("{} ({} checks): {}", r.scenario, r.outcomes.len(), if r.passed { "pass" } else { "FAIL" });
        for o in &r.outcomes {
            let got = o.actual.map_or_else(|| "error".to_string(), |b| b.to_string());
            println!("  [{}] {:<28} expected {:<5} got {}", if o.pass { "ok" } else { "!!" }, o.check, o.expected, got);
            if opts.trace || !o.pass {
                println!("       {}", o.judgement);
                if let Some(d) = &o.detail {
                    println!("       {d}");
                }
            }
            if let Some(e) = &o.error {
                println!("       {e}");
            }
        }
    }
    if let Some(a) = ablations {
        for s in a {
            println!("ablation {}", s["scenario"].as_str().unwrap_or(""));
            for r in s["rules"].as_array().into_iter().flatten() {
                let broken: Vec<&str> = r["broken"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                println!("  {} {:<40} breaks {}", r["base"].as_str().unwrap_or(""), r["rule"].as_str().unwrap_or(""), broken.join(", "));
            }
        }
    }
    Ok(())
}

/// All-pass is true; a budget hit anywhere outranks plain mismatches.
fn finish_reports(reports: &[scenarios::Report]) -> Result<bool, Halt> {
    let exhausted: Vec<String> = reports
        .iter()
        .flat_map(|r| r.outcomes.iter().filter(|o| o.budget).map(move |o| format!("{}/{}", r.scenario, o.check)))
        .collect();
    if !exhausted.is_empty() {
        return Err(Halt::Exhausted(exhausted));
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Outcome::Verdict(true) => ExitCode::SUCCESS,
        Outcome::Verdict(false) => ExitCode::from(1),
        Outcome::Failed(Halt::Lib(e)) => {
            eprintln!("inferon: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
        Outcome::Failed(Halt::Exhausted(checks)) => {
            eprintln!("inferon: budget exhausted in {}", checks.join(", "));
            ExitCode::from(3)
        }
    }
}
