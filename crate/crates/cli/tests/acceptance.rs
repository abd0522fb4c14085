//! The acceptance run: one line per criterion, then a single pass/fail.
//! Runs without the libtest harness so the lines always reach the console.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use common::criteria::{self, Verdict};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::thread;

type Criterion = (&'static str, fn() -> Verdict);

const BIN: &str = env!("CARGO_BIN_EXE_inferon");

fn scenario_file(name: &str) -> String {
    common::core_dir().join("data/scenarios").join(format!("{name}.inf")).display().to_string()
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
}

fn inferon(args: &[&str], data_dir: Option<&Path>) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("INFERON_DATA_DIR");
    if let Some(d) = data_dir {
        cmd.env("INFERON_DATA_DIR", d);
    }
    let out = cmd.output().expect("binary runs");
    Run { code: out.status.code().unwrap_or(-1), stdout: out.stdout }
}

fn determinism_and_exit_codes() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    };
    let empty = write("empty.inf", "");
    let broken = write("broken.inf", "base B { => <p,1> ");
    let wrong = write("wrong.inf", "pred p/0\nbase B { => <p,1>. }\ncheck c : derive B |- <p,1> expect false\n");
    let deep = write("deep.inf", "pred p/0\ncheck lem : prove |- <p @ empty, 1> | (<p @ empty, 1> -> bot) expect false\n");
    let (smoke, flash, air, access) =
        (scenario_file("smoke-fire"), scenario_file("flashlight"), scenario_file("airport"), scenario_file("access-control"));

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["check", &access], 0),
        (vec!["check", &wrong], 1),
        (vec!["check", &broken], 2),
        (vec!["check", "/nonexistent/model.inf"], 2),
        (vec!["check", &deep, "--depth", "2"], 3),
        (vec!["derive", "--model", &smoke, "--base", "B+P1", "--goal", "<P2,1>"], 0),
        (vec!["derive", "--model", &smoke, "--base", "B", "--goal", "<P2,1>"], 1),
        (vec!["derive", "--model", &smoke, "--base", "Nope", "--goal", "<P2,1>"], 2),
        (vec!["support", "--model", &smoke, "--base", "B", "--formula", "<P2 @ P1, 1>"], 0),
        (vec!["support", "--model", &empty, "--formula", "bot"], 1),
        (vec!["support", "--model", &smoke, "--formula", "<P2 @"], 2),
        (vec!["prove", "--model", &smoke, "--antecedent", "<P1 @ empty, 1>", "--formula", "<P1 @ empty, 1>"], 0),
        (vec!["prove", "--model", &smoke, "--formula", "<P2 @ empty, 1> | (<P2 @ empty, 1> -> bot)"], 1),
        (vec!["prove", "--model", &smoke, "--formula", "<P2 @ empty, 1> | (<P2 @ empty, 1> -> bot)", "--depth", "1"], 3),
        (vec!["flow", "chu", "--model", &flash, "--morphism", "f"], 0),
        (vec!["flow", "chu", "--model", &flash, "--morphism", "fm"], 1),
        (vec!["flow", "chu", "--model", &flash, "--morphism", "zz"], 2),
        (vec!["flow", "quasi", "--model", &flash, "--morphism", "f"], 1),
        (vec!["flow", "sites", "--model", &air, "--chain", "S1,S3,S4,S5,S6"], 0),
        (vec!["flow", "sites", "--model", &air, "--chain", "S2,S3"], 1),
        (vec!["scenario", "list"], 0),
        (vec!["scenario", "run", "smoke-fire"], 0),
        (vec!["scenario", "run", "volcano"], 2),
        (vec!["scenario", "run"], 2),
        (vec!["doctor"], 0),
        (vec!["frobnicate"], 2),
        (vec!["derive", "--goal"], 2),
    ];
    let mut bad = Vec::new();
    for (args, want) in &cases {
        let got = inferon(args, None).code;
        if got != *want {
            bad.push(format!("inferon {}: exit {got}, want {want}", args.join(" ")));
        }
    }

    // A data directory scenario whose check fails makes the corpus run exit 1.
    let data = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::copy(&wrong, data.path().join("wrong.inf")).map_err(|e| e.to_string())?;
    let got = inferon(&["scenario", "run", "wrong"], Some(data.path())).code;
    if got != 1 {
        bad.push(format!("data-dir scenario: exit {got}, want 1"));
    }

    let json_queries: Vec<Vec<&str>> = vec![
        vec!["scenario", "run", "--all", "--json"],
        vec!["scenario", "list", "--json"],
        vec!["check", &air, "--json"],
        vec!["support", "--model", &smoke, "--base", "B", "--formula", "<P2 @ empty, 1>", "--json", "--trace"],
        vec!["prove", "--model", &smoke, "--antecedent", "<P1 @ empty, 1>", "--formula", "<P1 @ empty, 1>", "--json"],
        vec!["flow", "chu", "--model", &flash, "--morphism", "fm", "--json"],
        vec!["doctor", "--json"],
    ];
    for q in &json_queries {
        let (a, b) = (inferon(q, None), inferon(q, None));
        if a.stdout != b.stdout {
            bad.push(format!("inferon {}: output differs between runs", q.join(" ")));
        }
        match serde_json::from_slice::<serde_json::Value>(&a.stdout) {
            Ok(v) if v["schema"] == "inferon-report/1" && v.get("version").is_some() => {}
            _ => bad.push(format!("inferon {}: not a report", q.join(" "))),
        }
    }
    if !bad.is_empty() {
        return Err(bad.join("\n"));
    }
    Ok(format!("{} exit codes, {} JSON reports byte-identical", cases.len() + 1, json_queries.len()))
}

fn main() -> ExitCode {
    let jobs: Vec<Criterion> = vec![
        ("scenario fidelity", criteria::scenario_fidelity),
        ("derivability oracle", criteria::derive_oracle),
        ("metatheory properties", criteria::metatheory),
        ("soundness transfer", criteria::soundness),
        ("completeness machinery", criteria::completeness),
        ("Chu condition and equivalence", criteria::chu),
        ("determinism and exit codes", determinism_and_exit_codes),
    ];
    let handles: Vec<_> = jobs
        .into_iter()
        .map(|(name, job)| (name, thread::spawn(job)))
        .collect();
    let mut failed = Vec::new();
    for (i, (name, h)) in handles.into_iter().enumerate() {
        let verdict = h.join().unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match verdict {
            Ok(summary) => println!("criterion {} {name}: PASS ({summary})", i + 1),
            Err(why) => {
                println!("criterion {} {name}: FAIL\n    {}", i + 1, why.replace('\n', "\n    "));
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 7 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria failed: {failed:?}");
        ExitCode::FAILURE
    }
}
