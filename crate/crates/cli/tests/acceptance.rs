//! Runs every acceptance criterion in-process, then again through the
//! `ptrank verify-paper` binary, and prints one line per criterion.
//! Exits non-zero if any criterion fails or the two runs disagree.

use std::process::{Command, ExitCode};

use ptrank_core::suite::{run_suite, SuiteConfig, CRITERIA};
use serde_json::Value;

fn binary_matrix() -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ptrank"))
        .args(["--seed", "1", "verify-paper"])
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("report: {e}"))?;
    match out.status.code() {
        Some(0) if report["ok"] == true => Ok(report["result"]["matrix"].clone()),
        code => Err(format!("exit {code:?}, ok = {}", report["ok"])),
    }
}

fn main() -> ExitCode {
    let report = run_suite(&SuiteConfig::default()).expect("full selection is valid");
    let cli = binary_matrix();

    let mut failures = 0;
    for o in &report.outcomes {
        let mut passed = o.passed;
        let mut note = String::new();
        match &cli {
            Ok(m) => {
                let key = format!("{}.{}", o.group, o.key);
                if m[&key] != Value::Bool(o.passed) {
                    passed = false;
                    note = format!(" (binary reports {})", m[&key]);
                }
            }
            Err(e) if o.key == "round-trip" => {
                passed = false;
                note = format!(" (verify-paper: {e})");
            }
            Err(_) => {}
        }
        if !passed {
            failures += 1;
        }
        let line = o.to_string();
        let line = if passed { line } else { line.replacen("[PASS]", "[FAIL]", 1) };
        println!("{line}{note}");
    }
    println!("acceptance: {} of {} criteria pass", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
