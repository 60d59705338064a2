//! Acceptance criteria 1–12. Prints one `PASS`/`FAIL` line per criterion
//! (run with `--nocapture` to see them) and fails if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use snlab::battery::{run_criterion, BatteryConfig, CRITERIA};

/// Runtime budgets from the criteria, in seconds.
const BUDGETS: [u64; 11] = [1, 1, 60, 30, 10, 60, 300, 120, 30, 120, 5];

fn suite_once(seed: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_snlab"))
        .args(["suite", "--seed", seed])
        .output()
        .expect("snlab binary runs");
    assert!(
        out.status.code().is_some(),
        "suite terminated by a signal: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn acceptance() {
    let cfg = BatteryConfig::new(42);
    let mut failures = Vec::new();
    for id in 1..=CRITERIA {
        let start = Instant::now();
        let outcome = run_criterion(id, &cfg);
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(BUDGETS[id as usize - 1]);
        let (ok, title, detail) = match &outcome {
            Ok(o) => {
                let failed: Vec<&str> = o
                    .records
                    .iter()
                    .filter(|r| r.verdict == snlab::report::Verdict::Fail)
                    .map(|r| r.name.as_str())
                    .collect();
                (o.pass, o.title, if failed.is_empty() { String::new() } else { format!(" failed: {failed:?}") })
            }
            Err(e) => (false, "error", format!(" {e}")),
        };
        let in_time = elapsed <= budget;
        let pass = ok && in_time;
        println!(
            "criterion {id:>2} {} {title} ({:.2}s / {}s budget){detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if let Ok(o) = &outcome {
            for r in &o.records {
                println!("    {:?} {} {}", r.verdict, r.name, r.values);
            }
        }
        if !pass {
            failures.push(id);
        }
    }

    let first = suite_once("42");
    let second = suite_once("42");
    let identical = !first.is_empty() && first == second;
    println!("criterion 12 {} suite --seed 42 byte-identical across runs", if identical { "PASS" } else { "FAIL" });
    if !identical {
        failures.push(12);
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
