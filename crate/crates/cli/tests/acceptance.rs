//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use hermlocal::display_sim::expected_exponent;
use hermlocal::strata::profile_grid;
use hermlocal_cli::config::RunConfig;
use hermlocal_cli::suites::{self, Check, Status};

struct Outcome {
    passed: bool,
    summary: String,
}

fn from_checks(checks: &[Check]) -> Outcome {
    let bad: Vec<&Check> = checks.iter().filter(|c| c.status != Status::Pass).collect();
    let mut summary = format!("{}/{} checks pass", checks.len() - bad.len(), checks.len());
    for c in bad.iter().take(5) {
        summary.push_str(&format!(
            "\n    {}: {} [{}] lhs={} rhs={} {}",
            c.status, c.name, c.suite, c.lhs, c.rhs, c.detail
        ));
    }
    Outcome {
        passed: bad.is_empty() && !checks.is_empty(),
        summary,
    }
}

fn criterion_1() -> Outcome {
    let checks: Vec<Check> = [3, 5, 7]
        .iter()
        .flat_map(|&p| suites::grand_identity(p, 9))
        .collect();
    from_checks(&checks)
}

fn criterion_2() -> Outcome {
    let cfg = RunConfig::with_p(3);
    let mut checks = match suites::density_grid(&cfg) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                passed: false,
                summary: e.to_string(),
            }
        }
    };
    match suites::density_spot_values(&cfg) {
        Ok(c) => checks.extend(c),
        Err(e) => {
            return Outcome {
                passed: false,
                summary: e.to_string(),
            }
        }
    }
    let mut out = from_checks(&checks);
    let vanishing = checks
        .iter()
        .filter(|c| c.detail.contains("closed form parity"))
        .count();
    out.summary
        .push_str(&format!(", {vanishing} vanishing cells"));
    out
}

fn criterion_3() -> Outcome {
    match suites::nagaoka_checks(&RunConfig::with_p(3)) {
        Ok(c) => from_checks(&c),
        Err(e) => Outcome {
            passed: false,
            summary: e.to_string(),
        },
    }
}

fn criterion_4() -> Outcome {
    let cfg = RunConfig::with_p(3);
    let checks = suites::strata_checks(3, &profile_grid(4, 3, 5), cfg.strata_budget());
    let mut out = from_checks(&checks);
    let outside = checks
        .iter()
        .filter(|c| c.detail.contains("outside hypotheses"))
        .count();
    out.summary.push_str(&format!(
        " ({outside} profiles have ord det even and carry no assertion)"
    ));
    out
}

fn criterion_5() -> Outcome {
    let mut checks = suites::display_checks(3, 3);
    checks.extend(suites::display_checks(5, 2));
    let want: Vec<String> = [(3, 0..=3), (5, 0..=2)]
        .into_iter()
        .flat_map(|(p, vs)| vs.map(move |v| expected_exponent(p, v).unwrap().to_string()))
        .collect();
    let got: Vec<String> = checks.iter().map(|c| c.lhs.clone()).collect();
    let mut out = from_checks(&checks);
    out.summary
        .push_str(&format!(", exponents {}", got.join(",")));
    out.passed &= got == want && want == ["1", "4", "13", "40", "1", "6", "31"];
    out
}

fn criterion_6() -> Outcome {
    let mut checks = Vec::new();
    for p in [3, 5, 7] {
        checks.push(suites::onestep_checks(p, 6, 12));
        checks.extend(suites::expansion_checks(p, 9));
        checks.extend(suites::fiber_sum_checks(p, 8));
    }
    from_checks(&checks)
}

fn run_binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hermlocal"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run binary: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn determinism() -> Check {
    let commands: [&[&str]; 4] = [
        &["verify", "--suite", "lifting"],
        &["table", "--kind", "strata", "--format", "csv"],
        &[
            "table",
            "--kind",
            "main-identity",
            "--p",
            "5",
            "--format",
            "markdown",
        ],
        &["density", "--S", "1,1", "--T", "p,p", "--check-next"],
    ];
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for cmd in commands {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "8", "8"] {
            let mut args = cmd.to_vec();
            args.extend(["--threads", threads, "--seed", "7"]);
            match run_binary(&args) {
                Ok(o) => outputs.push(o),
                Err(e) => {
                    mismatches.push(e);
                    continue;
                }
            }
            runs += 1;
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(format!("{cmd:?} differs across thread counts"));
        }
    }
    Check {
        suite: "robustness".into(),
        name: "byte-identical output for threads 1, 4, 8 and a repeated run".into(),
        lhs: format!("{} runs, {} mismatches", runs, mismatches.len()),
        rhs: format!("{} runs, 0 mismatches", commands.len() * 4),
        status: if mismatches.is_empty() && runs == commands.len() * 4 {
            Status::Pass
        } else {
            Status::Fail
        },
        detail: mismatches.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let cfg = RunConfig {
        seed: 20261014,
        ..RunConfig::with_p(3)
    };
    let mut checks = suites::gl_invariance(&cfg, 20);
    checks.extend(suites::epsilon_invariance(5, &RunConfig::with_p(5)));
    checks.push(determinism());
    from_checks(&checks)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("grand cross-check over p ∈ {3,5,7}, (a,b) ≤ 9", criterion_1),
        (
            "brute-force densities vs closed forms at p = 3",
            criterion_2,
        ),
        ("binary polynomial consistency", criterion_3),
        ("strata theorems, n ≤ 4, exponents ≤ 3, Σ ≤ 5", criterion_4),
        ("display recursion exponents", criterion_5),
        ("lifting-formula coherence", criterion_6),
        (
            "robustness: GL-invariance, ε-invariance, determinism",
            criterion_7,
        ),
    ];
    let mut all = true;
    for (i, (label, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        all &= out.passed;
        println!(
            "criterion {}: {} {label} ({}, {:.1}s)",
            i + 1,
            if out.passed { "PASS" } else { "FAIL" },
            out.summary,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
