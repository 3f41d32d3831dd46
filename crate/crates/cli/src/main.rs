use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hermlocal::densities::{closed_form, density_bruteforce, DensityRequest};
use hermlocal::display_sim::{default_t_max, dump_steps, simulate};
use hermlocal::hermitian::{geometric_invariants, jordan_decompose, JordanProfile};
use hermlocal::lifting::{main_identity, total_degree};
use hermlocal::strata::{enumerate_grd, grd_dot, verify_stratum_theorems, FiniteHermModule};
use hermlocal::{Error, Result};
use hermlocal_cli::config::{parse_budget, OutputFormat, RunConfig};
use hermlocal_cli::input::parse_matrix;
use hermlocal_cli::suites::{self, run_suite, Suite};
use hermlocal_cli::tables::{self, Table};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "hermlocal",
    version,
    about = "Local hermitian densities, vertex-lattice strata and lifting bounds"
)]
struct Cli {
    /// Odd prime.
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// p-adic digits carried by inputs.
    #[arg(long, global = true, default_value_t = 8)]
    precision: u32,
    /// Nonresidue ε with δ² = ε; defaults to the least one.
    #[arg(long, global = true)]
    epsilon: Option<u64>,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Brute-force step budget, e.g. `1e9` or `10^9`.
    #[arg(long, global = true, default_value = "1e9")]
    budget: String,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Seed for the random conjugations in `verify --suite all`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TableKind {
    MainIdentity,
    Strata,
    #[value(name = "e-s")]
    ES,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jordan splitting of a hermitian matrix.
    Jordan {
        /// Diagonal shorthand `1,p,p^3` or a `.json` matrix file.
        #[arg(long = "T")]
        t: String,
    },
    /// Enumerate GrD for a Jordan profile and check the stratum statements.
    Strata {
        /// `0:1,1:2` (exponent:count) or a plain exponent list `0,1,1`.
        #[arg(long)]
        profile: String,
        /// Write the inclusion diagram in Graphviz format.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Brute-force local density α(S, T).
    Density {
        #[arg(long = "S")]
        s: String,
        #[arg(long = "T")]
        t: String,
        /// Level p^k; defaults to ℓ(T) + 1.
        #[arg(long)]
        k: Option<u32>,
        /// Recount at k + 1 to confirm stabilization.
        #[arg(long)]
        check_next: bool,
    },
    /// Densities over the unimodular S, small T grid against closed forms.
    DensityTable,
    /// Intersection ledger of Z(p^a)·Z(p^b) and the derivative ratio.
    Intersect {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Run the display recursion and report the obstruction exponent.
    DisplaySim {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        t_max: Option<usize>,
        /// Write every step's truncated coefficients as JSON.
        #[arg(long)]
        dump_steps: Option<PathBuf>,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Emit a comparison table.
    Table {
        #[arg(long, value_enum)]
        kind: TableKind,
        /// Grid bound: max(a, b) for main-identity, max s for e-s.
        #[arg(long)]
        max: Option<u32>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) => 1,
        Error::BudgetExceeded { .. } | Error::PrecisionExhausted { .. } => 3,
        _ => 2,
    }
}

fn envelope(command: &str, p: u64, result: Value) -> Value {
    json!({ "schema": "v1", "command": command, "p": p, "result": result })
}

/// Flatten a JSON object into a `field, value` table.
fn kv_table(v: &Value) -> Table {
    let mut t = Table::new(&["field", "value"]);
    if let Value::Object(map) = v {
        for (k, x) in map {
            let s = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            t.push(vec![k.clone(), s]);
        }
    }
    t
}

struct Output {
    json: Value,
    table: Table,
    ok: bool,
}

impl Output {
    fn single(json: Value) -> Self {
        let table = kv_table(&json);
        Output {
            json,
            table,
            ok: true,
        }
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn run_command(cmd: &Command, cfg: &RunConfig) -> Result<Output> {
    match cmd {
        Command::Jordan { t } => {
            let ctx = cfg.ctx()?;
            let t = parse_matrix(t, ctx)?;
            let j = jordan_decompose(&t)?;
            let u = j.change_of_basis;
            let rows: Vec<Vec<Value>> = (0..u.rows())
                .map(|i| {
                    (0..u.cols())
                        .map(|k| json!(u.get(i, k).to_json()))
                        .collect()
                })
                .collect();
            Ok(Output::single(json!({
                "exponents": j.exponents,
                "multiplicities": j.profile.multiplicities(),
                "invariants": to_json(&geometric_invariants(&j.profile)),
                "change_of_basis": rows,
            })))
        }
        Command::Strata { profile, graph } => {
            let prof = JordanProfile::parse(profile)?;
            let rep = verify_stratum_theorems(cfg.p, &prof, cfg.strata_budget())?;
            if let Some(path) = graph {
                let d = FiniteHermModule::build(cfg.p, &prof, cfg.strata_budget())?;
                let grd = enumerate_grd(&d);
                write_file(path, &grd_dot(&d, &grd, 2000)?)?;
            }
            let ok = rep.passed;
            let mut out = Output::single(to_json(&rep));
            out.ok = ok;
            Ok(out)
        }
        Command::Density {
            s,
            t,
            k,
            check_next,
        } => {
            let k_needed = k.map(|k| k + 1 + *check_next as u32).unwrap_or(0);
            let ctx = cfg.ctx_with_precision(cfg.precision.max(k_needed))?;
            let (s, t) = (parse_matrix(s, ctx)?, parse_matrix(t, ctx)?);
            let req = match k {
                Some(k) => DensityRequest::new(s.clone(), t.clone(), *k)?,
                None => DensityRequest::stable(s.clone(), t.clone())?,
            };
            let rep = density_bruteforce(&req, cfg.brute_budget(), *check_next)?;
            let cf = closed_form(&s, &t)?;
            let agrees = cf
                .as_ref()
                .map(|c| !rep.in_stable_range || c.value == rep.value);
            Ok(Output::single(json!({
                "k": rep.k,
                "count": rep.count,
                "value": rep.value.to_string(),
                "kernel": to_json(&rep.kernel),
                "in_stable_range": rep.in_stable_range,
                "stabilization": to_json(&rep.stabilization),
                "closed_form": to_json(&cf),
                "closed_form_agrees": agrees,
            })))
        }
        Command::DensityTable => checks_output(suites::density_grid(cfg)?),
        Command::Intersect { a, b } => {
            let ledger = total_degree(cfg.p, *a, *b)?;
            let row = main_identity(cfg.p, *a, *b, &[2, 3, 4])?;
            let mut table = Table::new(&["expansion", "s", "l", "value", "extrapolated"]);
            for (name, terms) in [
                ("even", &ledger.even_expansion),
                ("odd", &ledger.odd_expansion),
            ] {
                for term in terms {
                    table.push(vec![
                        name.into(),
                        term.s.to_string(),
                        term.l.to_string(),
                        term.value.to_string(),
                        term.extrapolated.to_string(),
                    ]);
                }
            }
            let density: serde_json::Map<String, Value> = row
                .density_ratio
                .iter()
                .map(|(n, v)| (n.to_string(), Value::String(v.clone())))
                .collect();
            Ok(Output {
                json: json!({
                    "ledger": to_json(&ledger),
                    "length_formula": row.length_formula.to_string(),
                    "density_ratio": density,
                    "all_equal": row.agree,
                }),
                table,
                ok: row.agree,
            })
        }
        Command::DisplaySim {
            v,
            t_max,
            dump_steps: dump,
        } => {
            let t_max = match t_max {
                Some(t) => *t,
                None => default_t_max(cfg.p, *v)?,
            };
            let (rep, states) = simulate(cfg.p, *v, t_max)?;
            if let Some(path) = dump {
                let text =
                    serde_json::to_string_pretty(&dump_steps(&states)).expect("serializable");
                write_file(path, &(text + "\n"))?;
            }
            let mut table = Table::new(&[
                "step",
                "matrix",
                "degree",
                "valuation",
                "leading_visible",
                "holds",
            ]);
            for c in &rep.leading_terms {
                table.push(vec![
                    c.step.to_string(),
                    c.matrix.to_string(),
                    c.degree.to_string(),
                    c.valuation.to_string(),
                    c.leading_visible.to_string(),
                    c.holds.to_string(),
                ]);
            }
            let ok = rep.passed;
            Ok(Output {
                json: to_json(&rep),
                table,
                ok,
            })
        }
        Command::Verify { suite } => {
            let rep = run_suite(*suite, cfg);
            let ok = rep.ok();
            let mut out = checks_output(rep.checks.clone())?;
            out.json = to_json(&rep);
            out.ok = ok;
            Ok(out)
        }
        Command::Table { kind, max } => {
            let table = match kind {
                TableKind::MainIdentity => tables::main_identity_table(
                    cfg.p,
                    &suites::opposite_parity_pairs(max.unwrap_or(9)),
                )?,
                TableKind::Strata => tables::strata_table(cfg.p, 4, 3, 5, cfg.strata_budget())?,
                TableKind::ES => tables::ramification_table(cfg.p, max.unwrap_or(8))?,
            };
            Ok(Output {
                json: table.to_json(),
                table,
                ok: true,
            })
        }
    }
}

fn checks_output(checks: Vec<suites::Check>) -> Result<Output> {
    let mut table = Table::new(&["suite", "name", "lhs", "rhs", "status", "detail"]);
    for c in &checks {
        table.push(vec![
            c.suite.clone(),
            c.name.clone(),
            c.lhs.clone(),
            c.rhs.clone(),
            c.status.to_string(),
            c.detail.clone(),
        ]);
    }
    let ok = checks.iter().all(|c| c.status != suites::Status::Fail);
    Ok(Output {
        json: serde_json::to_value(&checks).expect("serializable"),
        table,
        ok,
    })
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Jordan { .. } => "jordan",
        Command::Strata { .. } => "strata",
        Command::Density { .. } => "density",
        Command::DensityTable => "density-table",
        Command::Intersect { .. } => "intersect",
        Command::DisplaySim { .. } => "display-sim",
        Command::Verify { .. } => "verify",
        Command::Table { .. } => "table",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = match parse_budget(&cli.budget) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = RunConfig {
        p: cli.p,
        precision: cli.precision,
        epsilon_override: cli.epsilon,
        threads: cli.threads.max(1),
        budget,
        output_format: cli.format,
        seed: cli.seed,
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
    {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(2);
    }
    let name = command_name(&cli.command);
    let result = run_command(&cli.command, &cfg).and_then(|out| {
        out.table
            .render(cfg.output_format, |_| {
                envelope(name, cfg.p, out.json.clone())
            })
            .map(|s| (s, out.ok))
    });
    match result {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
