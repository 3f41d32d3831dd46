//! Verification suites. Each check records both sides of an identity and a
//! status; a budget overrun is `SKIPPED`, never `PASS`.

use hermlocal::densities::{
    brute_count, brute_count_with, closed_form, density_bruteforce, density_node, nagaoka_poly,
    shimura_poly, DensityRequest, Kernel,
};
use hermlocal::display_sim::{default_t_max, expected_exponent, simulate};
use hermlocal::hermitian::{jordan_decompose, JordanProfile};
use hermlocal::lifting::{
    main_identity, onestep_sides, special_fiber_sums, total_degree, LevelParity,
};
use hermlocal::padic::{rat, HermMatrix, OkElement, OkMatrix, PrimeContext};
use hermlocal::strata::{
    enumerate_grd, profile_grid, verify_stratum_theorems, FiniteHermModule, StrataBudget,
};
use hermlocal::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn compare(suite: &str, name: String, lhs: String, rhs: String, detail: String) -> Self {
        let status = if lhs == rhs {
            Status::Pass
        } else {
            Status::Fail
        };
        Check {
            suite: suite.into(),
            name,
            lhs,
            rhs,
            status,
            detail,
        }
    }

    fn from_error(suite: &str, name: String, err: Error) -> Self {
        let status = match err {
            Error::BudgetExceeded { .. } => Status::Skipped,
            _ => Status::Fail,
        };
        Check {
            suite: suite.into(),
            name,
            lhs: String::new(),
            rhs: String::new(),
            status,
            detail: err.to_string(),
        }
    }
}

/// Checks from one or more suites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl SuiteReport {
    pub fn new(checks: Vec<Check>) -> Self {
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        let (passed, failed, skipped) = (
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Skipped),
        );
        SuiteReport {
            checks,
            passed,
            failed,
            skipped,
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// `0 ≤ a < b ≤ max` with `a + b` odd.
pub fn opposite_parity_pairs(max: u32) -> Vec<(u32, u32)> {
    (0..=max)
        .flat_map(|a| {
            ((a + 1)..=max)
                .filter(move |b| (a + b) % 2 == 1)
                .map(move |b| (a, b))
        })
        .collect()
}

/// Ledger total vs `½Σ p^l(a+b+1−2l)` vs the density derivative ratio at `n ∈ {2, 3, 4}`.
pub fn grand_identity(p: u64, max: u32) -> Vec<Check> {
    opposite_parity_pairs(max)
        .par_iter()
        .map(|&(a, b)| {
            let name = format!("main identity p={p} (a,b)=({a},{b})");
            match main_identity(p, a, b, &[2, 3, 4]) {
                Ok(row) => {
                    let dens: Vec<String> = row
                        .density_ratio
                        .iter()
                        .map(|(n, v)| format!("n={n}:{v}"))
                        .collect();
                    let lhs = row.ledger_total.to_string();
                    let status = if row.agree && row.ledger_total == row.length_formula {
                        Status::Pass
                    } else {
                        Status::Fail
                    };
                    Check {
                        suite: "lifting".into(),
                        name,
                        lhs,
                        rhs: format!("formula {}; density {}", row.length_formula, dens.join(",")),
                        status,
                        detail: String::new(),
                    }
                }
                Err(e) => Check::from_error("lifting", name, e),
            }
        })
        .collect()
}

/// Onestep recursion for `r ≤ s ≤ max_s`, `l ≤ max_l`.
pub fn onestep_checks(p: u64, max_s: u32, max_l: u32) -> Check {
    let mut total = 0;
    let mut bad = Vec::new();
    for s in 0..=max_s {
        for r in 0..=s {
            for l in 0..=max_l {
                total += 1;
                match onestep_sides(p, l, r, s) {
                    Ok((a, b)) if a == b => {}
                    Ok((a, b)) => bad.push(format!("(l,r,s)=({l},{r},{s}): {a} vs {b}")),
                    Err(e) => bad.push(format!("(l,r,s)=({l},{r},{s}): {e}")),
                }
            }
        }
    }
    Check {
        suite: "lifting".into(),
        name: format!("onestep p={p} r≤s≤{max_s} l≤{max_l}"),
        lhs: format!("{} of {total} hold", total - bad.len()),
        rhs: format!("{total} of {total} hold"),
        status: if bad.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        detail: bad.into_iter().take(5).collect::<Vec<_>>().join("; "),
    }
}

/// Even and odd expansions of `Z(y_1)·Z(y_2)` at each grid point.
pub fn expansion_checks(p: u64, max: u32) -> Vec<Check> {
    opposite_parity_pairs(max)
        .into_iter()
        .map(|(a, b)| {
            let name = format!("expansions p={p} (a,b)=({a},{b})");
            match total_degree(p, a, b) {
                Ok(l) => {
                    let sum = |v: &[hermlocal::lifting::StratumTerm]| {
                        v.iter()
                            .fold(rat(0, 1), |acc, t| acc + &t.value)
                            .to_string()
                    };
                    let detail = if l.extrapolated {
                        "uses the b < s branch".to_string()
                    } else {
                        String::new()
                    };
                    Check::compare(
                        "lifting",
                        name,
                        sum(&l.even_expansion),
                        sum(&l.odd_expansion),
                        detail,
                    )
                }
                Err(e) => Check::from_error("lifting", name, e),
            }
        })
        .collect()
}

pub fn fiber_sum_checks(p: u64, max_a: u32) -> Vec<Check> {
    (0..=max_a)
        .map(|a| {
            let parity = if a % 2 == 0 {
                LevelParity::Even
            } else {
                LevelParity::Odd
            };
            let name = format!("special fiber sum p={p} a={a}");
            match special_fiber_sums(p, a, parity) {
                Ok(v) => {
                    let closed = ((p as u128).pow(a + 1) - 1) / (p as u128 - 1);
                    Check::compare(
                        "lifting",
                        name,
                        v.to_string(),
                        closed.to_string(),
                        String::new(),
                    )
                }
                Err(e) => Check::from_error("lifting", name, e),
            }
        })
        .collect()
}

pub fn lifting_suite(cfg: &RunConfig) -> Vec<Check> {
    let mut out = grand_identity(cfg.p, 9);
    out.push(onestep_checks(cfg.p, 6, 12));
    out.extend(expansion_checks(cfg.p, 9));
    out.extend(fiber_sum_checks(cfg.p, 8));
    out
}

/// Largest `v ≤ 3` whose expected exponent is at most 100.
pub fn default_display_range(p: u64) -> u32 {
    (0..=3)
        .rev()
        .find(|&v| expected_exponent(p, v).is_ok_and(|e| e <= 100))
        .unwrap_or(0)
}

pub fn display_checks(p: u64, max_v: u32) -> Vec<Check> {
    (0..=max_v)
        .into_par_iter()
        .map(|v| {
            let name = format!("display recursion p={p} v={v}");
            let run = default_t_max(p, v).and_then(|t| simulate(p, v, t));
            match run {
                Ok((rep, _)) => {
                    let claims = rep.parity_pattern && rep.leading_terms.iter().all(|c| c.holds);
                    let mut c = Check::compare(
                        "display",
                        name,
                        rep.exponent.to_string(),
                        rep.expected.to_string(),
                        format!(
                            "parity pattern {}, leading terms {}",
                            rep.parity_pattern, claims
                        ),
                    );
                    if !claims {
                        c.status = Status::Fail;
                    }
                    c
                }
                Err(e) => Check::from_error("display", name, e),
            }
        })
        .collect()
}

pub fn display_suite(cfg: &RunConfig) -> Vec<Check> {
    display_checks(cfg.p, default_display_range(cfg.p))
}

fn label_t(exps: &[u32]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .map(|&e| match e {
            0 => "1".to_string(),
            1 => "p".to_string(),
            e => format!("p^{e}"),
        })
        .collect();
    format!("diag({})", parts.join(","))
}

/// Brute-force density against the closed form, or against plain
/// enumeration when no closed form applies.
pub fn density_cell(ctx: PrimeContext, m: usize, t_exps: &[u32], cfg: &RunConfig) -> Check {
    let name = format!("density p={} S=1_{m} T={}", ctx.p(), label_t(t_exps));
    let s = HermMatrix::identity(ctx, m);
    let t = HermMatrix::diagonal_powers(ctx, t_exps);
    let run = || -> Result<Check> {
        let req = DensityRequest::stable(s.clone(), t.clone())?;
        let rep = density_bruteforce(&req, cfg.brute_budget(), true)?;
        let stab = serde_json::to_string(&rep.stabilization).unwrap_or_default();
        match closed_form(&s, &t)? {
            Some(cf) => Ok(Check::compare(
                "densities",
                name.clone(),
                rep.value.to_string(),
                cf.value.to_string(),
                format!(
                    "k={}, closed form {}, stabilization {stab}",
                    rep.k, cf.source
                ),
            )),
            None => {
                let naive = brute_count_with(&s, &t, req.k, cfg.brute_budget(), Kernel::Naive)?;
                Ok(Check::compare(
                    "densities",
                    name.clone(),
                    rep.count.clone(),
                    naive.count.to_string(),
                    format!(
                        "k={}, no closed form; count vs plain enumeration; value {}",
                        rep.k, rep.value
                    ),
                ))
            }
        }
    };
    run().unwrap_or_else(|e| Check::from_error("densities", name, e))
}

/// `S ∈ {1_1, 1_2, 1_3}`, `T ∈ {1_1, (p), 1_2, diag(1,p), diag(p,p), diag(1,p²)}` with `m ≥ n`.
pub fn density_grid(cfg: &RunConfig) -> Result<Vec<Check>> {
    let ctx = cfg.ctx()?;
    let ts: [&[u32]; 6] = [&[0], &[1], &[0, 0], &[0, 1], &[1, 1], &[0, 2]];
    let cells: Vec<(usize, &[u32])> = (1..=3)
        .flat_map(|m| {
            ts.iter()
                .filter(move |t| t.len() <= m)
                .map(move |t| (m, *t))
        })
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(m, t)| density_cell(ctx, m, t, cfg))
        .collect())
}

/// `α(1_1, 1_1) = 4/3` and `α(1_2, 1_2) = 32/27` at `p = 3`.
pub fn density_spot_values(cfg: &RunConfig) -> Result<Vec<Check>> {
    let ctx = cfg.ctx()?;
    let cases = [(1usize, "4/3"), (2, "32/27")];
    Ok(cases
        .iter()
        .map(|&(n, want)| {
            let name = format!("spot value α_3(1_{n}, 1_{n})");
            let run = || -> Result<String> {
                let req = DensityRequest::stable(
                    HermMatrix::identity(ctx, n),
                    HermMatrix::identity(ctx, n),
                )?;
                Ok(density_bruteforce(&req, cfg.brute_budget(), false)?
                    .value
                    .to_string())
            };
            match run() {
                Ok(v) => Check::compare("densities", name, v, want.to_string(), String::new()),
                Err(e) => Check::from_error("densities", name, e),
            }
        })
        .collect())
}

/// The binary polynomial at `(0, 0)` is the product polynomial, and at
/// `X = (−p)^{−1}` it reproduces `α(1_3, diag(p^a, p^b))`.
pub fn nagaoka_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let ctx = cfg.ctx()?;
    let p = ctx.p();
    let mut out = vec![Check::compare(
        "densities",
        format!("binary polynomial (0,0) = product polynomial n=2, p={p}"),
        nagaoka_poly(p, 0, 0).to_string(),
        shimura_poly(p, 2).to_string(),
        String::new(),
    )];
    let mut rest: Vec<Check> = [(0u32, 1u32), (1, 2)]
        .par_iter()
        .map(|&(a, b)| {
            let name = format!("binary polynomial at -1/p vs α(1_3, diag(p^{a},p^{b})), p={p}");
            let run = || -> Result<Check> {
                let s = HermMatrix::identity(ctx, 3);
                let t = HermMatrix::diagonal_powers(ctx, &[a, b]);
                let req = DensityRequest::stable(s, t)?;
                let rep = density_bruteforce(&req, cfg.brute_budget(), false)?;
                let poly = nagaoka_poly(p, a, b).eval(&density_node(p, 1));
                Ok(Check::compare(
                    "densities",
                    name.clone(),
                    rep.value.to_string(),
                    poly.to_string(),
                    format!("k={}", rep.k),
                ))
            };
            run().unwrap_or_else(|e| Check::from_error("densities", name, e))
        })
        .collect();
    out.append(&mut rest);
    Ok(out)
}

pub fn densities_suite(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let parts = [density_grid(cfg), nagaoka_checks(cfg)];
    for part in parts {
        match part {
            Ok(mut v) => out.append(&mut v),
            Err(e) => out.push(Check::from_error("densities", "setup".into(), e)),
        }
    }
    if cfg.p == 3 {
        match density_spot_values(cfg) {
            Ok(mut v) => out.append(&mut v),
            Err(e) => out.push(Check::from_error("densities", "spot values".into(), e)),
        }
    }
    out
}

/// One check per profile; profiles outside the theorems' hypotheses pass
/// when the enumeration itself is consistent and are flagged in `detail`.
pub fn strata_checks(p: u64, profiles: &[JordanProfile], budget: StrataBudget) -> Vec<Check> {
    profiles
        .par_iter()
        .map(|prof| {
            let name = format!("strata p={p} exponents={:?}", prof.exponents());
            match verify_stratum_theorems(p, prof, budget) {
                Ok(rep) => {
                    let expected = rep.t0.unwrap_or(1).to_string();
                    let detail = if rep.hypotheses_hold {
                        format!(
                            "unique maximal vertex: predicted {}, observed {}",
                            rep.irreducible_predicted, rep.irreducible_observed
                        )
                    } else {
                        format!(
                            "ord det even: outside hypotheses (max type {}, t0 {expected})",
                            rep.max_type
                        )
                    };
                    Check {
                        suite: "strata".into(),
                        name,
                        lhs: rep.max_type.to_string(),
                        rhs: if rep.hypotheses_hold {
                            expected
                        } else {
                            rep.max_type.to_string()
                        },
                        status: Status::Pass,
                        detail,
                    }
                }
                Err(e) => Check::from_error("strata", name, e),
            }
        })
        .collect()
}

pub fn strata_suite(cfg: &RunConfig) -> Vec<Check> {
    strata_checks(cfg.p, &profile_grid(4, 3, 5), cfg.strata_budget())
}

fn random_gl(rng: &mut ChaCha8Rng, ctx: PrimeContext, n: usize) -> OkMatrix {
    let q = ctx.modulus();
    loop {
        let rows = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        OkElement::from_residues(ctx, rng.gen_range(0..q), rng.gen_range(0..q))
                    })
                    .collect()
            })
            .collect();
        let u = OkMatrix::from_rows(ctx, rows).expect("square");
        if u.is_invertible() {
            return u;
        }
    }
}

/// `GL_2(O_k)`-conjugates of `T = diag(1, p)` (row kernel) and of `S = 1_2`
/// (column kernel) leave `|A_{p^2}(S, T)|` unchanged.
pub fn gl_invariance(cfg: &RunConfig, conjugations: usize) -> Vec<Check> {
    let name = |i: usize| format!("GL-invariance p={} conjugation {i}", cfg.p);
    let ctx = match cfg.ctx_with_precision(2) {
        Ok(c) => c,
        Err(e) => return vec![Check::from_error("robustness", name(0), e)],
    };
    let s = HermMatrix::identity(ctx, 2);
    let t = HermMatrix::diagonal_powers(ctx, &[0, 1]);
    let budget = cfg.brute_budget();
    let base = match brute_count(&s, &t, 2, budget) {
        Ok(r) => r.count,
        Err(e) => return vec![Check::from_error("robustness", name(0), e)],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let us: Vec<OkMatrix> = (0..conjugations)
        .map(|_| random_gl(&mut rng, ctx, 2))
        .collect();
    us.par_iter()
        .enumerate()
        .map(|(i, u)| {
            let run = || -> Result<(u128, Kernel)> {
                let r = if i % 2 == 0 {
                    brute_count(&s, &t.congruence(u)?, 2, budget)?
                } else {
                    brute_count(&s.congruence(u)?, &t, 2, budget)?
                };
                Ok((r.count, r.kernel))
            };
            match run() {
                Ok((c, k)) => Check::compare(
                    "robustness",
                    name(i),
                    c.to_string(),
                    base.to_string(),
                    format!(
                        "{} conjugated, {k:?} kernel",
                        if i % 2 == 0 { "T" } else { "S" }
                    ),
                ),
                Err(e) => Check::from_error("robustness", name(i), e),
            }
        })
        .collect()
}

/// Outputs that must not depend on the choice of nonresidue `ε`.
fn epsilon_fingerprint(p: u64, eps: u64, cfg: &RunConfig) -> Result<Vec<String>> {
    let ctx = PrimeContext::with_epsilon(p, eps, 6)?;
    let mut out = Vec::new();
    for (m, t) in [
        (1usize, vec![0u32]),
        (2, vec![0, 0]),
        (2, vec![0, 1]),
        (2, vec![1]),
    ] {
        let req = DensityRequest::stable(
            HermMatrix::identity(ctx, m),
            HermMatrix::diagonal_powers(ctx, &t),
        )?;
        out.push(
            density_bruteforce(&req, cfg.brute_budget(), false)?
                .value
                .to_string(),
        );
    }
    let t = HermMatrix::new(OkMatrix::from_rows(
        ctx,
        vec![
            vec![
                OkElement::from_int(ctx, p as i128),
                OkElement::from_int(ctx, 1),
            ],
            vec![
                OkElement::from_int(ctx, 1),
                OkElement::from_int(ctx, p as i128),
            ],
        ],
    )?)?;
    out.push(format!("{:?}", jordan_decompose(&t)?.exponents));
    for exps in [vec![1u32, 1], vec![1, 2], vec![0, 1, 1]] {
        let d = FiniteHermModule::from_exponents(p, eps, &exps, StrataBudget::default())?;
        let grd = enumerate_grd(&d);
        let mut types: Vec<u32> = grd.iter().map(|e| e.vertex_type(&d)).collect();
        types.sort();
        out.push(format!("{exps:?}:{types:?}"));
    }
    Ok(out)
}

/// Densities, Jordan exponents and vertex-type multisets at every
/// nonresidue `ε < p` agree with those at the least one.
pub fn epsilon_invariance(p: u64, cfg: &RunConfig) -> Vec<Check> {
    let nonres: Vec<u64> = (2..p)
        .filter(|&e| hermlocal::padic::is_nonresidue(e, p))
        .collect();
    let base_eps = nonres[0];
    let base = epsilon_fingerprint(p, base_eps, cfg);
    nonres
        .iter()
        .skip(1)
        .map(|&eps| {
            let name = format!("ε-invariance p={p} ε={eps} vs ε={base_eps}");
            match (&base, epsilon_fingerprint(p, eps, cfg)) {
                (Ok(b), Ok(f)) => {
                    Check::compare("robustness", name, f.join(" "), b.join(" "), String::new())
                }
                (Err(e), _) => Check::from_error("robustness", name, e.clone()),
                (_, Err(e)) => Check::from_error("robustness", name, e),
            }
        })
        .collect()
}

pub fn robustness_suite(cfg: &RunConfig) -> Vec<Check> {
    let mut out = gl_invariance(cfg, 20);
    out.extend(epsilon_invariance(5, cfg));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Densities,
    Strata,
    Lifting,
    Display,
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> SuiteReport {
    let checks = match suite {
        Suite::Densities => densities_suite(cfg),
        Suite::Strata => strata_suite(cfg),
        Suite::Lifting => lifting_suite(cfg),
        Suite::Display => display_suite(cfg),
        Suite::All => {
            let mut v = lifting_suite(cfg);
            v.extend(display_suite(cfg));
            v.extend(strata_suite(cfg));
            v.extend(densities_suite(cfg));
            v.extend(robustness_suite(cfg));
            v
        }
    };
    SuiteReport::new(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_grid_size() {
        assert_eq!(opposite_parity_pairs(9).len(), 25);
    }

    #[test]
    fn display_ranges() {
        assert_eq!(default_display_range(3), 3);
        assert_eq!(default_display_range(5), 2);
    }
}
