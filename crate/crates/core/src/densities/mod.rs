//! Hermitian representation densities: brute-force counts, the closed-form
//! polynomials, and the derivative identities.

mod brute;
mod closed;

pub use brute::{brute_count, brute_count_with, BruteBudget, CountReport, Kernel};
pub use closed::{
    alpha_derivative_binary, alpha_unimodular_corank2, density_node, derivative_ratio,
    nagaoka_poly, normalized_derivative_formula, shimura_poly, BinaryDerivative, DerivativeRatio,
};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::jordan_decompose;
use crate::padic::{rat_p_pow, HermMatrix, RationalPoly};

pub(crate) fn ser_rat<S: Serializer>(
    x: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `ℓ(T)`: the least `ℓ ≥ 0` with `p^ℓ T^{−1}` integral, i.e. the largest
/// Jordan exponent.
pub fn ell(t: &HermMatrix) -> Result<u32> {
    Ok(jordan_decompose(t)?
        .exponents
        .iter()
        .copied()
        .max()
        .unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityRequest {
    pub s: HermMatrix,
    pub t: HermMatrix,
    pub k: u32,
}

impl DensityRequest {
    pub fn new(s: HermMatrix, t: HermMatrix, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be ≥ 1".into()));
        }
        if s.n() < t.n() {
            return Err(Error::Dimension(format!("m = {} < n = {}", s.n(), t.n())));
        }
        Ok(DensityRequest { s, t, k })
    }

    /// `k = ℓ(T) + 1`, the first level at which the normalized count is stable.
    pub fn stable(s: HermMatrix, t: HermMatrix) -> Result<Self> {
        let k = ell(&t)? + 1;
        Self::new(s, t, k)
    }

    /// `n(2m − n)`, the exponent in the normalization `(p^{−k})^{n(2m−n)}`.
    pub fn normalization_exponent(&self) -> i64 {
        let (m, n) = (self.s.n() as i64, self.t.n() as i64);
        n * (2 * m - n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stabilization {
    /// The normalized count at `k + 1` agrees.
    Confirmed,
    Skipped {
        reason: String,
    },
    NotRequested,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub k: u32,
    pub count: String,
    pub kernel: Kernel,
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
    /// `k > ℓ(T)`.
    pub in_stable_range: bool,
    pub stabilization: Stabilization,
}

fn normalized(req: &DensityRequest, k: u32, count: u128) -> BigRational {
    let p = req.s.ctx().p();
    let scale = rat_p_pow(p, -(k as i64) * req.normalization_exponent());
    BigRational::from_integer(count.into()) * scale
}

/// `(p^{−k})^{n(2m−n)}·|A_{p^k}(S, T)|`, optionally re-run at `k + 1`.
///
/// A disagreement at `k + 1` inside the stable range is a hard error; when
/// the second run would exceed the budget it is reported as skipped.
pub fn density_bruteforce(
    req: &DensityRequest,
    budget: BruteBudget,
    check_next: bool,
) -> Result<DensityReport> {
    let first = brute_count(&req.s, &req.t, req.k, budget)?;
    let value = normalized(req, req.k, first.count);
    let in_stable_range = req.k > ell(&req.t)?;
    let stabilization = if !check_next {
        Stabilization::NotRequested
    } else {
        let k2 = req.k + 1;
        let precision_ok = req.s.ctx().precision() >= k2 && req.t.ctx().precision() >= k2;
        if !precision_ok {
            Stabilization::Skipped {
                reason: format!("inputs carry fewer than {k2} digits"),
            }
        } else {
            match brute_count(&req.s, &req.t, k2, budget) {
                Ok(second) => {
                    let v2 = normalized(req, k2, second.count);
                    if v2 == value {
                        Stabilization::Confirmed
                    } else if in_stable_range {
                        return Err(Error::Consistency(format!(
                            "density at k = {} is {value}, at k = {k2} is {v2}",
                            req.k
                        )));
                    } else {
                        Stabilization::Skipped {
                            reason: format!("k = {} is below the stable range", req.k),
                        }
                    }
                }
                Err(Error::BudgetExceeded { estimate, budget }) => Stabilization::Skipped {
                    reason: format!("k = {k2} needs ~{estimate} steps, budget {budget}"),
                },
                Err(e) => return Err(e),
            }
        }
    };
    Ok(DensityReport {
        k: req.k,
        count: first.count.to_string(),
        kernel: first.kernel,
        value,
        in_stable_range,
        stabilization,
    })
}

/// Which closed form (if any) gives `α(S, T)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub source: &'static str,
    /// `r` with `S ≅ diag(S₀, 1_r)`; the polynomial is evaluated at `(−p)^{−r}`.
    pub r: u32,
    #[serde(serialize_with = "ser_poly")]
    pub poly: RationalPoly,
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
}

fn ser_poly<S: Serializer>(x: &RationalPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Closed forms available for unimodular `S`:
///
/// - `T ≅ 1_n`: the product polynomial;
/// - `T ≅ diag(p^a, p^b)`: the binary polynomial;
/// - `m = n` and `ord det S + ord det T` odd: zero.
pub fn closed_form(s: &HermMatrix, t: &HermMatrix) -> Result<Option<ClosedForm>> {
    let p = s.ctx().p();
    let (m, n) = (s.n() as u32, t.n() as u32);
    if m < n {
        return Err(Error::Dimension(format!("m = {m} < n = {n}")));
    }
    let s_exps = jordan_decompose(s)?.exponents;
    if s_exps.iter().any(|&e| e != 0) {
        return Ok(None);
    }
    let t_exps = jordan_decompose(t)?.exponents;
    let det_t: u32 = t_exps.iter().sum();
    let r = m - n;
    let make = |source, poly: RationalPoly| {
        let value = poly.eval(&density_node(p, r));
        Some(ClosedForm {
            source,
            r,
            poly,
            value,
        })
    };
    if m == n && det_t % 2 == 1 {
        return Ok(Some(ClosedForm {
            source: "parity",
            r,
            poly: RationalPoly::zero(),
            value: BigRational::zero(),
        }));
    }
    if t_exps.iter().all(|&e| e == 0) {
        return Ok(make("product", shimura_poly(p, n)));
    }
    if n == 2 {
        return Ok(make("binary", nagaoka_poly(p, t_exps[0], t_exps[1])));
    }
    Ok(None)
}

/// Lagrange interpolation through `(x_i, y_i)`.
pub fn interpolate(points: &[(BigRational, BigRational)]) -> RationalPoly {
    let mut out = RationalPoly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = RationalPoly::constant(yi.clone());
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                let denom = xi - xj;
                basis = &basis * &RationalPoly::linear(-xj / &denom, denom.recip());
            }
        }
        out = &out + &basis;
    }
    out
}

/// Outcome of interpolating `F(1_2, diag(p^a, p^b); X)` from brute-force
/// densities at `r = 0, 1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterpolationProbe {
    pub degree_cap: u32,
    pub nodes: Vec<u32>,
    #[serde(serialize_with = "ser_poly")]
    pub interpolant: RationalPoly,
    /// Enough nodes to pin a polynomial of degree `≤ degree_cap`.
    pub determined: bool,
    /// The brute-force values agree with the closed form at every node.
    pub matches_closed_form_at_nodes: bool,
}

/// Interpolate from `α(1_{2+r}, diag(p^a, p^b))` for `r ≤ max_r`. With
/// fewer than `a + b + 3` nodes the interpolant is reported as undetermined.
pub fn interpolation_probe(
    ctx: crate::padic::PrimeContext,
    a: u32,
    b: u32,
    max_r: u32,
    budget: BruteBudget,
) -> Result<InterpolationProbe> {
    let p = ctx.p();
    let t = HermMatrix::diagonal_powers(ctx, &[a, b]);
    let closed = nagaoka_poly(p, a, b);
    let mut points = Vec::new();
    let mut nodes = Vec::new();
    let mut matches = true;
    for r in 0..=max_r {
        let s = HermMatrix::identity(ctx, 2 + r as usize);
        let req = DensityRequest::stable(s, t.clone())?;
        let rep = density_bruteforce(&req, budget, false)?;
        let x = density_node(p, r);
        matches &= closed.eval(&x) == rep.value;
        points.push((x, rep.value));
        nodes.push(r);
    }
    let degree_cap = a + b + 2;
    Ok(InterpolationProbe {
        degree_cap,
        determined: nodes.len() as u32 > degree_cap,
        interpolant: interpolate(&points),
        nodes,
        matches_closed_form_at_nodes: matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{rat, PrimeContext};

    fn ctx(k: u32) -> PrimeContext {
        PrimeContext::new(3, k).unwrap()
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell(&HermMatrix::identity(ctx(4), 3)).unwrap(), 0);
        assert_eq!(
            ell(&HermMatrix::diagonal_powers(ctx(6), &[2, 3])).unwrap(),
            3
        );
        assert_eq!(
            ell(&HermMatrix::diagonal_powers(ctx(6), &[0, 1, 3])).unwrap(),
            3
        );
    }

    #[test]
    fn unit_density() {
        let req = DensityRequest::new(
            HermMatrix::identity(ctx(3), 1),
            HermMatrix::identity(ctx(3), 1),
            1,
        )
        .unwrap();
        let r = density_bruteforce(&req, BruteBudget::default(), true).unwrap();
        assert_eq!(r.value, rat(4, 3));
        assert_eq!(r.stabilization, Stabilization::Confirmed);
    }

    #[test]
    fn interpolation_recovers_lines() {
        let pts = vec![
            (rat(0, 1), rat(1, 1)),
            (rat(1, 1), rat(3, 1)),
            (rat(2, 1), rat(5, 1)),
        ];
        let f = interpolate(&pts);
        assert_eq!(f, RationalPoly::linear(rat(1, 1), rat(2, 1)));
    }

    #[test]
    fn closed_form_selection() {
        let c = ctx(4);
        let cf = closed_form(&HermMatrix::identity(c, 3), &HermMatrix::identity(c, 1))
            .unwrap()
            .unwrap();
        assert_eq!(cf.value, rat(28, 27));
        let cf = closed_form(
            &HermMatrix::identity(c, 2),
            &HermMatrix::diagonal_powers(c, &[0, 1]),
        )
        .unwrap()
        .unwrap();
        assert_eq!(cf.value, rat(0, 1));
        assert!(closed_form(
            &HermMatrix::identity(c, 2),
            &HermMatrix::diagonal_powers(c, &[1])
        )
        .unwrap()
        .is_none());
    }
}
