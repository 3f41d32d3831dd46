//! Ramification indices, the coset valuation `l_{r,s}` and the lifting
//! bounds `n_{r,s}`.
//!
//! Bounds are returned in units of `e/e_s`, i.e. as lengths over `W_s`.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{rat, rat_int, rat_p_pow, OkElement, QuatElement, Valuation};

/// `e_0 = 1`, `e_s = p^{s−1}(p+1)`.
pub fn ramification_index(p: u64, s: i64) -> Result<u128> {
    if s < 0 {
        return Err(Error::InvalidArgument(format!("level s = {s} is negative")));
    }
    if s == 0 {
        return Ok(1);
    }
    (p as u128)
        .checked_pow(s as u32 - 1)
        .and_then(|x| x.checked_mul(p as u128 + 1))
        .ok_or_else(|| Error::InvalidArgument(format!("e_{s} overflows at p = {p}")))
}

pub(crate) fn e_rat(p: u64, s: u32) -> BigRational {
    if s == 0 {
        BigRational::one()
    } else {
        rat_p_pow(p, s as i64 - 1) * rat_int(p as i64 + 1)
    }
}

/// `(p^k − 1)/(p − 1)`.
pub(crate) fn geometric(p: u64, k: u32) -> BigRational {
    (rat_p_pow(p, k as i64) - BigRational::one()) / rat_int(p as i64 - 1)
}

/// `O_k`-valuations of the two components of `ψ = α + βΠ`; `None` is `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuatValuationDatum {
    pub ord_alpha: Option<u32>,
    pub ord_beta: Option<u32>,
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl QuatValuationDatum {
    pub fn new(ord_alpha: Option<u32>, ord_beta: Option<u32>) -> Self {
        QuatValuationDatum {
            ord_alpha,
            ord_beta,
        }
    }

    /// Components vanishing to the carried precision are read as zero.
    pub fn from_element(q: &QuatElement) -> Self {
        let f = |v: Valuation| v.finite();
        QuatValuationDatum {
            ord_alpha: f(q.alpha.valuation()),
            ord_beta: f(q.beta.valuation()),
        }
    }

    /// `v_D(ψ) = min(2·ord α, 2·ord β + 1)`.
    pub fn v_d(&self) -> Option<u32> {
        min_opt(
            self.ord_alpha.map(|a| 2 * a),
            self.ord_beta.map(|b| 2 * b + 1),
        )
    }
}

/// Which component `H_{r,s}` can absorb, the exponent `e` with
/// `H_{r,s} = p^e·O_{k,r}` or `p^e·O_{k,r}·Π`, and whether it is the `Π`-part.
fn coset_shape(r: u32, s: u32) -> Result<(u32, bool)> {
    if r > s {
        return Err(Error::InvalidArgument(format!("r = {r} > s = {s}")));
    }
    let d = s - r;
    Ok((d / 2, d % 2 == 1))
}

/// Combine the untouched component with the best reachable valuation of the
/// absorbable one.
fn combine(other: Option<u32>, gamma_best: Option<u32>, gamma_is_beta: bool) -> Option<u32> {
    if gamma_is_beta {
        min_opt(other.map(|a| 2 * a), gamma_best.map(|b| 2 * b + 1))
    } else {
        min_opt(gamma_best.map(|a| 2 * a), other.map(|b| 2 * b + 1))
    }
}

/// `l_{r,s}(ψ) = max{v_D(ψ + φ) : φ ∈ H_{r,s}}` from component valuations;
/// `None` means `ψ ∈ H_{r,s}`.
///
/// For `r > 0` the datum is not always enough: when the absorbable
/// component has valuation in `[e, e + r)`, the answer depends on its
/// `Z_p`-coordinates and [`coset_valuation_exact`] must be used.
pub fn coset_valuation_l(psi: &QuatValuationDatum, r: u32, s: u32) -> Result<Option<u32>> {
    let (e, gamma_is_beta) = coset_shape(r, s)?;
    let (gamma, other) = if gamma_is_beta {
        (psi.ord_beta, psi.ord_alpha)
    } else {
        (psi.ord_alpha, psi.ord_beta)
    };
    let best = match gamma {
        Some(g) if g < e => Some(g),
        Some(g) if g < e + r => {
            return Err(Error::InvalidArgument(format!(
                "l_{{{r},{s}}} depends on the Z_p-coordinates of a component of valuation {g}"
            )))
        }
        _ => None,
    };
    Ok(combine(other, best, gamma_is_beta))
}

/// `l_{r,s}(ψ)` from the exact element. With `γ = g₀ + g₁δ` the absorbable
/// component, `p^e·O_{k,r} = p^e·Z_p + p^{e+r}·O_k` can cancel `g₀` when
/// `ord g₀ ≥ e` and `g₁` when `ord g₁ ≥ e + r`.
pub fn coset_valuation_exact(psi: &QuatElement, r: u32, s: u32) -> Result<Option<u32>> {
    let (e, gamma_is_beta) = coset_shape(r, s)?;
    let (gamma, other): (&OkElement, &OkElement) = if gamma_is_beta {
        (&psi.beta, &psi.alpha)
    } else {
        (&psi.alpha, &psi.beta)
    };
    let ctx = psi.ctx();
    let keep = |c: u64, bound: u32| ctx.valuation(c).filter(|&v| v < bound);
    let best = min_opt(keep(gamma.a(), e), keep(gamma.b(), e + r));
    Ok(combine(other.valuation().finite(), best, gamma_is_beta))
}

/// `n_{0,s}` in units of `e/e_s`:
/// `(p^{l+1}−1)/(p−1)` for `l < s`, else `(p^s−1)/(p−1) + ½(l+1−s)e_s`.
pub fn lifting_bound_n0s(p: u64, l: u32, s: u32) -> BigRational {
    if l < s {
        geometric(p, l + 1)
    } else {
        geometric(p, s) + rat(1, 2) * rat_int((l + 1 - s) as i64) * e_rat(p, s)
    }
}

/// `n_{r,r}` in units of `e/e_r`. The quoted ranges overlap at `l = 2r`,
/// which `l_{r,r}` never takes; the tie goes to the last branch so that
/// `r = 0` gives `½(l+1)`.
fn base_nrr(p: u64, l: u32, r: u32) -> BigRational {
    if l < 2 * r && l.is_multiple_of(2) {
        rat_int(2) * geometric(p, l / 2 + 1) - rat_p_pow(p, (l / 2) as i64)
    } else if l < 2 * r {
        rat_int(2) * geometric(p, l.div_ceil(2))
    } else {
        rat_int(2) * geometric(p, r) + rat(1, 2) * rat_int((l + 1 - 2 * r) as i64) * e_rat(p, r)
    }
}

/// `n_{r,s}` for `r ≤ s` in units of `e/e_s`.
///
/// - `l ≥ s − r`: peel `Π^{s−r}` off and land on `n_{r,r}` at `l − (s − r)`;
/// - `l < s − r`: peel `Π^l` off and land on the unit case at level `s − l`,
///   which contributes `(e/e_{s−l})·e_r`.
pub fn lifting_bound_nrs(p: u64, l: u32, r: u32, s: u32) -> Result<BigRational> {
    if r > s {
        return Err(Error::InvalidArgument(format!("r = {r} > s = {s}")));
    }
    let es = e_rat(p, s);
    // Σ_{j=lo}^{s} e_s/e_j for lo ≥ 1.
    let peel = |lo: u32| {
        (lo..=s).fold(BigRational::from_integer(0.into()), |acc, j| {
            acc + &es / e_rat(p, j)
        })
    };
    if l >= s - r {
        Ok(peel(r + 1) + &es / e_rat(p, r) * base_nrr(p, l - (s - r), r))
    } else {
        Ok(peel(s - l + 1) + &es / e_rat(p, s - l) * e_rat(p, r))
    }
}

/// Both sides of `n_{r,s+1}(Πψ) = n_{r,s}(ψ) + e/e_{s+1}`, normalized at
/// level `s + 1`, where `l_{r,s+1}(Πψ) = l_{r,s}(ψ) + 1`.
pub fn onestep_sides(p: u64, l: u32, r: u32, s: u32) -> Result<(BigRational, BigRational)> {
    let lhs = lifting_bound_nrs(p, l + 1, r, s + 1)?;
    let rhs = lifting_bound_nrs(p, l, r, s)? * e_rat(p, s + 1) / e_rat(p, s) + BigRational::one();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;
    use proptest::prelude::*;

    #[test]
    fn ramification_examples() {
        assert_eq!(ramification_index(3, 0).unwrap(), 1);
        assert_eq!(ramification_index(3, 1).unwrap(), 4);
        assert_eq!(ramification_index(3, 3).unwrap(), 36);
        assert!(ramification_index(3, -1).is_err());
    }

    #[test]
    fn coset_examples() {
        // Π^b with b odd, s even ≤ a.
        let pib = QuatValuationDatum::new(None, Some(2));
        assert_eq!(coset_valuation_l(&pib, 0, 2).unwrap(), Some(5));
        // Π^a with a even, s odd: the Π-part is empty, α survives.
        let pia = QuatValuationDatum::new(Some(2), None);
        assert_eq!(coset_valuation_l(&pia, 0, 3).unwrap(), Some(4));
        let unit = QuatValuationDatum::new(Some(0), Some(3));
        for s in 1..6 {
            assert_eq!(coset_valuation_l(&unit, 0, s).unwrap(), Some(0));
        }
        // At s = 0 every α is absorbed.
        assert_eq!(coset_valuation_l(&unit, 0, 0).unwrap(), Some(7));
        assert_eq!(coset_valuation_l(&pia, 0, 0).unwrap(), None);
    }

    #[test]
    fn datum_defers_when_coordinates_matter() {
        let d = QuatValuationDatum::new(Some(1), Some(0));
        assert!(coset_valuation_l(&d, 2, 2).is_err());
        let c = PrimeContext::new(3, 6).unwrap();
        // 3 ∈ Z_p is absorbed by O_{k,2}; 3δ is not.
        let rational = QuatElement::new(OkElement::new(c, 3, 0), OkElement::new(c, 0, 0));
        let twisted = QuatElement::new(OkElement::new(c, 0, 3), OkElement::new(c, 0, 0));
        assert_eq!(coset_valuation_exact(&rational, 2, 2).unwrap(), None);
        assert_eq!(coset_valuation_exact(&twisted, 2, 2).unwrap(), Some(2));
    }

    #[test]
    fn n0s_examples() {
        for l in 0..6 {
            assert_eq!(lifting_bound_n0s(3, l, 0), rat(l as i64 + 1, 2));
        }
        for s in 1..5 {
            assert_eq!(lifting_bound_n0s(5, 0, s), rat_int(1));
        }
        // s = 2, l = 5 at p = 3: 4 + ½·4·12.
        assert_eq!(lifting_bound_n0s(3, 5, 2), rat_int(28));
    }

    #[test]
    fn nrs_examples() {
        // Base case, l = 2 ≤ 2r even at r = s = 2.
        assert_eq!(lifting_bound_nrs(3, 2, 2, 2).unwrap(), rat_int(2 * 4 - 3));
        // Unit case.
        assert_eq!(lifting_bound_nrs(3, 0, 1, 2).unwrap(), rat_int(4));
        assert_eq!(lifting_bound_nrs(7, 0, 2, 5).unwrap(), rat_int(56));
        assert!(lifting_bound_nrs(3, 0, 3, 2).is_err());
    }

    #[test]
    fn nrs_at_r0_is_n0s() {
        for p in [3, 5, 7] {
            for s in 0..7 {
                for l in 0..13 {
                    assert_eq!(
                        lifting_bound_nrs(p, l, 0, s).unwrap(),
                        lifting_bound_n0s(p, l, s),
                        "{p} {l} {s}"
                    );
                }
            }
        }
    }

    #[test]
    fn onestep_grid() {
        for p in [3, 5] {
            for s in 0..6 {
                for r in 0..=s {
                    for l in 0..12 {
                        let (a, b) = onestep_sides(p, l, r, s).unwrap();
                        assert_eq!(a, b, "p={p} l={l} r={r} s={s}");
                    }
                }
            }
        }
    }

    /// Exhaustive `max v_D(ψ + φ)` over `φ ∈ H_{r,s}` modulo `p^N`.
    fn brute_l(psi: &QuatElement, r: u32, s: u32) -> Option<u32> {
        let c = psi.ctx();
        let q = c.modulus();
        let d = s - r;
        let step0 = c.p_pow(d / 2);
        let step1 = c.p_pow(d / 2 + r);
        let mut best: Option<u32> = Some(0);
        let mut x0 = 0;
        while x0 < q {
            let mut x1 = 0;
            while x1 < q {
                let h = OkElement::from_residues(c, x0, x1);
                let phi = if d.is_multiple_of(2) {
                    QuatElement::from_ok(h)
                } else {
                    QuatElement::new(OkElement::zero(c), h)
                };
                match psi.checked_add(&phi).unwrap().valuation() {
                    Valuation::Finite(v) => best = best.map(|b| b.max(v)),
                    Valuation::AtLeast(_) => return None,
                }
                x1 += step1;
            }
            x0 += step0;
        }
        best
    }

    proptest! {
        #[test]
        fn exact_matches_brute(a0 in 0u64..81, a1 in 0u64..81, b0 in 0u64..81, b1 in 0u64..81,
                               s in 0u32..4, r_off in 0u32..4) {
            let c = PrimeContext::new(3, 4).unwrap();
            let psi = QuatElement::new(OkElement::from_residues(c, a0, a1), OkElement::from_residues(c, b0, b1));
            let r = r_off.min(s);
            let exact = coset_valuation_exact(&psi, r, s).unwrap();
            // Valuations ≥ 2N are invisible mod p^N.
            let exact = exact.filter(|&v| v < 8);
            prop_assert_eq!(exact, brute_l(&psi, r, s));
            if let Ok(from_datum) = coset_valuation_l(&QuatValuationDatum::from_element(&psi), r, s) {
                prop_assert_eq!(from_datum, coset_valuation_exact(&psi, r, s).unwrap());
            }
        }

        #[test]
        fn deep_elements_have_odd_excess(a0 in 0u64..729, a1 in 0u64..729, b0 in 0u64..729, b1 in 0u64..729,
                                          s in 0u32..5, r_off in 0u32..5) {
            let c = PrimeContext::new(3, 6).unwrap();
            let psi = QuatElement::new(OkElement::from_residues(c, a0, a1), OkElement::from_residues(c, b0, b1));
            let r = r_off.min(s);
            if let Valuation::Finite(v) = psi.valuation() {
                if v >= s + r {
                    if let Some(l) = coset_valuation_exact(&psi, r, s).unwrap() {
                        prop_assert!(l + r >= s + 2 * r);
                        prop_assert_eq!((l + r - s) % 2, 1);
                    }
                }
            }
        }
    }
}
