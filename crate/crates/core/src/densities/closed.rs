//! Closed-form local density polynomials and the derivative identities.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{rat, rat_int, rat_p_pow, RationalPoly};

/// `F(1_n, 1_n; X) = ∏_{ℓ=1}^n (1 − (−1)^ℓ p^{−ℓ} X)`.
pub fn shimura_poly(p: u64, n: u32) -> RationalPoly {
    (1..=n).fold(RationalPoly::one(), |acc, l| {
        let sign = if l % 2 == 0 { -1 } else { 1 };
        let c = rat_p_pow(p, -(l as i64)) * rat_int(sign);
        &acc * &RationalPoly::linear(BigRational::one(), c)
    })
}

/// `F(1_2, diag(p^a, p^b); X)
///   = (1 + p^{−1}X)(1 − p^{−2}X)·Σ_{ℓ=0}^a (pX)^ℓ Σ_{k=0}^{a+b−2ℓ} (−X)^k`
/// for `a ≤ b`; the arguments are sorted first since the matrix is
/// symmetric in them.
pub fn nagaoka_poly(p: u64, a: u32, b: u32) -> RationalPoly {
    let (a, b) = (a.min(b), a.max(b));
    let mut sum = RationalPoly::zero();
    for l in 0..=a {
        let outer = RationalPoly::monomial(rat_p_pow(p, l as i64), l as usize);
        let inner = RationalPoly::new(
            (0..=(a + b - 2 * l))
                .map(|k| if k % 2 == 0 { rat_int(1) } else { rat_int(-1) })
                .collect(),
        );
        sum = &sum + &(&outer * &inner);
    }
    &shimura_poly(p, 2) * &sum
}

/// `(−p)^{−r}`, the point at which `F(S, T; X)` gives `α(diag(S, 1_r), T)`.
pub fn density_node(p: u64, r: u32) -> BigRational {
    let x = rat_p_pow(p, -(r as i64));
    if r % 2 == 1 {
        -x
    } else {
        x
    }
}

/// `α(1_n, 1_{n−2}) = ∏_{ℓ=1}^{n−2} (1 − (−1)^ℓ p^{−ℓ−2})`.
pub fn alpha_unimodular_corank2(p: u64, n: u32) -> BigRational {
    (1..n.saturating_sub(1)).fold(BigRational::one(), |acc, l| {
        let t = rat_p_pow(p, -(l as i64) - 2);
        acc * if l % 2 == 0 {
            BigRational::one() - t
        } else {
            BigRational::one() + t
        }
    })
}

/// `½ Σ_{ℓ=0}^a p^ℓ (a + b − 2ℓ + 1)` with `a = min`, `b = max`.
pub fn normalized_derivative_formula(p: u64, a: u32, b: u32) -> BigRational {
    let (a, b) = (a.min(b), a.max(b));
    let s = (0..=a).fold(BigRational::zero(), |acc, l| {
        acc + rat_p_pow(p, l as i64) * rat_int((a + b + 1 - 2 * l) as i64)
    });
    s * rat(1, 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryDerivative {
    pub a: u32,
    pub b: u32,
    /// `α′(1_2, diag(p^a, p^b)) = −F′(1)`.
    #[serde(serialize_with = "crate::densities::ser_rat")]
    pub alpha_prime: BigRational,
    /// `α′ / ((1 − p^{−2})(1 + p^{−1}))`, from the symbolic derivative.
    #[serde(serialize_with = "crate::densities::ser_rat")]
    pub normalized_symbolic: BigRational,
    /// The same quantity from the closed sum.
    #[serde(serialize_with = "crate::densities::ser_rat")]
    pub normalized_formula: BigRational,
}

fn require_odd(a: u32, b: u32) -> Result<()> {
    if (a + b).is_multiple_of(2) {
        Err(Error::Parity(format!("a + b = {} is even", a + b)))
    } else {
        Ok(())
    }
}

/// Derivative at `X = 1` of the binary polynomial, cross-checked against
/// the closed sum.
pub fn alpha_derivative_binary(p: u64, a: u32, b: u32) -> Result<BinaryDerivative> {
    require_odd(a, b)?;
    let f = nagaoka_poly(p, a, b);
    let one = BigRational::one();
    if !f.eval(&one).is_zero() {
        return Err(Error::Consistency(format!(
            "F(1) ≠ 0 for (a, b) = ({a}, {b})"
        )));
    }
    let alpha_prime = -f.derivative().eval(&one);
    let unit = shimura_poly(p, 2).eval(&one);
    let normalized_symbolic = &alpha_prime / &unit;
    let normalized_formula = normalized_derivative_formula(p, a, b);
    if normalized_symbolic != normalized_formula {
        return Err(Error::Consistency(format!(
            "symbolic {normalized_symbolic} ≠ formula {normalized_formula} at (a, b) = ({a}, {b})"
        )));
    }
    Ok(BinaryDerivative {
        a: a.min(b),
        b: a.max(b),
        alpha_prime,
        normalized_symbolic,
        normalized_formula,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivativeRatio {
    pub n: u32,
    pub a: u32,
    pub b: u32,
    /// `α(1_n, 1_{n−2})·α′(1_2, T′) / α(1_n, 1_n)`.
    #[serde(serialize_with = "crate::densities::ser_rat")]
    pub via_reduction: BigRational,
    #[serde(serialize_with = "crate::densities::ser_rat")]
    pub via_formula: BigRational,
}

/// `α′(1_n, T)/α(1_n, 1_n)` for `T ≅ diag(1_{n−2}, p^a, p^b)`, two ways.
pub fn derivative_ratio(p: u64, n: u32, a: u32, b: u32) -> Result<DerivativeRatio> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} < 2")));
    }
    let binary = alpha_derivative_binary(p, a, b)?;
    let via_reduction = alpha_unimodular_corank2(p, n) * &binary.alpha_prime
        / shimura_poly(p, n).eval(&BigRational::one());
    let via_formula = normalized_derivative_formula(p, a, b);
    if via_reduction != via_formula {
        return Err(Error::Consistency(format!(
            "reduction route {via_reduction} ≠ formula {via_formula} at n = {n}, (a, b) = ({a}, {b})"
        )));
    }
    Ok(DerivativeRatio {
        n,
        a: binary.a,
        b: binary.b,
        via_reduction,
        via_formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shimura_small() {
        let f1 = shimura_poly(3, 1);
        assert_eq!(f1, RationalPoly::linear(rat_int(1), rat(1, 3)));
        let f2 = shimura_poly(3, 2);
        assert_eq!(f2.eval(&BigRational::one()), rat(32, 27));
        assert_eq!(f1.eval(&density_node(3, 2)), rat(28, 27));
    }

    #[test]
    fn nagaoka_base_cases() {
        for p in [3, 5, 7] {
            assert_eq!(nagaoka_poly(p, 0, 0), shimura_poly(p, 2));
            assert!(nagaoka_poly(p, 0, 1).eval(&BigRational::one()).is_zero());
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            alpha_derivative_binary(3, 0, 1).unwrap().normalized_formula,
            rat_int(1)
        );
        assert_eq!(
            alpha_derivative_binary(3, 1, 2).unwrap().normalized_formula,
            rat_int(5)
        );
        assert!(matches!(
            alpha_derivative_binary(3, 1, 1),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(
            derivative_ratio(3, 2, 0, 1).unwrap().via_formula,
            rat_int(1)
        );
        assert_eq!(
            derivative_ratio(3, 3, 1, 2).unwrap().via_formula,
            rat_int(5)
        );
        assert_eq!(
            derivative_ratio(3, 4, 0, 3).unwrap().via_formula,
            rat_int(2)
        );
    }

    #[test]
    fn corank2_value_matches_shimura_at_node() {
        for p in [3, 5] {
            for n in 2..7 {
                let via_poly = shimura_poly(p, n - 2).eval(&density_node(p, 2));
                assert_eq!(alpha_unimodular_corank2(p, n), via_poly);
            }
        }
    }
}
