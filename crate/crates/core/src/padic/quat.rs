use std::ops::Mul;

use super::context::PrimeContext;
use super::ok::{OkElement, Valuation};
use crate::error::Result;

/// An element `α + β·Π` of the maximal order `O_D`, where `Π² = p` and
/// `Π·γ = σ(γ)·Π` for `γ ∈ O_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuatElement {
    pub alpha: OkElement,
    pub beta: OkElement,
}

impl QuatElement {
    pub fn new(alpha: OkElement, beta: OkElement) -> Self {
        assert_eq!(alpha.ctx(), beta.ctx(), "context mismatch");
        QuatElement { alpha, beta }
    }

    pub fn ctx(&self) -> PrimeContext {
        self.alpha.ctx()
    }

    pub fn from_ok(alpha: OkElement) -> Self {
        QuatElement {
            alpha,
            beta: OkElement::zero(alpha.ctx()),
        }
    }

    pub fn pi(ctx: PrimeContext) -> Self {
        QuatElement {
            alpha: OkElement::zero(ctx),
            beta: OkElement::one(ctx),
        }
    }

    /// `Π^e` as an element of `O_D`.
    pub fn pi_pow(ctx: PrimeContext, e: u32) -> Self {
        let half = OkElement::p_pow(ctx, e / 2);
        if e.is_multiple_of(2) {
            Self::from_ok(half)
        } else {
            QuatElement {
                alpha: OkElement::zero(ctx),
                beta: half,
            }
        }
    }

    /// `(α₁+β₁Π)(α₂+β₂Π) = (α₁α₂ + p·β₁σ(β₂)) + (α₁β₂ + β₁σ(α₂))Π`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let ctx = self.ctx();
        let p = OkElement::from_int(ctx, ctx.p() as i128);
        let alpha = self
            .alpha
            .checked_mul(&other.alpha)?
            .checked_add(&p.checked_mul(&self.beta.checked_mul(&other.beta.conj())?)?)?;
        let beta = self
            .alpha
            .checked_mul(&other.beta)?
            .checked_add(&self.beta.checked_mul(&other.alpha.conj())?)?;
        Ok(QuatElement { alpha, beta })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(QuatElement {
            alpha: self.alpha.checked_add(&other.alpha)?,
            beta: self.beta.checked_add(&other.beta)?,
        })
    }

    /// `v_D(α + βΠ) = min(2 v(α), 2 v(β) + 1)`; `AtLeast` when both parts
    /// are below precision, with the bound converted to `Π`-adic units.
    pub fn valuation(&self) -> Valuation {
        let n = self.ctx().precision();
        match (self.alpha.valuation(), self.beta.valuation()) {
            (Valuation::AtLeast(_), Valuation::AtLeast(_)) => Valuation::AtLeast(2 * n),
            (Valuation::Finite(a), Valuation::AtLeast(_)) => {
                if 2 * a < 2 * n + 1 {
                    Valuation::Finite(2 * a)
                } else {
                    Valuation::AtLeast(2 * n)
                }
            }
            (Valuation::AtLeast(_), Valuation::Finite(b)) => {
                if 2 * b < 2 * n {
                    Valuation::Finite(2 * b + 1)
                } else {
                    Valuation::AtLeast(2 * n)
                }
            }
            (Valuation::Finite(a), Valuation::Finite(b)) => {
                Valuation::Finite((2 * a).min(2 * b + 1))
            }
        }
    }
}

impl Mul for QuatElement {
    type Output = QuatElement;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("context mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_relations() {
        let c = PrimeContext::new(3, 4).unwrap();
        let pi = QuatElement::pi(c);
        assert_eq!(pi * pi, QuatElement::from_ok(OkElement::from_int(c, 3)));
        let d = QuatElement::from_ok(OkElement::delta(c));
        let lhs = pi * d;
        let rhs = QuatElement::from_ok(-OkElement::delta(c)) * pi;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn valuation_of_central_powers() {
        let c = PrimeContext::new(5, 6).unwrap();
        for r in 0..6 {
            let x = QuatElement::from_ok(OkElement::p_pow(c, r));
            assert_eq!(x.valuation(), Valuation::Finite(2 * r));
        }
        for e in 0..11 {
            assert_eq!(QuatElement::pi_pow(c, e).valuation(), Valuation::Finite(e));
        }
    }
}
