use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::context::PrimeContext;
use crate::error::{Error, Result};

/// Valuation of a truncated quantity: exact, or only known to be `≥ N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Finite value or a precision error.
    pub fn require(self) -> Result<u32> {
        match self {
            Valuation::Finite(v) => Ok(v),
            Valuation::AtLeast(n) => Err(Error::PrecisionExhausted {
                needed: n + 1,
                available: n,
            }),
        }
    }
}

/// An element `a + b·δ` of `O_k/p^N` with `δ² = ε`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OkElement {
    ctx: PrimeContext,
    a: u64,
    b: u64,
}

impl fmt::Debug for OkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}+{}δ (mod {}^{})",
            self.a,
            self.b,
            self.ctx.p(),
            self.ctx.precision()
        )
    }
}

/// Wire form `{"a": int, "b": int}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OkJson {
    pub a: i64,
    pub b: i64,
}

impl OkElement {
    pub fn new(ctx: PrimeContext, a: i128, b: i128) -> Self {
        OkElement {
            ctx,
            a: ctx.reduce_i128(a),
            b: ctx.reduce_i128(b),
        }
    }

    pub fn from_residues(ctx: PrimeContext, a: u64, b: u64) -> Self {
        OkElement {
            ctx,
            a: a % ctx.modulus(),
            b: b % ctx.modulus(),
        }
    }

    pub fn zero(ctx: PrimeContext) -> Self {
        Self::from_residues(ctx, 0, 0)
    }

    pub fn one(ctx: PrimeContext) -> Self {
        Self::from_residues(ctx, 1, 0)
    }

    pub fn delta(ctx: PrimeContext) -> Self {
        Self::from_residues(ctx, 0, 1)
    }

    pub fn from_int(ctx: PrimeContext, a: i128) -> Self {
        Self::new(ctx, a, 0)
    }

    /// `p^e`, or zero when `e ≥ N`.
    pub fn p_pow(ctx: PrimeContext, e: u32) -> Self {
        if e >= ctx.precision() {
            Self::zero(ctx)
        } else {
            Self::from_residues(ctx, ctx.p_pow(e), 0)
        }
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// Symmetric representative in `(−p^N/2, p^N/2]`, used for JSON output.
    fn signed(&self, x: u64) -> i64 {
        let m = self.ctx.modulus();
        if x > m / 2 {
            x as i64 - m as i64
        } else {
            x as i64
        }
    }

    pub fn to_json(&self) -> OkJson {
        OkJson {
            a: self.signed(self.a),
            b: self.signed(self.b),
        }
    }

    pub fn from_json(ctx: PrimeContext, j: OkJson) -> Self {
        Self::new(ctx, j.a as i128, j.b as i128)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Galois conjugate `a − bδ`.
    pub fn conj(&self) -> Self {
        OkElement {
            ctx: self.ctx,
            a: self.a,
            b: self.ctx.neg(self.b),
        }
    }

    /// `a² − ε b²`.
    pub fn norm(&self) -> u64 {
        let c = &self.ctx;
        c.sub(
            c.mul(self.a, self.a),
            c.mul(c.epsilon(), c.mul(self.b, self.b)),
        )
    }

    /// `2a`.
    pub fn trace(&self) -> u64 {
        self.ctx.add(self.a, self.a)
    }

    pub fn valuation(&self) -> Valuation {
        match (self.ctx.valuation(self.a), self.ctx.valuation(self.b)) {
            (None, None) => Valuation::AtLeast(self.ctx.precision()),
            (Some(x), None) | (None, Some(x)) => Valuation::Finite(x),
            (Some(x), Some(y)) => Valuation::Finite(x.min(y)),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    /// Lies in `Z_p` (b-part zero).
    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = &self.ctx;
        Ok(OkElement {
            ctx: *c,
            a: c.add(self.a, other.a),
            b: c.add(self.b, other.b),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = &self.ctx;
        Ok(OkElement {
            ctx: *c,
            a: c.sub(self.a, other.a),
            b: c.sub(self.b, other.b),
        })
    }

    /// `(a₁+b₁δ)(a₂+b₂δ) = (a₁a₂ + ε b₁b₂) + (a₁b₂ + a₂b₁)δ`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = &self.ctx;
        let a = c.add(
            c.mul(self.a, other.a),
            c.mul(c.epsilon(), c.mul(self.b, other.b)),
        );
        let b = c.add(c.mul(self.a, other.b), c.mul(other.a, self.b));
        Ok(OkElement { ctx: *c, a, b })
    }

    pub fn scale(&self, k: u64) -> Self {
        let c = &self.ctx;
        OkElement {
            ctx: *c,
            a: c.mul(self.a, k),
            b: c.mul(self.b, k),
        }
    }

    /// Inverse of a unit: `conj(x) / norm(x)`.
    pub fn inv(&self) -> Option<Self> {
        let n_inv = self.ctx.inv(self.norm())?;
        Some(self.conj().scale(n_inv))
    }

    /// `x / p^e` for `x` divisible by `p^e`. The quotient is only determined
    /// modulo `p^{N−e}`; the canonical lift in `[0, p^{N−e})` is returned.
    pub fn div_p_pow(&self, e: u32) -> Result<Self> {
        if e == 0 {
            return Ok(*self);
        }
        match self.valuation() {
            Valuation::Finite(v) if v < e => Err(Error::InvalidArgument(format!(
                "element of valuation {v} is not divisible by p^{e}"
            ))),
            _ => {
                let d = self.ctx.p_pow(e.min(self.ctx.precision()));
                Ok(OkElement {
                    ctx: self.ctx,
                    a: self.a / d,
                    b: self.b / d,
                })
            }
        }
    }

    /// Reduce into a context of lower or equal precision (same p, ε).
    pub fn reduce_to(&self, ctx: PrimeContext) -> Result<Self> {
        if ctx.p() != self.ctx.p()
            || ctx.epsilon() % ctx.modulus() != self.ctx.epsilon() % ctx.modulus()
        {
            return Err(Error::ContextMismatch);
        }
        if ctx.precision() > self.ctx.precision() {
            return Err(Error::PrecisionExhausted {
                needed: ctx.precision(),
                available: self.ctx.precision(),
            });
        }
        Ok(Self::from_residues(ctx, self.a, self.b))
    }
}

impl Add for OkElement {
    type Output = OkElement;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("context mismatch")
    }
}

impl Sub for OkElement {
    type Output = OkElement;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("context mismatch")
    }
}

impl Mul for OkElement {
    type Output = OkElement;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("context mismatch")
    }
}

impl Neg for OkElement {
    type Output = OkElement;
    fn neg(self) -> Self {
        OkElement {
            ctx: self.ctx,
            a: self.ctx.neg(self.a),
            b: self.ctx.neg(self.b),
        }
    }
}

/// A unit `λ ∈ O_k^×` with `norm(λ) = c` for a `p`-adic unit `c`.
///
/// Solves modulo `p` and corrects by a square root in `Z_p`, which exists
/// because `c / norm(λ₀) ≡ 1 (mod p)`.
pub fn norm_preimage(ctx: PrimeContext, c: u64) -> Result<OkElement> {
    if c.is_multiple_of(ctx.p()) {
        return Err(Error::InvalidArgument("norm preimage needs a unit".into()));
    }
    let (x, y) = ctx.norm_preimage_mod_p(c);
    let lambda0 = OkElement::from_residues(ctx, x, y);
    let ratio = ctx.mul(c, ctx.inv(lambda0.norm()).expect("unit norm"));
    let s = ctx
        .sqrt_unit(ratio)
        .expect("ratio is 1 mod p, hence a square");
    let lambda = lambda0.scale(s);
    debug_assert_eq!(lambda.norm(), c % ctx.modulus());
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PrimeContext {
        PrimeContext::new(p, n).unwrap()
    }

    #[test]
    fn identity_and_delta_square() {
        let c = ctx(3, 2);
        let x = OkElement::new(c, 4, 7);
        assert_eq!(OkElement::one(c) * x, x);
        let d = OkElement::delta(c);
        assert_eq!(d * d, OkElement::from_int(c, c.epsilon() as i128));
    }

    #[test]
    fn norm_of_one_plus_delta() {
        let c = ctx(3, 2);
        assert_eq!(c.epsilon(), 2);
        let x = OkElement::new(c, 1, 1);
        let y = OkElement::new(c, 1, -1);
        assert_eq!(x * y, OkElement::from_int(c, 8));
    }

    #[test]
    fn valuation_examples() {
        let c = ctx(3, 3);
        assert_eq!(OkElement::new(c, 3, 3).valuation(), Valuation::Finite(1));
        assert_eq!(OkElement::zero(c).valuation(), Valuation::AtLeast(3));
        assert_eq!(OkElement::new(c, 27, 0).valuation(), Valuation::AtLeast(3));
        assert_eq!(OkElement::new(c, 9, 3).valuation(), Valuation::Finite(1));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let x = OkElement::one(ctx(3, 2));
        let y = OkElement::one(ctx(3, 3));
        assert_eq!(x.checked_mul(&y), Err(Error::ContextMismatch));
    }

    #[test]
    fn inverse_and_division() {
        let c = ctx(5, 4);
        let x = OkElement::new(c, 3, 11);
        assert_eq!(x * x.inv().unwrap(), OkElement::one(c));
        assert!(OkElement::new(c, 5, 10).inv().is_none());
        let y = OkElement::new(c, 50, 25);
        assert_eq!(y.div_p_pow(2).unwrap(), OkElement::new(c, 2, 1));
        assert!(y.div_p_pow(3).is_err());
    }

    #[test]
    fn norm_preimages() {
        for p in [3u64, 5, 7, 11] {
            let c = ctx(p, 5);
            for target in 1..3 * p {
                if target % p == 0 {
                    continue;
                }
                let l = norm_preimage(c, target).unwrap();
                assert_eq!(l.norm(), target);
            }
        }
    }
}
