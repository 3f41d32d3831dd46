use crate::error::{Error, Result};

/// Largest modulus `p^N` we allow; keeps every product inside `u128`.
const MAX_MODULUS: u64 = 1 << 62;

/// The odd prime `p`, the nonresidue `ε` with `δ² = ε`, and the working
/// precision `N`. All `O_k` arithmetic happens modulo `p^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    epsilon: u64,
    precision: u32,
    modulus: u64,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Euler's criterion: is `a` a quadratic nonresidue modulo the odd prime `p`?
pub fn is_nonresidue(a: u64, p: u64) -> bool {
    !a.is_multiple_of(p) && pow_mod(a, (p - 1) / 2, p) == p - 1
}

/// Least positive quadratic nonresidue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| is_nonresidue(a, p))
        .expect("odd prime has a nonresidue")
}

impl PrimeContext {
    /// Context with the least positive nonresidue as `ε`.
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!(
                "p = {p} must be an odd prime"
            )));
        }
        Self::with_epsilon(p, least_nonresidue(p), precision)
    }

    pub fn with_epsilon(p: u64, epsilon: u64, precision: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!(
                "p = {p} must be an odd prime"
            )));
        }
        if precision == 0 {
            return Err(Error::InvalidContext("precision must be at least 1".into()));
        }
        if !is_nonresidue(epsilon, p) {
            return Err(Error::InvalidContext(format!(
                "epsilon = {epsilon} is not a quadratic nonresidue mod {p}"
            )));
        }
        let mut modulus: u64 = 1;
        for _ in 0..precision {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or_else(|| {
                    Error::InvalidContext(format!("p^N = {p}^{precision} exceeds 2^62"))
                })?;
        }
        Ok(PrimeContext {
            p,
            epsilon: epsilon % modulus,
            precision,
            modulus,
        })
    }

    /// Same prime and `ε`, different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::with_epsilon(self.p, self.epsilon, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn epsilon(&self) -> u64 {
        self.epsilon
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^e` as a plain integer; `e` must not exceed the precision.
    pub fn p_pow(&self, e: u32) -> u64 {
        debug_assert!(e <= self.precision);
        self.p.pow(e)
    }

    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.modulus as u128 - b as u128) % self.modulus as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.modulus as u128) as u64
    }

    /// p-adic valuation of a residue; `None` when it vanishes mod `p^N`.
    pub fn valuation(&self, a: u64) -> Option<u32> {
        let mut a = a % self.modulus;
        if a == 0 {
            return None;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        Some(v)
    }

    /// Inverse of a `p`-adic unit modulo `p^N`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        let (mut old_r, mut r) = (a as i128 % self.modulus as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Some(self.reduce_i128(old_s))
    }

    /// Square root in `Z/p^N` of a unit square, lifted from a root mod `p`.
    pub fn sqrt_unit(&self, a: u64) -> Option<u64> {
        let p = self.p;
        let a = a % self.modulus;
        if a.is_multiple_of(p) || is_nonresidue(a % p, p) {
            return None;
        }
        let mut x = (1..p).find(|&x| x * x % p == a % p)?;
        // Newton: x <- x - (x^2 - a) / (2x); doubles correct digits each step.
        let mut digits = 1;
        while digits < self.precision {
            let fx = self.sub(self.mul(x, x), a);
            let two_x_inv = self.inv(self.mul(2, x))?;
            x = self.sub(x, self.mul(fx, two_x_inv));
            digits *= 2;
        }
        debug_assert_eq!(self.mul(x, x), a);
        Some(x)
    }

    /// Solve `x² − ε y² ≡ c (mod p)` for a nonzero `c`.
    pub(crate) fn norm_preimage_mod_p(&self, c: u64) -> (u64, u64) {
        let p = self.p;
        let e = self.epsilon % p;
        let c = c % p;
        for y in 0..p {
            let rhs = (c + e * (y * y % p)) % p;
            if rhs == 0 {
                return (0, y);
            }
            if !is_nonresidue(rhs, p) {
                let x = (1..p).find(|&x| x * x % p == rhs).unwrap();
                return (x, y);
            }
        }
        unreachable!("norm map F_{{p^2}} -> F_p is surjective")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_two_and_composites() {
        assert!(PrimeContext::new(2, 4).is_err());
        assert!(PrimeContext::new(9, 4).is_err());
        assert!(PrimeContext::new(3, 0).is_err());
        assert!(PrimeContext::with_epsilon(5, 4, 3).is_err());
    }

    #[test]
    fn least_nonresidues() {
        assert_eq!(least_nonresidue(3), 2);
        assert_eq!(least_nonresidue(5), 2);
        assert_eq!(least_nonresidue(7), 3);
        assert_eq!(least_nonresidue(17), 3);
    }

    #[test]
    fn modulus_bound() {
        assert!(PrimeContext::new(3, 39).is_ok());
        assert!(PrimeContext::new(3, 40).is_err());
    }

    #[test]
    fn unit_inverse_and_sqrt() {
        let ctx = PrimeContext::new(5, 6).unwrap();
        for a in [1u64, 2, 3, 7, 12, 15621] {
            let i = ctx.inv(a).unwrap();
            assert_eq!(ctx.mul(a, i), 1);
        }
        assert!(ctx.inv(10).is_none());
        let r = ctx.sqrt_unit(ctx.mul(7, 7)).unwrap();
        assert_eq!(ctx.mul(r, r), 49);
        assert!(ctx.sqrt_unit(2).is_none());
    }

    #[test]
    fn valuations() {
        let ctx = PrimeContext::new(3, 4).unwrap();
        assert_eq!(ctx.valuation(0), None);
        assert_eq!(ctx.valuation(81), None);
        assert_eq!(ctx.valuation(27), Some(3));
        assert_eq!(ctx.valuation(5), Some(0));
    }
}
