//! 2×2 matrices over `Q[t]/t^{t_max}` with exact rational coefficients.

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::rat_p_valuation;

/// A power series in `t` known modulo `t^{t_max}`.
///
/// `dropped` records whether a product or Frobenius twist produced terms of
/// degree `≥ t_max` that were discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
    dropped: bool,
}

impl TruncatedSeries {
    pub fn zero(t_max: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![BigRational::zero(); t_max],
            dropped: false,
        }
    }

    pub fn constant(c: BigRational, t_max: usize) -> Self {
        Self::monomial(c, 0, t_max)
    }

    pub fn monomial(c: BigRational, deg: usize, t_max: usize) -> Self {
        let mut s = Self::zero(t_max);
        if deg < t_max {
            s.coeffs[deg] = c;
        } else if !c.is_zero() {
            s.dropped = true;
        }
        s
    }

    pub fn t_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, d: usize) -> &BigRational {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn dropped(&self) -> bool {
        self.dropped
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            dropped: self.dropped || other.dropped,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.t_max();
        let mut out = Self::zero(n);
        out.dropped = self.dropped || other.dropped;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if i + j < n {
                    out.coeffs[i + j] += a * b;
                } else {
                    out.dropped = true;
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            dropped: self.dropped,
        }
    }

    /// `t ↦ t^p`; coefficients are fixed.
    pub fn frobenius_twist(&self, p: usize) -> Self {
        let n = self.t_max();
        let mut out = Self::zero(n);
        out.dropped = self.dropped;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i * p < n {
                out.coeffs[i * p] = c.clone();
            } else {
                out.dropped = true;
            }
        }
        out
    }

    /// Smallest degree whose coefficient has negative `p`-valuation.
    pub fn first_nonintegral_degree(&self, p: u64) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| rat_p_valuation(c, p).is_some_and(|v| v < 0))
    }
}

/// `[[a, b], [c, d]]` with series entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeriesMatrix {
    pub entries: [[TruncatedSeries; 2]; 2],
}

impl TruncatedSeriesMatrix {
    pub fn new(
        a: TruncatedSeries,
        b: TruncatedSeries,
        c: TruncatedSeries,
        d: TruncatedSeries,
    ) -> Self {
        TruncatedSeriesMatrix {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn zero(t_max: usize) -> Self {
        let z = TruncatedSeries::zero(t_max);
        Self::new(z.clone(), z.clone(), z.clone(), z)
    }

    pub fn t_max(&self) -> usize {
        self.entries[0][0].t_max()
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i][j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let e = |i: usize, j: usize| {
            self.entries[i][0]
                .mul(&other.entries[0][j])
                .add(&self.entries[i][1].mul(&other.entries[1][j]))
        };
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn frobenius_twist(&self, p: usize) -> Self {
        let f = |i: usize, j: usize| self.entries[i][j].frobenius_twist(p);
        Self::new(f(0, 0), f(0, 1), f(1, 0), f(1, 1))
    }

    pub fn dropped(&self) -> bool {
        self.entries.iter().flatten().any(|s| s.dropped())
    }

    pub fn first_nonintegral_degree(&self, p: u64) -> Option<usize> {
        self.entries
            .iter()
            .flatten()
            .filter_map(|s| s.first_nonintegral_degree(p))
            .min()
    }

    /// Minimal `p`-valuation over all coefficients (`None` if all vanish).
    pub fn min_p_valuation(&self, p: u64) -> Option<i64> {
        self.entries
            .iter()
            .flatten()
            .flat_map(|s| s.coeffs().iter())
            .filter_map(|c| rat_p_valuation(c, p))
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::poly::{rat, rat_int};

    #[test]
    fn twist_and_truncation() {
        // 1 + 2t + t^3 mod t^8, twisted by p = 3: 1 + 2t^3 + (t^9 dropped)
        let mut s = TruncatedSeries::zero(8);
        s.coeffs[0] = rat_int(1);
        s.coeffs[1] = rat_int(2);
        s.coeffs[3] = rat_int(1);
        let tw = s.frobenius_twist(3);
        assert_eq!(tw.coeff(3), &rat_int(2));
        assert_eq!(tw.coeff(0), &rat_int(1));
        assert!(tw.dropped());
        assert!(!s.dropped());
    }

    #[test]
    fn nonintegral_degree() {
        let mut s = TruncatedSeries::zero(5);
        s.coeffs[1] = rat(2, 1);
        s.coeffs[3] = rat(1, 3);
        s.coeffs[4] = rat(1, 9);
        assert_eq!(s.first_nonintegral_degree(3), Some(3));
        assert_eq!(s.first_nonintegral_degree(5), None);
    }
}
