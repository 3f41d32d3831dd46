use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent multiplicities `n_i` of a Jordan decomposition
/// `1_{n_0} ⊕ p·1_{n_1} ⊕ … ⊕ p^k·1_{n_k}`.
///
/// Exponents are signed so that non-integral scaled matrices have a profile
/// too; every derived invariant below assumes an integral profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JordanProfile {
    multiplicities: BTreeMap<i64, usize>,
}

impl JordanProfile {
    pub fn from_exponents(exps: &[i64]) -> Self {
        let mut multiplicities = BTreeMap::new();
        for &e in exps {
            *multiplicities.entry(e).or_insert(0) += 1;
        }
        JordanProfile { multiplicities }
    }

    pub fn from_multiplicities(pairs: &[(i64, usize)]) -> Self {
        let mut multiplicities = BTreeMap::new();
        for &(e, c) in pairs {
            if c > 0 {
                *multiplicities.entry(e).or_insert(0) += c;
            }
        }
        JordanProfile { multiplicities }
    }

    pub fn multiplicities(&self) -> &BTreeMap<i64, usize> {
        &self.multiplicities
    }

    pub fn count(&self, e: i64) -> usize {
        self.multiplicities.get(&e).copied().unwrap_or(0)
    }

    /// Sorted exponent list with multiplicity.
    pub fn exponents(&self) -> Vec<i64> {
        self.multiplicities
            .iter()
            .flat_map(|(&e, &c)| std::iter::repeat_n(e, c))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.multiplicities.values().sum()
    }

    pub fn is_integral(&self) -> bool {
        self.multiplicities.keys().all(|&e| e >= 0)
    }

    /// `m = Σ_{i≥1} n_i`, the corank of the reduction mod `p`.
    pub fn m(&self) -> usize {
        self.multiplicities.range(1..).map(|(_, &c)| c).sum()
    }

    /// Largest odd integer `≤ m`; `None` when `m = 0`.
    pub fn t0(&self) -> Option<usize> {
        let m = self.m();
        if m == 0 {
            None
        } else if m % 2 == 1 {
            Some(m)
        } else {
            Some(m - 1)
        }
    }

    /// `Σ n_i` over even `i ≥ 2`.
    pub fn n_plus_even(&self) -> usize {
        self.multiplicities
            .range(2..)
            .filter(|(e, _)| *e % 2 == 0)
            .map(|(_, &c)| c)
            .sum()
    }

    /// `Σ n_i` over odd `i ≥ 3`.
    pub fn n_plus_odd(&self) -> usize {
        self.multiplicities
            .range(3..)
            .filter(|(e, _)| *e % 2 == 1)
            .map(|(_, &c)| c)
            .sum()
    }

    /// `Σ i·n_i = ord det`.
    pub fn det_valuation(&self) -> i64 {
        self.multiplicities
            .iter()
            .map(|(&e, &c)| e * c as i64)
            .sum()
    }

    /// Shift every exponent by `k` (multiplying the matrix by `p^k`).
    pub fn shifted(&self, k: i64) -> Self {
        JordanProfile {
            multiplicities: self
                .multiplicities
                .iter()
                .map(|(&e, &c)| (e + k, c))
                .collect(),
        }
    }

    /// Parse `0,2,3` or `0:1,2:2` style exponent lists.
    pub fn parse(s: &str) -> Result<Self> {
        let mut exps = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some((e, c)) = tok.split_once(':') {
                let e: i64 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {tok:?}")))?;
                let c: usize = c
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad count {tok:?}")))?;
                exps.extend(std::iter::repeat_n(e, c));
            } else {
                exps.push(
                    tok.parse()
                        .map_err(|_| Error::Parse(format!("bad exponent {tok:?}")))?,
                );
            }
        }
        if exps.is_empty() {
            return Err(Error::Parse("empty exponent list".into()));
        }
        Ok(Self::from_exponents(&exps))
    }
}

/// Discrete invariants of the reduced locus attached to an integral profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometricInvariants {
    pub m: usize,
    pub t0: Option<usize>,
    /// `(t0 − 1)/2`.
    pub dim_red: Option<usize>,
    pub irreducible: bool,
    pub is_point: bool,
    /// `ord det` odd; when false the profile cannot come from a nonempty
    /// cycle, but the invariants are still reported.
    pub parity_ok: bool,
}

pub fn geometric_invariants(profile: &JordanProfile) -> GeometricInvariants {
    let t0 = profile.t0();
    GeometricInvariants {
        m: profile.m(),
        t0,
        dim_red: t0.map(|t| (t - 1) / 2),
        irreducible: profile.n_plus_even().max(profile.n_plus_odd()) <= 1,
        is_point: profile.m() <= 2,
        parity_ok: profile.det_valuation().rem_euclid(2) == 1,
    }
}

/// Relabel the non-unit pair of `diag(1_{n−2}, p^x, p^y)` as `(a, b)` with
/// `a` even and `b` odd; the pair is not ordered by size.
pub fn reduce_to_binary(profile: &JordanProfile) -> Result<(u32, u32)> {
    let exps = profile.exponents();
    let n = exps.len();
    if n < 2 || !profile.is_integral() {
        return Err(Error::Shape(format!(
            "need an integral profile of size ≥ 2, got {exps:?}"
        )));
    }
    if exps[..n - 2].iter().any(|&e| e != 0) {
        return Err(Error::Shape(format!(
            "profile {exps:?} is not of the form diag(1_(n-2), p^a, p^b)"
        )));
    }
    let (x, y) = (exps[n - 2] as u32, exps[n - 1] as u32);
    if (x + y) % 2 == 0 {
        return Err(Error::Parity(format!("exponents ({x}, {y}) have even sum")));
    }
    Ok(if x % 2 == 0 { (x, y) } else { (y, x) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = JordanProfile::from_exponents(&[0, 1]);
        assert_eq!((p.m(), p.t0()), (1, Some(1)));
        let p = JordanProfile::from_exponents(&[0, 0, 3, 4]);
        assert_eq!((p.m(), p.t0()), (2, Some(1)));
        let p = JordanProfile::from_exponents(&[0, 1, 2, 2, 3, 5]);
        assert_eq!(p.m(), 5);
        assert_eq!(p.t0(), Some(5));
        assert_eq!(p.n_plus_even(), 2);
        assert_eq!(p.n_plus_odd(), 2);
        assert_eq!(p.det_valuation(), 13);
        assert_eq!(JordanProfile::from_exponents(&[0, 0]).t0(), None);
    }

    #[test]
    fn point_and_irreducibility() {
        let g = geometric_invariants(&JordanProfile::from_exponents(&[0, 0, 2, 5]));
        assert!(g.is_point && g.parity_ok);
        assert_eq!(g.dim_red, Some(0));
        let g = geometric_invariants(&JordanProfile::from_exponents(&[0, 1, 1]));
        assert!(g.irreducible);
        assert_eq!((g.t0, g.dim_red), (Some(1), Some(0)));
        let g = geometric_invariants(&JordanProfile::from_exponents(&[2, 2]));
        assert!(!g.irreducible);
    }

    #[test]
    fn binary_relabeling() {
        let r = |e: &[i64]| reduce_to_binary(&JordanProfile::from_exponents(e));
        assert_eq!(r(&[0, 0, 1]).unwrap(), (0, 1));
        assert_eq!(r(&[1, 2]).unwrap(), (2, 1));
        assert_eq!(r(&[0, 2, 5]).unwrap(), (2, 5));
        assert!(matches!(r(&[1, 1, 2]), Err(Error::Shape(_))));
        assert!(matches!(r(&[0, 1, 3]), Err(Error::Parity(_))));
    }

    #[test]
    fn parsing() {
        assert_eq!(
            JordanProfile::parse("0,2,3").unwrap().exponents(),
            vec![0, 2, 3]
        );
        assert_eq!(
            JordanProfile::parse("0:1, 2:2").unwrap().exponents(),
            vec![0, 2, 2]
        );
        assert!(JordanProfile::parse("").is_err());
        assert!(JordanProfile::parse("x").is_err());
    }
}
