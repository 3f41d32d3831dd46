//! The finite module `D(L) = pL^∨/L` and the poset
//! `GrD = {B : pB ⊆ B^⊥ ⊆ B}` that parametrizes vertex lattices containing `L`.

mod grd;
mod module;

pub use grd::{enumerate_grd, grd_dot, verify_stratum_theorems, GrDEntry, StratumReport};
pub use module::{FiniteHermModule, StrataBudget, Submodule};

use crate::hermitian::JordanProfile;

/// All profiles (as sorted exponent lists) with `n ≤ max_n`, exponents
/// `≤ max_exp` and `Σ a_i ≤ max_sum`.
pub fn profile_grid(max_n: usize, max_exp: u32, max_sum: u32) -> Vec<JordanProfile> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        n_left: usize,
        min_e: u32,
        max_exp: u32,
        sum_left: u32,
        cur: &mut Vec<i64>,
        out: &mut Vec<JordanProfile>,
    ) {
        if !cur.is_empty() {
            out.push(JordanProfile::from_exponents(cur));
        }
        if n_left == 0 {
            return;
        }
        for e in min_e..=max_exp {
            if e > sum_left {
                break;
            }
            cur.push(e as i64);
            rec(n_left - 1, e, max_exp, sum_left - e, cur, out);
            cur.pop();
        }
    }
    rec(max_n, 0, max_exp, max_sum, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let g = profile_grid(2, 1, 5);
        let e: Vec<_> = g.iter().map(|p| p.exponents()).collect();
        assert_eq!(
            e,
            vec![vec![0], vec![0, 0], vec![0, 1], vec![1], vec![1, 1]]
        );
    }
}
