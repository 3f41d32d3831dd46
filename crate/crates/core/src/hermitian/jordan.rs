use super::profile::JordanProfile;
use crate::error::{Error, Result};
use crate::padic::{norm_preimage, HermMatrix, OkElement, OkMatrix, Valuation};

/// Output of [`jordan_decompose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanDecomposition {
    pub profile: JordanProfile,
    /// Exponents in pivot order (nondecreasing).
    pub exponents: Vec<u32>,
    /// `U` with `ᵗU·T·σ(U) = diag(p^{exponents})`. Not canonical.
    pub change_of_basis: OkMatrix,
}

/// Working state: the Gram matrix in the current basis and the basis itself
/// (as columns of `u`).
struct Reducer {
    gram: OkMatrix,
    u: OkMatrix,
}

impl Reducer {
    fn swap(&mut self, i: usize, j: usize) {
        self.gram.swap_symmetric(i, j);
        self.u.swap_cols(i, j);
    }

    /// Basis change `e_t ← e_t + c·e_s`.
    fn add_multiple(&mut self, t: usize, s: usize, c: OkElement) {
        let g = &mut self.gram;
        let n = g.rows();
        for j in 0..n {
            let v = g.get(t, j) + c * g.get(s, j);
            g.set(t, j, v);
        }
        let cc = c.conj();
        for i in 0..n {
            let v = g.get(i, t) + g.get(i, s) * cc;
            g.set(i, t, v);
        }
        self.u.add_col_multiple(t, s, c);
    }

    /// Basis change `e_k ← λ·e_k`.
    fn scale(&mut self, k: usize, lambda: OkElement) {
        let g = &mut self.gram;
        let n = g.rows();
        for j in 0..n {
            let v = lambda * g.get(k, j);
            g.set(k, j, v);
        }
        let lc = lambda.conj();
        for i in 0..n {
            let v = g.get(i, k) * lc;
            g.set(i, k, v);
        }
        self.u.scale_col(k, lambda);
    }
}

/// Diagonalize `T` to `diag(p^{a_1}, …, p^{a_n})` by a change of basis over
/// `O_k`, working modulo `p^N` of `T`'s context.
pub fn jordan_decompose(t: &HermMatrix) -> Result<JordanDecomposition> {
    let ctx = t.ctx();
    let n = t.n();
    if t.determinant().valuation().finite().is_none() {
        return Err(Error::Singular);
    }
    let mut r = Reducer {
        gram: t.as_matrix().clone(),
        u: OkMatrix::identity(ctx, n),
    };
    let mut exponents = Vec::with_capacity(n);

    for k in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if let Valuation::Finite(v) = r.gram.get(i, j).valuation() {
                    // Prefer diagonal entries at equal valuation.
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, i, j) = best.ok_or(Error::PrecisionExhausted {
            needed: ctx.precision() + 1,
            available: ctx.precision(),
        })?;
        if i != j {
            // The diagonal gains h(e_i,e_j)-trace terms of valuation exactly v
            // for one of u = 1, δ.
            let mut fixed = false;
            for u in [OkElement::one(ctx), OkElement::delta(ctx)] {
                let new_diag = r.gram.get(i, i)
                    + u * r.gram.get(j, i)
                    + u.conj() * r.gram.get(i, j)
                    + OkElement::from_residues(ctx, u.norm(), 0) * r.gram.get(j, j);
                if new_diag.valuation() == Valuation::Finite(v) {
                    r.add_multiple(i, j, u);
                    fixed = true;
                    break;
                }
            }
            if !fixed {
                return Err(Error::Consistency(
                    "no unit makes the diagonal pivot minimal".into(),
                ));
            }
        }
        r.swap(k, i);

        let pivot = r.gram.get(k, k);
        debug_assert!(pivot.is_rational());
        let w = pivot.div_p_pow(v)?;
        let w_inv = w
            .inv()
            .ok_or_else(|| Error::Consistency("pivot unit is not invertible".into()))?;
        for row in k + 1..n {
            let c = -(r.gram.get(row, k).div_p_pow(v)? * w_inv);
            r.add_multiple(row, k, c);
        }
        // norm(λ)·p^v·w = p^v with λ a norm preimage of w^{-1}.
        let lambda = norm_preimage(ctx, w_inv.a())?;
        r.scale(k, lambda);
        exponents.push(v);
    }

    let expected = HermMatrix::diagonal_powers(ctx, &exponents);
    if r.gram != *expected.as_matrix() {
        return Err(Error::Consistency(
            "diagonalization did not reach diag(p^a_i)".into(),
        ));
    }
    let profile =
        JordanProfile::from_exponents(&exponents.iter().map(|&e| e as i64).collect::<Vec<_>>());
    Ok(JordanDecomposition {
        profile,
        exponents,
        change_of_basis: r.u,
    })
}
