use serde::Serialize;

use super::jordan::jordan_decompose;
use super::profile::JordanProfile;
use crate::error::{Error, Result};
use crate::padic::HermMatrix;

/// `p^offset · matrix`, carrying negative powers of `p` without denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledHerm {
    pub offset: i64,
    pub matrix: HermMatrix,
}

impl ScaledHerm {
    pub fn new(offset: i64, matrix: HermMatrix) -> Self {
        ScaledHerm { offset, matrix }
    }

    pub fn integral(matrix: HermMatrix) -> Self {
        ScaledHerm { offset: 0, matrix }
    }

    /// `diag(p^{e_1}, …)` for signed exponents.
    pub fn diagonal_powers(ctx: crate::padic::PrimeContext, exps: &[i64]) -> Self {
        let offset = exps.iter().copied().min().unwrap_or(0);
        let shifted: Vec<u32> = exps.iter().map(|&e| (e - offset) as u32).collect();
        ScaledHerm {
            offset,
            matrix: HermMatrix::diagonal_powers(ctx, &shifted),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Jordan profile of the scaled form.
    pub fn profile(&self) -> Result<JordanProfile> {
        Ok(jordan_decompose(&self.matrix)?.profile.shifted(self.offset))
    }

    /// Every entry lies in `O_k`.
    pub fn is_integral(&self) -> bool {
        match self.matrix.as_matrix().min_valuation().finite() {
            Some(v) => self.offset + v as i64 >= 0,
            None => true,
        }
    }

    pub fn scaled_by(&self, k: i64) -> Self {
        ScaledHerm {
            offset: self.offset + k,
            matrix: self.matrix.clone(),
        }
    }

    /// The matrix over `O_k`, if integral.
    pub fn to_integral(&self) -> Option<HermMatrix> {
        if !self.is_integral() {
            return None;
        }
        if self.offset >= 0 {
            return Some(self.matrix.scale_p_pow(self.offset as u32));
        }
        let k = (-self.offset) as u32;
        let ctx = self.matrix.ctx();
        let mut m = self.matrix.as_matrix().clone();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m.set(i, j, m.get(i, j).div_p_pow(k).ok()?);
            }
        }
        // Division loses k digits of precision.
        let reduced_ctx = ctx
            .with_precision(ctx.precision().checked_sub(k)?.max(1))
            .ok()?;
        HermMatrix::new(m).ok()?.reduce_to(reduced_ctx).ok()
    }
}

/// Why a scaled datum is known to give an empty cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyReason {
    NonIntegral,
    OddSizeOddLevel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCycleDatum {
    pub i: i64,
    pub j: i64,
    pub t: ScaledHerm,
    /// `p^{2i−j}·T`.
    pub t_tilde: ScaledHerm,
    pub empty: Option<EmptyReason>,
}

/// Attach `T̃ = p^{2i−j}T` to the level pair `(i, j)` and flag the cases
/// where the cycle is empty for elementary reasons.
pub fn scaled_fundamental(i: i64, j: i64, t: &ScaledHerm) -> Result<ScaledCycleDatum> {
    if t.matrix.determinant().valuation().finite().is_none() {
        return Err(Error::Singular);
    }
    let t_tilde = t.scaled_by(2 * i - j);
    let empty = if t.n() % 2 == 1 && j.rem_euclid(2) == 1 {
        Some(EmptyReason::OddSizeOddLevel)
    } else if !t_tilde.is_integral() {
        Some(EmptyReason::NonIntegral)
    } else {
        None
    };
    Ok(ScaledCycleDatum {
        i,
        j,
        t: t.clone(),
        t_tilde,
        empty,
    })
}
