use serde::{Deserialize, Serialize};

use super::context::PrimeContext;
use super::ok::{OkElement, OkJson, Valuation};
use crate::error::{Error, Result};

/// Dense row-major matrix over `O_k/p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OkMatrix {
    ctx: PrimeContext,
    rows: usize,
    cols: usize,
    data: Vec<OkElement>,
}

impl OkMatrix {
    pub fn zeros(ctx: PrimeContext, rows: usize, cols: usize) -> Self {
        OkMatrix {
            ctx,
            rows,
            cols,
            data: vec![OkElement::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: PrimeContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, OkElement::one(ctx));
        }
        m
    }

    pub fn from_rows(ctx: PrimeContext, rows: Vec<Vec<OkElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data: Vec<OkElement> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| x.ctx() != ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(OkMatrix {
            ctx,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Diagonal matrix with entries in `Z`.
    pub fn diagonal(ctx: PrimeContext, diag: &[i128]) -> Self {
        let mut m = Self::zeros(ctx, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, OkElement::from_int(ctx, d));
        }
        m
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> OkElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: OkElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise Galois conjugate.
    pub fn conj(&self) -> Self {
        OkMatrix {
            ctx: self.ctx,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.conj()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = OkElement::zero(self.ctx);
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `ᵗU · self · σ(U)`, the hermitian change of basis by the columns of `U`.
    pub fn congruence(&self, u: &Self) -> Result<Self> {
        u.transpose().mul(self)?.mul(&u.conj())
    }

    /// Swap rows `i` and `j` and columns `i` and `j`.
    pub fn swap_symmetric(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// Column operation `col_j ← col_j + c·col_i`.
    pub fn add_col_multiple(&mut self, target: usize, source: usize, c: OkElement) {
        for r in 0..self.rows {
            let v = self.get(r, target) + self.get(r, source) * c;
            self.set(r, target, v);
        }
    }

    pub fn scale_col(&mut self, j: usize, c: OkElement) {
        for r in 0..self.rows {
            let v = self.get(r, j) * c;
            self.set(r, j, v);
        }
    }

    /// Minimal valuation over all entries.
    pub fn min_valuation(&self) -> Valuation {
        self.data
            .iter()
            .map(|x| x.valuation())
            .min()
            .unwrap_or(Valuation::AtLeast(self.ctx.precision()))
    }

    pub fn entries(&self) -> &[OkElement] {
        &self.data
    }

    /// Invertible over `O_k/p^N`, i.e. the determinant is a unit.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && determinant(self).is_ok_and(|d| d.is_unit())
    }
}

/// Determinant by Laplace expansion; the matrices in this crate are tiny.
pub fn determinant(m: &OkMatrix) -> Result<OkElement> {
    if m.rows != m.cols {
        return Err(Error::Dimension(
            "determinant of a non-square matrix".into(),
        ));
    }
    Ok(laplace(m, &(0..m.rows).collect::<Vec<_>>(), 0))
}

fn laplace(m: &OkMatrix, cols: &[usize], row: usize) -> OkElement {
    let ctx = m.ctx;
    if cols.is_empty() {
        return OkElement::one(ctx);
    }
    let mut acc = OkElement::zero(ctx);
    for (idx, &c) in cols.iter().enumerate() {
        let entry = m.get(row, c);
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = entry * laplace(m, &rest, row + 1);
        acc = if idx % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// A hermitian matrix over `O_k/p^N`: `entries[j][i] = σ(entries[i][j])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HermMatrix {
    inner: OkMatrix,
}

/// Wire form `{"p": int, "precision": int, "entries": [[{"a","b"}]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermJson {
    pub p: u64,
    pub precision: u32,
    pub entries: Vec<Vec<OkJson>>,
}

impl HermMatrix {
    pub fn new(m: OkMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::NotHermitian("matrix is not square".into()));
        }
        for i in 0..m.rows {
            for j in i..m.cols {
                if m.get(j, i) != m.get(i, j).conj() {
                    return Err(Error::NotHermitian(format!(
                        "entry ({j},{i}) is not conj of ({i},{j})"
                    )));
                }
            }
        }
        Ok(HermMatrix { inner: m })
    }

    pub fn diagonal(ctx: PrimeContext, diag: &[i128]) -> Self {
        HermMatrix {
            inner: OkMatrix::diagonal(ctx, diag),
        }
    }

    /// `diag(p^{e_1}, …, p^{e_n})`.
    pub fn diagonal_powers(ctx: PrimeContext, exps: &[u32]) -> Self {
        let mut m = OkMatrix::zeros(ctx, exps.len(), exps.len());
        for (i, &e) in exps.iter().enumerate() {
            m.set(i, i, OkElement::p_pow(ctx, e));
        }
        HermMatrix { inner: m }
    }

    pub fn identity(ctx: PrimeContext, n: usize) -> Self {
        HermMatrix {
            inner: OkMatrix::identity(ctx, n),
        }
    }

    pub fn n(&self) -> usize {
        self.inner.rows
    }

    pub fn ctx(&self) -> PrimeContext {
        self.inner.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> OkElement {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &OkMatrix {
        &self.inner
    }

    /// `ᵗU · T · σ(U)`; hermitian again.
    pub fn congruence(&self, u: &OkMatrix) -> Result<Self> {
        Ok(HermMatrix {
            inner: self.inner.congruence(u)?,
        })
    }

    /// Multiply every entry by `p^e`.
    pub fn scale_p_pow(&self, e: u32) -> Self {
        let ctx = self.ctx();
        let f = OkElement::p_pow(ctx, e);
        let mut m = self.inner.clone();
        for x in m.data.iter_mut() {
            *x = *x * f;
        }
        HermMatrix { inner: m }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n()).all(|i| (0..self.n()).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Diagonal entries as `Z_p` residues, if the matrix is diagonal.
    pub fn diagonal_entries(&self) -> Option<Vec<u64>> {
        if !self.is_diagonal() {
            return None;
        }
        Some((0..self.n()).map(|i| self.get(i, i).a()).collect())
    }

    pub fn determinant(&self) -> OkElement {
        determinant(&self.inner).expect("square")
    }

    /// Reduce into a context with the same prime and lower precision.
    pub fn reduce_to(&self, ctx: PrimeContext) -> Result<Self> {
        let data = self
            .inner
            .data
            .iter()
            .map(|x| x.reduce_to(ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(HermMatrix {
            inner: OkMatrix {
                ctx,
                rows: self.n(),
                cols: self.n(),
                data,
            },
        })
    }

    pub fn to_json(&self) -> HermJson {
        let ctx = self.ctx();
        HermJson {
            p: ctx.p(),
            precision: ctx.precision(),
            entries: (0..self.n())
                .map(|i| (0..self.n()).map(|j| self.get(i, j).to_json()).collect())
                .collect(),
        }
    }

    /// Decode a wire matrix; `ctx` must carry the same prime.
    pub fn from_json_in(ctx: PrimeContext, j: &HermJson) -> Result<Self> {
        if j.p != ctx.p() {
            return Err(Error::ContextMismatch);
        }
        let rows = j
            .entries
            .iter()
            .map(|row| row.iter().map(|&x| OkElement::from_json(ctx, x)).collect())
            .collect();
        HermMatrix::new(OkMatrix::from_rows(ctx, rows)?)
    }

    pub fn from_json(j: &HermJson) -> Result<Self> {
        let ctx = PrimeContext::new(j.p, j.precision)?;
        Self::from_json_in(ctx, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_check() {
        let c = PrimeContext::new(3, 3).unwrap();
        let x = OkElement::new(c, 1, 2);
        let good = OkMatrix::from_rows(
            c,
            vec![
                vec![OkElement::one(c), x],
                vec![x.conj(), OkElement::zero(c)],
            ],
        )
        .unwrap();
        assert!(HermMatrix::new(good).is_ok());
        let bad = OkMatrix::from_rows(
            c,
            vec![vec![OkElement::one(c), x], vec![x, OkElement::zero(c)]],
        )
        .unwrap();
        assert!(HermMatrix::new(bad).is_err());
        let bad_diag = OkMatrix::from_rows(c, vec![vec![OkElement::delta(c)]]).unwrap();
        assert!(HermMatrix::new(bad_diag).is_err());
    }

    #[test]
    fn json_wire_format() {
        let c = PrimeContext::new(3, 2).unwrap();
        let t = HermMatrix::diagonal(c, &[1, -3]);
        let s = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(
            s,
            r#"{"p":3,"precision":2,"entries":[[{"a":1,"b":0},{"a":0,"b":0}],[{"a":0,"b":0},{"a":-3,"b":0}]]}"#
        );
        let back = HermMatrix::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn determinant_small() {
        let c = PrimeContext::new(5, 4).unwrap();
        let t = HermMatrix::diagonal(c, &[2, 5, 7]);
        assert_eq!(t.determinant(), OkElement::from_int(c, 70));
    }
}
