//! Exact solution counts `|{x ∈ M_{m,n}(O_k/p^k) : ᵗx·S·σ(x) ≡ T}|`.
//!
//! Two kernels:
//!
//! - **rows** (diagonal `S`): `ᵗx S σ(x) = Σ_i s_i·ᵗr_i σ(r_i)` over the rows
//!   `r_i` of `x`, so the count is an `m`-fold convolution of the histogram
//!   of `r ↦ ᵗr σ(r)` on `Herm_n(O_k/p^k)`, read off at `T`.
//! - **columns** (any `S`): choose columns left to right, keeping only those
//!   whose Gram entries against all earlier columns already match `T`.
//!
//! A third, **naive** kernel walks every `x` and is kept as an oracle for
//! tiny cases.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{HermMatrix, OkElement, PrimeContext};

/// Limit on elementary steps (row evaluations, histogram pair visits,
/// column candidate checks).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteBudget {
    pub max_steps: u128,
}

impl Default for BruteBudget {
    fn default() -> Self {
        BruteBudget {
            max_steps: 1_000_000_000,
        }
    }
}

impl BruteBudget {
    fn check(&self, estimate: u128) -> Result<()> {
        if estimate > self.max_steps {
            Err(Error::BudgetExceeded {
                estimate,
                budget: self.max_steps,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Rows,
    Columns,
    Naive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub count: u128,
    pub kernel: Kernel,
    pub steps: u128,
}

/// Count solutions modulo `p^k`. `S` is `m×m`, `T` is `n×n`; both must carry
/// at least `k` digits of precision and share `p` and `ε`.
pub fn brute_count(
    s: &HermMatrix,
    t: &HermMatrix,
    k: u32,
    budget: BruteBudget,
) -> Result<CountReport> {
    let kernel = if s.is_diagonal() && t.n() <= 4 {
        Kernel::Rows
    } else {
        Kernel::Columns
    };
    brute_count_with(s, t, k, budget, kernel)
}

pub fn brute_count_with(
    s: &HermMatrix,
    t: &HermMatrix,
    k: u32,
    budget: BruteBudget,
    kernel: Kernel,
) -> Result<CountReport> {
    let (s, t) = reduce_pair(s, t, k)?;
    match kernel {
        Kernel::Rows => {
            if !s.is_diagonal() {
                return Err(Error::Shape("row kernel needs a diagonal S".into()));
            }
            rows_kernel(&s, &t, budget)
        }
        Kernel::Columns => columns_kernel(&s, &t, budget),
        Kernel::Naive => naive_kernel(&s, &t, budget),
    }
}

fn naive_kernel(s: &HermMatrix, t: &HermMatrix, budget: BruteBudget) -> Result<CountReport> {
    let ctx = s.ctx();
    let (m, n) = (s.n(), t.n());
    let q = ctx.modulus();
    let cells = (m * n) as u32;
    let total = (q as u128 * q as u128)
        .checked_pow(cells)
        .ok_or(Error::BudgetExceeded {
            estimate: u128::MAX,
            budget: budget.max_steps,
        })?;
    budget.check(total)?;
    let mut x = crate::padic::OkMatrix::zeros(ctx, m, n);
    let mut count = 0u128;
    for code in 0..total {
        let mut c = code;
        for idx in 0..(m * n) {
            let a = (c % q as u128) as u64;
            c /= q as u128;
            let b = (c % q as u128) as u64;
            c /= q as u128;
            x.set(idx / n, idx % n, OkElement::from_residues(ctx, a, b));
        }
        if &s.as_matrix().congruence(&x)? == t.as_matrix() {
            count += 1;
        }
    }
    Ok(CountReport {
        count,
        kernel: Kernel::Naive,
        steps: total,
    })
}

fn reduce_pair(s: &HermMatrix, t: &HermMatrix, k: u32) -> Result<(HermMatrix, HermMatrix)> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "truncation level k must be ≥ 1".into(),
        ));
    }
    let (cs, ct) = (s.ctx(), t.ctx());
    if cs.p() != ct.p() || cs.epsilon() != ct.epsilon() {
        return Err(Error::ContextMismatch);
    }
    if s.n() < t.n() {
        return Err(Error::Dimension(format!(
            "S is {}×{}, T is {}×{}: need m ≥ n",
            s.n(),
            s.n(),
            t.n(),
            t.n()
        )));
    }
    let ctx = PrimeContext::with_epsilon(cs.p(), cs.epsilon(), k)?;
    if ctx.modulus() >= 1 << 31 {
        return Err(Error::InvalidArgument(
            "p^k too large for the counting kernels".into(),
        ));
    }
    Ok((s.reduce_to(ctx)?, t.reduce_to(ctx)?))
}

/// Digit layout of `Herm_n(Z/q)`: the `n` diagonal entries, then real and
/// `δ`-parts of each entry above the diagonal.
struct Layout {
    n: usize,
    q: u64,
    eps: u64,
}

impl Layout {
    fn dims(&self) -> usize {
        self.n * self.n
    }

    fn key(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.q + d)
    }

    fn digits_of(&self, t: &HermMatrix) -> Vec<u64> {
        let mut d = Vec::with_capacity(self.dims());
        for i in 0..self.n {
            d.push(t.get(i, i).a());
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                let x = t.get(i, j);
                d.push(x.a());
                d.push(x.b());
            }
        }
        d
    }

    /// Digits of `ᵗr·σ(r)` for `r = (a_c + b_c δ)_c`.
    fn gram_of_row(&self, r: &[(u64, u64)], out: &mut [u64]) {
        let q = self.q;
        let mut pos = self.n;
        for i in 0..self.n {
            let (a, b) = r[i];
            out[i] = (a * a % q + q - self.eps * (b * b % q) % q) % q;
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (a, b) = r[i];
                let (c, d) = r[j];
                out[pos] = (a * c % q + q - self.eps * (b * d % q) % q) % q;
                out[pos + 1] = (b * c % q + q - a * d % q) % q;
                pos += 2;
            }
        }
    }
}

/// A histogram on `Herm_n(Z/q)` as parallel arrays, sorted by key.
struct Support {
    keys: Vec<u64>,
    digits: Vec<u64>,
    counts: Vec<u64>,
}

impl Support {
    fn from_map(layout: &Layout, map: FxHashMap<u64, u64>) -> Self {
        let mut entries: Vec<(u64, u64)> = map.into_iter().filter(|&(_, c)| c > 0).collect();
        entries.sort_unstable();
        let dims = layout.dims();
        let mut digits = Vec::with_capacity(entries.len() * dims);
        for &(key, _) in &entries {
            let mut k = key;
            for _ in 0..dims {
                digits.push(k % layout.q);
                k /= layout.q;
            }
        }
        Support {
            keys: entries.iter().map(|e| e.0).collect(),
            counts: entries.iter().map(|e| e.1).collect(),
            digits,
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn digits(&self, i: usize, dims: usize) -> &[u64] {
        &self.digits[i * dims..(i + 1) * dims]
    }
}

/// Lookup of `hist[z − g]` with the subtraction folded into the index:
/// the table is indexed by `Σ e_i (2q)^i` with `e_i ∈ [0, 2q)` and reads the
/// histogram at `e_i mod q`.
enum DiffLookup {
    Wrap { table: Vec<u64>, weights: Vec<u64> },
    Map(FxHashMap<u64, u64>),
}

const WRAP_TABLE_LIMIT: u64 = 1 << 24;

impl DiffLookup {
    fn new(layout: &Layout, hist: &Support) -> Self {
        let dims = layout.dims() as u32;
        let w = 2 * layout.q;
        if w.checked_pow(dims).is_some_and(|s| s <= WRAP_TABLE_LIMIT) {
            let size = w.pow(dims) as usize;
            let weights: Vec<u64> = (0..dims).map(|i| w.pow(i)).collect();
            let mut table = vec![0u64; size];
            let dense: FxHashMap<u64, u64> = hist
                .keys
                .iter()
                .copied()
                .zip(hist.counts.iter().copied())
                .collect();
            for (idx, slot) in table.iter_mut().enumerate() {
                let mut rest = idx as u64;
                let mut key = 0u64;
                let mut scale = 1u64;
                for _ in 0..dims {
                    key += (rest % w % layout.q) * scale;
                    rest /= w;
                    scale *= layout.q;
                }
                *slot = dense.get(&key).copied().unwrap_or(0);
            }
            DiffLookup::Wrap { table, weights }
        } else {
            DiffLookup::Map(
                hist.keys
                    .iter()
                    .copied()
                    .zip(hist.counts.iter().copied())
                    .collect(),
            )
        }
    }
}

fn rows_kernel(s: &HermMatrix, t: &HermMatrix, budget: BruteBudget) -> Result<CountReport> {
    let ctx = t.ctx();
    let n = t.n();
    let m = s.n();
    let q = ctx.modulus();
    let layout = Layout {
        n,
        q,
        eps: ctx.epsilon() % q,
    };
    let dims = layout.dims();
    if (q as f64).log2() * dims as f64 >= 63.0 {
        return Err(Error::InvalidArgument(
            "Herm_n(O_k/p^k) too large to key".into(),
        ));
    }

    let rows = (q as u128).pow(2 * n as u32);
    let mut steps = rows;
    budget.check(steps)?;

    // Histogram of r ↦ ᵗr σ(r), sharded over the first coordinate.
    let per_first = q * q;
    let base_hist: FxHashMap<u64, u64> = (0..per_first)
        .into_par_iter()
        .fold(FxHashMap::default, |mut acc, first| {
            let mut r = vec![(0u64, 0u64); n];
            r[0] = (first % q, first / q);
            let mut out = vec![0u64; dims];
            let tail = (q * q).pow(n as u32 - 1);
            for rest in 0..tail {
                let mut x = rest;
                for c in r.iter_mut().skip(1) {
                    let d = x % (q * q);
                    x /= q * q;
                    *c = (d % q, d / q);
                }
                layout.gram_of_row(&r, &mut out);
                *acc.entry(layout.key(&out)).or_insert(0) += 1;
            }
            acc
        })
        .reduce(FxHashMap::default, |mut a, b| {
            for (k2, v) in b {
                *a.entry(k2).or_insert(0) += v;
            }
            a
        });

    // Scale by each diagonal entry of S.
    let base = Support::from_map(&layout, base_hist);
    let scaled: Vec<Support> = (0..m)
        .map(|i| {
            let sc = s.get(i, i).a();
            let mut map = FxHashMap::default();
            let mut buf = vec![0u64; dims];
            for idx in 0..base.len() {
                for (d, &x) in buf.iter_mut().zip(base.digits(idx, dims)) {
                    *d = x * sc % q;
                }
                *map.entry(layout.key(&buf)).or_insert(0) += base.counts[idx];
            }
            Support::from_map(&layout, map)
        })
        .collect();

    let target = layout.digits_of(t);
    if m == 1 {
        let key = layout.key(&target);
        let count = scaled[0]
            .keys
            .binary_search(&key)
            .map_or(0, |i| scaled[0].counts[i]) as u128;
        return Ok(CountReport {
            count,
            kernel: Kernel::Rows,
            steps,
        });
    }

    // cur = h_1 ⊛ … ⊛ h_{m−2}.
    let mut cur = {
        let mut map = FxHashMap::default();
        map.insert(0u64, 1u64);
        Support::from_map(&layout, map)
    };
    for h in scaled.iter().take(m - 2) {
        let work = cur.len() as u128 * h.len() as u128;
        steps += work;
        budget.check(steps)?;
        cur = convolve(&layout, &cur, h);
    }
    let last2 = &scaled[m - 2];
    let last = &scaled[m - 1];
    steps += cur.len() as u128 * last2.len() as u128;
    budget.check(steps)?;

    let lookup = DiffLookup::new(&layout, last);
    let count = (0..cur.len())
        .into_par_iter()
        .map(|yi| {
            let y = cur.digits(yi, dims);
            let z: Vec<u64> = target
                .iter()
                .zip(y)
                .map(|(&t, &y)| (t + q - y) % q)
                .collect();
            let inner: u128 = match &lookup {
                DiffLookup::Wrap { table, weights } => {
                    let base: u64 = z.iter().zip(weights).map(|(&d, &w)| d * w).sum();
                    let mut acc = 0u128;
                    for gi in 0..last2.len() {
                        let g = last2.digits(gi, dims);
                        let off: u64 = g.iter().zip(weights).map(|(&d, &w)| (q - d) * w).sum();
                        let hit = table[(base + off) as usize];
                        if hit != 0 {
                            acc += last2.counts[gi] as u128 * hit as u128;
                        }
                    }
                    acc
                }
                DiffLookup::Map(map) => {
                    let mut acc = 0u128;
                    let mut buf = vec![0u64; dims];
                    for gi in 0..last2.len() {
                        let g = last2.digits(gi, dims);
                        for ((b, &zd), &gd) in buf.iter_mut().zip(&z).zip(g) {
                            *b = (zd + q - gd) % q;
                        }
                        if let Some(&hit) = map.get(&layout.key(&buf)) {
                            acc += last2.counts[gi] as u128 * hit as u128;
                        }
                    }
                    acc
                }
            };
            inner * cur.counts[yi] as u128
        })
        .sum();
    Ok(CountReport {
        count,
        kernel: Kernel::Rows,
        steps,
    })
}

fn convolve(layout: &Layout, a: &Support, b: &Support) -> Support {
    let dims = layout.dims();
    let q = layout.q;
    let mut map: FxHashMap<u64, u64> = FxHashMap::default();
    let mut buf = vec![0u64; dims];
    for i in 0..a.len() {
        let x = a.digits(i, dims);
        for j in 0..b.len() {
            let y = b.digits(j, dims);
            for ((o, &xd), &yd) in buf.iter_mut().zip(x).zip(y) {
                *o = (xd + yd) % q;
            }
            *map.entry(layout.key(&buf)).or_insert(0) += a.counts[i] * b.counts[j];
        }
    }
    Support::from_map(layout, map)
}

fn columns_kernel(s: &HermMatrix, t: &HermMatrix, budget: BruteBudget) -> Result<CountReport> {
    let ctx = t.ctx();
    let m = s.n();
    let n = t.n();
    let q = ctx.modulus();
    let vectors = (q as u128).pow(2 * m as u32);
    let mut steps = vectors;
    budget.check(steps)?;

    // For every vector v: v and w = S·σ(v), so that h(u, v) = ᵗu·w.
    let decode = |idx: u64| -> Vec<OkElement> {
        let mut x = idx;
        (0..m)
            .map(|_| {
                let d = x % (q * q);
                x /= q * q;
                OkElement::from_residues(ctx, d % q, d / q)
            })
            .collect()
    };
    let pair = |u: &[OkElement], w: &[OkElement]| {
        u.iter()
            .zip(w)
            .fold(OkElement::zero(ctx), |acc, (&a, &b)| acc + a * b)
    };
    let s_conj_times = |v: &[OkElement]| -> Vec<OkElement> {
        (0..m)
            .map(|i| {
                (0..m).fold(OkElement::zero(ctx), |acc, j| {
                    acc + s.get(i, j) * v[j].conj()
                })
            })
            .collect()
    };

    // Candidates per column: vectors with the right self-pairing.
    let all: Vec<(Vec<OkElement>, Vec<OkElement>, OkElement)> = (0..vectors as u64)
        .into_par_iter()
        .map(|idx| {
            let v = decode(idx);
            let w = s_conj_times(&v);
            let h = pair(&v, &w);
            (v, w, h)
        })
        .collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|c| {
            (0..all.len())
                .filter(|&i| all[i].2 == t.get(c, c))
                .collect()
        })
        .collect();

    let mut estimate = 0u128;
    let mut prod = 1u128;
    for c in &candidates {
        prod = prod.saturating_mul(c.len() as u128);
        estimate = estimate.saturating_add(prod);
    }
    steps = steps.saturating_add(estimate);
    budget.check(steps)?;

    fn descend(
        col: usize,
        chosen: &mut Vec<usize>,
        all: &[(Vec<OkElement>, Vec<OkElement>, OkElement)],
        candidates: &[Vec<usize>],
        t: &HermMatrix,
        pair: &dyn Fn(&[OkElement], &[OkElement]) -> OkElement,
    ) -> u128 {
        if col == candidates.len() {
            return 1;
        }
        let mut total = 0u128;
        for &v in &candidates[col] {
            // h(x_d, x_col) = ᵗx_d·S·σ(x_col) = T_{d,col}.
            if chosen
                .iter()
                .enumerate()
                .all(|(d, &u)| pair(&all[u].0, &all[v].1) == t.get(d, col))
            {
                chosen.push(v);
                total += descend(col + 1, chosen, all, candidates, t, pair);
                chosen.pop();
            }
        }
        total
    }

    let count: u128 = candidates[0]
        .par_iter()
        .map(|&first| {
            let mut chosen = vec![first];
            descend(1, &mut chosen, &all, &candidates, t, &pair)
        })
        .sum();
    Ok(CountReport {
        count,
        kernel: Kernel::Columns,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(p: u64, k: u32, d: &[i128]) -> HermMatrix {
        HermMatrix::diagonal(PrimeContext::new(p, k).unwrap(), d)
    }

    #[test]
    fn norm_fibres() {
        // |{x ∈ O_k/3 : N(x) = 1}| = p + 1.
        let r = brute_count(
            &diag(3, 1, &[1]),
            &diag(3, 1, &[1]),
            1,
            BruteBudget::default(),
        )
        .unwrap();
        assert_eq!(r.count, 4);
        // Mod 9 the unit norm fibre has (p + 1)·p elements.
        let r = brute_count(
            &diag(3, 2, &[1]),
            &diag(3, 2, &[1]),
            2,
            BruteBudget::default(),
        )
        .unwrap();
        assert_eq!(r.count, 12);
    }

    #[test]
    fn kernels_agree() {
        let b = BruteBudget::default();
        for (sd, td, k) in [
            (vec![1i128, 1], vec![1i128], 1u32),
            (vec![1, 1], vec![1, 3], 2),
            (vec![1, 3], vec![1], 2),
            (vec![1, 1, 1], vec![3], 1),
            (vec![1, 1], vec![3, 3], 2),
            (vec![1, 1, 1], vec![1, 1], 1),
        ] {
            let s = diag(3, k, &sd);
            let t = diag(3, k, &td);
            let rows = brute_count_with(&s, &t, k, b, Kernel::Rows).unwrap();
            let cols = brute_count_with(&s, &t, k, b, Kernel::Columns).unwrap();
            assert_eq!(rows.count, cols.count, "S={sd:?} T={td:?} k={k}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = diag(3, 3, &[1, 1, 1]);
        let t = diag(3, 3, &[1, 9]);
        let r = brute_count(&s, &t, 3, BruteBudget { max_steps: 1000 });
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn shape_errors() {
        let s = diag(3, 2, &[1]);
        let t = diag(3, 2, &[1, 1]);
        assert!(matches!(
            brute_count(&s, &t, 1, BruteBudget::default()),
            Err(Error::Dimension(_))
        ));
        assert!(brute_count(&t, &t, 3, BruteBudget::default()).is_err());
    }
}
