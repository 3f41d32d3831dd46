use crate::error::{Error, Result};
use crate::hermitian::JordanProfile;
use crate::padic::{is_nonresidue, least_nonresidue};

/// Size limits for exhaustive work on `D(L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrataBudget {
    /// Bound on `Σ a_i` over the nonzero exponents.
    pub max_exponent_sum: u32,
    /// Bound on `|D|`.
    pub max_elements: u64,
}

impl Default for StrataBudget {
    fn default() -> Self {
        StrataBudget {
            max_exponent_sum: 5,
            max_elements: 1 << 22,
        }
    }
}

/// `D = ⊕ O_k/p^{a_i}` with the `k/O_k`-valued form
/// `h(x, y) = Σ p^{−a_i} x_i σ(y_i)`.
///
/// Elements are encoded as mixed-radix indices in `0..size()`; coordinate
/// `i` contributes the digit pair `(α_i, β_i)` of `x_i = α_i + β_i δ`.
#[derive(Debug, Clone)]
pub struct FiniteHermModule {
    p: u64,
    epsilon: u64,
    exponents: Vec<u32>,
    moduli: Vec<u64>,
    strides: Vec<u64>,
    size: u64,
    top: u32,
    /// Flattened `[α_1, β_1, α_2, β_2, …]` per element.
    coords: Vec<u32>,
}

impl FiniteHermModule {
    /// Expand a profile into `D`, dropping unit exponents.
    pub fn build(p: u64, profile: &JordanProfile, budget: StrataBudget) -> Result<Self> {
        if !profile.is_integral() {
            return Err(Error::InvalidArgument(
                "D(L) needs an integral profile".into(),
            ));
        }
        let exps: Vec<u32> = profile
            .exponents()
            .into_iter()
            .filter(|&e| e > 0)
            .map(|e| e as u32)
            .collect();
        Self::from_exponents(p, least_nonresidue(p), &exps, budget)
    }

    pub fn from_exponents(
        p: u64,
        epsilon: u64,
        exps: &[u32],
        budget: StrataBudget,
    ) -> Result<Self> {
        if p < 3 || !crate::padic::PrimeContext::new(p, 1).is_ok() {
            return Err(Error::InvalidContext(format!("{p} is not an odd prime")));
        }
        if !is_nonresidue(epsilon, p) {
            return Err(Error::InvalidContext(format!(
                "{epsilon} is a square mod {p}"
            )));
        }
        let mut exponents: Vec<u32> = exps.iter().copied().filter(|&e| e > 0).collect();
        exponents.sort_unstable();
        let sum: u32 = exponents.iter().sum();
        let log_size = 2.0 * sum as f64 * (p as f64).log2();
        if sum > budget.max_exponent_sum || log_size > 62.0 || p.pow(2 * sum) > budget.max_elements
        {
            let estimate = if log_size > 120.0 {
                u128::MAX
            } else {
                (p as u128).pow(2 * sum)
            };
            return Err(Error::BudgetExceeded {
                estimate,
                budget: budget.max_elements as u128,
            });
        }
        let moduli: Vec<u64> = exponents.iter().map(|&a| p.pow(a)).collect();
        let mut strides = Vec::with_capacity(moduli.len());
        let mut size = 1u64;
        for &q in &moduli {
            strides.push(size);
            size *= q * q;
        }
        let top = exponents.last().copied().unwrap_or(0);
        let m = exponents.len();
        let mut coords = vec![0u32; size as usize * 2 * m];
        for idx in 0..size {
            let mut rest = idx;
            for (i, &q) in moduli.iter().enumerate() {
                let digit = rest % (q * q);
                rest /= q * q;
                let base = (idx as usize) * 2 * m + 2 * i;
                coords[base] = (digit % q) as u32;
                coords[base + 1] = (digit / q) as u32;
            }
        }
        Ok(FiniteHermModule {
            p,
            epsilon,
            exponents,
            moduli,
            strides,
            size,
            top,
            coords,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of cyclic summands, which is `dim D[p]`.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    fn coord(&self, x: u32, i: usize) -> (u64, u64) {
        let base = x as usize * 2 * self.rank() + 2 * i;
        (self.coords[base] as u64, self.coords[base + 1] as u64)
    }

    pub fn encode(&self, coords: &[(u64, u64)]) -> u32 {
        let mut idx = 0u64;
        for (i, &(a, b)) in coords.iter().enumerate() {
            let q = self.moduli[i];
            idx += ((a % q) + q * (b % q)) * self.strides[i];
        }
        idx as u32
    }

    pub fn decode(&self, x: u32) -> Vec<(u64, u64)> {
        (0..self.rank()).map(|i| self.coord(x, i)).collect()
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        let mut idx = 0u64;
        for i in 0..self.rank() {
            let q = self.moduli[i];
            let (a1, b1) = self.coord(x, i);
            let (a2, b2) = self.coord(y, i);
            idx += ((a1 + a2) % q + q * ((b1 + b2) % q)) * self.strides[i];
        }
        idx as u32
    }

    /// `(c₀ + c₁δ)·x`.
    pub fn scalar_mul(&self, c: (u64, u64), x: u32) -> u32 {
        let mut idx = 0u64;
        for i in 0..self.rank() {
            let q = self.moduli[i];
            let (c0, c1) = (c.0 % q, c.1 % q);
            let (a, b) = self.coord(x, i);
            let ra = (c0 * a + self.epsilon % q * ((c1 * b) % q)) % q;
            let rb = (c0 * b + c1 * a) % q;
            idx += (ra + q * rb) * self.strides[i];
        }
        idx as u32
    }

    pub fn times_p(&self, x: u32) -> u32 {
        self.scalar_mul((self.p, 0), x)
    }

    /// `h(x, y)` scaled by `p^{max a_i}`, as a residue pair mod `p^{max a_i}`;
    /// zero exactly when `h(x, y) ∈ O_k`.
    pub fn form(&self, x: u32, y: u32) -> (u64, u64) {
        if self.rank() == 0 {
            return (0, 0);
        }
        let big = self.p.pow(self.top);
        let (mut ra, mut rb) = (0u64, 0u64);
        for i in 0..self.rank() {
            let q = self.moduli[i];
            let (a, b) = self.coord(x, i);
            let (c, d) = self.coord(y, i);
            // (a + bδ)(c − dδ) = (ac − εbd) + (bc − ad)δ, computed mod q.
            let re = (a * c % q + q - self.epsilon % q * (b * d % q) % q) % q;
            let im = (b * c % q + q - a * d % q) % q;
            let scale = big / q;
            ra = (ra + re * scale) % big;
            rb = (rb + im * scale) % big;
        }
        (ra, rb)
    }

    pub fn orthogonal_to(&self, x: u32, y: u32) -> bool {
        self.form(x, y) == (0, 0)
    }

    /// Smallest `e` with `p^e·x = 0`.
    pub fn order_exponent(&self, x: u32) -> u32 {
        let mut e = 0;
        for i in 0..self.rank() {
            let (a, b) = self.coord(x, i);
            let q = self.moduli[i];
            if a == 0 && b == 0 {
                continue;
            }
            let mut g = gcd(gcd(a, b), q);
            let mut v = 0;
            while g.is_multiple_of(self.p) {
                g /= self.p;
                v += 1;
            }
            e = e.max(self.exponents[i] - v);
        }
        e
    }

    /// Elements of `D[p]`, the `p`-torsion.
    pub fn p_torsion_size(&self) -> u64 {
        (0..self.size as u32)
            .filter(|&x| self.times_p(x) == 0)
            .count() as u64
    }

    /// No nonzero `x` is orthogonal to all of `D` (checked on a generating set).
    pub fn is_nondegenerate(&self) -> bool {
        let gens = self.standard_generators();
        (1..self.size as u32).all(|x| gens.iter().any(|&g| !self.orthogonal_to(x, g)))
    }

    /// Unit vectors of the cyclic summands.
    pub fn standard_generators(&self) -> Vec<u32> {
        (0..self.rank())
            .map(|i| {
                let mut c = vec![(0, 0); self.rank()];
                c[i] = (1, 0);
                self.encode(&c)
            })
            .collect()
    }

    /// `O_k·x` as a list, enumerated by `c ∈ O_k/p^{ord x}` (faithful).
    pub(crate) fn cyclic(&self, x: u32) -> Vec<(u32, bool)> {
        let q = self.p.pow(self.order_exponent(x));
        let mut out = Vec::with_capacity((q * q) as usize);
        for c1 in 0..q {
            for c0 in 0..q {
                let unit = c0 % self.p != 0 || c1 % self.p != 0;
                out.push((self.scalar_mul((c0, c1), x), unit));
            }
        }
        out
    }

    pub fn zero_submodule(&self) -> Submodule {
        Submodule { elements: vec![0] }
    }

    pub fn whole(&self) -> Submodule {
        Submodule {
            elements: (0..self.size as u32).collect(),
        }
    }

    /// The submodule generated by `gens`.
    pub fn span(&self, gens: &[u32]) -> Submodule {
        let mut sub = self.zero_submodule();
        for &g in gens {
            if sub.contains(g) {
                continue;
            }
            sub = self.extend(&sub, g);
        }
        sub
    }

    /// `B + O_k·x`.
    pub fn extend(&self, b: &Submodule, x: u32) -> Submodule {
        let cyc = self.cyclic(x);
        let mut seen = vec![false; self.size as usize];
        let mut out = Vec::new();
        for &c in &b.elements {
            for &(y, _) in &cyc {
                let s = self.add(c, y) as usize;
                if !seen[s] {
                    seen[s] = true;
                    out.push(s as u32);
                }
            }
        }
        out.sort_unstable();
        Submodule { elements: out }
    }

    /// `B^⊥ = {x : h(x, B) ⊆ O_k}`.
    pub fn orthogonal(&self, b: &Submodule) -> Submodule {
        let gens = self.generators(b);
        Submodule {
            elements: (0..self.size as u32)
                .filter(|&x| gens.iter().all(|&g| self.orthogonal_to(g, x)))
                .collect(),
        }
    }

    /// Canonical generating set: scan elements in index order, keep each one
    /// that is not already in the span of those kept.
    pub fn generators(&self, b: &Submodule) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = self.zero_submodule();
        for &x in &b.elements {
            if !span.contains(x) {
                gens.push(x);
                span = self.extend(&span, x);
                if span.len() == b.len() {
                    break;
                }
            }
        }
        gens
    }

    /// `pB`.
    pub fn times_p_sub(&self, b: &Submodule) -> Submodule {
        let mut e: Vec<u32> = b.elements.iter().map(|&x| self.times_p(x)).collect();
        e.sort_unstable();
        e.dedup();
        Submodule { elements: e }
    }

    /// log base `p²` of `|outer| / |inner|`, i.e. the length of the quotient.
    pub fn length_quotient(&self, outer: &Submodule, inner: &Submodule) -> Result<u32> {
        let ratio = outer.len() as u64 / inner.len() as u64;
        let q = self.p * self.p;
        let mut r = ratio;
        let mut l = 0;
        while r > 1 {
            if !r.is_multiple_of(q) {
                return Err(Error::Consistency(format!(
                    "index {ratio} is not a power of p²"
                )));
            }
            r /= q;
            l += 1;
        }
        Ok(l)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// An `O_k`-submodule of `D`, stored as its sorted element list; two
/// submodules are equal iff their lists are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Submodule {
    elements: Vec<u32>,
}

impl Submodule {
    pub fn from_sorted(elements: Vec<u32>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Submodule { elements }
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.elements == [0]
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &Submodule) -> bool {
        self.len() <= other.len() && self.elements.iter().all(|&x| other.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn module(p: u64, exps: &[u32]) -> FiniteHermModule {
        FiniteHermModule::from_exponents(p, least_nonresidue(p), exps, StrataBudget::default())
            .unwrap()
    }

    #[test]
    fn sizes_and_torsion() {
        let d = module(3, &[1, 2]);
        assert_eq!(d.size(), 3u64.pow(6));
        assert_eq!(d.p_torsion_size(), 81);
        assert!(d.is_nondegenerate());
        let d = FiniteHermModule::build(
            3,
            &JordanProfile::from_exponents(&[0, 0, 0]),
            StrataBudget::default(),
        )
        .unwrap();
        assert!(d.is_trivial());
        assert_eq!(d.size(), 1);
    }

    #[test]
    fn budget_guard() {
        let r = FiniteHermModule::from_exponents(3, 2, &[3, 3], StrataBudget::default());
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn perp_of_extremes() {
        let d = module(3, &[1, 2]);
        assert_eq!(d.orthogonal(&d.zero_submodule()), d.whole());
        assert_eq!(d.orthogonal(&d.whole()), d.zero_submodule());
    }

    #[test]
    fn double_perp_on_cyclic_submodules() {
        let d = module(3, &[1, 2]);
        for x in (0..d.size() as u32).step_by(7) {
            let b = d.span(&[x]);
            assert_eq!(d.orthogonal(&d.orthogonal(&b)), b);
        }
    }

    #[test]
    fn isotropic_lines_are_self_orthogonal() {
        // D = F_9² with form p^{-1}(x₁σ(y₁) + x₂σ(y₂)); scan all lines (1, c).
        let d = module(3, &[1, 1]);
        let mut isotropic = 0;
        for c1 in 0..3 {
            for c0 in 0..3 {
                let x = d.encode(&[(1, 0), (c0, c1)]);
                let line = d.span(&[x]);
                let norm_c = (c0 * c0 + 3 * 3 - (2 * c1 * c1) % 3) % 3;
                let is_iso = (1 + norm_c) % 3 == 0;
                assert_eq!(d.orthogonal_to(x, x), is_iso);
                if is_iso {
                    isotropic += 1;
                    assert_eq!(d.orthogonal(&line), line);
                } else {
                    assert_ne!(d.orthogonal(&line), line);
                }
            }
        }
        // p + 1 solutions of norm(c) = −1 in F_9.
        assert_eq!(isotropic, 4);
    }
}
