//! The mod 2 Steenrod algebra in the Milnor basis, optionally restricted to a
//! sub-Hopf-algebra profile.

use std::collections::HashMap;
use std::hash::BuildHasher;
use std::sync::{Arc, RwLock};

use super::{Deg, GradedAlgebra, Product};
use crate::hopf::Grading;
use crate::{Error, Result};

const SHARDS: usize = 64;

/// `Sq(r_1, r_2, ...)` products by Milnor's matrix formula.
pub struct MilnorAlgebra {
    name: String,
    /// `profile[i]`: exclusive bound on `r_{i+1}`; `None` for the full algebra.
    profile: Option<Vec<u32>>,
    max_t: i32,
    /// Basis per degree, trailing zeros trimmed.
    basis: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
    cache: Vec<RwLock<HashMap<(u32, u32, u32, u32), Product>>>,
    hasher: std::collections::hash_map::RandomState,
}

fn xi_degree(i: usize) -> i32 {
    (1 << (i + 1)) - 1
}

impl MilnorAlgebra {
    /// The full algebra through internal degree `max_t`.
    pub fn full(max_t: i32) -> Self {
        Self::build("Acl".into(), None, max_t)
    }

    /// `A(n)`: `r_i < 2^{n+2-i}`.
    pub fn a(n: u32, max_t: i32) -> Self {
        let profile = (1..=n + 1).map(|i| 1u32 << (n + 2 - i)).collect();
        Self::build(format!("Acl{n}"), Some(profile), max_t)
    }

    fn build(name: String, profile: Option<Vec<u32>>, max_t: i32) -> Self {
        let max_t = match &profile {
            Some(p) => max_t.min(p.iter().enumerate().map(|(i, &b)| (b as i32 - 1) * xi_degree(i)).sum()),
            None => max_t,
        };
        let mut basis = vec![Vec::new(); max_t.max(0) as usize + 1];
        let mut r = Vec::new();
        Self::enumerate(&profile, max_t, 0, 0, &mut r, &mut basis);
        for b in &mut basis {
            for x in b.iter_mut() {
                while x.last() == Some(&0) {
                    x.pop();
                }
            }
            b.sort();
            b.dedup();
        }
        let index = basis.iter().map(|b| b.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect()).collect();
        MilnorAlgebra {
            name,
            profile,
            max_t,
            basis,
            index,
            cache: (0..SHARDS).map(|_| RwLock::new(HashMap::new())).collect(),
            hasher: Default::default(),
        }
    }

    fn enumerate(profile: &Option<Vec<u32>>, max_t: i32, i: usize, t: i32, r: &mut Vec<u32>, out: &mut [Vec<Vec<u32>>]) {
        let d = xi_degree(i);
        if t + d > max_t || profile.as_ref().is_some_and(|p| i >= p.len()) {
            out[t as usize].push(r.clone());
            return;
        }
        let bound = profile.as_ref().map_or(u32::MAX, |p| p[i] - 1);
        let mut e = 0u32;
        while e <= bound && t + d * e as i32 <= max_t {
            r.push(e);
            Self::enumerate(profile, max_t, i + 1, t + d * e as i32, r, out);
            r.pop();
            e += 1;
        }
    }

    pub fn degree_of(r: &[u32]) -> i32 {
        r.iter().enumerate().map(|(i, &x)| x as i32 * xi_degree(i)).sum()
    }

    pub fn basis(&self, t: i32) -> &[Vec<u32>] {
        if t < 0 || t > self.max_t {
            return &[];
        }
        &self.basis[t as usize]
    }

    pub fn index_of(&self, r: &[u32]) -> Option<usize> {
        let mut r = r.to_vec();
        while r.last() == Some(&0) {
            r.pop();
        }
        let t = Self::degree_of(&r);
        if t > self.max_t {
            return None;
        }
        self.index[t as usize].get(&r).copied()
    }

    /// `Sq(R) · Sq(S)` as a list of Milnor basis exponent sequences.
    pub fn product_sequences(r: &[u32], s: &[u32]) -> Vec<Vec<u32>> {
        let rows = r.len();
        let cols = s.len();
        // x[i][j] for i in 0..=rows, j in 0..=cols; x[0][0] unused.
        let mut x = vec![vec![0u32; cols + 1]; rows + 1];
        let mut out: HashMap<Vec<u32>, bool> = HashMap::new();
        Self::fill_row(r, s, 1, &mut x, &mut out);
        let mut v: Vec<Vec<u32>> = out.into_iter().filter(|(_, c)| *c).map(|(t, _)| t).collect();
        v.sort();
        v
    }

    /// Chooses row `i` of the matrix (entries `x[i][1..]`, with `x[i][0]`
    /// forced by `r_i`), then recurses; row 0 is forced by the column sums.
    fn fill_row(r: &[u32], s: &[u32], i: usize, x: &mut Vec<Vec<u32>>, out: &mut HashMap<Vec<u32>, bool>) {
        let rows = r.len();
        let cols = s.len();
        if i > rows {
            // Row 0: x[0][j] = s_j - Σ_{i≥1} x[i][j].
            for j in 1..=cols {
                let used: u32 = (1..=rows).map(|k| x[k][j]).sum();
                if used > s[j - 1] {
                    return;
                }
                x[0][j] = s[j - 1] - used;
            }
            // T_n = Σ_{i+j=n} x[i][j]; coefficient Π multinomial mod 2.
            let n_max = rows + cols;
            let mut t = Vec::with_capacity(n_max);
            for n in 1..=n_max {
                let mut sum = 0u32;
                let mut seen = 0u32;
                for ii in 0..=n.min(rows) {
                    let jj = n - ii;
                    if jj > cols {
                        continue;
                    }
                    let v = x[ii][jj];
                    if seen & v != 0 {
                        return;
                    }
                    seen |= v;
                    sum += v;
                }
                t.push(sum);
            }
            while t.last() == Some(&0) {
                t.pop();
            }
            let e = out.entry(t).or_insert(false);
            *e = !*e;
            return;
        }
        // Σ_{j≥0} 2^j x[i][j] = r_i.
        Self::fill_entries(r, s, i, cols, r[i - 1], x, out);
    }

    fn fill_entries(r: &[u32], s: &[u32], i: usize, j: usize, remaining: u32, x: &mut Vec<Vec<u32>>, out: &mut HashMap<Vec<u32>, bool>) {
        if j == 0 {
            x[i][0] = remaining;
            Self::fill_row(r, s, i + 1, x, out);
            return;
        }
        let max = (remaining >> j).min(s[j - 1]);
        for v in 0..=max {
            x[i][j] = v;
            Self::fill_entries(r, s, i, j - 1, remaining - (v << j), x, out);
        }
        x[i][j] = 0;
    }

    fn shard(&self, key: &(u32, u32, u32, u32)) -> usize {
        
        
        self.hasher.hash_one(key) as usize % SHARDS
    }
}

impl GradedAlgebra for MilnorAlgebra {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn grading(&self) -> Grading {
        Grading::Classical
    }

    fn max_degree(&self) -> i32 {
        self.max_t
    }

    fn weights(&self, t: i32) -> Vec<i32> {
        if self.dim((t, 0)) > 0 {
            vec![0]
        } else {
            Vec::new()
        }
    }

    fn dim(&self, d: Deg) -> usize {
        if d.1 != 0 {
            return 0;
        }
        self.basis(d.0).len()
    }

    fn multiply(&self, a: Deg, i: usize, b: Deg, j: usize) -> Product {
        let key = (a.0 as u32, i as u32, b.0 as u32, j as u32);
        let shard = &self.cache[self.shard(&key)];
        if let Some(p) = shard.read().unwrap().get(&key) {
            return p.clone();
        }
        let t = a.0 + b.0;
        let prod: Product = if t > self.max_t {
            Arc::from(Vec::new())
        } else {
            let seqs = Self::product_sequences(&self.basis(a.0)[i], &self.basis(b.0)[j]);
            let mut idx: Vec<u32> = seqs
                .iter()
                .map(|s| self.index[t as usize].get(s).copied().expect("products stay inside the profile") as u32)
                .collect();
            idx.sort_unstable();
            Arc::from(idx)
        };
        shard.write().unwrap().insert(key, prod.clone());
        prod
    }

    fn basis_name(&self, d: Deg, i: usize) -> String {
        let r = &self.basis(d.0)[i];
        let parts: Vec<String> = r.iter().map(u32::to_string).collect();
        format!("Sq({})", parts.join(","))
    }

    fn parse_basis_name(&self, d: Deg, s: &str) -> Result<usize> {
        let inner = s
            .strip_prefix("Sq(")
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::Usage(format!("bad Milnor basis name {s}")))?;
        let r: Vec<u32> = if inner.is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(|x| x.trim().parse().map_err(|_| Error::Usage(format!("bad Milnor basis name {s}")))).collect::<Result<_>>()?
        };
        if Self::degree_of(&r) != d.0 {
            return Err(Error::Usage(format!("{s} does not have degree {}", d.0)));
        }
        self.index_of(&r).ok_or_else(|| Error::Usage(format!("{s} is not in the algebra {}", self.name)))
    }

    fn indecomposables(&self) -> Vec<(String, Deg, usize)> {
        let mut out = Vec::new();
        let mut j = 0;
        while (1 << j) <= self.max_t {
            let r = vec![1u32 << j];
            if self.profile.as_ref().is_some_and(|p| p[0] <= 1 << j) {
                break;
            }
            if let Some(i) = self.index_of(&r) {
                out.push((format!("h{j}"), (1 << j, 0), i));
            }
            j += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{Monomial, Preset};
    use proptest::prelude::*;

    fn sq(a: &MilnorAlgebra, r: &[u32]) -> (Deg, usize) {
        ((MilnorAlgebra::degree_of(r), 0), a.index_of(r).unwrap())
    }

    fn names(a: &MilnorAlgebra, x: (Deg, usize), y: (Deg, usize)) -> Vec<String> {
        let t = (x.0 .0 + y.0 .0, 0);
        a.multiply(x.0, x.1, y.0, y.1).iter().map(|&k| a.basis_name(t, k as usize)).collect()
    }

    #[test]
    fn small_products() {
        let a = MilnorAlgebra::full(20);
        assert!(names(&a, sq(&a, &[1]), sq(&a, &[1])).is_empty());
        assert_eq!(names(&a, sq(&a, &[2]), sq(&a, &[2])), vec!["Sq(1,1)"]);
        assert_eq!(names(&a, sq(&a, &[]), sq(&a, &[3, 1])), vec!["Sq(3,1)"]);
        // Adem relation Sq^1 Sq^2 = Sq^3.
        assert_eq!(names(&a, sq(&a, &[1]), sq(&a, &[2])), vec!["Sq(3)"]);
        assert_eq!(names(&a, sq(&a, &[2]), sq(&a, &[1])), vec!["Sq(0,1)", "Sq(3)"]);
    }

    #[test]
    fn profile_sizes() {
        let a1 = MilnorAlgebra::a(1, 100);
        assert_eq!((0..=a1.max_degree()).map(|t| a1.dim((t, 0))).sum::<usize>(), 8);
        let a2 = MilnorAlgebra::a(2, 100);
        assert_eq!((0..=a2.max_degree()).map(|t| a2.dim((t, 0))).sum::<usize>(), 64);
        assert_eq!(a1.indecomposables().iter().map(|x| x.0.clone()).collect::<Vec<_>>(), vec!["h0", "h1"]);
        assert_eq!(a2.indecomposables().len(), 3);
    }

    /// `⟨Sq(R)Sq(S), ζ^T⟩ = ⟨Sq(R) ⊗ Sq(S), ψ(ζ^T)⟩`, with the coproduct
    /// taken from the `hopf` presentation.
    #[test]
    fn dual_pairing_oracle() {
        let p = Preset::Acl.build();
        let a = MilnorAlgebra::full(16);
        let mono = |r: &[u32]| {
            let mut m = Monomial::one(p.ngens());
            for (i, &e) in r.iter().enumerate() {
                m.exps[i] = e;
            }
            m
        };
        for t in 0..=12 {
            for tt in a.basis(t) {
                let cop = p.coproduct(&mono(tt));
                for ta in 0..=t {
                    for (i, ra) in a.basis(ta).iter().enumerate() {
                        for (j, rb) in a.basis(t - ta).iter().enumerate() {
                            let expect = cop.iter().any(|x| x.left == mono(ra) && x.right == mono(rb));
                            let k = a.index_of(tt).unwrap() as u32;
                            let got = a.multiply((ta, 0), i, (t - ta, 0), j).contains(&k);
                            assert_eq!(got, expect, "Sq{ra:?} Sq{rb:?} at Sq{tt:?}");
                        }
                    }
                }
            }
        }
    }

    fn mul_elem(a: &MilnorAlgebra, x: (i32, &[u32]), y: (i32, &[u32])) -> Vec<u32> {
        let mut acc: Vec<u32> = Vec::new();
        for &i in x.1 {
            for &j in y.1 {
                for &k in a.multiply((x.0, 0), i as usize, (y.0, 0), j as usize).iter() {
                    if let Some(pos) = acc.iter().position(|&z| z == k) {
                        acc.swap_remove(pos);
                    } else {
                        acc.push(k);
                    }
                }
            }
        }
        acc.sort_unstable();
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn associative(ta in 0i32..14, tb in 0i32..14, tc in 0i32..14, seed in 0usize..10_000) {
            let a = MilnorAlgebra::full(40);
            let pick = |t: i32, k: usize| -> Option<u32> {
                let n = a.dim((t, 0));
                (n > 0).then(|| (k % n) as u32)
            };
            let (Some(i), Some(j), Some(k)) = (pick(ta, seed), pick(tb, seed / 7), pick(tc, seed / 49)) else {
                return Ok(());
            };
            let ab = mul_elem(&a, (ta, &[i]), (tb, &[j]));
            let bc = mul_elem(&a, (tb, &[j]), (tc, &[k]));
            let left = mul_elem(&a, (ta + tb, &ab), (tc, &[k]));
            let right = mul_elem(&a, (ta, &[i]), (tb + tc, &bc));
            prop_assert_eq!(left, right);
        }
    }
}
