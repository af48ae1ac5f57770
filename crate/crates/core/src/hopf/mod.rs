//! Presentations of the dual Steenrod algebras and their quotients: monomial
//! bases per bidegree and coproducts.
//!
//! Every generator belongs to one of the three standard families `ζ_k`,
//! `ξ_k`, `τ_k`, and its coproduct is the standard diagonal for that family:
//!
//! * `ψ(ζ_k) = Σ ζ_{k-i}^{2^i} ⊗ ζ_i` (likewise for `ξ_k`),
//! * `ψ(τ_k) = τ_k ⊗ 1 + Σ ξ_{k-i}^{2^i} ⊗ τ_i`,
//!
//! with `ζ_0 = ξ_0 = 1`. Quotients are modelled by truncation exponents and by
//! square relations `τ_i^2 = τ·ξ_{i+1}`. The scalar `τ` is carried as an
//! exponent on each monomial and has degree `(0, -1)`.

mod degree;
mod parse;
mod presets;

pub use degree::{chow_degree, TriDegree};
pub use parse::parse_presentation;
pub use presets::Preset;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::{Error, Result};

/// Weight of the scalar `τ`.
pub const TAU_WEIGHT: i32 = -1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    Zeta(u32),
    Xi(u32),
    Tau(u32),
}

/// How degrees are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    /// Singly graded over F2; weights are all zero.
    Classical,
    /// Bigraded over F2, no `τ`.
    Weighted,
    /// Bigraded over F2[τ].
    Motivic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub kind: GenKind,
    pub degree: i32,
    pub weight: i32,
    /// Exponents must stay below this bound.
    pub trunc: Option<u32>,
    /// `g^2 = τ · generators[square]`.
    pub square: Option<usize>,
}

/// A monomial `τ^tau · Π g_i^{exps[i]}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    pub tau: u32,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn one(ngens: usize) -> Self {
        Monomial { tau: 0, exps: vec![0; ngens] }
    }

    pub fn generator(ngens: usize, i: usize) -> Self {
        let mut m = Self::one(ngens);
        m.exps[i] = 1;
        m
    }

    pub fn is_one(&self) -> bool {
        self.tau == 0 && self.exps.iter().all(|&e| e == 0)
    }

    /// The same monomial with the `τ` power removed.
    pub fn without_tau(&self) -> Monomial {
        Monomial { tau: 0, exps: self.exps.clone() }
    }
}

/// `τ^tau · left ⊗ right`, with `left` and `right` free of `τ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Tensor {
    pub tau: u32,
    pub left: Monomial,
    pub right: Monomial,
}

/// A formal sum of tensors over F2.
pub type TensorSum = BTreeSet<Tensor>;

fn toggle(sum: &mut TensorSum, t: Tensor) {
    if !sum.remove(&t) {
        sum.insert(t);
    }
}

/// A presentation of a dual Steenrod algebra or quotient.
pub struct HopfPresentation {
    name: String,
    grading: Grading,
    gens: Vec<Generator>,
    /// Coproduct of each generator.
    gen_coproducts: Vec<TensorSum>,
    basis_cache: RwLock<HashMap<(i32, i32), Arc<Vec<Monomial>>>>,
}

impl Clone for HopfPresentation {
    fn clone(&self) -> Self {
        HopfPresentation {
            name: self.name.clone(),
            grading: self.grading,
            gens: self.gens.clone(),
            gen_coproducts: self.gen_coproducts.clone(),
            basis_cache: RwLock::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for HopfPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HopfPresentation")
            .field("name", &self.name)
            .field("grading", &self.grading)
            .field("gens", &self.gens)
            .finish()
    }
}

impl HopfPresentation {
    /// Validates the generators and precomputes their coproducts.
    pub fn new(name: impl Into<String>, grading: Grading, gens: Vec<Generator>) -> Result<Self> {
        let mut p = HopfPresentation {
            name: name.into(),
            grading,
            gens,
            gen_coproducts: Vec::new(),
            basis_cache: RwLock::new(HashMap::new()),
        };
        p.validate()?;
        p.gen_coproducts = (0..p.gens.len()).map(|i| p.generator_coproduct(i)).collect();
        for (i, cp) in p.gen_coproducts.iter().enumerate() {
            let (t, w) = (p.gens[i].degree, p.gens[i].weight);
            for term in cp {
                let (lt, lw) = p.degree(&term.left);
                let (rt, rw) = p.degree(&term.right);
                if lt + rt != t || lw + rw + TAU_WEIGHT * term.tau as i32 != w {
                    return Err(Error::Usage(format!(
                        "generator {} has degree ({t},{w}) inconsistent with its coproduct",
                        p.gens[i].name
                    )));
                }
            }
        }
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for g in &self.gens {
            if g.degree < 1 {
                return Err(Error::Usage(format!("generator {} must have positive degree", g.name)));
            }
            if !seen.insert(g.kind) {
                return Err(Error::Usage(format!("generator {} declared twice", g.name)));
            }
            if self.grading == Grading::Classical && g.weight != 0 {
                return Err(Error::Usage(format!("classical generator {} has nonzero weight", g.name)));
            }
            if g.trunc == Some(0) {
                return Err(Error::Usage(format!("generator {} has truncation 0", g.name)));
            }
            if let Some(j) = g.square {
                if self.grading != Grading::Motivic {
                    return Err(Error::Usage(format!("square relation on {} needs the ground ring F2[tau]", g.name)));
                }
                let h = &self.gens[j];
                if 2 * g.degree != h.degree || 2 * g.weight != h.weight + TAU_WEIGHT {
                    return Err(Error::Usage(format!(
                        "relation {}^2 = tau {} is not homogeneous",
                        g.name, h.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn is_motivic(&self) -> bool {
        self.grading == Grading::Motivic
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_index(&self, kind: GenKind) -> Option<usize> {
        self.gens.iter().position(|g| g.kind == kind)
    }

    /// Indices `i` of the generators `τ_i`, sorted.
    pub fn tau_indices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self
            .gens
            .iter()
            .filter_map(|g| match g.kind {
                GenKind::Tau(i) => Some(i),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v
    }

    /// `(t, w)` of a monomial.
    pub fn degree(&self, m: &Monomial) -> (i32, i32) {
        let mut t = 0;
        let mut w = TAU_WEIGHT * m.tau as i32;
        for (g, &e) in self.gens.iter().zip(&m.exps) {
            t += g.degree * e as i32;
            w += g.weight * e as i32;
        }
        (t, w)
    }

    /// Applies the square relations and truncations; `None` if the monomial vanishes.
    pub fn normalize(&self, mut m: Monomial) -> Option<Monomial> {
        loop {
            let mut changed = false;
            for (i, g) in self.gens.iter().enumerate() {
                if let Some(j) = g.square {
                    if m.exps[i] >= 2 {
                        let k = m.exps[i] / 2;
                        m.exps[i] -= 2 * k;
                        m.exps[j] += k;
                        m.tau += k;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if self.grading != Grading::Motivic && m.tau > 0 {
            return None;
        }
        for (g, &e) in self.gens.iter().zip(&m.exps) {
            if g.trunc.is_some_and(|k| e >= k) {
                return None;
            }
        }
        Some(m)
    }

    pub fn multiply(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
        self.normalize(Monomial { tau: a.tau + b.tau, exps })
    }

    fn one(&self) -> Monomial {
        Monomial::one(self.gens.len())
    }

    /// `x^n` for a single generator, normalized.
    fn gen_power(&self, i: usize, n: u32) -> Option<Monomial> {
        let mut m = self.one();
        m.exps[i] = n;
        self.normalize(m)
    }

    /// Normalizes `a ⊗ b` with `τ` pulled out to the scalar.
    fn tensor(&self, tau: u32, a: Monomial, b: Monomial) -> Option<Tensor> {
        let a = self.normalize(a)?;
        let b = self.normalize(b)?;
        Some(Tensor { tau: tau + a.tau + b.tau, left: a.without_tau(), right: b.without_tau() })
    }

    fn generator_coproduct(&self, idx: usize) -> TensorSum {
        let mut sum = TensorSum::new();
        let family_power = |family: fn(u32) -> GenKind, j: u32, pow: u32| -> Option<Monomial> {
            if j == 0 {
                Some(self.one())
            } else {
                self.gen_index(family(j)).and_then(|g| self.gen_power(g, pow))
            }
        };
        match self.gens[idx].kind {
            GenKind::Zeta(k) | GenKind::Xi(k) => {
                let family: fn(u32) -> GenKind =
                    if matches!(self.gens[idx].kind, GenKind::Zeta(_)) { GenKind::Zeta } else { GenKind::Xi };
                for i in 0..=k {
                    let (Some(l), Some(r)) = (family_power(family, k - i, 1 << i), family_power(family, i, 1)) else {
                        continue;
                    };
                    if let Some(t) = self.tensor(0, l, r) {
                        toggle(&mut sum, t);
                    }
                }
            }
            GenKind::Tau(k) => {
                if let Some(t) = self.tensor(0, Monomial::generator(self.ngens(), idx), self.one()) {
                    toggle(&mut sum, t);
                }
                for i in 0..=k {
                    let l = family_power(GenKind::Xi, k - i, 1 << i);
                    let r = self.gen_index(GenKind::Tau(i)).map(|g| Monomial::generator(self.ngens(), g));
                    if let (Some(l), Some(r)) = (l, r) {
                        if let Some(t) = self.tensor(0, l, r) {
                            toggle(&mut sum, t);
                        }
                    }
                }
            }
        }
        sum
    }

    fn multiply_sums(&self, a: &TensorSum, b: &TensorSum) -> TensorSum {
        let mut out = TensorSum::new();
        for x in a {
            for y in b {
                let (Some(l), Some(r)) = (self.multiply(&x.left, &y.left), self.multiply(&x.right, &y.right)) else {
                    continue;
                };
                let t = Tensor { tau: x.tau + y.tau + l.tau + r.tau, left: l.without_tau(), right: r.without_tau() };
                toggle(&mut out, t);
            }
        }
        out
    }

    /// Frobenius on a formal sum: `(Σ a⊗b)^2 = Σ a^2 ⊗ b^2` in characteristic 2.
    fn square_sum(&self, a: &TensorSum) -> TensorSum {
        let mut out = TensorSum::new();
        for x in a {
            let l = self.multiply(&x.left, &x.left);
            let r = self.multiply(&x.right, &x.right);
            if let (Some(l), Some(r)) = (l, r) {
                toggle(&mut out, Tensor { tau: 2 * x.tau + l.tau + r.tau, left: l.without_tau(), right: r.without_tau() });
            }
        }
        out
    }

    /// The full coproduct of a normalized monomial.
    pub fn coproduct(&self, m: &Monomial) -> TensorSum {
        let mut acc = TensorSum::new();
        acc.insert(Tensor { tau: m.tau, left: self.one(), right: self.one() });
        for (i, &e) in m.exps.iter().enumerate() {
            let mut pow = self.gen_coproducts[i].clone();
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.multiply_sums(&acc, &pow);
                }
                e >>= 1;
                if e > 0 {
                    pow = self.square_sum(&pow);
                }
            }
        }
        acc
    }

    /// The coproduct with the terms `1⊗m` and `m⊗1` removed.
    pub fn reduced_coproduct(&self, m: &Monomial) -> TensorSum {
        let mut c = self.coproduct(m);
        let base = m.without_tau();
        c.remove(&Tensor { tau: m.tau, left: self.one(), right: base.clone() });
        c.remove(&Tensor { tau: m.tau, left: base, right: self.one() });
        c
    }

    /// All normalized monomials of degree `(t, w)`, including their `τ` power.
    ///
    /// Ordered by `τ` power, then by exponent vector in decreasing
    /// lexicographic order of the declared generators.
    pub fn monomial_basis(&self, t: i32, w: i32) -> Arc<Vec<Monomial>> {
        if let Some(b) = self.basis_cache.read().unwrap().get(&(t, w)) {
            return b.clone();
        }
        let mut out = Vec::new();
        if t >= 0 {
            let mut exps = vec![0u32; self.gens.len()];
            self.enumerate(0, t, 0, &mut exps, &mut |exps, wsum| {
                let tau = wsum - w;
                if tau < 0 || (tau > 0 && self.grading != Grading::Motivic) {
                    return;
                }
                out.push(Monomial { tau: tau as u32, exps: exps.to_vec() });
            });
        }
        out.sort_by(|a, b| a.tau.cmp(&b.tau).then_with(|| b.exps.cmp(&a.exps)));
        let out = Arc::new(out);
        self.basis_cache.write().unwrap().insert((t, w), out.clone());
        out
    }

    /// `τ`-free, normalized monomials of internal degree `t`, any weight.
    pub fn monomials_of_degree(&self, t: i32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if t >= 0 {
            let mut exps = vec![0u32; self.gens.len()];
            self.enumerate(0, t, 0, &mut exps, &mut |exps, _| out.push(Monomial { tau: 0, exps: exps.to_vec() }));
        }
        out.sort_by(|a, b| self.degree(a).1.cmp(&self.degree(b).1).then_with(|| b.exps.cmp(&a.exps)));
        out
    }

    /// Exponent vectors of normal forms with exact internal degree `t`.
    fn enumerate(&self, i: usize, t: i32, wsum: i32, exps: &mut Vec<u32>, emit: &mut dyn FnMut(&[u32], i32)) {
        if i == self.gens.len() {
            if t == 0 {
                emit(exps, wsum);
            }
            return;
        }
        let g = &self.gens[i];
        let mut max = (t / g.degree) as u32;
        if g.square.is_some() {
            max = max.min(1);
        }
        if let Some(k) = g.trunc {
            max = max.min(k - 1);
        }
        for e in 0..=max {
            exps[i] = e;
            self.enumerate(i + 1, t - g.degree * e as i32, wsum + g.weight * e as i32, exps, emit);
        }
        exps[i] = 0;
    }

    /// True when the algebra is finite over its ground ring.
    pub fn is_finite(&self) -> bool {
        self.gens.iter().all(|g| g.trunc.is_some() || g.square.is_some_and(|j| self.gens[j].trunc.is_some()))
    }

    /// Largest internal degree of a nonzero `τ`-free monomial, if finite.
    pub fn top_degree(&self) -> Option<i32> {
        if !self.is_finite() {
            return None;
        }
        Some(
            self.gens
                .iter()
                .map(|g| {
                    let top = if g.square.is_some() { 1 } else { g.trunc.unwrap() - 1 };
                    g.degree * top as i32
                })
                .sum(),
        )
    }

    /// The quotient by `τ`: square relations become `τ_i^2 = 0`, over F2.
    pub fn mod_tau(&self) -> HopfPresentation {
        assert_eq!(self.grading, Grading::Motivic, "mod_tau needs a motivic presentation");
        let gens = self
            .gens
            .iter()
            .map(|g| Generator {
                trunc: if g.square.is_some() { Some(g.trunc.map_or(2, |k| k.min(2))) } else { g.trunc },
                square: None,
                ..g.clone()
            })
            .collect();
        HopfPresentation::new(format!("{}/tau", self.name), Grading::Weighted, gens)
            .expect("reducing a valid presentation modulo tau stays valid")
    }

    /// The `τ`-free primitives `ζ_1^{2^j}`, `τ_0`, `ξ_1^{2^j}` of internal
    /// degree at most `max_t`, named by the Ext class they detect.
    pub fn primitives(&self, max_t: i32) -> Vec<(String, Monomial)> {
        let mut out = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let (shift, base) = match g.kind {
                GenKind::Zeta(1) => (0, true),
                GenKind::Xi(1) => (1, true),
                GenKind::Tau(0) => (0, false),
                _ => continue,
            };
            let mut j = 0u32;
            while g.degree << j <= max_t {
                let Some(m) = self.gen_power(i, 1 << j) else { break };
                if m.tau > 0 || !self.reduced_coproduct(&m).is_empty() {
                    break;
                }
                out.push((format!("h{}", j + shift), m));
                if !base {
                    break;
                }
                j += 1;
            }
        }
        out.sort_by_key(|(_, m)| self.degree(m));
        out
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        if m.tau > 0 {
            parts.push(if m.tau == 1 { "tau".to_string() } else { format!("tau^{}", m.tau) });
        }
        for (g, &e) in self.gens.iter().zip(&m.exps) {
            match e {
                0 => {}
                1 => parts.push(g.name.clone()),
                _ => parts.push(format!("{}^{e}", g.name)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Parses the output of [`HopfPresentation::format_monomial`].
    pub fn parse_monomial(&self, s: &str) -> Result<Monomial> {
        let mut m = self.one();
        if s == "1" {
            return Ok(m);
        }
        for part in s.split('*') {
            let (name, e) = match part.split_once('^') {
                Some((n, e)) => (n, e.parse::<u32>().map_err(|_| Error::Usage(format!("bad exponent in {part}")))?),
                None => (part, 1),
            };
            if name == "tau" {
                m.tau += e;
            } else {
                let i = self
                    .gens
                    .iter()
                    .position(|g| g.name == name)
                    .ok_or_else(|| Error::Usage(format!("unknown generator {name}")))?;
                m.exps[i] += e;
            }
        }
        Ok(m)
    }
}

/// Betti realization `τ_i ↦ ζ_{i+1}`, `ξ_j ↦ ζ_j^2`, `τ ↦ 1` from a motivic
/// presentation into a classical one. `None` if the image vanishes.
pub fn betti_realize(src: &HopfPresentation, dst: &HopfPresentation, m: &Monomial) -> Result<Option<Monomial>> {
    if dst.grading() != Grading::Classical {
        return Err(Error::Usage("Betti realization targets a classical presentation".into()));
    }
    let mut out = Monomial::one(dst.ngens());
    for (g, &e) in src.generators().iter().zip(&m.exps) {
        if e == 0 {
            continue;
        }
        let (k, mult) = match g.kind {
            GenKind::Tau(i) => (i + 1, 1),
            GenKind::Xi(j) => (j, 2),
            GenKind::Zeta(_) => return Err(Error::Usage("source is not motivic".into())),
        };
        let Some(idx) = dst.gen_index(GenKind::Zeta(k)) else {
            return Ok(None);
        };
        out.exps[idx] += e * mult;
    }
    Ok(dst.normalize(out))
}
