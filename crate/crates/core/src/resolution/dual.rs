//! The algebra dual to a finite presentation: `e_a · e_b = Σ_m c_m e_m`,
//! where `c_m` is the coefficient of `a ⊗ b` in `ψ(m)`.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Deg, GradedAlgebra, Product};
use crate::hopf::{Grading, HopfPresentation, Monomial};
use crate::{Error, Result};

pub struct DualAlgebra {
    p: HopfPresentation,
    top: i32,
    basis: HashMap<Deg, Vec<Monomial>>,
    position: HashMap<Monomial, (Deg, usize)>,
    table: HashMap<(Deg, usize, Deg, usize), Product>,
    empty: Product,
}

impl DualAlgebra {
    pub fn new(p: &HopfPresentation) -> Result<Self> {
        if p.grading() == Grading::Motivic {
            return Err(Error::Usage(format!("{} is motivic; reduce modulo tau first", p.name())));
        }
        let top = p.top_degree().ok_or_else(|| Error::Usage(format!("{} is not finite", p.name())))?;
        let mut basis: HashMap<Deg, Vec<Monomial>> = HashMap::new();
        let mut position = HashMap::new();
        for t in 0..=top {
            for w in 0..=t {
                let b = p.monomial_basis(t, w);
                if b.is_empty() {
                    continue;
                }
                for (i, m) in b.iter().enumerate() {
                    position.insert(m.clone(), ((t, w), i));
                }
                basis.insert((t, w), b.to_vec());
            }
        }
        let mut acc: HashMap<(Deg, usize, Deg, usize), Vec<u32>> = HashMap::new();
        for (&d, ms) in &basis {
            for (k, m) in ms.iter().enumerate() {
                for x in p.coproduct(m) {
                    let (dl, il) = position[&x.left];
                    let (dr, ir) = position[&x.right];
                    debug_assert_eq!((dl.0 + dr.0, dl.1 + dr.1), d);
                    acc.entry((dl, il, dr, ir)).or_default().push(k as u32);
                }
            }
        }
        let table = acc
            .into_iter()
            .map(|(key, mut v)| {
                v.sort_unstable();
                (key, Arc::from(v))
            })
            .collect();
        Ok(DualAlgebra { p: p.clone(), top, basis, position, table, empty: Arc::from(Vec::new()) })
    }

    pub fn presentation(&self) -> &HopfPresentation {
        &self.p
    }
}

impl GradedAlgebra for DualAlgebra {
    fn name(&self) -> String {
        self.p.name().to_string()
    }

    fn grading(&self) -> Grading {
        self.p.grading()
    }

    fn max_degree(&self) -> i32 {
        self.top
    }

    fn weights(&self, t: i32) -> Vec<i32> {
        (0..=t.max(0)).filter(|&w| self.basis.contains_key(&(t, w))).collect()
    }

    fn dim(&self, d: Deg) -> usize {
        self.basis.get(&d).map_or(0, Vec::len)
    }

    fn multiply(&self, a: Deg, i: usize, b: Deg, j: usize) -> Product {
        self.table.get(&(a, i, b, j)).cloned().unwrap_or_else(|| self.empty.clone())
    }

    fn basis_name(&self, d: Deg, i: usize) -> String {
        format!("[{}]", self.p.format_monomial(&self.basis[&d][i]))
    }

    fn parse_basis_name(&self, d: Deg, s: &str) -> Result<usize> {
        let inner = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(|| Error::Usage(format!("bad dual basis name {s}")))?;
        let m = self.p.parse_monomial(inner)?;
        match self.position.get(&m) {
            Some(&(dd, i)) if dd == d => Ok(i),
            _ => Err(Error::Usage(format!("{s} is not a basis element in degree {d:?}"))),
        }
    }

    fn indecomposables(&self) -> Vec<(String, Deg, usize)> {
        self.p
            .primitives(self.top)
            .into_iter()
            .map(|(name, m)| {
                let (d, i) = self.position[&m];
                (name, d, i)
            })
            .collect()
    }
}
