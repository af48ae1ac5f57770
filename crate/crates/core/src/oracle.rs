//! Hilbert functions of graded quotients of polynomial rings over F2.
//!
//! Used as an independent oracle for Ext dimensions of small algebras whose
//! cohomology ring has a known presentation. A Gröbner basis is computed by
//! Buchberger's algorithm for the degree-lexicographic order, and standard
//! monomials are counted per degree.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::hopf::TriDegree;
use crate::{Error, Result};

type Mono = Vec<u32>;

/// A monomial keyed by its term order: filtration degree first, then the
/// monomial with the smaller exponent at the first differing generator is
/// larger. This makes `a^2` and `u^2` the leading terms of the quadratic
/// relations, so standard monomials carry the conventional names `Ph0^2`
/// and `h1^2g`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Term {
    weight: u32,
    exps: Mono,
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight.cmp(&other.weight).then_with(|| {
            let diff = self.exps.iter().zip(&other.exps).find(|(x, y)| x != y);
            diff.map_or(Ordering::Equal, |(x, y)| y.cmp(x))
        })
    }
}

#[derive(Clone, Debug)]
struct Poly {
    weights: Vec<u32>,
    terms: BTreeSet<Term>,
}

impl Poly {
    fn zero(weights: &[u32]) -> Self {
        Poly { weights: weights.to_vec(), terms: BTreeSet::new() }
    }

    fn lead(&self) -> Option<&Mono> {
        self.terms.iter().next_back().map(|t| &t.exps)
    }

    fn add_term(&mut self, exps: Mono) {
        let weight = exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum();
        let t = Term { weight, exps };
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
    }

    fn add(&mut self, other: &Poly) {
        for t in &other.terms {
            self.add_term(t.exps.clone());
        }
    }

    fn times_mono(&self, m: &Mono) -> Poly {
        let mut out = Poly::zero(&self.weights);
        for t in &self.terms {
            out.add_term(t.exps.iter().zip(m).map(|(a, b)| a + b).collect());
        }
        out
    }
}

fn divides(a: &Mono, b: &Mono) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn quotient(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn reduce(mut p: Poly, basis: &[Poly]) -> Poly {
    let mut rem = Poly::zero(&p.weights);
    while let Some(lt) = p.lead().cloned() {
        if let Some(g) = basis.iter().find(|g| divides(g.lead().unwrap(), &lt)) {
            let q = quotient(&lt, g.lead().unwrap());
            p.add(&g.times_mono(&q));
        } else {
            p.add_term(lt.clone());
            rem.add_term(lt);
        }
    }
    rem
}

/// `F2[x_1..x_n] / (relations)` with trigraded generators.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    names: Vec<String>,
    degrees: Vec<TriDegree>,
    leads: Vec<Mono>,
}

impl QuotientRing {
    /// `relations` are sums of monomials written like `h0*h1`, `a^2 + P*h0^2`.
    pub fn new(gens: &[(&str, TriDegree)], relations: &[&str]) -> Result<Self> {
        let names: Vec<String> = gens.iter().map(|g| g.0.to_string()).collect();
        let parse_mono = |s: &str| -> Result<Mono> {
            let mut m = vec![0; names.len()];
            for factor in s.split('*') {
                let factor = factor.trim();
                let (n, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse().map_err(|_| Error::Usage(format!("bad exponent {factor}")))?),
                    None => (factor, 1),
                };
                let i = names.iter().position(|x| x == n).ok_or_else(|| Error::Usage(format!("unknown generator {n}")))?;
                m[i] += e;
            }
            Ok(m)
        };
        let weights: Vec<u32> = gens.iter().map(|g| g.1.f as u32).collect();
        assert!(weights.iter().all(|&w| w > 0), "generators need positive filtration");
        let mut polys = Vec::new();
        for r in relations {
            let mut p = Poly::zero(&weights);
            for term in r.split('+') {
                p.add_term(parse_mono(term)?);
            }
            polys.push(p);
        }
        let basis = groebner(polys);
        Ok(QuotientRing { names, degrees: gens.iter().map(|g| g.1).collect(), leads: basis.iter().map(|p| p.lead().unwrap().clone()).collect() })
    }

    /// Standard monomials with every degree inside `keep`, grouped by degree.
    /// `keep` must be monotone: if it rejects a degree it rejects every
    /// degree of a multiple (all generators have positive filtration).
    pub fn standard_monomials(&self, max_filtration: i32, keep: impl Fn(TriDegree) -> bool) -> BTreeMap<TriDegree, Vec<String>> {
        let mut out: BTreeMap<TriDegree, Vec<String>> = BTreeMap::new();
        let mut exps = vec![0u32; self.names.len()];
        self.walk(0, TriDegree::default(), max_filtration, &keep, &mut exps, &mut out);
        out
    }

    fn walk(
        &self,
        i: usize,
        d: TriDegree,
        max_f: i32,
        keep: &impl Fn(TriDegree) -> bool,
        exps: &mut Mono,
        out: &mut BTreeMap<TriDegree, Vec<String>>,
    ) {
        if self.leads.iter().any(|l| divides(l, exps)) {
            return;
        }
        if i == self.names.len() {
            if keep(d) {
                out.entry(d).or_default().push(self.format(exps));
            }
            return;
        }
        let mut d = d;
        loop {
            self.walk(i + 1, d, max_f, keep, exps, out);
            exps[i] += 1;
            d = d + self.degrees[i];
            if d.f > max_f || self.leads.iter().any(|l| divides(l, exps)) || !self.could_reach(d, keep) {
                break;
            }
        }
        exps[i] = 0;
    }

    /// Pruning: once a degree is out of range for stem or coweight, adding
    /// generators with non-negative stem and coweight keeps it out.
    fn could_reach(&self, d: TriDegree, keep: &impl Fn(TriDegree) -> bool) -> bool {
        keep(d) || d.s <= 0
    }

    pub fn format(&self, exps: &[u32]) -> String {
        let mut s = String::new();
        for (n, &e) in self.names.iter().zip(exps) {
            match e {
                0 => {}
                1 => s.push_str(n),
                _ => s.push_str(&format!("{n}^{e}")),
            }
        }
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    }
}

fn groebner(mut basis: Vec<Poly>) -> Vec<Poly> {
    basis.retain(|p| p.lead().is_some());
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (li, lj) = (basis[i].lead().unwrap().clone(), basis[j].lead().unwrap().clone());
        let l = lcm(&li, &lj);
        if l.iter().zip(li.iter().zip(&lj)).all(|(x, (a, b))| *x == a + b) {
            continue; // coprime leading terms
        }
        let mut s = basis[i].times_mono(&quotient(&l, &li));
        s.add(&basis[j].times_mono(&quotient(&l, &lj)));
        let r = reduce(s, &basis);
        if r.lead().is_some() {
            let k = basis.len();
            basis.push(r);
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    basis
}

/// `F2[h0, h1, a, P]/(h0h1, h1^3, h1a, a^2 + Ph0^2)`, the cohomology of `A^cl(1)`.
pub fn acl1_ring() -> QuotientRing {
    QuotientRing::new(
        &[
            ("P", TriDegree::classical(8, 4)),
            ("h0", TriDegree::classical(0, 1)),
            ("h1", TriDegree::classical(1, 1)),
            ("a", TriDegree::classical(4, 3)),
        ],
        &["h0*h1", "h1^3", "h1*a", "a^2 + P*h0^2"],
    )
    .expect("valid presentation")
}

/// `F2[h1, h2, u, g]/(h1h2, h2^3, h2u, u^2 + h1^2g)`, the Chow-degree-zero
/// part of the cohomology of motivic `A(2)`.
pub fn a2_chow0_ring() -> QuotientRing {
    QuotientRing::new(
        &[
            ("h1", TriDegree::new(1, 1, 1)),
            ("h2", TriDegree::new(3, 1, 2)),
            ("u", TriDegree::new(11, 3, 7)),
            ("g", TriDegree::new(20, 4, 12)),
        ],
        &["h1*h2", "h2^3", "h2*u", "u^2 + h1^2*g"],
    )
    .expect("valid presentation")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_ring_counts() {
        let r = QuotientRing::new(&[("x", TriDegree::classical(1, 1)), ("y", TriDegree::classical(2, 1))], &[]).unwrap();
        let m = r.standard_monomials(6, |d| d.s <= 6);
        // Monomials x^a y^b with a + 2b = s and a + b = f.
        assert_eq!(m[&TriDegree::classical(4, 3)], vec!["x^2y"]);
        assert_eq!(m.values().map(Vec::len).sum::<usize>(), 16);
    }

    #[test]
    fn acl1_has_rank_at_most_one() {
        let m = acl1_ring().standard_monomials(20, |d| d.s <= 40);
        assert!(m.values().all(|v| v.len() == 1));
        assert_eq!(m[&TriDegree::classical(8, 5)], vec!["Ph0"]);
        assert_eq!(m[&TriDegree::classical(4, 4)], vec!["h0a"]);
        assert_eq!(m[&TriDegree::classical(8, 6)], vec!["Ph0^2"]);
        assert!(!m.contains_key(&TriDegree::classical(1, 2)));
        assert!(!m.contains_key(&TriDegree::classical(3, 3)));
    }

    #[test]
    fn quadratic_relation_leads() {
        // The leading term of u^2 + h1^2 g is u^2; the S-polynomial with h2u
        // reduces to h1^2 h2 g = 0, so no new relation appears.
        let m = a2_chow0_ring().standard_monomials(12, |d| d.coweight() <= 30);
        assert!(m.values().all(|v| v.len() == 1));
        assert_eq!(m[&TriDegree::new(22, 6, 14)], vec!["h1^2g"]);
    }
}
