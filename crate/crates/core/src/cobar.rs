//! The reduced cobar complex of a preset coalgebra and its homology.
//!
//! A slice `(f, t, w)` has basis `τ^k [a_1|...|a_f]` with every `a_i` a
//! `τ`-free monomial of positive degree, `Σ deg a_i = t` and
//! `Σ wt a_i - k = w`. The differential is
//! `d[a_1|...|a_f] = Σ_i [a_1|...|ψ̃(a_i)|...|a_f]`, and `H^f` of a column
//! `(t, w)` is the Ext group in degree `(t - f, f, w)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use log::{debug, info};
use rayon::prelude::*;

use crate::chart::{ChartBounds, Class, ExtChart, ExtEngine, MasseyCoset};
use crate::f2linalg::{image_and_kernel, BitMatrixF2, BitVec, Subquotient, Subspace};
use crate::hopf::{Grading, HopfPresentation, Monomial, TriDegree};
use crate::names::assign_names;
use crate::{Error, Result};

/// Refusal thresholds, checked against counts computed before allocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CobarBudget {
    /// Largest slice, in basis elements.
    pub max_slice: u64,
    /// Largest dense differential, in bits.
    pub max_dense_bits: u64,
}

impl Default for CobarBudget {
    fn default() -> Self {
        CobarBudget { max_slice: 2_000_000, max_dense_bits: 1 << 33 }
    }
}

/// A basis slice of the cobar complex.
#[derive(Clone, Debug)]
pub struct CobarSlice {
    pub f: usize,
    pub t: i32,
    pub w: i32,
    /// Monomial indices of each tensor, in the complex's monomial list.
    tensors: Vec<Box<[u32]>>,
    index: HashMap<Box<[u32]>, usize>,
}

impl CobarSlice {
    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn position(&self, tensor: &[u32]) -> Option<usize> {
        self.index.get(tensor).copied()
    }
}

/// Largest slice and differential a computation would touch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CobarEstimate {
    pub largest_slice: u64,
    pub total_basis: u64,
    pub largest_dense_bits: u64,
}

pub struct CobarComplex {
    p: HopfPresentation,
    max_t: i32,
    monos: Vec<Monomial>,
    weights: Vec<i32>,
    by_t: Vec<Vec<u32>>,
    /// Reduced coproduct of each monomial as `(τ power, left, right)`.
    coproducts: Vec<Vec<(u32, u32, u32)>>,
    /// `counts[f][t][ws]`: number of `f`-tensors of degree `t` and weight sum `ws`.
    counts: Vec<Vec<Vec<u64>>>,
    max_f: usize,
    budget: CobarBudget,
}

impl CobarComplex {
    /// The complex in internal degrees `t ≤ max_t` and filtrations `f ≤ max_f`.
    pub fn new(p: &HopfPresentation, max_t: i32, max_f: usize, budget: CobarBudget) -> Self {
        let mut monos = Vec::new();
        let mut by_t = vec![Vec::new(); max_t.max(0) as usize + 1];
        for t in 1..=max_t {
            for m in p.monomials_of_degree(t) {
                by_t[t as usize].push(monos.len() as u32);
                monos.push(m);
            }
        }
        let index: HashMap<&Monomial, u32> = monos.iter().enumerate().map(|(i, m)| (m, i as u32)).collect();
        let coproducts = monos
            .par_iter()
            .map(|m| {
                p.reduced_coproduct(m)
                    .into_iter()
                    .map(|x| (x.tau, index[&x.left], index[&x.right]))
                    .collect::<Vec<_>>()
            })
            .collect();
        let weights: Vec<i32> = monos.iter().map(|m| p.degree(m).1).collect();
        let mut c = CobarComplex {
            p: p.clone(),
            max_t,
            monos,
            weights,
            by_t,
            coproducts,
            counts: Vec::new(),
            max_f,
            budget,
        };
        c.counts = c.count_table();
        c
    }

    pub fn presentation(&self) -> &HopfPresentation {
        &self.p
    }

    pub fn max_t(&self) -> i32 {
        self.max_t
    }

    fn count_table(&self) -> Vec<Vec<Vec<u64>>> {
        let tn = self.max_t.max(0) as usize + 1;
        // Every generator has weight below its degree.
        let max_ws = tn;
        let mut counts = vec![vec![vec![0u64; max_ws + 1]; tn]; self.max_f + 2];
        counts[0][0][0] = 1;
        for f in 1..counts.len() {
            for t in 1..tn {
                for (dt, ids) in self.by_t.iter().enumerate().take(t + 1).skip(1) {
                    for &m in ids {
                        let wm = self.weights[m as usize] as usize;
                        for ws in wm..=max_ws {
                            let prev = counts[f - 1][t - dt][ws - wm];
                            if prev > 0 {
                                counts[f][t][ws] = counts[f][t][ws].saturating_add(prev);
                            }
                        }
                    }
                }
            }
        }
        counts
    }

    fn motivic(&self) -> bool {
        self.p.grading() == Grading::Motivic
    }

    /// Predicted size of slice `(f, t, w)`.
    pub fn slice_size(&self, f: usize, t: i32, w: i32) -> u64 {
        if t < 0 || t > self.max_t || f >= self.counts.len() {
            return 0;
        }
        let row = &self.counts[f][t as usize];
        if w < 0 && !self.motivic() {
            return 0;
        }
        if self.motivic() {
            row.iter().skip(w.max(0) as usize).fold(0u64, |a, &b| a.saturating_add(b))
        } else {
            row.get(w as usize).copied().unwrap_or(0)
        }
    }

    /// The τ power of a tensor in a slice of weight `w`.
    fn tau_power(&self, tensor: &[u32], w: i32) -> i32 {
        tensor.iter().map(|&m| self.weights[m as usize]).sum::<i32>() - w
    }

    pub fn slice(&self, f: usize, t: i32, w: i32) -> Result<CobarSlice> {
        let n = self.slice_size(f, t, w);
        if n > self.budget.max_slice {
            return Err(Error::Budget(format!("cobar slice ({f},{t},{w}) has {n} basis elements, cap {}", self.budget.max_slice)));
        }
        let mut tensors = Vec::with_capacity(n as usize);
        let mut cur = Vec::with_capacity(f);
        self.enumerate(f, t, w, &mut cur, &mut tensors);
        debug_assert_eq!(tensors.len() as u64, n);
        let index = tensors.iter().enumerate().map(|(i, x): (usize, &Box<[u32]>)| (x.clone(), i)).collect();
        Ok(CobarSlice { f, t, w, tensors, index })
    }

    fn reachable(&self, f: usize, t: i32, need_ws: i32) -> bool {
        if t < 0 {
            return false;
        }
        let row = &self.counts[f][t as usize];
        if self.motivic() {
            row.iter().skip(need_ws.max(0) as usize).any(|&c| c > 0)
        } else {
            need_ws >= 0 && row.get(need_ws as usize).is_some_and(|&c| c > 0)
        }
    }

    fn enumerate(&self, f: usize, t: i32, w: i32, cur: &mut Vec<u32>, out: &mut Vec<Box<[u32]>>) {
        if f == 0 {
            let ok = if self.motivic() { w <= 0 } else { w == 0 };
            if t == 0 && ok {
                out.push(cur.clone().into_boxed_slice());
            }
            return;
        }
        for dt in 1..=t {
            for &m in &self.by_t[dt as usize] {
                let wm = self.weights[m as usize];
                if !self.reachable(f - 1, t - dt, w - wm) {
                    continue;
                }
                cur.push(m);
                self.enumerate(f - 1, t - dt, w - wm, cur, out);
                cur.pop();
            }
        }
    }

    /// Images under `d` of the basis of `src`, as vectors over `dst`.
    pub fn differential_images(&self, src: &CobarSlice, dst: &CobarSlice) -> Result<Vec<BitVec>> {
        if src.t != dst.t || src.w != dst.w || src.f + 1 != dst.f {
            return Err(Error::Usage(format!(
                "cobar differential between mismatched slices ({},{},{}) and ({},{},{})",
                src.f, src.t, src.w, dst.f, dst.t, dst.w
            )));
        }
        let bits = src.len() as u64 * dst.len() as u64;
        if bits > self.budget.max_dense_bits {
            return Err(Error::Budget(format!("cobar differential at ({},{},{}) needs {bits} bits", src.f, src.t, src.w)));
        }
        let w = src.w;
        let images = src
            .tensors
            .par_iter()
            .map(|a| {
                let k = self.tau_power(a, w);
                let mut v = BitVec::zeros(dst.len());
                let mut buf: Vec<u32> = Vec::with_capacity(a.len() + 1);
                for i in 0..a.len() {
                    for &(tau, l, r) in &self.coproducts[a[i] as usize] {
                        if tau > 0 && !self.motivic() {
                            continue;
                        }
                        buf.clear();
                        buf.extend_from_slice(&a[..i]);
                        buf.push(l);
                        buf.push(r);
                        buf.extend_from_slice(&a[i + 1..]);
                        debug_assert_eq!(self.tau_power(&buf, w), k + tau as i32);
                        let j = dst.position(&buf).expect("coproduct term lies in the target slice");
                        v.flip(j);
                    }
                }
                v
            })
            .collect();
        Ok(images)
    }

    /// The differential as a matrix with one column per source basis element.
    pub fn differential(&self, src: &CobarSlice, dst: &CobarSlice) -> Result<BitMatrixF2> {
        Ok(BitMatrixF2::from_columns(dst.len(), &self.differential_images(src, dst)?))
    }

    /// Sizes of every slice needed to compute `H^f` over the given columns.
    pub fn estimate(&self, columns: &[(i32, i32, usize, usize)]) -> CobarEstimate {
        let mut e = CobarEstimate::default();
        for &(t, w, lo, hi) in columns {
            for f in lo.saturating_sub(1)..=hi + 1 {
                let n = self.slice_size(f, t, w);
                e.largest_slice = e.largest_slice.max(n);
                e.total_basis = e.total_basis.saturating_add(n);
                if f <= hi {
                    let bits = n.saturating_mul(self.slice_size(f + 1, t, w));
                    e.largest_dense_bits = e.largest_dense_bits.max(bits);
                }
            }
        }
        e
    }

    /// Concatenation `[x|y]` of cocycles, as a vector over `dst`.
    fn concat(&self, x: (&CobarSlice, &BitVec), y: (&CobarSlice, &BitVec), dst: &CobarSlice) -> BitVec {
        let mut out = BitVec::zeros(dst.len());
        let mut buf = Vec::new();
        for i in x.1.iter_ones() {
            for j in y.1.iter_ones() {
                buf.clear();
                buf.extend_from_slice(&x.0.tensors[i]);
                buf.extend_from_slice(&y.0.tensors[j]);
                out.flip(dst.position(&buf).expect("concatenation lies in the target slice"));
            }
        }
        out
    }

    /// Human-readable form of a cochain.
    pub fn format_cochain(&self, slice: &CobarSlice, v: &BitVec) -> String {
        let terms: Vec<String> = v
            .iter_ones()
            .map(|i| {
                let t = &slice.tensors[i];
                let k = self.tau_power(t, slice.w);
                let body: Vec<String> = t.iter().map(|&m| self.p.format_monomial(&self.monos[m as usize])).collect();
                let tau = match k {
                    0 => String::new(),
                    1 => "tau ".into(),
                    _ => format!("tau^{k} "),
                };
                format!("{tau}[{}]", body.join("|"))
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Every basis tensor of a slice, formatted.
    pub fn tensors(&self, slice: &CobarSlice) -> Vec<String> {
        (0..slice.len()).map(|i| self.format_cochain(slice, &BitVec::unit(slice.len(), i))).collect()
    }
}

/// `d_f` in one column: image inside `C^{f+1}` (tagged by `C^f`) and kernel.
struct DiffData {
    image: Subspace,
    kernel: Vec<BitVec>,
}

/// Cobar-backed Ext with products and Massey products.
pub struct CobarExt {
    complex: CobarComplex,
    chart: ExtChart,
    slices: Mutex<HashMap<(usize, i32, i32), Arc<CobarSlice>>>,
    diffs: Mutex<HashMap<(usize, i32, i32), Arc<DiffData>>>,
    homology: Mutex<HashMap<(usize, i32, i32), Arc<Subquotient>>>,
}

impl CobarExt {
    pub fn complex(&self) -> &CobarComplex {
        &self.complex
    }

    fn slice(&self, f: usize, t: i32, w: i32) -> Result<Arc<CobarSlice>> {
        if let Some(s) = self.slices.lock().unwrap().get(&(f, t, w)) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.complex.slice(f, t, w)?);
        self.slices.lock().unwrap().insert((f, t, w), s.clone());
        Ok(s)
    }

    fn diff(&self, f: usize, t: i32, w: i32) -> Result<Arc<DiffData>> {
        if let Some(d) = self.diffs.lock().unwrap().get(&(f, t, w)) {
            return Ok(d.clone());
        }
        let src = self.slice(f, t, w)?;
        let dst = self.slice(f + 1, t, w)?;
        let images = self.complex.differential_images(&src, &dst)?;
        let (image, kernel) = image_and_kernel(dst.len(), &images);
        let d = Arc::new(DiffData { image, kernel });
        self.diffs.lock().unwrap().insert((f, t, w), d.clone());
        Ok(d)
    }

    fn check_degree(&self, d: TriDegree) -> Result<()> {
        let t = d.t();
        if d.f < 0 || d.s < 0 || t > self.complex.max_t || d.f as usize > self.complex.max_f {
            return Err(Error::Range(format!("{d} is outside the cobar complex built up to t = {}", self.complex.max_t)));
        }
        Ok(())
    }

    /// `H^f` in column `(t, w)`.
    fn homology(&self, d: TriDegree) -> Result<Arc<Subquotient>> {
        self.check_degree(d)?;
        let key = (d.f as usize, d.t(), d.w);
        if let Some(h) = self.homology.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let (f, t, w) = key;
        let n = self.slice(f, t, w)?.len();
        let cycles = self.diff(f, t, w)?.kernel.clone();
        let boundaries: Vec<BitVec> = if f == 0 { Vec::new() } else { self.diff(f - 1, t, w)?.image.basis().cloned().collect() };
        let h = Arc::new(Subquotient::new(n, &cycles, &boundaries));
        self.homology.lock().unwrap().insert(key, h.clone());
        Ok(h)
    }

    /// A cocycle representing `x`.
    pub fn representative(&self, x: &Class) -> Result<BitVec> {
        let h = self.homology(x.degree)?;
        if x.coords.len() != h.dim() {
            return Err(Error::Usage(format!("class at {} has {} coordinates, group has dimension {}", x.degree, x.coords.len(), h.dim())));
        }
        Ok(h.lift(&x.coords))
    }

    /// Class of a cocycle in degree `d`.
    fn class_of(&self, d: TriDegree, v: &BitVec) -> Result<Class> {
        let h = self.homology(d)?;
        let coords = h.coordinates(v).ok_or_else(|| Error::Consistency(format!("cochain at {d} is not a cocycle")))?;
        Ok(Class { degree: d, coords })
    }

    fn slice_of(&self, d: TriDegree) -> Result<Arc<CobarSlice>> {
        self.slice(d.f as usize, d.t(), d.w)
    }

    /// `[x|y]` as a cochain in the product degree.
    fn concat(&self, x: &Class, xv: &BitVec, y: &Class, yv: &BitVec) -> Result<(TriDegree, BitVec)> {
        let d = x.degree + y.degree;
        self.check_degree(d)?;
        let v = self.complex.concat((&*self.slice_of(x.degree)?, xv), (&*self.slice_of(y.degree)?, yv), &*self.slice_of(d)?);
        Ok((d, v))
    }

    /// Some `u` with `du = b`, for a coboundary `b` in degree `d`.
    fn primitive(&self, d: TriDegree, b: &BitVec) -> Result<(TriDegree, BitVec)> {
        let below = d + TriDegree::new(1, -1, 0);
        if d.f == 0 {
            return if b.is_zero() { Ok((below, BitVec::zeros(0))) } else { Err(Error::Undefined(format!("nonzero cochain at {d} is not a coboundary"))) };
        }
        self.check_degree(below)?;
        let data = self.diff(below.f as usize, below.t(), below.w)?;
        let u = data.image.express(b).ok_or_else(|| Error::Undefined(format!("product at {d} is not a coboundary")))?;
        Ok((below, u))
    }

    /// The Ext bidegrees computed for the chart.
    pub fn chart_mut(&mut self) -> &mut ExtChart {
        &mut self.chart
    }
}

impl ExtEngine for CobarExt {
    fn chart(&self) -> &ExtChart {
        &self.chart
    }

    fn dim(&self, d: TriDegree) -> Result<usize> {
        if self.chart.bounds.contains(d) {
            return Ok(self.chart.dim(d));
        }
        Ok(self.homology(d)?.dim())
    }

    fn product(&self, x: &Class, y: &Class) -> Result<Class> {
        let (xv, yv) = (self.representative(x)?, self.representative(y)?);
        let (d, v) = self.concat(x, &xv, y, &yv)?;
        self.class_of(d, &v)
    }

    fn massey(&self, x: &Class, y: &Class, z: &Class) -> Result<MasseyCoset> {
        let (xv, yv, zv) = (self.representative(x)?, self.representative(y)?, self.representative(z)?);
        let (dxy, xy) = self.concat(x, &xv, y, &yv)?;
        let (dyz, yz) = self.concat(y, &yv, z, &zv)?;
        let (du, u) = self.primitive(dxy, &xy)?;
        let (dv, v) = self.primitive(dyz, &yz)?;
        let target = du + z.degree;
        self.check_degree(target)?;
        let dst = self.slice_of(target)?;
        let mut value = BitVec::zeros(dst.len());
        if du.f > 0 {
            value.xor_assign(&self.complex.concat((&*self.slice_of(du)?, &u), (&*self.slice_of(z.degree)?, &zv), &dst));
        }
        if dv.f > 0 {
            value.xor_assign(&self.complex.concat((&*self.slice_of(x.degree)?, &xv), (&*self.slice_of(dv)?, &v), &dst));
        }
        let class = self.class_of(target, &value)?;
        let indeterminacy = self.massey_indeterminacy(x, y, z)?;
        Ok(MasseyCoset::new(target, class.coords, &indeterminacy))
    }
}

/// Columns `(t, w)` with the filtration range `lo..=hi` that meets `bounds`.
fn columns_for(p: &HopfPresentation, bounds: &ChartBounds) -> Result<Vec<(i32, i32, usize, usize)>> {
    let (s_max, f_max) = (bounds.max_stem, bounds.max_filtration);
    let motivic = p.grading() == Grading::Motivic;
    if motivic && bounds.max_coweight.is_none() && bounds.chow.is_none() {
        return Err(Error::Usage("motivic cobar computations need a coweight or Chow bound".into()));
    }
    let mut out = Vec::new();
    for t in 0..=(s_max + f_max) {
        let w_hi = match p.grading() {
            Grading::Classical => 0,
            _ => t,
        };
        let w_lo = match p.grading() {
            Grading::Classical => 0,
            Grading::Weighted => 0,
            Grading::Motivic => {
                let mut lo = i32::MIN;
                if let Some(c) = bounds.max_coweight {
                    lo = lo.max(t - f_max - c);
                }
                if let Some((_, hi)) = bounds.chow {
                    lo = lo.max((t - hi + 1).div_euclid(2));
                }
                lo
            }
        };
        for w in w_lo..=w_hi {
            let fs: Vec<usize> =
                (0..=f_max).filter(|&f| bounds.contains(TriDegree::new(t - f, f, w))).map(|f| f as usize).collect();
            if let (Some(&lo), Some(&hi)) = (fs.first(), fs.last()) {
                out.push((t, w, lo, hi));
            }
        }
    }
    Ok(out)
}

/// Ext over `p` in the region `bounds`, with `h_j` product tables.
pub fn ext_compute(p: &HopfPresentation, bounds: ChartBounds, budget: CobarBudget) -> Result<CobarExt> {
    let max_t = bounds.max_stem + bounds.max_filtration + 1;
    let complex = CobarComplex::new(p, max_t, bounds.max_filtration as usize + 1, budget);
    let mut columns = columns_for(p, &bounds)?;
    columns.retain(|&(t, w, lo, hi)| (lo..=hi).any(|f| complex.slice_size(f, t, w) > 0));
    let est = complex.estimate(&columns);
    info!(
        "cobar {}: {} columns, largest slice {}, total basis {}, largest differential {} bits",
        p.name(),
        columns.len(),
        est.largest_slice,
        est.total_basis,
        est.largest_dense_bits
    );
    if est.largest_slice > budget.max_slice || est.largest_dense_bits > budget.max_dense_bits {
        return Err(Error::Budget(format!(
            "cobar range needs a slice of {} elements and a {}-bit differential; caps are {} and {}",
            est.largest_slice, est.largest_dense_bits, budget.max_slice, budget.max_dense_bits
        )));
    }
    let mut engine = CobarExt {
        complex,
        chart: ExtChart::new(p.name(), p.grading(), bounds),
        slices: Mutex::new(HashMap::new()),
        diffs: Mutex::new(HashMap::new()),
        homology: Mutex::new(HashMap::new()),
    };
    let dims: Vec<(TriDegree, usize)> = columns
        .par_iter()
        .map(|&(t, w, lo, hi)| -> Result<Vec<(TriDegree, usize)>> {
            let mut out = Vec::new();
            for f in lo..=hi {
                let d = TriDegree::new(t - f as i32, f as i32, w);
                if bounds.contains(d) {
                    out.push((d, engine.homology(d)?.dim()));
                }
            }
            debug!("cobar column ({t},{w}) done");
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let dims: BTreeMap<TriDegree, usize> = dims.into_iter().filter(|x| x.1 > 0).collect();
    for (d, names) in assign_names(p.name(), &dims) {
        engine.chart.set_group(d, names);
    }
    let prims: Vec<(String, TriDegree)> = p
        .primitives(max_t)
        .into_iter()
        .map(|(n, m)| {
            let (t, w) = p.degree(&m);
            (n, TriDegree::new(t - 1, 1, w))
        })
        .filter(|(_, d)| bounds.contains(*d) && engine.chart.dim(*d) == 1)
        .collect();
    let mut tables = Vec::new();
    for (name, hd) in &prims {
        let h = Class::basis(*hd, 1, 0);
        let sources: Vec<(TriDegree, usize)> =
            dims.iter().filter(|(d, _)| bounds.contains(**d + *hd)).map(|(d, n)| (*d, *n)).collect();
        let results: Vec<(TriDegree, Vec<BitVec>)> = sources
            .par_iter()
            .map(|&(d, n)| -> Result<(TriDegree, Vec<BitVec>)> {
                let imgs = (0..n).map(|i| engine.product(&h, &Class::basis(d, n, i)).map(|c| c.coords)).collect::<Result<_>>()?;
                Ok((d, imgs))
            })
            .collect::<Result<_>>()?;
        tables.push((name.clone(), *hd, results));
    }
    for (name, hd, results) in tables {
        engine.chart.add_multiplier(&name, hd);
        for (d, imgs) in results {
            engine.chart.set_product_table(&name, d, imgs);
        }
    }
    Ok(engine)
}

impl CobarExt {
    /// Alternating sums of slice and homology dimensions in one column.
    pub fn euler_characteristics(&self, t: i32, w: i32) -> Result<(i64, i64)> {
        let (mut chain, mut hom) = (0i64, 0i64);
        for f in 0..=(t.max(0) as usize).min(self.complex.max_f) {
            let sign = if f % 2 == 0 { 1 } else { -1 };
            chain += sign * self.slice(f, t, w)?.len() as i64;
            hom += sign * self.homology(TriDegree::new(t - f as i32, f as i32, w))?.dim() as i64;
        }
        Ok((chain, hom))
    }
}

#[cfg(test)]
mod tests;
