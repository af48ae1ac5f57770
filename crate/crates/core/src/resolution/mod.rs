//! Minimal free resolutions of `F2` over a graded algebra, with `h_j`
//! products read off the differentials and a resumable text format.
//!
//! Step `(f, t, w)` finds the generators of `P_f` in internal degree
//! `(t, w)`: the kernel of `d_{f-1}` in that degree, modulo the image of the
//! part of `P_f` already built, gets one new generator per missing
//! dimension. The number of generators of `P_f` in degree `(t, w)` is the
//! dimension of `Ext^{f,(t,w)}`.
//!
//! ```text
//! chowext-resolution 1
//! algebra Acl
//! region stem 45 24
//! gen 1 0 1 0
//! diff 1 0 -> 0 0 Sq(1)
//! ```

mod chain;
mod dual;
mod milnor;

pub use chain::{ChainMap, ResolutionExt};
pub use dual::DualAlgebra;
pub use milnor::MilnorAlgebra;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use log::{debug, info};
use rayon::prelude::*;

use crate::chart::{ChartBounds, ExtChart};
use crate::f2linalg::{image_and_kernel, BitVec};
use crate::hopf::{Grading, TriDegree};
use crate::names::assign_names;
use crate::{Error, Result};

/// Internal degree and weight.
pub type Deg = (i32, i32);

/// Sorted basis indices of a product of two basis elements.
pub type Product = Arc<[u32]>;

/// A connected graded algebra over F2 with a chosen homogeneous basis.
pub trait GradedAlgebra: Send + Sync {
    fn name(&self) -> String;
    fn grading(&self) -> Grading;
    /// Largest internal degree with a nonzero basis element, or the
    /// truncation degree for infinite algebras.
    fn max_degree(&self) -> i32;
    fn weights(&self, t: i32) -> Vec<i32>;
    fn dim(&self, d: Deg) -> usize;
    /// Product of basis element `i` in degree `a` with basis element `j` in degree `b`.
    fn multiply(&self, a: Deg, i: usize, b: Deg, j: usize) -> Product;
    fn basis_name(&self, d: Deg, i: usize) -> String;
    fn parse_basis_name(&self, d: Deg, s: &str) -> Result<usize>;
    /// Indecomposables detecting the classes `h_j`: name, degree and basis index.
    fn indecomposables(&self) -> Vec<(String, Deg, usize)>;
}

fn sub(a: Deg, b: Deg) -> Deg {
    (a.0 - b.0, a.1 - b.1)
}

fn add(a: Deg, b: Deg) -> Deg {
    (a.0 + b.0, a.1 + b.1)
}

/// A finite set of steps `(f, t, w)`, closed under everything a step reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Stems `0..=max_stem`, filtrations `0..=max_filtration`.
    Stem { max_stem: i32, max_filtration: i32 },
    /// Chow degrees `0..=max_chow`, coweights `..=max_coweight`, filtrations `0..=max_filtration`.
    Chow { max_chow: i32, max_coweight: i32, max_filtration: i32 },
}

impl Region {
    pub fn contains(&self, f: i32, t: i32, w: i32) -> bool {
        let s = t - f;
        match *self {
            Region::Stem { max_stem, max_filtration } => (0..=max_filtration).contains(&f) && (0..=max_stem).contains(&s),
            Region::Chow { max_chow, max_coweight, max_filtration } => {
                (0..=max_filtration).contains(&f) && s >= 0 && (0..=max_chow).contains(&(t - 2 * w)) && s - w <= max_coweight
            }
        }
    }

    pub fn contains_degree(&self, d: TriDegree) -> bool {
        self.contains(d.f, d.t(), d.w)
    }

    /// True if every step of `other` is a step of `self`.
    pub fn covers(&self, other: &Region) -> bool {
        match (*self, *other) {
            (Region::Stem { max_stem: a, max_filtration: b }, Region::Stem { max_stem: c, max_filtration: d }) => a >= c && b >= d,
            (
                Region::Chow { max_chow: a, max_coweight: b, max_filtration: c },
                Region::Chow { max_chow: x, max_coweight: y, max_filtration: z },
            ) => a >= x && b >= y && c >= z,
            _ => false,
        }
    }

    pub fn max_filtration(&self) -> i32 {
        match *self {
            Region::Stem { max_filtration, .. } | Region::Chow { max_filtration, .. } => max_filtration,
        }
    }

    fn max_t(&self) -> i32 {
        match *self {
            Region::Stem { max_stem, max_filtration } => max_stem + max_filtration,
            Region::Chow { max_coweight, max_filtration, .. } => 2 * (max_coweight + max_filtration),
        }
    }

    /// The chart bounds describing exactly this region.
    pub fn bounds(&self) -> ChartBounds {
        match *self {
            Region::Stem { max_stem, max_filtration } => ChartBounds::stems(max_stem, max_filtration),
            Region::Chow { max_chow, max_coweight, max_filtration } => ChartBounds {
                max_stem: 2 * max_coweight + max_filtration,
                max_filtration,
                max_coweight: Some(max_coweight),
                chow: Some((0, max_chow)),
            },
        }
    }

    /// Steps in dependency order: by `t`, then `w`, then `f`.
    pub fn steps(&self, grading: Grading) -> Vec<(i32, i32, i32)> {
        let mut out = Vec::new();
        for t in 0..=self.max_t() {
            let ws: Vec<i32> = match (*self, grading) {
                (Region::Stem { .. }, Grading::Classical) => vec![0],
                (Region::Stem { .. }, _) => (0..=t).collect(),
                (Region::Chow { max_chow, .. }, _) => ((t - max_chow + 1).div_euclid(2)..=t.div_euclid(2)).collect(),
            };
            for w in ws {
                for f in 0..=self.max_filtration() {
                    if self.contains(f, t, w) {
                        out.push((t, w, f));
                    }
                }
            }
        }
        out
    }

    fn to_text(self) -> String {
        match self {
            Region::Stem { max_stem, max_filtration } => format!("stem {max_stem} {max_filtration}"),
            Region::Chow { max_chow, max_coweight, max_filtration } => format!("chow {max_chow} {max_coweight} {max_filtration}"),
        }
    }

    fn parse(fields: &[&str]) -> Option<Region> {
        let n = |i: usize| fields.get(i).and_then(|x| x.parse::<i32>().ok());
        match *fields.first()? {
            "stem" if fields.len() == 3 => Some(Region::Stem { max_stem: n(1)?, max_filtration: n(2)? }),
            "chow" if fields.len() == 4 => Some(Region::Chow { max_chow: n(1)?, max_coweight: n(2)?, max_filtration: n(3)? }),
            _ => None,
        }
    }
}

/// A generator of `P_f` with its differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub t: i32,
    pub w: i32,
    /// `d(g) = Σ a · g'` as (index of `g'` in `P_{f-1}`, algebra element over
    /// the basis in degree `deg g - deg g'`).
    pub d: Vec<(usize, BitVec)>,
}

impl Generator {
    pub fn deg(&self) -> Deg {
        (self.t, self.w)
    }
}

/// The basis of `P_f` in one degree: blocks `(generator, offset, algebra degree, length)`.
#[derive(Clone, Debug, Default)]
pub struct Layout {
    pub blocks: Vec<(usize, usize, Deg, usize)>,
    pub len: usize,
    offsets: HashMap<usize, usize>,
}

impl Layout {
    /// Offset of the block of generator `g`, if it occurs.
    pub fn offset(&self, g: usize) -> Option<usize> {
        self.offsets.get(&g).copied()
    }

    /// The (generator, algebra degree, algebra index) of basis element `k`.
    pub fn locate(&self, k: usize) -> (usize, Deg, usize) {
        let b = self.blocks.partition_point(|b| b.1 + b.3 <= k);
        let (g, off, d, _) = self.blocks[b];
        (g, d, k - off)
    }
}

pub struct Resolution {
    alg: Arc<dyn GradedAlgebra>,
    gens: Vec<Vec<Generator>>,
    region: Option<Region>,
    /// Kernels of `d_f` on the part of `P_f(t, w)` built before step `(f, t, w)`.
    kernels: HashMap<(i32, Deg), Vec<BitVec>>,
    /// Refuse steps whose module dimension exceeds this.
    pub max_module_dim: usize,
}

impl Resolution {
    pub fn new(alg: Arc<dyn GradedAlgebra>) -> Self {
        Resolution { alg, gens: Vec::new(), region: None, kernels: HashMap::new(), max_module_dim: 400_000 }
    }

    pub fn algebra(&self) -> &Arc<dyn GradedAlgebra> {
        &self.alg
    }

    pub fn region(&self) -> Option<Region> {
        self.region
    }

    pub fn generators(&self, f: i32) -> &[Generator] {
        self.gens.get(f as usize).map_or(&[], |v| v.as_slice())
    }

    /// Indices of the generators of `P_f` in degree `d`, in order.
    pub fn generators_in(&self, f: i32, d: Deg) -> Vec<usize> {
        self.generators(f).iter().enumerate().filter(|(_, g)| g.deg() == d).map(|(i, _)| i).collect()
    }

    pub fn ext_degree(f: i32, d: Deg) -> TriDegree {
        TriDegree::new(d.0 - f, f, d.1)
    }

    pub fn layout(&self, f: i32, d: Deg) -> Layout {
        let mut lay = Layout::default();
        for (i, g) in self.generators(f).iter().enumerate() {
            let ad = sub(d, g.deg());
            if ad.0 < 0 {
                continue;
            }
            let n = self.alg.dim(ad);
            if n > 0 {
                lay.blocks.push((i, lay.len, ad, n));
                lay.offsets.insert(i, lay.len);
                lay.len += n;
            }
        }
        lay
    }

    /// `a · x` for a basis element `a` and `x` in `P_f` of degree `xd`,
    /// written over `target`, the layout of `P_f(xd + deg a)`.
    pub fn act(&self, a: (Deg, usize), x: &BitVec, x_layout: &Layout, target: &Layout) -> BitVec {
        let mut out = BitVec::zeros(target.len);
        for k in x.iter_ones() {
            let (g, bd, bi) = x_layout.locate(k);
            // Absent blocks sit above the top degree of a finite algebra.
            let Some(off) = target.offset(g) else { continue };
            for &m in self.alg.multiply(a.0, a.1, bd, bi).iter() {
                out.flip(off + m as usize);
            }
        }
        out
    }

    /// `a · x` for an algebra element `a` of degree `ad`.
    pub fn act_element(&self, ad: Deg, a: &BitVec, x: &BitVec, x_layout: &Layout, target: &Layout) -> BitVec {
        let mut out = BitVec::zeros(target.len);
        for i in a.iter_ones() {
            out.xor_assign(&self.act((ad, i), x, x_layout, target));
        }
        out
    }

    /// `d(g)` as a vector over `target`, the layout of `P_{f-1}(deg g)`.
    pub fn boundary(&self, f: i32, g: usize, target: &Layout) -> BitVec {
        let gen = &self.gens[f as usize][g];
        let mut out = BitVec::zeros(target.len);
        for (gp, a) in &gen.d {
            let off = target.offset(*gp).expect("boundary generator present");
            out.xor_shifted(a, off);
        }
        out
    }

    /// Images under `d_f` of every basis element of `src` (a layout of
    /// `P_f(d)`), over `dst` (a layout of `P_{f-1}(d)`).
    fn images(&self, f: i32, src: &Layout, dst: &Layout) -> Vec<BitVec> {
        (0..src.len)
            .into_par_iter()
            .map(|k| {
                let (g, ad, ai) = src.locate(k);
                let gen = &self.gens[f as usize][g];
                let mut out = BitVec::zeros(dst.len);
                for (gp, b) in &gen.d {
                    let bd = sub(gen.deg(), self.gens[f as usize - 1][*gp].deg());
                    let Some(off) = dst.offset(*gp) else { continue };
                    for j in b.iter_ones() {
                        for &m in self.alg.multiply(ad, ai, bd, j).iter() {
                            out.flip(off + m as usize);
                        }
                    }
                }
                out
            })
            .collect()
    }

    fn check_size(&self, f: i32, d: Deg, n: usize) -> Result<()> {
        if n > self.max_module_dim {
            return Err(Error::Budget(format!("P_{f} in degree {d:?} has dimension {n}, cap {}", self.max_module_dim)));
        }
        Ok(())
    }

    /// Kernel of `d_f` on the current basis of `P_f(d)`.
    fn kernel(&self, f: i32, d: Deg) -> Result<Vec<BitVec>> {
        let src = self.layout(f, d);
        self.check_size(f, d, src.len)?;
        if f == 0 {
            // The augmentation is an isomorphism in degree zero.
            return Ok(if d == (0, 0) { Vec::new() } else { (0..src.len).map(|k| BitVec::unit(src.len, k)).collect() });
        }
        let dst = self.layout(f - 1, d);
        Ok(image_and_kernel(dst.len, &self.images(f, &src, &dst)).1)
    }

    fn step(&mut self, f: i32, t: i32, w: i32, region: &Region) -> Result<usize> {
        let d = (t, w);
        while self.gens.len() <= f as usize {
            self.gens.push(Vec::new());
        }
        if f == 0 {
            if d == (0, 0) && self.gens[0].is_empty() {
                self.gens[0].push(Generator { t: 0, w: 0, d: Vec::new() });
                return Ok(1);
            }
            if region.contains(1, t, w) {
                let k = self.kernel(0, d)?;
                self.kernels.insert((0, d), k);
            }
            return Ok(0);
        }
        let src = self.layout(f, d);
        let dst = self.layout(f - 1, d);
        self.check_size(f, d, src.len.max(dst.len))?;
        let (mut image, kernel) = image_and_kernel(dst.len, &self.images(f, &src, &dst));
        let below = match self.kernels.remove(&(f - 1, d)) {
            Some(k) => k,
            None => self.kernel(f - 1, d)?,
        };
        let mut fresh = Vec::new();
        for v in below {
            let mut v = if v.len() < dst.len { v.concat(&BitVec::zeros(dst.len - v.len())) } else { v };
            image.reduce(&mut v);
            if v.is_zero() {
                continue;
            }
            image.insert(&v);
            fresh.push(v);
        }
        let n = fresh.len();
        for v in fresh {
            let mut terms = Vec::new();
            for &(g, off, _, len) in &dst.blocks {
                let part = v.slice(off, off + len);
                if !part.is_zero() {
                    terms.push((g, part));
                }
            }
            self.gens[f as usize].push(Generator { t, w, d: terms });
        }
        if region.contains(f + 1, t, w) {
            self.kernels.insert((f, d), kernel);
        }
        if n > 0 {
            debug!("{} new generators at f = {f}, (t, w) = ({t}, {w})", n);
        }
        Ok(n)
    }

    /// Extends the resolution to cover `region`, which must contain the
    /// region already computed.
    pub fn extend(&mut self, region: Region) -> Result<()> {
        if let Some(old) = self.region {
            if !region.covers(&old) {
                return Err(Error::Usage(format!("region {} does not contain the computed region {}", region.to_text(), old.to_text())));
            }
        }
        let steps = region.steps(self.alg.grading());
        info!("resolving {} over {} steps in region {}", self.alg.name(), steps.len(), region.to_text());
        let mut last_t = -1;
        for (t, w, f) in steps {
            if self.region.is_some_and(|r| r.contains(f, t, w)) {
                continue;
            }
            if t != last_t {
                debug!("internal degree {t}");
                last_t = t;
            }
            self.step(f, t, w, &region)?;
        }
        self.kernels.clear();
        self.region = Some(region);
        Ok(())
    }

    /// Generator counts per Ext degree.
    pub fn dims(&self) -> BTreeMap<TriDegree, usize> {
        let mut out = BTreeMap::new();
        for (f, gs) in self.gens.iter().enumerate() {
            for g in gs {
                *out.entry(Self::ext_degree(f as i32, g.deg())).or_insert(0) += 1;
            }
        }
        out
    }

    /// True if no differential has a unit coefficient.
    pub fn is_minimal(&self) -> bool {
        self.gens.iter().enumerate().skip(1).all(|(f, gs)| gs.iter().all(|g| g.d.iter().all(|(gp, _)| self.gens[f - 1][*gp].deg() != g.deg())))
    }

    /// Checks `d ∘ d = 0` on every generator.
    pub fn check_d_squared(&self) -> Result<()> {
        for f in 2..self.gens.len() as i32 {
            for (i, g) in self.generators(f).iter().enumerate() {
                let mid = self.layout(f - 1, g.deg());
                let low = self.layout(f - 2, g.deg());
                let dg = self.boundary(f, i, &mid);
                let mut dd = BitVec::zeros(low.len);
                for k in dg.iter_ones() {
                    let (gp, ad, ai) = mid.locate(k);
                    let gl = self.layout(f - 2, self.gens[f as usize - 1][gp].deg());
                    let x = self.boundary(f - 1, gp, &gl);
                    dd.xor_assign(&self.act((ad, ai), &x, &gl, &low));
                }
                if !dd.is_zero() {
                    return Err(Error::Consistency(format!("d^2 != 0 on generator {i} of P_{f}")));
                }
            }
        }
        Ok(())
    }

    /// `h_j` products read from the coefficient of the `h_j` indecomposable.
    fn h_table(&self, ind: (Deg, usize), f: i32, src: Deg) -> Vec<BitVec> {
        let sources = self.generators_in(f, src);
        let targets = self.generators_in(f + 1, add(src, ind.0));
        let mut out = vec![BitVec::zeros(targets.len()); sources.len()];
        for (k, &g) in targets.iter().enumerate() {
            for (gp, a) in &self.gens[f as usize + 1][g].d {
                if let Some(i) = sources.iter().position(|s| s == gp) {
                    if a.get(ind.1) {
                        out[i].flip(k);
                    }
                }
            }
        }
        out
    }

    /// The Ext chart of the computed region, named and with `h_j` tables.
    pub fn chart(&self) -> Result<ExtChart> {
        let region = self.region.ok_or_else(|| Error::Usage("resolution has not been computed".into()))?;
        let bounds = region.bounds();
        let mut chart = ExtChart::new(self.alg.name(), self.alg.grading(), bounds);
        let dims: BTreeMap<TriDegree, usize> = self.dims().into_iter().filter(|(d, _)| region.contains_degree(*d)).collect();
        for (d, names) in assign_names(&self.alg.name(), &dims) {
            chart.set_group(d, names);
        }
        for (name, hd, idx) in self.alg.indecomposables() {
            let hdeg = Self::ext_degree(1, hd);
            if chart.dim(hdeg) != 1 {
                continue;
            }
            chart.add_multiplier(&name, hdeg);
            for (&d, _) in dims.iter().filter(|(d, _)| region.contains_degree(**d + hdeg)) {
                chart.set_product_table(&name, d, self.h_table((hd, idx), d.f, (d.t(), d.w)));
            }
        }
        Ok(chart)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "chowext-resolution 1").unwrap();
        writeln!(out, "algebra {}", self.alg.name()).unwrap();
        if let Some(r) = self.region {
            writeln!(out, "region {}", r.to_text()).unwrap();
        }
        for (f, gs) in self.gens.iter().enumerate() {
            for (i, g) in gs.iter().enumerate() {
                writeln!(out, "gen {f} {i} {} {}", g.t, g.w).unwrap();
            }
        }
        for (f, gs) in self.gens.iter().enumerate() {
            for (i, g) in gs.iter().enumerate() {
                for (gp, a) in &g.d {
                    let ad = sub(g.deg(), self.gens[f - 1][*gp].deg());
                    let names: Vec<String> = a.iter_ones().map(|k| self.alg.basis_name(ad, k)).collect();
                    writeln!(out, "diff {f} {i} -> {} {gp} {}", f - 1, names.join("+")).unwrap();
                }
            }
        }
        out
    }

    pub fn from_text(alg: Arc<dyn GradedAlgebra>, text: &str) -> Result<Resolution> {
        let mut res = Resolution::new(alg);
        let mut seen_header = false;
        for (ln, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |i: usize| -> Result<i64> {
                fields.get(i).and_then(|x| x.parse().ok()).ok_or_else(|| Error::parse(ln, format!("expected an integer in field {}", i + 1)))
            };
            match fields[0] {
                "chowext-resolution" if fields.get(1) == Some(&"1") => seen_header = true,
                _ if !seen_header => return Err(Error::parse(ln, "missing chowext-resolution header")),
                "algebra" => {
                    if fields.get(1).copied() != Some(res.alg.name().as_str()) {
                        return Err(Error::Usage(format!("file resolves {}, not {}", fields.get(1).unwrap_or(&"?"), res.alg.name())));
                    }
                }
                "region" => res.region = Some(Region::parse(&fields[1..]).ok_or_else(|| Error::parse(ln, "bad region"))?),
                "gen" => {
                    let (f, i) = (int(1)? as usize, int(2)? as usize);
                    while res.gens.len() <= f {
                        res.gens.push(Vec::new());
                    }
                    if res.gens[f].len() != i {
                        return Err(Error::parse(ln, "generators out of order"));
                    }
                    res.gens[f].push(Generator { t: int(3)? as i32, w: int(4)? as i32, d: Vec::new() });
                }
                "diff" => {
                    let (f, i, fp, gp) = (int(1)? as usize, int(2)? as usize, int(4)? as usize, int(5)? as usize);
                    if fields.get(3) != Some(&"->") || fp + 1 != f || f == 0 {
                        return Err(Error::parse(ln, "bad diff record"));
                    }
                    let gd = res.gens.get(f).and_then(|g| g.get(i)).map(|g| g.deg()).ok_or_else(|| Error::parse(ln, "unknown generator"))?;
                    let pd = res.gens.get(fp).and_then(|g| g.get(gp)).map(|g| g.deg()).ok_or_else(|| Error::parse(ln, "unknown generator"))?;
                    let ad = sub(gd, pd);
                    let mut a = BitVec::zeros(res.alg.dim(ad));
                    for name in fields.get(6).copied().unwrap_or("").split('+').filter(|s| !s.is_empty()) {
                        let k = res.alg.parse_basis_name(ad, name).map_err(|e| Error::parse(ln, e.to_string()))?;
                        a.flip(k);
                    }
                    res.gens[f][i].d.push((gp, a));
                }
                other => return Err(Error::parse(ln, format!("unknown record {other}"))),
            }
        }
        if !seen_header {
            return Err(Error::parse(0, "empty resolution file"));
        }
        Ok(res)
    }
}

/// Chart classes on the line `s - 2f = v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterceptScan {
    pub intercept: i32,
    pub classes: Vec<(TriDegree, Vec<String>)>,
    /// Set when the line leaves the chart's complete region before `max_stem`.
    pub warning: Option<String>,
}

/// Every class with `s - 2f = v` and `s ≤ max_stem`.
pub fn intercept_scan(chart: &ExtChart, v: i32, max_stem: i32) -> InterceptScan {
    let classes: Vec<(TriDegree, Vec<String>)> =
        chart.groups().filter(|(d, _)| d.intercept() == v && d.s <= max_stem).map(|(d, n)| (d, n.to_vec())).collect();
    let mut missing = Vec::new();
    let mut s = v.rem_euclid(2);
    while s <= max_stem {
        let f = (s - v) / 2;
        if f >= 0 && !chart.bounds.contains(TriDegree::new(s, f, 0)) {
            missing.push(s);
        }
        s += 2;
    }
    let warning = (!missing.is_empty()).then(|| format!("intercept {v}: stems {missing:?} lie outside the complete region"));
    InterceptScan { intercept: v, classes, warning }
}

#[cfg(test)]
mod tests;
