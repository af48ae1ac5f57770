//! Engine-independent Ext charts: dimensions, names and multiplication
//! tables per degree, with a line-based persistence format.
//!
//! ```text
//! chowext-chart 1
//! algebra Acl1
//! grading classical
//! bounds max_stem=40 max_filtration=24 max_coweight=none chow=none
//! multiplier h0 0 1 0
//! 0 1 0 1 h0
//! 0 2 0 1 h0^2
//! mul h0 h0 h0^2
//! ```
//!
//! Group records are `s f w dim name_1 ... name_dim`; a `mul m x y` record
//! says that `y` occurs in `m·x`. Only multipliers declared by a
//! `multiplier` line have tables, and a missing `mul` record then means zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::f2linalg::{BitVec, Subspace};
use crate::hopf::{Grading, TriDegree};
use crate::{Error, Result};

/// The region in which a chart is complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChartBounds {
    pub max_stem: i32,
    pub max_filtration: i32,
    pub max_coweight: Option<i32>,
    /// Inclusive range of Chow degrees.
    pub chow: Option<(i32, i32)>,
}

impl ChartBounds {
    pub fn stems(max_stem: i32, max_filtration: i32) -> Self {
        ChartBounds { max_stem, max_filtration, max_coweight: None, chow: None }
    }

    pub fn contains(&self, d: TriDegree) -> bool {
        d.s >= 0
            && d.f >= 0
            && d.s <= self.max_stem
            && d.f <= self.max_filtration
            && self.max_coweight.is_none_or(|c| d.coweight() <= c)
            && self.chow.is_none_or(|(lo, hi)| (lo..=hi).contains(&d.chow()))
    }
}

/// An element of one Ext group, in the chart basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Class {
    pub degree: TriDegree,
    pub coords: BitVec,
}

impl Class {
    pub fn zero(degree: TriDegree, dim: usize) -> Self {
        Class { degree, coords: BitVec::zeros(dim) }
    }

    pub fn basis(degree: TriDegree, dim: usize, i: usize) -> Self {
        Class { degree, coords: BitVec::unit(dim, i) }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

/// A Massey product: one value plus the indeterminacy subspace.
#[derive(Clone, Debug)]
pub struct MasseyCoset {
    pub degree: TriDegree,
    pub value: BitVec,
    /// Reduced basis of the indeterminacy.
    pub indeterminacy: Vec<BitVec>,
}

impl MasseyCoset {
    pub fn new(degree: TriDegree, value: BitVec, spanning: &[BitVec]) -> Self {
        let sub = Subspace::from_vectors(value.len(), spanning);
        let mut value = value;
        sub.reduce(&mut value);
        MasseyCoset { degree, value, indeterminacy: sub.basis().cloned().collect() }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut d = v.clone();
        d.xor_assign(&self.value);
        Subspace::from_vectors(v.len(), &self.indeterminacy).contains(&d)
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BitVec::zeros(self.value.len()))
    }
}

/// A persisted chart used as an engine: dimensions and declared
/// multiplier tables only.
pub struct StaticChart(pub ExtChart);

impl ExtEngine for StaticChart {
    fn chart(&self) -> &ExtChart {
        &self.0
    }

    fn dim(&self, d: TriDegree) -> Result<usize> {
        if self.0.is_complete_at(d) {
            Ok(self.0.dim(d))
        } else {
            Err(Error::Range(format!("{d} is outside the loaded chart")))
        }
    }

    fn product(&self, x: &Class, y: &Class) -> Result<Class> {
        for (a, b) in [(x, y), (y, x)] {
            let name = self.0.groups.get(&a.degree).filter(|_| a.coords.count_ones() == 1).zip(a.coords.first_one()).map(|(n, i)| &n[i]);
            if let Some(name) = name {
                if self.0.multipliers.contains_key(name) {
                    return self.0.multiply(name, b);
                }
            }
        }
        Err(Error::Dependency("a loaded chart only multiplies by its declared multipliers".into()))
    }

    fn massey(&self, _: &Class, _: &Class, _: &Class) -> Result<MasseyCoset> {
        Err(Error::Dependency("a loaded chart carries no Massey products".into()))
    }
}

/// Query surface shared by the cobar and resolution engines.
pub trait ExtEngine {
    fn chart(&self) -> &ExtChart;

    /// Dimension of the Ext group at `d`, computing it if necessary.
    fn dim(&self, d: TriDegree) -> Result<usize>;

    fn product(&self, x: &Class, y: &Class) -> Result<Class>;

    fn massey(&self, x: &Class, y: &Class, z: &Class) -> Result<MasseyCoset>;

    /// `⟨x, y, z⟩` with the definedness checks and indeterminacy computed
    /// from [`ExtEngine::product`].
    fn massey_checked(&self, x: &Class, y: &Class, z: &Class) -> Result<MasseyCoset> {
        if !self.product(x, y)?.is_zero() || !self.product(y, z)?.is_zero() {
            return Err(Error::Undefined("Massey product needs xy = 0 and yz = 0".into()));
        }
        self.massey(x, y, z)
    }

    /// `x·Ext_{d_yz} + Ext_{d_xy}·z` in the degree of `⟨x, y, z⟩`.
    fn massey_indeterminacy(&self, x: &Class, y: &Class, z: &Class) -> Result<Vec<BitVec>> {
        let shift = TriDegree::new(1, -1, 0);
        let yz = y.degree + z.degree + shift;
        let xy = x.degree + y.degree + shift;
        let mut out = Vec::new();
        for i in 0..self.dim(yz)? {
            out.push(self.product(x, &Class::basis(yz, self.dim(yz)?, i))?.coords);
        }
        for i in 0..self.dim(xy)? {
            out.push(self.product(&Class::basis(xy, self.dim(xy)?, i), z)?.coords);
        }
        Ok(out)
    }
}

/// Dimensions, names and multiplication tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtChart {
    pub algebra: String,
    pub grading: Grading,
    pub bounds: ChartBounds,
    groups: BTreeMap<TriDegree, Vec<String>>,
    multipliers: BTreeMap<String, TriDegree>,
    /// (multiplier, source degree) -> image of each source basis element.
    products: BTreeMap<(String, TriDegree), Vec<BitVec>>,
}

impl ExtChart {
    pub fn new(algebra: impl Into<String>, grading: Grading, bounds: ChartBounds) -> Self {
        ExtChart {
            algebra: algebra.into(),
            grading,
            bounds,
            groups: BTreeMap::new(),
            multipliers: BTreeMap::new(),
            products: BTreeMap::new(),
        }
    }

    /// Records a nonzero group; names must be unique within the chart.
    pub fn set_group(&mut self, d: TriDegree, names: Vec<String>) {
        if names.is_empty() {
            self.groups.remove(&d);
        } else {
            self.groups.insert(d, names);
        }
    }

    pub fn dim(&self, d: TriDegree) -> usize {
        self.groups.get(&d).map_or(0, |n| n.len())
    }

    pub fn names(&self, d: TriDegree) -> &[String] {
        self.groups.get(&d).map_or(&[], |n| n.as_slice())
    }

    /// Nonzero groups in degree order.
    pub fn groups(&self) -> impl Iterator<Item = (TriDegree, &[String])> + '_ {
        self.groups.iter().map(|(d, n)| (*d, n.as_slice()))
    }

    pub fn degrees(&self) -> impl Iterator<Item = TriDegree> + '_ {
        self.groups.keys().copied()
    }

    pub fn total_dim(&self) -> usize {
        self.groups.values().map(|n| n.len()).sum()
    }

    pub fn is_complete_at(&self, d: TriDegree) -> bool {
        self.bounds.contains(d)
    }

    /// The basis class with the given name.
    pub fn class(&self, name: &str) -> Option<Class> {
        self.groups.iter().find_map(|(d, names)| {
            names.iter().position(|n| n == name).map(|i| Class::basis(*d, names.len(), i))
        })
    }

    pub fn format_class(&self, c: &Class) -> String {
        let names = self.names(c.degree);
        let terms: Vec<&str> = c.coords.iter_ones().map(|i| names[i].as_str()).collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn add_multiplier(&mut self, name: &str, degree: TriDegree) {
        self.multipliers.insert(name.to_string(), degree);
    }

    pub fn multipliers(&self) -> impl Iterator<Item = (&str, TriDegree)> + '_ {
        self.multipliers.iter().map(|(n, d)| (n.as_str(), *d))
    }

    pub fn multiplier_degree(&self, name: &str) -> Option<TriDegree> {
        self.multipliers.get(name).copied()
    }

    /// Stores the images of the basis of the group at `source`.
    pub fn set_product_table(&mut self, multiplier: &str, source: TriDegree, images: Vec<BitVec>) {
        self.products.insert((multiplier.to_string(), source), images);
    }

    /// Applies a tabulated multiplier. Products leaving the complete region
    /// are range errors.
    pub fn multiply(&self, multiplier: &str, x: &Class) -> Result<Class> {
        let md = self
            .multiplier_degree(multiplier)
            .ok_or_else(|| Error::Dependency(format!("no multiplication table for {multiplier}")))?;
        let target = x.degree + md;
        if !self.bounds.contains(target) {
            return Err(Error::Range(format!("{multiplier}·x lands in {target}, outside the chart")));
        }
        let tdim = self.dim(target);
        let mut out = BitVec::zeros(tdim);
        if x.is_zero() {
            return Ok(Class { degree: target, coords: out });
        }
        let table = self
            .products
            .get(&(multiplier.to_string(), x.degree))
            .ok_or_else(|| Error::Dependency(format!("missing {multiplier} table at {}", x.degree)))?;
        for i in x.coords.iter_ones() {
            out.xor_assign(&table[i]);
        }
        Ok(Class { degree: target, coords: out })
    }

    /// Serializes to the line format described in the module docs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<i32>| v.map_or("none".to_string(), |x| x.to_string());
        let grading = match self.grading {
            Grading::Classical => "classical",
            Grading::Weighted => "weighted",
            Grading::Motivic => "motivic",
        };
        let chow = self.bounds.chow.map_or("none".to_string(), |(a, b)| format!("{a}..{b}"));
        writeln!(out, "chowext-chart 1").unwrap();
        writeln!(out, "algebra {}", self.algebra).unwrap();
        writeln!(out, "grading {grading}").unwrap();
        writeln!(
            out,
            "bounds max_stem={} max_filtration={} max_coweight={} chow={chow}",
            self.bounds.max_stem,
            self.bounds.max_filtration,
            opt(self.bounds.max_coweight)
        )
        .unwrap();
        for (name, d) in &self.multipliers {
            writeln!(out, "multiplier {name} {} {} {}", d.s, d.f, d.w).unwrap();
        }
        for (d, names) in &self.groups {
            writeln!(out, "{} {} {} {} {}", d.s, d.f, d.w, names.len(), names.join(" ")).unwrap();
        }
        for ((m, src), images) in &self.products {
            let target = *src + self.multipliers[m];
            let snames = self.names(*src);
            let tnames = self.names(target);
            for (i, img) in images.iter().enumerate() {
                for j in img.iter_ones() {
                    writeln!(out, "mul {m} {} {}", snames[i], tnames[j]).unwrap();
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ExtChart> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
            let (i, l) = lines.next().ok_or_else(|| Error::parse(0, format!("missing {what} line")))?;
            Ok((i + 1, l.split_whitespace().map(str::to_string).collect()))
        };
        let (ln, header) = next("header")?;
        if header != ["chowext-chart", "1"] {
            return Err(Error::parse(ln, "not a chowext chart (expected `chowext-chart 1`)"));
        }
        let (ln, alg) = next("algebra")?;
        if alg.len() != 2 || alg[0] != "algebra" {
            return Err(Error::parse(ln, "expected `algebra NAME`"));
        }
        let (ln, gr) = next("grading")?;
        let grading = match gr.get(1).map(String::as_str) {
            Some("classical") => Grading::Classical,
            Some("weighted") => Grading::Weighted,
            Some("motivic") => Grading::Motivic,
            _ => return Err(Error::parse(ln, "expected `grading classical|weighted|motivic`")),
        };
        let (ln, b) = next("bounds")?;
        let field = |key: &str| -> Result<String> {
            b.iter()
                .find_map(|t| t.strip_prefix(&format!("{key}=")).map(str::to_string))
                .ok_or_else(|| Error::parse(ln, format!("bounds line lacks {key}")))
        };
        let int = |s: String| s.parse::<i32>().map_err(|_| Error::parse(ln, format!("bad bound {s}")));
        let max_coweight = match field("max_coweight")?.as_str() {
            "none" => None,
            s => Some(int(s.to_string())?),
        };
        let chow = match field("chow")?.as_str() {
            "none" => None,
            s => {
                let (a, c) = s.split_once("..").ok_or_else(|| Error::parse(ln, "chow bound must be a..b"))?;
                Some((int(a.to_string())?, int(c.to_string())?))
            }
        };
        let bounds = ChartBounds {
            max_stem: int(field("max_stem")?)?,
            max_filtration: int(field("max_filtration")?)?,
            max_coweight,
            chow,
        };
        let mut chart = ExtChart::new(alg[1].clone(), grading, bounds);
        let mut name_index: BTreeMap<String, (TriDegree, usize)> = BTreeMap::new();
        let mut muls: Vec<(usize, String, String, String)> = Vec::new();
        for (i, l) in text.lines().enumerate().skip(ln) {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.is_empty() || l.starts_with('#') {
                continue;
            }
            let n = |s: &str| s.parse::<i32>().map_err(|_| Error::parse(i + 1, format!("bad integer {s}")));
            match toks[0] {
                "multiplier" if toks.len() == 5 => {
                    chart.add_multiplier(toks[1], TriDegree::new(n(toks[2])?, n(toks[3])?, n(toks[4])?));
                }
                "mul" if toks.len() == 4 => muls.push((i + 1, toks[1].into(), toks[2].into(), toks[3].into())),
                _ if toks.len() >= 4 => {
                    let d = TriDegree::new(n(toks[0])?, n(toks[1])?, n(toks[2])?);
                    let dim = n(toks[3])? as usize;
                    if toks.len() != 4 + dim {
                        return Err(Error::parse(i + 1, "dimension does not match the number of names"));
                    }
                    let names: Vec<String> = toks[4..].iter().map(|s| s.to_string()).collect();
                    for (k, nm) in names.iter().enumerate() {
                        if name_index.insert(nm.clone(), (d, k)).is_some() {
                            return Err(Error::parse(i + 1, format!("duplicate name {nm}")));
                        }
                    }
                    chart.set_group(d, names);
                }
                _ => return Err(Error::parse(i + 1, format!("unrecognized record {l:?}"))),
            }
        }
        // Every group gets a table for every multiplier whose target is in bounds.
        let declared: Vec<(String, TriDegree)> = chart.multipliers().map(|(a, b)| (a.to_string(), b)).collect();
        for (m, md) in &declared {
            let degrees: Vec<TriDegree> = chart.degrees().collect();
            for d in degrees {
                if chart.bounds.contains(d + *md) {
                    let tdim = chart.dim(d + *md);
                    chart.set_product_table(m, d, vec![BitVec::zeros(tdim); chart.dim(d)]);
                }
            }
        }
        for (ln, m, src, tgt) in muls {
            let md = chart.multiplier_degree(&m).ok_or_else(|| Error::parse(ln, format!("undeclared multiplier {m}")))?;
            let (sd, si) = *name_index.get(&src).ok_or_else(|| Error::parse(ln, format!("unknown class {src}")))?;
            let (td, ti) = *name_index.get(&tgt).ok_or_else(|| Error::parse(ln, format!("unknown class {tgt}")))?;
            if sd + md != td {
                return Err(Error::parse(ln, format!("{m}·{src} cannot land on {tgt}")));
            }
            let table = chart
                .products
                .get_mut(&(m.clone(), sd))
                .ok_or_else(|| Error::parse(ln, format!("{m}·{src} leaves the chart bounds")))?;
            table[si].flip(ti);
        }
        Ok(chart)
    }
}
