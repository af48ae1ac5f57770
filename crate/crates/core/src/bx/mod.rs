//! The Burklund–Xu spectral sequence in Chow degrees zero and one.
//!
//! In Chow degree one the E1-page is `⊕ q_i · Ext_{A^cl}` in regraded
//! coordinates `(S, f)`, where `q_i` sits at `(2^i - 1, 1)`. Differentials
//! have degree `(-1, 1)` and `d_r` lowers the q-index by `r`, so every page
//! splits into cells `(S, f, i)`:
//!
//! ```text
//! d1(q_i · x) = q_{i-1} · h_{i-1} x
//! d2(q_i · x) = q_{i-2} · ⟨x, h_{i-1}, h_{i-2}⟩
//! ```
//!
//! Higher differentials are not computed; where one could be non-zero the
//! affected cells are marked inexact and the page is an upper bound.

mod certify;

pub use certify::{confirm_hidden, hidden_extension_candidates, permanent_cycle_certificate, Certificate, HiddenCandidate};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::{debug, info};

use crate::chart::{ChartBounds, Class, ExtChart, ExtEngine};
use crate::f2linalg::{BitVec, Subquotient, Subspace};
use crate::hopf::{HopfPresentation, TriDegree};
use crate::{Error, Result};

/// A cell of a page: regraded stem `S`, filtration `f`, q-index.
pub type Pos = (i32, i32, u32);

/// Regraded `(S, f)` to the motivic degree in Chow degree one.
pub fn motivic_degree(s_re: i32, f: i32) -> TriDegree {
    TriDegree::from_regraded_chow1(s_re, f)
}

/// Inverse of [`motivic_degree`], for degrees of Chow degree one.
pub fn regraded_degree(d: TriDegree) -> Option<(i32, i32)> {
    d.regraded_chow1()
}

/// q-indices allowed by a motivic presentation: one per `τ_i`.
pub fn q_indices(p: &HopfPresentation) -> Vec<u32> {
    p.tau_indices()
}

/// The coefficient degree of the summand `q_i` at regraded `(S, f)`.
pub fn coefficient_degree(pos: Pos) -> TriDegree {
    TriDegree::classical(pos.0 - (1 << pos.2) + 1, pos.1 - 1)
}

/// One element of a page: a cell and a class of its subquotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BxElement {
    pub pos: Pos,
    pub name: String,
    pub coords: BitVec,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub coeff: TriDegree,
    /// Coefficient names, one per E1 basis element.
    pub basis: Vec<String>,
    /// `E_r` as a subquotient of E1.
    pub page: Subquotient,
    /// False when a differential into or out of the cell could not be
    /// determined; the cell is then an upper bound.
    pub exact: bool,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.page.dim()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffValue {
    /// Coordinates in the target cell of the same page.
    Known(BitVec),
    Unknown(String),
}

#[derive(Clone, Debug)]
pub struct Differential {
    pub r: u32,
    pub source: Pos,
    /// Index of the source class in the page basis of its cell.
    pub class: usize,
    pub target: Pos,
    pub value: DiffValue,
}

#[derive(Clone, Debug)]
pub struct BxPage {
    pub r: u32,
    pub chow: i32,
    pub q_indices: Vec<u32>,
    pub max_stem: i32,
    pub max_filtration: i32,
    /// Where the coefficient chart is complete.
    pub coeff_bounds: ChartBounds,
    pub cells: BTreeMap<Pos, Cell>,
    /// `d_r` on this page, once computed.
    pub differentials: Vec<Differential>,
    pub differentials_computed: bool,
}

fn q_label(chow: i32, q: u32) -> String {
    if chow == 0 {
        "1".into()
    } else {
        format!("q{q}")
    }
}

impl BxPage {
    /// The E1-page over a coefficient chart of classical type. In Chow
    /// degree zero there is one summand and no differentials.
    pub fn e1(coeff: &ExtChart, q_indices: &[u32], chow: i32, max_stem: i32, max_filtration: i32) -> Result<BxPage> {
        if chow != 0 && chow != 1 {
            return Err(Error::Usage(format!("Chow degree {chow} is not supported; use 0 or 1")));
        }
        let qs: Vec<u32> = if chow == 0 { vec![0] } else { q_indices.iter().copied().filter(|&q| (1i64 << q) - 1 <= max_stem as i64).collect() };
        let mut cells = BTreeMap::new();
        for f in 0..=max_filtration {
            for s in 0..=max_stem {
                for &q in &qs {
                    let pos = (s, f, q);
                    let cd = if chow == 0 { TriDegree::classical(s, f) } else { coefficient_degree(pos) };
                    if cd.s < 0 || cd.f < 0 {
                        continue;
                    }
                    let names = coeff.names(cd);
                    if names.is_empty() {
                        continue;
                    }
                    let n = names.len();
                    let units: Vec<BitVec> = (0..n).map(|i| BitVec::unit(n, i)).collect();
                    cells.insert(
                        pos,
                        Cell { coeff: cd, basis: names.to_vec(), page: Subquotient::new(n, &units, &[]), exact: coeff.bounds.contains(cd) },
                    );
                }
            }
        }
        Ok(BxPage {
            r: 1,
            chow,
            q_indices: qs,
            max_stem,
            max_filtration,
            coeff_bounds: coeff.bounds,
            cells,
            differentials: Vec::new(),
            differentials_computed: chow == 0,
        })
    }

    pub fn in_range(&self, s: i32, f: i32) -> bool {
        (0..=self.max_stem).contains(&s) && (0..=self.max_filtration).contains(&f)
    }

    pub fn dim(&self, pos: Pos) -> usize {
        self.cells.get(&pos).map_or(0, Cell::dim)
    }

    /// Total dimension at regraded `(S, f)` over all q-indices.
    pub fn total_dim(&self, s: i32, f: i32) -> usize {
        self.q_indices.iter().map(|&q| self.dim((s, f, q))).sum()
    }

    /// True if every cell at `(S, f)` is exact.
    pub fn exact_at(&self, s: i32, f: i32) -> bool {
        self.q_indices.iter().all(|&q| match self.cells.get(&(s, f, q)) {
            Some(c) => c.exact,
            None => {
                let cd = if self.chow == 0 { TriDegree::classical(s, f) } else { coefficient_degree((s, f, q)) };
                cd.s < 0 || cd.f < 0 || self.coeff_bounds.contains(cd)
            }
        })
    }

    /// The motivic degree of a regraded position.
    pub fn motivic(&self, s: i32, f: i32) -> TriDegree {
        if self.chow == 0 {
            TriDegree::embed_classical(s, f)
        } else {
            motivic_degree(s, f)
        }
    }

    /// Name of class `i` of a cell: the least E1 basis name representing
    /// it, or the sum of its representative's terms.
    pub fn class_name(&self, pos: Pos, i: usize) -> String {
        let cell = &self.cells[&pos];
        let n = cell.basis.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cell.basis[a].cmp(&cell.basis[b]));
        let target = BitVec::unit(cell.dim(), i);
        let label = q_label(self.chow, pos.2);
        for k in order {
            if cell.page.coordinates(&BitVec::unit(n, k)).as_ref() == Some(&target) {
                return format!("{label}·{}", cell.basis[k]);
            }
        }
        let rep = &cell.page.reps()[i];
        let terms: Vec<String> = rep.iter_ones().map(|k| cell.basis[k].clone()).collect();
        format!("{label}·({})", terms.join("+"))
    }

    /// All classes of the page, in cell order.
    pub fn elements(&self) -> Vec<BxElement> {
        let mut out = Vec::new();
        for (&pos, cell) in &self.cells {
            for i in 0..cell.dim() {
                out.push(BxElement { pos, name: self.class_name(pos, i), coords: BitVec::unit(cell.dim(), i) });
            }
        }
        out
    }

    /// Finds a class by its name, e.g. `q2·a`.
    pub fn element(&self, name: &str) -> Option<BxElement> {
        self.elements().into_iter().find(|e| e.name == name)
    }

    fn target_of(&self, pos: Pos, r: u32) -> Option<Pos> {
        (pos.2 >= r && self.q_indices.contains(&(pos.2 - r))).then(|| (pos.0 - 1, pos.1 + 1, pos.2 - r))
    }

    fn push_values(&mut self, pos: Pos, target: Pos, values: Vec<DiffValue>) {
        for (class, value) in values.into_iter().enumerate() {
            if matches!(&value, DiffValue::Known(v) if v.is_zero()) {
                continue;
            }
            self.differentials.push(Differential { r: self.r, source: pos, class, target, value });
        }
    }

    /// Converts an E1 vector in the target cell to page coordinates.
    fn page_value(&self, target: Pos, v: &BitVec) -> Result<DiffValue> {
        if v.is_zero() {
            return Ok(DiffValue::Known(BitVec::zeros(self.dim(target))));
        }
        let cell = self.cells.get(&target).ok_or_else(|| Error::Consistency(format!("differential into empty cell {target:?}")))?;
        cell.page
            .coordinates(v)
            .map(DiffValue::Known)
            .ok_or_else(|| Error::Consistency(format!("differential value at {target:?} is not a cycle on page {}", self.r)))
    }

    /// `d1(q_i · x) = q_{i-1} · h_{i-1} x`, from the coefficient h-tables.
    pub fn compute_d1(&mut self, coeff: &ExtChart) -> Result<()> {
        self.expect_page(1)?;
        let positions: Vec<Pos> = self.cells.keys().copied().collect();
        for pos in positions {
            let Some(target) = self.target_of(pos, 1) else { continue };
            let cell = &self.cells[&pos];
            let values = if !self.in_range(target.0, target.1) {
                vec![DiffValue::Unknown("target outside the page range".into()); cell.dim()]
            } else {
                let h = format!("h{}", pos.2 - 1);
                if coeff.multiplier_degree(&h).is_none() {
                    return Err(Error::Dependency(format!("coefficient chart has no {h} multiplication table")));
                }
                let mut vals = Vec::new();
                for rep in cell.page.reps() {
                    let prod = coeff.multiply(&h, &Class { degree: cell.coeff, coords: rep.clone() });
                    vals.push(match prod {
                        Ok(p) => self.page_value(target, &p.coords)?,
                        Err(Error::Range(m)) => DiffValue::Unknown(m),
                        Err(e) => return Err(e),
                    });
                }
                vals
            };
            self.push_values(pos, target, values);
        }
        self.differentials_computed = true;
        Ok(())
    }

    /// `d2(q_i · x) = q_{i-2} · ⟨x, h_{i-1}, h_{i-2}⟩` on E2.
    pub fn compute_d2(&mut self, engine: &dyn ExtEngine) -> Result<()> {
        self.expect_page(2)?;
        let coeff = engine.chart();
        let positions: Vec<Pos> = self.cells.keys().copied().collect();
        for pos in positions {
            let Some(target) = self.target_of(pos, 2) else { continue };
            let cell = &self.cells[&pos];
            if cell.dim() == 0 {
                continue;
            }
            let values = if !self.in_range(target.0, target.1) {
                vec![DiffValue::Unknown("target outside the page range".into()); cell.dim()]
            } else {
                let hb = class_named(coeff, &format!("h{}", pos.2 - 1))?;
                let hc = class_named(coeff, &format!("h{}", pos.2 - 2))?;
                let mut vals = Vec::new();
                for rep in cell.page.reps() {
                    let x = Class { degree: cell.coeff, coords: rep.clone() };
                    vals.push(match engine.massey(&x, &hb, &hc) {
                        Ok(m) => self.page_value(target, &m.value)?,
                        Err(Error::Range(m)) => DiffValue::Unknown(m),
                        Err(Error::Undefined(m)) => return Err(Error::Consistency(format!("bracket undefined on E2 at {pos:?}: {m}"))),
                        Err(e) => return Err(e),
                    });
                }
                vals
            };
            self.push_values(pos, target, values);
        }
        self.differentials_computed = true;
        Ok(())
    }

    /// For `r ≥ 3`, or `r = 2` without Massey products: every possibly
    /// non-zero `d_r` is recorded as unknown.
    pub fn mark_higher(&mut self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::Usage(format!("page {} has a differential formula", self.r)));
        }
        let positions: Vec<Pos> = self.cells.keys().copied().collect();
        for pos in positions {
            let Some(target) = self.target_of(pos, self.r) else { continue };
            let n = self.dim(pos);
            if n == 0 {
                continue;
            }
            let reason = if !self.in_range(target.0, target.1) {
                "target outside the page range".to_string()
            } else if self.dim(target) > 0 && self.r == 2 {
                "d2 needs Massey products, which the coefficient engine lacks".to_string()
            } else if self.dim(target) > 0 {
                format!("d{} has no formula here", self.r)
            } else {
                continue;
            };
            self.push_values(pos, target, vec![DiffValue::Unknown(reason); n]);
        }
        self.differentials_computed = true;
        Ok(())
    }

    fn expect_page(&self, r: u32) -> Result<()> {
        if self.r != r {
            return Err(Error::Usage(format!("expected page {r}, have page {}", self.r)));
        }
        if self.chow == 0 {
            return Err(Error::Usage("the Chow degree zero page has no differentials".into()));
        }
        Ok(())
    }

    /// True if no differential was recorded on this or any later page.
    pub fn is_final(&self) -> bool {
        let top = self.q_indices.iter().max().copied().unwrap_or(0);
        let bottom = self.q_indices.iter().min().copied().unwrap_or(0);
        self.chow == 0 || self.r > top - bottom
    }

    /// Homology of the page with respect to its recorded differentials.
    pub fn turn_page(&self) -> Result<BxPage> {
        if !self.differentials_computed {
            return Err(Error::Usage(format!("differentials on page {} have not been computed", self.r)));
        }
        let mut out_d: BTreeMap<Pos, Vec<(usize, &DiffValue)>> = BTreeMap::new();
        let mut in_d: BTreeMap<Pos, Vec<&DiffValue>> = BTreeMap::new();
        for d in &self.differentials {
            out_d.entry(d.source).or_default().push((d.class, &d.value));
            in_d.entry(d.target).or_default().push(&d.value);
        }
        let mut cells = BTreeMap::new();
        for (&pos, cell) in &self.cells {
            let n = cell.dim();
            let outs = out_d.get(&pos).map_or(&[][..], |v| v.as_slice());
            let ins = in_d.get(&pos).map_or(&[][..], |v| v.as_slice());
            let mut exact = cell.exact;
            // Kernel of d_r in page coordinates.
            let tdim = self.target_of(pos, self.r).map_or(0, |t| self.dim(t));
            let mut rows = vec![BitVec::zeros(tdim); n];
            for &(i, v) in outs {
                match v {
                    DiffValue::Known(v) => rows[i] = v.clone(),
                    DiffValue::Unknown(_) => exact = false,
                }
            }
            let mut kernel = Subspace::with_tags(tdim, n);
            let mut cycles = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                if !kernel.insert_tagged(row, BitVec::unit(n, i)) {
                    // The tag of the combination that reduced `row` to zero.
                    let mut r = row.clone();
                    let mut tag = kernel.reduce(&mut r);
                    tag.flip(i);
                    cycles.push(cell.page.lift(&tag));
                }
            }
            let mut boundaries: Vec<BitVec> = cell.page.boundaries().basis().cloned().collect();
            for v in ins {
                match v {
                    DiffValue::Known(v) => boundaries.push(cell.page.lift(v)),
                    DiffValue::Unknown(_) => exact = false,
                }
            }
            if self.source_outside(pos) {
                exact = false;
            }
            let page = Subquotient::new(cell.basis.len(), &cycles, &boundaries);
            cells.insert(pos, Cell { coeff: cell.coeff, basis: cell.basis.clone(), page, exact });
        }
        let next = BxPage {
            r: self.r + 1,
            chow: self.chow,
            q_indices: self.q_indices.clone(),
            max_stem: self.max_stem,
            max_filtration: self.max_filtration,
            coeff_bounds: self.coeff_bounds,
            cells,
            differentials: Vec::new(),
            differentials_computed: false,
        };
        debug!("page {} has total dimension {}", next.r, next.cells.values().map(Cell::dim).sum::<usize>());
        Ok(next)
    }

    /// True if a `d_r` source for `pos` lies outside the page range.
    fn source_outside(&self, pos: Pos) -> bool {
        let q = pos.2 + self.r;
        self.q_indices.contains(&q) && !self.in_range(pos.0 + 1, pos.1 - 1) && pos.1 >= 2 && {
            let cd = coefficient_degree((pos.0 + 1, pos.1 - 1, q));
            cd.s >= 0 && cd.f >= 0
        }
    }

    /// Status of class `i` of a cell on this page.
    pub fn status(&self, pos: Pos, i: usize) -> String {
        let r = self.r;
        for d in &self.differentials {
            if d.source == pos && d.class == i {
                return match &d.value {
                    DiffValue::Known(v) => format!("supports d{r} -> {}", self.format_value(d.target, v)),
                    DiffValue::Unknown(m) => format!("unknown d{r}: {m}"),
                };
            }
        }
        for d in self.differentials.iter().filter(|d| d.target == pos) {
            if let DiffValue::Known(v) = &d.value {
                if v.get(i) {
                    return format!("hit-by d{r} {}", self.class_name(d.source, d.class));
                }
            }
        }
        "alive".into()
    }

    pub fn format_value(&self, pos: Pos, v: &BitVec) -> String {
        let terms: Vec<String> = v.iter_ones().map(|i| self.class_name(pos, i)).collect();
        terms.join(" + ")
    }

    /// Page dump: `page r chow c : q_i name S f status`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&pos, cell) in &self.cells {
            for i in 0..cell.dim() {
                let name = self.class_name(pos, i);
                let coeff = name.split_once('·').map_or(name.as_str(), |x| x.1);
                let mut status = self.status(pos, i);
                if !cell.exact {
                    status.push_str(" (upper bound)");
                }
                writeln!(out, "page {} chow {} : {} {} {} {} {}", self.r, self.chow, q_label(self.chow, pos.2), coeff, pos.0, pos.1, status).unwrap();
            }
        }
        out
    }
}

fn class_named(chart: &ExtChart, name: &str) -> Result<Class> {
    chart.class(name).ok_or_else(|| Error::Dependency(format!("coefficient chart has no class {name}")))
}

/// Every page from E1 to the last one computed, for one Chow degree.
pub struct BxRun {
    pub pages: Vec<BxPage>,
}

impl BxRun {
    /// Runs the spectral sequence until it stabilises. `d2` is computed
    /// with `engine` when it is given, else recorded as unknown.
    pub fn run(engine: &dyn ExtEngine, q_indices: &[u32], chow: i32, max_stem: i32, max_filtration: i32, massey: bool) -> Result<BxRun> {
        let coeff = engine.chart();
        let mut page = BxPage::e1(coeff, q_indices, chow, max_stem, max_filtration)?;
        info!("BX E1 in Chow degree {chow}: {} cells", page.cells.len());
        let mut pages = Vec::new();
        if chow == 0 {
            pages.push(page);
            return Ok(BxRun { pages });
        }
        loop {
            match page.r {
                1 => page.compute_d1(coeff)?,
                2 if massey => page.compute_d2(engine)?,
                _ => page.mark_higher()?,
            }
            let next = page.turn_page()?;
            let done = next.is_final();
            pages.push(page);
            page = next;
            if done {
                break;
            }
        }
        page.differentials_computed = true;
        pages.push(page);
        Ok(BxRun { pages })
    }

    pub fn page(&self, r: u32) -> Option<&BxPage> {
        self.pages.iter().find(|p| p.r == r)
    }

    pub fn e_infinity(&self) -> &BxPage {
        self.pages.last().expect("at least one page")
    }

    pub fn dump(&self) -> String {
        self.pages.iter().map(BxPage::dump).collect()
    }
}

#[cfg(test)]
mod tests;
