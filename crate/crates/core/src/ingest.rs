//! Machine-computed chart data: parsing, emission, Chow filtering and
//! coexponent scans.
//!
//! Generators are named `{a-b}` where `a` is the Adams filtration and `b`
//! an index. The default layout is tab-separated with a header row:
//!
//! ```text
//! # multiplier h0 0 1 0
//! stem	filtration	weight	name	label	edges
//! 7	1	4	{1-3}	h3	h0:{2-5};h1:
//! ```
//!
//! An edge list `h0:{2-5},{2-6}` means `h0·x = {2-5} + {2-6}`. An empty
//! list means the product is zero; a multiplier missing from the field
//! means the product is unknown.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use crate::chart::ExtChart;
use crate::f2linalg::{BitMatrixF2, BitVec, Subspace};
use crate::hopf::TriDegree;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineGen {
    pub degree: TriDegree,
    pub name: String,
    /// Conventional name, when the source has one.
    pub label: Option<String>,
    /// Multiplier to the generators occurring in the product.
    pub edges: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MachineChart {
    /// Sorted by degree, then name.
    pub gens: Vec<MachineGen>,
    pub multipliers: BTreeMap<String, TriDegree>,
}

/// Which input column holds which field. Weight, label and edges are optional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMap {
    pub delimiter: u8,
    pub stem: String,
    pub filtration: String,
    pub weight: Option<String>,
    pub name: String,
    pub label: Option<String>,
    pub edges: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            delimiter: b'\t',
            stem: "stem".into(),
            filtration: "filtration".into(),
            weight: Some("weight".into()),
            name: "name".into(),
            label: Some("label".into()),
            edges: Some("edges".into()),
        }
    }
}

impl ColumnMap {
    /// Reads `key=value` lines on top of the defaults. Keys are the field
    /// names plus `delimiter` (`tab`, `comma`, `semicolon` or one character);
    /// an empty value drops an optional column.
    pub fn parse(text: &str) -> Result<ColumnMap> {
        let mut map = ColumnMap::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(i + 1, "expected key=value"))?;
            let (k, v) = (k.trim(), v.trim());
            let opt = || (!v.is_empty()).then(|| v.to_string());
            match k {
                "delimiter" => {
                    map.delimiter = match v {
                        "tab" => b'\t',
                        "comma" => b',',
                        "semicolon" => b';',
                        _ if v.len() == 1 => v.as_bytes()[0],
                        _ => return Err(Error::parse(i + 1, format!("bad delimiter {v:?}"))),
                    }
                }
                "stem" => map.stem = v.into(),
                "filtration" => map.filtration = v.into(),
                "name" => map.name = v.into(),
                "weight" => map.weight = opt(),
                "label" => map.label = opt(),
                "edges" => map.edges = opt(),
                _ => return Err(Error::parse(i + 1, format!("unknown column key {k}"))),
            }
        }
        Ok(map)
    }
}

/// Row accounting: `parsed + warned + errored == total`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub total: usize,
    pub parsed: usize,
    pub warned: usize,
    pub errored: usize,
    /// `(line, message)`; line 1 is the header.
    pub warnings: Vec<(usize, String)>,
    pub errors: Vec<(usize, String)>,
}

fn parse_name_filtration(name: &str) -> Option<i32> {
    let inner = name.strip_prefix('{')?.strip_suffix('}')?;
    let (a, b) = inner.split_once('-')?;
    b.parse::<u64>().ok()?;
    a.parse().ok()
}

fn parse_edges(field: &str) -> std::result::Result<BTreeMap<String, Vec<String>>, String> {
    let mut out = BTreeMap::new();
    for part in field.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (m, list) = part.split_once(':').ok_or_else(|| format!("edge entry {part:?} lacks `:`"))?;
        let targets: Vec<String> = list.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::to_string).collect();
        if out.insert(m.trim().to_string(), targets).is_some() {
            return Err(format!("multiplier {m} listed twice"));
        }
    }
    Ok(out)
}

/// Parses delimiter-separated chart data. Rows that fail are reported
/// with their line number and skipped; a missing mandatory column is fatal.
pub fn parse_machine_chart(text: &str, map: &ColumnMap) -> Result<(MachineChart, IngestReport)> {
    let mut chart = MachineChart::default();
    let mut report = IngestReport::default();
    let mut body = String::new();
    let mut first_data_line = 0;
    // Leading comment lines may declare multiplier degrees.
    for (i, line) in text.lines().enumerate() {
        if body.is_empty() && first_data_line == 0 {
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() == 5 && toks[0] == "multiplier" {
                    let n = |s: &str| s.parse::<i32>().map_err(|_| Error::parse(i + 1, format!("bad integer {s}")));
                    chart.multipliers.insert(toks[1].to_string(), TriDegree::new(n(toks[2])?, n(toks[3])?, n(toks[4])?));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            first_data_line = i;
        }
        body.push_str(line);
        body.push('\n');
    }
    if body.is_empty() {
        return Ok((chart, report));
    }
    let mut rdr = csv::ReaderBuilder::new().delimiter(map.delimiter).flexible(true).comment(Some(b'#')).from_reader(body.as_bytes());
    let header = rdr.headers().map_err(|e| Error::parse(first_data_line + 1, e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let need = |name: &String| col(name).ok_or_else(|| Error::parse(first_data_line + 1, format!("missing mandatory column {name}")));
    let (cs, cf, cn) = (need(&map.stem)?, need(&map.filtration)?, need(&map.name)?);
    let opt = |name: &Option<String>, what: &str| -> Option<usize> {
        let name = name.as_ref()?;
        let c = col(name);
        if c.is_none() {
            warn!("optional {what} column {name} is absent");
        }
        c
    };
    let (cw, cl, ce) = (opt(&map.weight, "weight"), opt(&map.label, "label"), opt(&map.edges, "edges"));
    let known: BTreeSet<usize> = [Some(cs), Some(cf), Some(cn), cw, cl, ce].into_iter().flatten().collect();
    for (i, h) in header.iter().enumerate() {
        if !known.contains(&i) {
            report.warnings.push((first_data_line + 1, format!("ignored column {h}")));
        }
    }

    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut rows: Vec<(usize, MachineGen, bool)> = Vec::new();
    for rec in rdr.records() {
        report.total += 1;
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize) + first_data_line;
                report.errored += 1;
                report.errors.push((line, e.to_string()));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line() as usize) + first_data_line;
        let field = |c: usize| rec.get(c).map(str::trim);
        let row = (|| -> std::result::Result<MachineGen, String> {
            let int = |c: usize, what: &str| -> std::result::Result<i32, String> {
                let v = field(c).ok_or_else(|| format!("missing {what}"))?;
                v.parse().map_err(|_| format!("bad {what} {v:?}"))
            };
            let (s, f) = (int(cs, "stem")?, int(cf, "filtration")?);
            let w = match cw {
                Some(c) => int(c, "weight")?,
                None => 0,
            };
            let name = field(cn).filter(|n| !n.is_empty()).ok_or("missing name")?.to_string();
            match parse_name_filtration(&name) {
                Some(a) if a == f => {}
                Some(a) => return Err(format!("name {name} has filtration {a}, row has {f}")),
                None => return Err(format!("name {name:?} is not of the form {{a-b}}")),
            }
            let label = cl.and_then(field).filter(|l| !l.is_empty()).map(str::to_string);
            let edges = match ce.and_then(field) {
                Some(e) => parse_edges(e)?,
                None => BTreeMap::new(),
            };
            Ok(MachineGen { degree: TriDegree::new(s, f, w), name, label, edges })
        })();
        match row {
            Ok(g) if names.contains(&g.name) => {
                report.errored += 1;
                report.errors.push((line, format!("duplicate name {}", g.name)));
            }
            Ok(g) => {
                names.insert(g.name.clone());
                rows.push((line, g, false));
            }
            Err(msg) => {
                report.errored += 1;
                report.errors.push((line, msg));
            }
        }
    }

    // Edges to unknown generators make that product unknown.
    let degree_of: BTreeMap<String, TriDegree> = rows.iter().map(|(_, g, _)| (g.name.clone(), g.degree)).collect();
    for (line, g, warned) in &mut rows {
        let mut drop = Vec::new();
        for (m, targets) in &g.edges {
            for t in targets {
                match degree_of.get(t) {
                    None => {
                        report.warnings.push((*line, format!("{m} edge to unknown generator {t} dropped")));
                        drop.push(m.clone());
                        *warned = true;
                    }
                    Some(&td) => {
                        let md = td - g.degree;
                        match chart.multipliers.get(m) {
                            Some(&d) if d != md => {
                                report.warnings.push((*line, format!("{m} edge to {t} has degree {md}, expected {d}")));
                                drop.push(m.clone());
                                *warned = true;
                            }
                            Some(_) => {}
                            None => {
                                chart.multipliers.insert(m.clone(), md);
                            }
                        }
                    }
                }
            }
        }
        for m in drop {
            g.edges.remove(&m);
        }
    }
    for (_, g, warned) in rows {
        if warned {
            report.warned += 1;
        } else {
            report.parsed += 1;
        }
        chart.gens.push(g);
    }
    chart.sort();
    Ok((chart, report))
}

pub fn parse_machine_chart_file(path: &Path, map: &ColumnMap) -> Result<(MachineChart, IngestReport)> {
    parse_machine_chart(&std::fs::read_to_string(path)?, map)
}

impl MachineChart {
    fn sort(&mut self) {
        self.gens.sort_by_key(|a| (a.degree.f, a.degree.s, a.degree.w, index(&a.name)));
    }

    /// Converts a computed chart: generators are numbered per filtration
    /// in order of stem and weight, and every tabulated product becomes an
    /// edge list.
    pub fn from_ext_chart(chart: &ExtChart) -> MachineChart {
        let mut by_f: BTreeMap<i32, Vec<(TriDegree, usize)>> = BTreeMap::new();
        for (d, names) in chart.groups() {
            for i in 0..names.len() {
                by_f.entry(d.f).or_default().push((d, i));
            }
        }
        let mut machine_name: BTreeMap<(TriDegree, usize), String> = BTreeMap::new();
        for (f, mut list) in by_f {
            list.sort_by_key(|(d, i)| (d.s, d.w, *i));
            for (b, key) in list.into_iter().enumerate() {
                machine_name.insert(key, format!("{{{f}-{}}}", b + 1));
            }
        }
        let multipliers: BTreeMap<String, TriDegree> = chart.multipliers().map(|(m, d)| (m.to_string(), d)).collect();
        let mut gens = Vec::new();
        for (&(d, i), name) in &machine_name {
            let mut edges = BTreeMap::new();
            for m in multipliers.keys() {
                let x = crate::chart::Class::basis(d, chart.dim(d), i);
                if let Ok(p) = chart.multiply(m, &x) {
                    edges.insert(m.clone(), p.coords.iter_ones().map(|j| machine_name[&(p.degree, j)].clone()).collect());
                }
            }
            gens.push(MachineGen { degree: d, name: name.clone(), label: Some(chart.names(d)[i].clone()), edges });
        }
        let mut out = MachineChart { gens, multipliers };
        out.sort();
        out
    }

    pub fn get(&self, name: &str) -> Option<&MachineGen> {
        self.gens.iter().find(|g| g.name == name)
    }

    pub fn at(&self, d: TriDegree) -> Vec<&MachineGen> {
        self.gens.iter().filter(|g| g.degree == d).collect()
    }

    /// Emits in the default column layout.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (m, d) in &self.multipliers {
            writeln!(out, "# multiplier {m} {} {} {}", d.s, d.f, d.w).unwrap();
        }
        let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(Vec::new());
        w.write_record(["stem", "filtration", "weight", "name", "label", "edges"]).unwrap();
        for g in &self.gens {
            let edges: Vec<String> = g.edges.iter().map(|(m, t)| format!("{m}:{}", t.join(","))).collect();
            let (s, f, wt) = (g.degree.s.to_string(), g.degree.f.to_string(), g.degree.w.to_string());
            w.write_record([s.as_str(), &f, &wt, &g.name, g.label.as_deref().unwrap_or(""), &edges.join(";")]).unwrap();
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory writer")).expect("UTF-8 fields"));
        out
    }

    /// Generators of Chow degree `c`; edges leaving the result are dropped.
    pub fn filter_chow(&self, c: i32) -> MachineChart {
        let keep: BTreeSet<&str> = self.gens.iter().filter(|g| g.degree.chow() == c).map(|g| g.name.as_str()).collect();
        let gens = self
            .gens
            .iter()
            .filter(|g| keep.contains(g.name.as_str()))
            .map(|g| {
                let mut g = g.clone();
                g.edges.retain(|_, t| t.iter().all(|x| keep.contains(x.as_str())));
                g
            })
            .collect();
        let multipliers = self.multipliers.iter().filter(|(_, d)| d.chow() == 0).map(|(m, d)| (m.clone(), *d)).collect();
        MachineChart { gens, multipliers }
    }
}

fn index(name: &str) -> u64 {
    name.trim_end_matches('}').rsplit_once('-').and_then(|(_, b)| b.parse().ok()).unwrap_or(u64::MAX)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coexponent {
    pub cogenerator: String,
    pub value: u32,
    /// Set when an edge needed to continue the chain is missing, so the
    /// true coexponent may be larger.
    pub lower_bound: bool,
}

/// One more than the number of times `multiplier` divides the generator
/// at `degree`, which must be the only generator there or the only one
/// annihilated by the multiplier.
pub fn coexponent_scan(chart: &MachineChart, multiplier: &str, degree: TriDegree) -> Result<Coexponent> {
    let md = *chart.multipliers.get(multiplier).ok_or_else(|| Error::Dependency(format!("chart has no {multiplier} edges")))?;
    let here = chart.at(degree);
    let cog = match here.as_slice() {
        [] => return Err(Error::Usage(format!("no cogenerator at {degree}"))),
        [g] => *g,
        many => {
            let torsion: Vec<&&MachineGen> = many.iter().filter(|g| g.edges.get(multiplier).is_some_and(Vec::is_empty)).collect();
            match torsion.as_slice() {
                [g] => **g,
                _ => return Err(Error::Usage(format!("{} generators at {degree}; the cogenerator is ambiguous", many.len()))),
            }
        }
    };
    let index_at = |d: TriDegree| -> BTreeMap<&str, usize> { chart.at(d).iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect() };
    let target_index = index_at(degree);
    let y = BitVec::unit(target_index.len(), target_index[cog.name.as_str()]);

    // m^k(H_{d - k·md}) as vectors at `degree`, for growing k.
    let mut power: Option<BitMatrixF2> = None; // rows: images of the source basis at the current k
    let mut lower_bound = false;
    let mut k = 0;
    loop {
        let src = degree - TriDegree::new(md.s * (k + 1), md.f * (k + 1), md.w * (k + 1));
        let gens = chart.at(src);
        if gens.is_empty() {
            break;
        }
        let next = src + md;
        let next_index = index_at(next);
        let mut rows = Vec::new();
        for g in &gens {
            let Some(targets) = g.edges.get(multiplier) else {
                lower_bound = true;
                rows.clear();
                break;
            };
            rows.push(BitVec::from_ones(next_index.len(), targets.iter().map(|t| next_index[t.as_str()])));
        }
        if rows.is_empty() {
            break;
        }
        let step = BitMatrixF2::from_rows(next_index.len(), &rows);
        let composed = match &power {
            None => step,
            Some(p) => step.mul(p),
        };
        let image = Subspace::from_vectors(target_index.len(), &composed.to_rows());
        if !image.contains(&y) {
            break;
        }
        power = Some(composed);
        k += 1;
    }
    Ok(Coexponent { cogenerator: cog.name.clone(), value: k as u32 + 1, lower_bound })
}

#[cfg(test)]
mod tests;
