//! Permanent-cycle certificates and hidden-extension candidates.

use std::collections::BTreeMap;

use crate::chart::{Class, ExtChart, ExtEngine};
use crate::f2linalg::{BitMatrixF2, BitVec, rank};
use crate::{Error, Result};

use super::{BxElement, BxPage, BxRun, DiffValue, Pos, motivic_degree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A non-zero permanent cycle, with the two halves of the argument.
    NonZeroPermanent { cycle: String, not_hit: String },
    /// The class supports `d_r`.
    Supports { r: u32 },
    /// The class is killed by `d_r` from `source`.
    Hit { r: u32, source: String },
    Unknown { reason: String },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::NonZeroPermanent { .. })
    }
}

/// Decides whether `el`, an E1 element, is a non-zero permanent cycle.
/// Never claims more than the computed pages show.
pub fn permanent_cycle_certificate(run: &BxRun, el: &BxElement) -> Certificate {
    let e1 = &run.pages[0];
    let pos = el.pos;
    let Some(cell) = e1.cells.get(&pos) else {
        return Certificate::Unknown { reason: format!("no E1 cell at {pos:?}") };
    };
    let v = cell.page.lift(&el.coords);
    if v.is_zero() {
        return Certificate::Unknown { reason: "zero element".into() };
    }
    let q = pos.2;

    // Cycle half: d_r leaves q_i only for r ≤ i.
    let cycle = if q == 0 || e1.chow == 0 {
        "cycle: filtration 0".to_string()
    } else {
        for p in &run.pages[1..] {
            let r = p.r - 1;
            if r > q {
                break;
            }
            let Some(c) = p.cells.get(&pos) else {
                return Certificate::Unknown { reason: format!("cell missing on page {}", p.r) };
            };
            if c.page.coordinates(&v).is_none() {
                return Certificate::Supports { r };
            }
            if let Some(u) = unknown_from(&run.pages[r as usize - 1], pos, &v) {
                return Certificate::Unknown { reason: format!("d{r} on the class is undetermined: {u}") };
            }
        }
        if run.e_infinity().r <= q + 1 && !run.e_infinity().is_final() {
            return Certificate::Unknown { reason: "the run stops before every outgoing differential".into() };
        }
        format!("cycle: d1..d{q} vanish on the computed pages")
    };

    // Not-hit half: check the class on each later page.
    for p in &run.pages[1..] {
        let c = &p.cells[&pos];
        if let Some(coords) = c.page.coordinates(&v) {
            if coords.is_zero() {
                let r = p.r - 1;
                let prev = &run.pages[r as usize - 1];
                let source = prev
                    .differentials
                    .iter()
                    .find(|d| d.target == pos && matches!(&d.value, DiffValue::Known(_)))
                    .map_or_else(|| "?".to_string(), |d| prev.class_name(d.source, d.class));
                return Certificate::Hit { r, source };
            }
        }
    }
    let (ss, sf) = (pos.0 + 1, pos.1 - 1);
    let mut excluded = Vec::new();
    for j in e1.q_indices.iter().copied() {
        let sp = (ss, sf, j);
        let names: Vec<String> = e1.elements().into_iter().filter(|e| e.pos == sp).map(|e| e.name).collect();
        if j <= q {
            excluded.extend(names.into_iter().map(|n| format!("{n} (q-index {j} cannot hit q{q})")));
            continue;
        }
        if sf < 0 {
            continue;
        }
        if !e1.in_range(ss, sf) {
            return Certificate::Unknown { reason: format!("source degree ({ss}, {sf}) is outside the range") };
        }
        if !e1.exact_at(ss, sf) {
            return Certificate::Unknown { reason: format!("coefficients at ({ss}, {sf}) are incomplete") };
        }
        if names.is_empty() {
            continue;
        }
        let r = j - q;
        match run.page(r) {
            Some(p) if p.differentials_computed => {
                if p.differentials.iter().any(|d| d.source == sp && matches!(d.value, DiffValue::Unknown(_))) {
                    return Certificate::Unknown { reason: format!("d{r} from ({ss}, {sf}) q{j} is undetermined") };
                }
                excluded.extend(names.into_iter().map(|n| format!("{n} (d{r} computed)")));
            }
            _ => return Certificate::Unknown { reason: format!("page {r} was not computed") },
        }
    }
    let list = if excluded.is_empty() { "none".to_string() } else { excluded.join(", ") };
    Certificate::NonZeroPermanent {
        cycle,
        not_hit: format!("not hit: all potential sources at regraded degree ({ss}, {sf}) enumerated and excluded: {list}"),
    }
}

/// The message of an undetermined `d_r` touching `v`, if any.
fn unknown_from(page: &BxPage, pos: Pos, v: &BitVec) -> Option<String> {
    let cell = page.cells.get(&pos)?;
    let coords = cell.page.coordinates(v)?;
    page.differentials.iter().find_map(|d| match &d.value {
        DiffValue::Unknown(m) if d.source == pos && coords.get(d.class) => Some(m.clone()),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenCandidate {
    pub multiplier: String,
    pub source: Pos,
    pub source_name: String,
    pub target: Pos,
    pub target_name: String,
    /// `None` until checked against a product in the abutment.
    pub confirmed: Option<bool>,
}

/// Pairs `(x, y)` with `h·x = 0` on E∞ and `y` of lower q-index in the
/// degree of `h·x`.
pub fn hidden_extension_candidates(einf: &BxPage, coeff: &ExtChart, multiplier: &str) -> Result<Vec<HiddenCandidate>> {
    let md = coeff
        .multiplier_degree(multiplier)
        .ok_or_else(|| Error::Dependency(format!("coefficient chart has no {multiplier} multiplication table")))?;
    let mut out = Vec::new();
    for (&pos, cell) in &einf.cells {
        let (ts, tf) = (pos.0 + md.s, pos.1 + md.f);
        if !einf.in_range(ts, tf) {
            continue;
        }
        let lower: Vec<BxElement> =
            einf.elements().into_iter().filter(|e| e.pos.0 == ts && e.pos.1 == tf && e.pos.2 < pos.2).collect();
        if lower.is_empty() {
            continue;
        }
        let target = (ts, tf, pos.2);
        for (i, rep) in cell.page.reps().iter().enumerate() {
            let prod = match coeff.multiply(multiplier, &Class { degree: cell.coeff, coords: rep.clone() }) {
                Ok(p) => p,
                Err(Error::Range(_)) => continue,
                Err(e) => return Err(e),
            };
            let vanishes = prod.is_zero()
                || match einf.cells.get(&target) {
                    Some(t) => t
                        .page
                        .coordinates(&prod.coords)
                        .ok_or_else(|| Error::Consistency(format!("{multiplier} times a permanent cycle is not a cycle at {target:?}")))?
                        .is_zero(),
                    None => true,
                };
            if !vanishes {
                continue;
            }
            for y in &lower {
                out.push(HiddenCandidate {
                    multiplier: multiplier.to_string(),
                    source: pos,
                    source_name: einf.class_name(pos, i),
                    target: y.pos,
                    target_name: y.name.clone(),
                    confirmed: None,
                });
            }
        }
    }
    Ok(out)
}

/// Confirms candidates with the motivic engine: an extension exists at a
/// source degree when the motivic product map has larger rank than the
/// product visible on E∞. Coefficient `h_j` corresponds to motivic
/// `h_{j+1}`.
pub fn confirm_hidden(cands: &mut [HiddenCandidate], einf: &BxPage, coeff: &ExtChart, motivic: &dyn ExtEngine) -> Result<()> {
    let mut verdicts: BTreeMap<(String, i32, i32), Option<bool>> = BTreeMap::new();
    for c in cands.iter_mut() {
        let key = (c.multiplier.clone(), c.source.0, c.source.1);
        if !verdicts.contains_key(&key) {
            let v = confirm_at(einf, coeff, motivic, &c.multiplier, c.source.0, c.source.1)?;
            verdicts.insert(key.clone(), v);
        }
        c.confirmed = verdicts[&key];
    }
    Ok(())
}

fn confirm_at(einf: &BxPage, coeff: &ExtChart, motivic: &dyn ExtEngine, multiplier: &str, s: i32, f: i32) -> Result<Option<bool>> {
    let j: u32 = multiplier
        .strip_prefix('h')
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::Usage(format!("multiplier {multiplier} is not of the form h_j")))?;
    let mname = format!("h{}", j + 1);
    let Some(m) = motivic.chart().class(&mname) else {
        return Err(Error::Dependency(format!("motivic chart has no class {mname}")));
    };
    let md = coeff.multiplier_degree(multiplier).ok_or_else(|| Error::Dependency(format!("no {multiplier} table")))?;
    let (src, tgt) = (motivic_degree(s, f), motivic_degree(s + md.s, f + md.f));
    let (n, tn) = match (motivic.dim(src), motivic.dim(tgt)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::Range(_)), _) | (_, Err(Error::Range(_))) => return Ok(None),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let mut rows = Vec::new();
    for i in 0..n {
        match motivic.product(&m, &Class::basis(src, n, i)) {
            Ok(p) => rows.push(p.coords),
            Err(Error::Range(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    let motivic_rank = rank(&BitMatrixF2::from_rows(tn, &rows));
    let visible = visible_rank(einf, coeff, multiplier, s, f, md.s, md.f)?;
    Ok(Some(motivic_rank > visible))
}

/// Rank of multiplication on E∞ from `(S, f)`, q-index preserved.
fn visible_rank(einf: &BxPage, coeff: &ExtChart, multiplier: &str, s: i32, f: i32, ds: i32, df: i32) -> Result<usize> {
    let mut total = 0;
    for &q in &einf.q_indices {
        let Some(cell) = einf.cells.get(&(s, f, q)) else { continue };
        let Some(t) = einf.cells.get(&(s + ds, f + df, q)) else { continue };
        let mut rows = Vec::new();
        for rep in cell.page.reps() {
            let p = coeff.multiply(multiplier, &Class { degree: cell.coeff, coords: rep.clone() })?;
            rows.push(t.page.coordinates(&p.coords).unwrap_or_else(|| BitVec::zeros(t.dim())));
        }
        total += rank(&BitMatrixF2::from_rows(t.dim(), &rows));
    }
    Ok(total)
}
