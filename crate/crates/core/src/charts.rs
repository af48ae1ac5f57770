//! Deterministic SVG and TSV rendering of Ext charts and BX pages.
//!
//! Dots are colored by q-index (gray, red, blue, green, purple for q0..q4).
//! Multiplications by h0, h1 and h2 are black lines, differentials are
//! magenta with slope -1 and hidden extensions are orange. Several classes
//! in one degree share the integral position and are told apart by their
//! slot.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bx::{BxPage, DiffValue, HiddenCandidate, Pos};
use crate::chart::{Class, ExtChart};
use crate::f2linalg::BitVec;

pub const Q_COLORS: [&str; 5] = ["gray", "red", "blue", "green", "purple"];
const STRUCTURE: [&str; 3] = ["h0", "h1", "h2"];
const CELL: i32 = 24;
const MARGIN: i32 = 40;

pub fn q_color(q: u32) -> &'static str {
    Q_COLORS.get(q as usize).copied().unwrap_or("black")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dot {
    pub x: i32,
    pub y: i32,
    /// Index among the dots at `(x, y)`.
    pub slot: usize,
    pub color: &'static str,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineKind {
    Structure(String),
    Differential(u32),
    Hidden(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub kind: LineKind,
    /// Indices into the dot list.
    pub from: usize,
    pub to: usize,
}

impl Line {
    fn color(&self) -> &'static str {
        match self.kind {
            LineKind::Structure(_) => "black",
            LineKind::Differential(_) => "magenta",
            LineKind::Hidden(_) => "orange",
        }
    }

    fn label(&self) -> String {
        match &self.kind {
            LineKind::Structure(h) => h.clone(),
            LineKind::Differential(r) => format!("d{r}"),
            LineKind::Hidden(h) => format!("hidden-{h}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChartDocument {
    pub title: String,
    pub x_axis: String,
    pub max_x: i32,
    pub max_y: i32,
    pub dots: Vec<Dot>,
    pub lines: Vec<Line>,
    /// Dots whose h0-tower continues past the top of the range.
    pub arrows: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Clips a requested range to the data range, recording a warning.
fn clip(requested: Option<(i32, i32)>, data: (i32, i32), warnings: &mut Vec<String>) -> (i32, i32) {
    let Some((x, y)) = requested else { return data };
    if x > data.0 || y > data.1 {
        warnings.push(format!("requested range ({x}, {y}) exceeds the data range ({}, {}); clipped", data.0, data.1));
    }
    (x.min(data.0), y.min(data.1))
}

struct Builder {
    doc: ChartDocument,
    index: BTreeMap<(i32, i32, u32, usize), usize>,
    per_spot: BTreeMap<(i32, i32), usize>,
}

impl Builder {
    fn new(doc: ChartDocument) -> Self {
        Builder { doc, index: BTreeMap::new(), per_spot: BTreeMap::new() }
    }

    fn in_range(&self, x: i32, y: i32) -> bool {
        (0..=self.doc.max_x).contains(&x) && (0..=self.doc.max_y).contains(&y)
    }

    fn dot(&mut self, key: (i32, i32, u32, usize), color: &'static str, label: String) {
        let slot = self.per_spot.entry((key.0, key.1)).or_default();
        self.doc.dots.push(Dot { x: key.0, y: key.1, slot: *slot, color, label });
        *slot += 1;
        self.index.insert(key, self.doc.dots.len() - 1);
    }

    fn line(&mut self, kind: LineKind, from: (i32, i32, u32, usize), to: (i32, i32, u32, usize)) {
        if let (Some(&a), Some(&b)) = (self.index.get(&from), self.index.get(&to)) {
            self.doc.lines.push(Line { kind, from: a, to: b });
        }
    }
}

/// An Ext chart in `(s, f)` coordinates.
pub fn render_chart(chart: &ExtChart, range: Option<(i32, i32)>) -> ChartDocument {
    let mut warnings = Vec::new();
    let (max_x, max_y) = clip(range, (chart.bounds.max_stem, chart.bounds.max_filtration), &mut warnings);
    let title = format!("Ext over {}", chart.algebra);
    let mut b = Builder::new(ChartDocument { title, x_axis: "stem".into(), max_x, max_y, warnings, ..Default::default() });
    // Several weights can share an (s, f) spot in a motivic chart.
    let key = |d: crate::hopf::TriDegree, i: usize| (d.s, d.f, d.w as u32, i);
    let groups: Vec<_> = chart.groups().filter(|(d, _)| b.in_range(d.s, d.f)).map(|(d, n)| (d, n.to_vec())).collect();
    let mut sorted = groups.clone();
    sorted.sort_by_key(|(d, _)| (d.s, d.f, d.w));
    for (d, names) in &sorted {
        for (i, n) in names.iter().enumerate() {
            b.dot(key(*d, i), "black", n.clone());
        }
    }
    for (d, names) in &sorted {
        for h in STRUCTURE {
            for i in 0..names.len() {
                if h == "h0" && d.f == max_y && tower_continues(chart, *d, i) {
                    let idx = b.index[&key(*d, i)];
                    b.doc.arrows.push(idx);
                }
                let Ok(p) = chart.multiply(h, &Class::basis(*d, names.len(), i)) else { continue };
                for j in p.coords.iter_ones() {
                    b.line(LineKind::Structure(h.into()), key(*d, i), key(p.degree, j));
                }
            }
        }
    }
    b.doc
}

/// True if class `i` at `d` is an h0-multiple itself.
fn tower_continues(chart: &ExtChart, d: crate::hopf::TriDegree, i: usize) -> bool {
    let Some(md) = chart.multiplier_degree("h0") else { return false };
    let below = d - md;
    (0..chart.dim(below)).any(|k| chart.multiply("h0", &Class::basis(below, chart.dim(below), k)).is_ok_and(|p| p.coords.get(i)))
}

/// A BX page in regraded `(S, f)` coordinates. Structure lines come from
/// the coefficient chart; `hidden` adds orange lines.
pub fn render_page(page: &BxPage, coeff: &ExtChart, hidden: &[HiddenCandidate], range: Option<(i32, i32)>) -> ChartDocument {
    let mut warnings = Vec::new();
    let (max_x, max_y) = clip(range, (page.max_stem, page.max_filtration), &mut warnings);
    let title = format!("E{} Chow {} over {}", page.r, page.chow, coeff.algebra);
    let x_axis = if page.chow == 0 { "stem" } else { "coweight" };
    let mut b = Builder::new(ChartDocument { title, x_axis: x_axis.into(), max_x, max_y, warnings, ..Default::default() });
    let key = |p: Pos, i: usize| (p.0, p.1, p.2, i);
    let cells: Vec<(Pos, &crate::bx::Cell)> = page.cells.iter().filter(|(p, _)| b.in_range(p.0, p.1)).map(|(p, c)| (*p, c)).collect();
    for &(pos, cell) in &cells {
        for i in 0..cell.dim() {
            b.dot(key(pos, i), q_color(pos.2), page.class_name(pos, i));
        }
    }
    for &(pos, cell) in &cells {
        for h in STRUCTURE {
            let Some(md) = coeff.multiplier_degree(h) else { continue };
            let target = (pos.0 + md.s, pos.1 + md.f, pos.2);
            let Some(t) = page.cells.get(&target) else { continue };
            for (i, rep) in cell.page.reps().iter().enumerate() {
                let Ok(p) = coeff.multiply(h, &Class { degree: cell.coeff, coords: rep.clone() }) else { continue };
                let coords = t.page.coordinates(&p.coords).unwrap_or_else(|| BitVec::zeros(t.dim()));
                for j in coords.iter_ones() {
                    b.line(LineKind::Structure(h.into()), key(pos, i), key(target, j));
                }
            }
        }
    }
    for d in &page.differentials {
        if let DiffValue::Known(v) = &d.value {
            for j in v.iter_ones() {
                b.line(LineKind::Differential(d.r), key(d.source, d.class), key(d.target, j));
            }
        }
    }
    for c in hidden {
        let (Some(i), Some(j)) = (class_index(page, c.source, &c.source_name), class_index(page, c.target, &c.target_name)) else { continue };
        b.line(LineKind::Hidden(c.multiplier.clone()), key(c.source, i), key(c.target, j));
    }
    b.doc
}

fn class_index(page: &BxPage, pos: Pos, name: &str) -> Option<usize> {
    (0..page.dim(pos)).find(|&i| page.class_name(pos, i) == name)
}

impl ChartDocument {
    /// One record per dot, line and arrow under a fixed header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            writeln!(out, "# warning: {w}").unwrap();
        }
        writeln!(out, "kind\tx\ty\tcolor\tlabel\textra").unwrap();
        for d in &self.dots {
            writeln!(out, "dot\t{}\t{}\t{}\t{}\tslot={}", d.x, d.y, d.color, d.label, d.slot).unwrap();
        }
        for l in &self.lines {
            let (a, b) = (&self.dots[l.from], &self.dots[l.to]);
            writeln!(out, "line\t{}\t{}\t{}\t{}\tto={},{} slots={},{}", a.x, a.y, l.color(), l.label(), b.x, b.y, a.slot, b.slot).unwrap();
        }
        for &i in &self.arrows {
            let d = &self.dots[i];
            writeln!(out, "arrow\t{}\t{}\tblack\th0-tower\tslot={}", d.x, d.y, d.slot).unwrap();
        }
        out
    }

    fn px(&self, d: &Dot) -> (f64, f64) {
        let n = self.dots.iter().filter(|e| e.x == d.x && e.y == d.y).count();
        let offset = (d.slot as f64 - (n as f64 - 1.0) / 2.0) * 6.0;
        let x = (MARGIN + d.x * CELL) as f64 + offset;
        let y = (MARGIN + (self.max_y - d.y) * CELL) as f64;
        (x, y)
    }

    pub fn to_svg(&self) -> String {
        let (w, h) = (2 * MARGIN + self.max_x.max(0) * CELL, 2 * MARGIN + self.max_y.max(0) * CELL);
        let mut out = String::new();
        writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
        for warning in &self.warnings {
            writeln!(out, "<!-- warning: {} -->", escape(warning)).unwrap();
        }
        writeln!(out, r#"<title>{}</title>"#, escape(&self.title)).unwrap();
        writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#).unwrap();
        // Axes and ticks.
        let (x0, y0) = (MARGIN, MARGIN + self.max_y.max(0) * CELL);
        writeln!(out, r#"<g stroke="lightgray" stroke-width="0.5">"#).unwrap();
        for x in 0..=self.max_x.max(0) {
            let px = MARGIN + x * CELL;
            writeln!(out, r#"<line x1="{px}" y1="{MARGIN}" x2="{px}" y2="{y0}"/>"#).unwrap();
        }
        for y in 0..=self.max_y.max(0) {
            let py = MARGIN + y * CELL;
            writeln!(out, r#"<line x1="{x0}" y1="{py}" x2="{}" y2="{py}"/>"#, MARGIN + self.max_x.max(0) * CELL).unwrap();
        }
        writeln!(out, "</g>").unwrap();
        writeln!(out, r#"<g font-size="9" fill="black" text-anchor="middle">"#).unwrap();
        for x in (0..=self.max_x.max(0)).step_by(2) {
            writeln!(out, r#"<text x="{}" y="{}">{x}</text>"#, MARGIN + x * CELL, y0 + 16).unwrap();
        }
        for y in (0..=self.max_y.max(0)).step_by(2) {
            writeln!(out, r#"<text x="{}" y="{}">{y}</text>"#, MARGIN - 16, MARGIN + (self.max_y - y) * CELL + 3).unwrap();
        }
        writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, w / 2, h - 6, escape(&self.x_axis)).unwrap();
        writeln!(out, "</g>").unwrap();
        for l in &self.lines {
            let ((x1, y1), (x2, y2)) = (self.px(&self.dots[l.from]), self.px(&self.dots[l.to]));
            writeln!(
                out,
                r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{}" stroke-width="1"><title>{}</title></line>"#,
                l.color(),
                escape(&l.label())
            )
            .unwrap();
        }
        for &i in &self.arrows {
            let (x, y) = self.px(&self.dots[i]);
            writeln!(out, r#"<path d="M {x:.1} {y:.1} L {x:.1} {:.1} M {:.1} {:.1} L {x:.1} {:.1} L {:.1} {:.1}" stroke="black" fill="none"/>"#, y - 14.0, x - 3.0, y - 10.0, y - 14.0, x + 3.0, y - 10.0).unwrap();
        }
        for d in &self.dots {
            let (x, y) = self.px(d);
            writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5" fill="{}"><title>{}</title></circle>"#, d.color, escape(&d.label)).unwrap();
        }
        writeln!(out, "</svg>").unwrap();
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bx::{hidden_extension_candidates, BxRun};
    use crate::chart::ExtEngine as _;
    use crate::hopf::{Grading, Preset};
    use crate::resolution::{DualAlgebra, Region, Resolution, ResolutionExt};

    fn a1(s: i32, f: i32) -> ResolutionExt {
        let mut r = Resolution::new(Arc::new(DualAlgebra::new(&Preset::Acl1.build()).unwrap()));
        r.extend(Region::Stem { max_stem: s, max_filtration: f }).unwrap();
        ResolutionExt::new(r).unwrap()
    }

    #[test]
    fn a2_pages_show_d2_and_hidden_lines() {
        let coeff = a1(20, 10);
        let run = BxRun::run(&coeff, &[0, 1, 2], 1, 20, 11, true).unwrap();
        let e2 = run.page(2).unwrap();
        let doc = render_page(e2, coeff.chart(), &[], None);
        let known: usize = e2.differentials.iter().map(|d| match &d.value {
            DiffValue::Known(v) => v.count_ones(),
            DiffValue::Unknown(_) => 0,
        }).sum();
        let d2: Vec<&Line> = doc.lines.iter().filter(|l| l.kind == LineKind::Differential(2)).collect();
        assert_eq!(d2.len(), known);
        for l in d2 {
            let (a, b) = (&doc.dots[l.from], &doc.dots[l.to]);
            assert_eq!((b.x - a.x, b.y - a.y), (-1, 1), "slope -1");
            assert!(a.label.starts_with("q2·") && b.label.starts_with("q0·"));
        }
        let einf = run.e_infinity();
        let cands = hidden_extension_candidates(einf, coeff.chart(), "h1").unwrap();
        let doc = render_page(einf, coeff.chart(), &cands, None);
        let hidden: Vec<(String, String)> = doc
            .lines
            .iter()
            .filter(|l| matches!(l.kind, LineKind::Hidden(_)))
            .map(|l| (doc.dots[l.from].label.clone(), doc.dots[l.to].label.clone()))
            .collect();
        assert_eq!(hidden, [("q2·a".to_string(), "q0·P".to_string()), ("q2·Pa".to_string(), "q0·P^2".to_string())]);
        assert_eq!(doc.dots.len(), einf.cells.values().map(|c| c.dim()).sum::<usize>());
        assert!(doc.to_tsv().contains("line\t7\t4\torange\thidden-h1\tto=8,5"));
    }

    #[test]
    fn structure_line_slopes() {
        let doc = render_chart(a1(12, 6).chart(), None);
        for l in &doc.lines {
            let (a, b) = (&doc.dots[l.from], &doc.dots[l.to]);
            let LineKind::Structure(h) = &l.kind else { panic!("only structure lines") };
            let expect = match h.as_str() {
                "h0" => (0, 1),
                "h1" => (1, 1),
                _ => (3, 1),
            };
            assert_eq!((b.x - a.x, b.y - a.y), expect);
        }
        assert!(doc.arrows.iter().any(|&i| doc.dots[i].x == 0 && doc.dots[i].y == 6));
    }

    #[test]
    fn empty_page_has_axes_only() {
        let chart = ExtChart::new("none", Grading::Classical, crate::chart::ChartBounds::stems(4, 3));
        let page = BxPage::e1(&chart, &[0, 1], 1, 4, 3).unwrap();
        let svg = render_page(&page, &chart, &[], None).to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<circle"));
        assert_eq!(render_page(&page, &chart, &[], None).to_tsv(), "kind\tx\ty\tcolor\tlabel\textra\n");
    }

    #[test]
    fn output_is_stable_and_clipped() {
        let coeff = a1(10, 5);
        let doc = render_chart(coeff.chart(), Some((30, 3)));
        assert_eq!(doc.max_x, 10);
        assert!(doc.to_svg().contains("<!-- warning: requested range (30, 3)"));
        assert!(doc.to_tsv().starts_with("# warning:"));
        assert_eq!(doc.to_svg(), render_chart(coeff.chart(), Some((30, 3))).to_svg());
        let inside = coeff.chart().groups().filter(|(d, _)| d.f <= 3).map(|(_, n)| n.len()).sum::<usize>();
        assert_eq!(doc.dots.len(), inside);
        assert_eq!(doc.dots.iter().filter(|d| d.x == 8 && d.y == 3).count(), 0);
        assert!(doc.dots.iter().all(|d| d.color == "black"));
    }
}
