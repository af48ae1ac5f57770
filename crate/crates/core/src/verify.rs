//! The acceptance criteria as runnable checks, plus a seeded linear
//! algebra self-test.
//!
//! Each check returns a one-line result. Ranges and filtration caps are
//! pinned here; unbounded h0-towers make a cap necessary everywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use log::info;

use crate::bx::{self, BxPage, BxRun, Certificate, DiffValue};
use crate::chart::{ChartBounds, ExtChart, ExtEngine};
use crate::cobar::{ext_compute, CobarBudget};
use crate::f2linalg::{self, BitMatrixF2, BitVec};
use crate::hopf::{Preset, TriDegree};
use crate::ingest::{coexponent_scan, parse_machine_chart, ColumnMap, MachineChart};
use crate::oracle::{self, QuotientRing};
use crate::resolution::{intercept_scan, DualAlgebra, GradedAlgebra, MilnorAlgebra, Region, Resolution, ResolutionExt};

/// Criterion 1: A(1) stems and filtration cap; the cobar route is smaller.
pub const A1_RANGE: (i32, i32) = (40, 24);
pub const A1_COBAR_RANGE: (i32, i32) = (20, 5);
/// Criterion 2: coweight bound, Chow degrees scanned, filtration cap.
pub const B2_RANGE: (i32, i32, i32) = (30, 3, 12);
pub const B2_COBAR_RANGE: (i32, i32) = (10, 4);
/// Criterion 3: coweight bound and filtration cap; cobar cross-check.
pub const A2_CHOW0_RANGE: (i32, i32) = (30, 16);
pub const A2_CHOW0_COBAR_RANGE: (i32, i32) = (30, 5);
/// Criterion 4: regraded stems and filtration of the A(2) run.
pub const A2_BX_RANGE: (i32, i32) = (40, 21);
/// Criterion 5: coweight bound; filtration caps for the cobar and
/// resolution routes.
pub const CHOW1_COWEIGHT: i32 = 12;
pub const CHOW1_COBAR_F: i32 = 5;
pub const CHOW1_RESOLUTION_F: i32 = 12;
/// Criterion 7: full Steenrod algebra range.
pub const FULL_RANGE: (i32, i32) = (45, 24);
/// Criterion 8: regraded range of the full-A BX run.
pub const FULL_BX_RANGE: (i32, i32) = (27, 15);

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let name = if self.id == 0 { "linalg".to_string() } else { format!("criterion {}", self.id) };
        write!(f, "{name} {verdict} [{:.1}s] {}: {}", self.seconds, self.title, self.detail)
    }
}

type Check = fn() -> Result<String, String>;

const CHECKS: [(u32, &str, Check); 10] = [
    (0, "GF(2) linear algebra properties", linalg),
    (1, "Ext over classical A(1)", c1),
    (2, "B(2) is A(1) shifted into Chow degree zero", c2),
    (3, "motivic A(2) in Chow degree zero", c3),
    (4, "BX spectral sequence over A(2) in Chow degree one", c4),
    (5, "motivic A(2) Chow degree one against BX E-infinity", c5),
    (6, "Massey products over A(1)", c6),
    (7, "full Steenrod algebra resolution and censuses", c7),
    (8, "permanent-cycle certificates", c8),
    (9, "ingestion round trip and Chow-one extraction", c9),
];

/// Named groups of checks.
pub fn suite(name: &str) -> Option<Vec<u32>> {
    Some(match name {
        "all" | "acceptance" => (1..=9).collect(),
        "a1" => vec![1, 2, 6],
        "a2" => vec![3, 4, 5],
        "tables" => vec![7, 8],
        "ingest" => vec![9],
        "linalg" => vec![0],
        _ => name.parse::<u32>().ok().filter(|n| (1..=9).contains(n)).map(|n| vec![n])?,
    })
}

pub const SUITES: [&str; 7] = ["all", "a1", "a2", "tables", "ingest", "linalg", "1..9"];

pub fn run_check(id: u32) -> CheckResult {
    let &(_, title, check) = CHECKS.iter().find(|c| c.0 == id).expect("known check id");
    info!("running check {id}: {title}");
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run(ids: &[u32]) -> Vec<CheckResult> {
    ids.iter().map(|&i| run_check(i)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

// Shared computations.

fn resolve(alg: impl GradedAlgebra + 'static, region: Region) -> Result<Resolution, String> {
    let mut r = Resolution::new(Arc::new(alg));
    r.extend(region).map_err(err)?;
    Ok(r)
}

fn shared<T>(cell: &'static OnceLock<Result<T, String>>, init: impl FnOnce() -> Result<T, String>) -> Result<&'static T, String> {
    cell.get_or_init(init).as_ref().map_err(Clone::clone)
}

fn a1_ext() -> Result<&'static ResolutionExt, String> {
    static E: OnceLock<Result<ResolutionExt, String>> = OnceLock::new();
    shared(&E, || {
        let alg = DualAlgebra::new(&Preset::Acl1.build()).map_err(err)?;
        ResolutionExt::new(resolve(alg, Region::Stem { max_stem: A1_RANGE.0, max_filtration: A1_RANGE.1 })?).map_err(err)
    })
}

fn full_ext() -> Result<&'static ResolutionExt, String> {
    static E: OnceLock<Result<ResolutionExt, String>> = OnceLock::new();
    shared(&E, || {
        let r = resolve(MilnorAlgebra::full(FULL_RANGE.0 + FULL_RANGE.1 + 1), Region::Stem { max_stem: FULL_RANGE.0, max_filtration: FULL_RANGE.1 })?;
        ResolutionExt::new(r).map_err(err)
    })
}

fn a2_bx() -> Result<&'static BxRun, String> {
    static R: OnceLock<Result<BxRun, String>> = OnceLock::new();
    shared(&R, || BxRun::run(a1_ext()?, &bx::q_indices(&Preset::A2mot.build()), 1, A2_BX_RANGE.0, A2_BX_RANGE.1, true).map_err(err))
}

/// Motivic A(2) through A(2)/τ, which has the same cohomology in Chow
/// degrees zero and one.
fn a2_motivic(max_coweight: i32, max_filtration: i32) -> Result<ResolutionExt, String> {
    let alg = DualAlgebra::new(&Preset::A2mot.build().mod_tau()).map_err(err)?;
    ResolutionExt::new(resolve(alg, Region::Chow { max_chow: 1, max_coweight, max_filtration })?).map_err(err)
}

fn a2_motivic_large() -> Result<&'static ResolutionExt, String> {
    static E: OnceLock<Result<ResolutionExt, String>> = OnceLock::new();
    shared(&E, || a2_motivic(A2_BX_RANGE.0, A2_BX_RANGE.1))
}

fn dims_match(what: &str, got: &ExtChart, want: &BTreeMap<TriDegree, usize>, degrees: impl Iterator<Item = TriDegree>) -> Result<usize, String> {
    let mut n = 0;
    for d in degrees {
        let (g, w) = (got.dim(d), want.get(&d).copied().unwrap_or(0));
        ensure(g == w, || format!("{what}: dimension {g} at {d}, expected {w}"))?;
        n += 1;
    }
    Ok(n)
}

fn ring_dims(ring: &QuotientRing, max_f: i32, keep: impl Fn(TriDegree) -> bool) -> BTreeMap<TriDegree, usize> {
    ring.standard_monomials(max_f, keep).into_iter().map(|(d, v)| (d, v.len())).collect()
}

fn classical_grid(max_s: i32, max_f: i32) -> impl Iterator<Item = TriDegree> {
    (0..=max_f).flat_map(move |f| (0..=max_s).map(move |s| TriDegree::classical(s, f)))
}

// Checks.

fn linalg() -> Result<String, String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let trials = 200;
    for t in 0..trials {
        let (r, c) = (rng.gen_range(1..40), rng.gen_range(1..40));
        let mut m = BitMatrixF2::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, rng.gen_bool(0.3));
            }
        }
        let rank = f2linalg::rank(&m);
        let kernel = f2linalg::kernel_basis(&m);
        ensure(rank + kernel.len() == c, || format!("trial {t}: rank-nullity fails"))?;
        ensure(kernel.iter().all(|k| m.mul_vec(k).is_zero()), || format!("trial {t}: kernel vector not annihilated"))?;
        let x = BitVec::from_bools(&(0..c).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let b = m.mul_vec(&x);
        let y = f2linalg::solve(&m, &b).ok_or_else(|| format!("trial {t}: consistent system reported unsolvable"))?;
        ensure(m.mul_vec(&y) == b, || format!("trial {t}: wrong solution"))?;
        ensure(f2linalg::rank(&m.transpose()) == rank, || format!("trial {t}: row and column rank differ"))?;
    }
    Ok(format!("{trials} seeded random matrices: rank-nullity, kernels, solve, transpose rank"))
}

fn c1() -> Result<String, String> {
    let (s_max, f_max) = A1_RANGE;
    let ring = ring_dims(&oracle::acl1_ring(), f_max, |d| d.s <= s_max);
    let dual = a1_ext()?.chart();
    let n = dims_match("dual A(1) resolution", dual, &ring, classical_grid(s_max, f_max))?;
    let milnor = resolve(MilnorAlgebra::a(1, s_max + f_max + 1), Region::Stem { max_stem: s_max, max_filtration: f_max })?.chart().map_err(err)?;
    dims_match("Milnor A(1) resolution", &milnor, &ring, classical_grid(s_max, f_max))?;
    let (cs, cf) = A1_COBAR_RANGE;
    let cobar = ext_compute(&Preset::Acl1.build(), ChartBounds::stems(cs, cf), CobarBudget::default()).map_err(err)?;
    dims_match("cobar A(1)", cobar.chart(), &ring, classical_grid(cs, cf))?;
    // a sits at (4, 3): q2·a is at regraded (7, 4), motivic (17, 4) with coweight 7.
    ensure(dual.names(TriDegree::classical(4, 3)) == ["a"], || "a is not the class at (4, 3)".into())?;
    let m = bx::motivic_degree(4 + 3, 3 + 1);
    ensure((m.s, m.f, m.coweight()) == (17, 4, 7), || format!("q2·a lands at {m}"))?;
    ensure(m.s == 2 * (3 + 4) + 4 - 1, || "a-degree arithmetic".into())?;
    Ok(format!("{n} degrees with s ≤ {s_max}, f ≤ {f_max} match the ring over two resolutions; cobar agrees for s ≤ {cs}, f ≤ {cf}"))
}

fn c2() -> Result<String, String> {
    let (cw, chow_max, f_max) = B2_RANGE;
    let region = Region::Chow { max_chow: chow_max, max_coweight: cw, max_filtration: f_max };
    let b2 = resolve(DualAlgebra::new(&Preset::B2.build()).map_err(err)?, region)?.chart().map_err(err)?;
    let a1 = a1_ext()?.chart();
    for (d, names) in b2.groups() {
        ensure(d.chow() == 0, || format!("B(2) class off Chow degree zero at {d}"))?;
        let (s, f) = d.unembed_classical().ok_or_else(|| format!("bad degree {d}"))?;
        ensure(names.len() == a1.dim(TriDegree::classical(s, f)), || format!("B(2) at {d} differs from A(1) at ({s}, {f})"))?;
    }
    let mut n = 0;
    for d in classical_grid(cw, f_max) {
        let e = TriDegree::embed_classical(d.s, d.f);
        ensure(b2.dim(e) == a1.dim(d), || format!("A(1) at {d} missing from B(2) at {e}"))?;
        n += a1.dim(d);
    }
    let (ccw, cf) = B2_COBAR_RANGE;
    let bounds = ChartBounds { max_coweight: Some(ccw), chow: Some((0, chow_max)), ..ChartBounds::stems(2 * ccw + cf + chow_max, cf) };
    let cobar = ext_compute(&Preset::B2.build(), bounds, CobarBudget::default()).map_err(err)?;
    for (d, names) in cobar.chart().groups() {
        ensure(names.len() == b2.dim(d), || format!("cobar B(2) disagrees at {d}"))?;
    }
    Ok(format!("{n} classes, all in Chow degree zero for Chow ≤ {chow_max}, coweight ≤ {cw}, f ≤ {f_max}; cobar agrees for coweight ≤ {ccw}, f ≤ {cf}"))
}

fn c3() -> Result<String, String> {
    let (cw, f_max) = A2_CHOW0_RANGE;
    let alg = DualAlgebra::new(&Preset::A2mot.build().mod_tau()).map_err(err)?;
    let chart = resolve(alg, Region::Chow { max_chow: 0, max_coweight: cw, max_filtration: f_max })?.chart().map_err(err)?;
    let ring = ring_dims(&oracle::a2_chow0_ring(), f_max, |d| d.coweight() <= cw);
    let grid = (0..=f_max).flat_map(|f| (0..=cw).map(move |c| TriDegree::embed_classical(c, f)));
    let n = dims_match("motivic A(2) Chow zero", &chart, &ring, grid)?;
    ensure(chart.groups().all(|(d, _)| d.chow() == 0), || "class off Chow degree zero".into())?;
    // The same part is classical A(1) reindexed.
    let a1 = a1_ext()?.chart();
    for d in classical_grid(cw, f_max.min(A1_RANGE.1)) {
        let e = TriDegree::embed_classical(d.s, d.f);
        ensure(chart.dim(e) == a1.dim(d), || format!("Chow zero at {e} differs from A(1) at {d}"))?;
    }
    let (ccw, cf) = A2_CHOW0_COBAR_RANGE;
    let bounds = ChartBounds { max_coweight: Some(ccw), chow: Some((0, 0)), ..ChartBounds::stems(2 * ccw + cf, cf) };
    let cobar = ext_compute(&Preset::A2mot.build(), bounds, CobarBudget::default()).map_err(err)?;
    for (d, names) in cobar.chart().groups() {
        ensure(names.len() == ring.get(&d).copied().unwrap_or(0), || format!("cobar A(2) disagrees with the ring at {d}"))?;
    }
    Ok(format!("{n} degrees with coweight ≤ {cw}, f ≤ {f_max} match F2[h1,h2,u,g]/(h1h2, h2^3, h2u, u^2+h1^2g) and A(1) reindexed; cobar agrees for f ≤ {cf}"))
}

/// `P^k x` in the coefficient naming.
fn pk(k: i32, x: &str) -> String {
    match (k, x) {
        (0, "") => "1".into(),
        (0, _) => x.into(),
        (1, _) => format!("P{x}"),
        _ => format!("P^{k}{x}"),
    }
}

/// Dimension of `F2[h1, a, P]/(h1^3, h1 a, a^2)` at `(s, f)`.
fn q0_form(s: i32, f: i32) -> usize {
    [(0, 0), (1, 1), (2, 2), (4, 3)].iter().filter(|&&(ds, df)| (s - ds) >= 0 && (s - ds) % 8 == 0 && f - df == (s - ds) / 8 * 4).count()
}

/// Dimension of `h0 F2[h0, P] + h1^2 F2[P] + a F2[h0, P]` at `(s, f)`.
fn q2_form(s: i32, f: i32) -> usize {
    let mut n = 0;
    if s >= 0 && s % 8 == 0 && f > s / 2 {
        n += 1;
    }
    if s >= 2 && (s - 2) % 8 == 0 && f == (s - 2) / 2 + 2 {
        n += 1;
    }
    if s >= 4 && (s - 4) % 8 == 0 && f >= (s - 4) / 2 + 3 {
        n += 1;
    }
    n
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

fn c4() -> Result<String, String> {
    let (s_max, f_max) = A2_BX_RANGE;
    let run = a2_bx()?;
    let coeff = a1_ext()?.chart();
    let e2 = run.page(2).ok_or("no E2 page")?;
    let mut cells = 0;
    for f in 0..=f_max {
        for s in 0..=s_max {
            let exact = [0, 2].iter().all(|&q| e2.cells.get(&(s, f, q)).is_none_or(|c| c.exact));
            if !exact || f == f_max {
                continue;
            }
            let (q0, q1, q2) = (e2.dim((s, f, 0)), e2.dim((s, f, 1)), e2.dim((s, f, 2)));
            let want = (q0_form(s, f - 1), 0, q2_form(s - 3, f - 1));
            ensure((q0, q1, q2) == want, || format!("E2 at ({s}, {f}): {:?}, expected {want:?}", (q0, q1, q2)))?;
            cells += 1;
        }
    }
    let d2: Vec<(String, String)> = sorted(
        e2.differentials
            .iter()
            .filter_map(|d| match &d.value {
                DiffValue::Known(v) => Some((e2.class_name(d.source, d.class), e2.format_value(d.target, v))),
                DiffValue::Unknown(_) => None,
            })
            .collect(),
    );
    let mut want = Vec::new();
    for k in 0..=s_max / 8 {
        if 8 * k + 3 <= s_max && 4 * k + 3 <= f_max {
            want.push((format!("q2·{}", pk(k, "h0")), format!("q0·{}", pk(k, "h1^2"))));
        }
        if 8 * k + 5 <= s_max && 4 * k + 4 <= f_max {
            want.push((format!("q2·{}", pk(k, "h1^2")), format!("q0·{}", pk(k, "a"))));
        }
    }
    let want = sorted(want);
    ensure(d2 == want, || format!("d2 list {d2:?}, expected {want:?}"))?;
    let einf = run.e_infinity();
    ensure(einf.r == 3 && einf.is_final(), || format!("E-infinity is page {}", einf.r))?;
    let cands = bx::hidden_extension_candidates(einf, coeff, "h1").map_err(err)?;
    let got: Vec<(String, String)> = sorted(cands.iter().map(|c| (c.source_name.clone(), c.target_name.clone())).collect());
    let mut want = Vec::new();
    for k in 0..=s_max / 8 {
        if 8 * k + 8 <= s_max && 4 * k + 5 <= f_max {
            want.push((format!("q2·{}", pk(k, "a")), format!("q0·{}", pk(k + 1, ""))));
        }
    }
    let want = sorted(want);
    ensure(got == want, || format!("hidden h1 candidates {got:?}, expected {want:?}"))?;
    let h0 = bx::hidden_extension_candidates(einf, coeff, "h0").map_err(err)?;
    ensure(h0.is_empty(), || format!("unexpected hidden h0 candidates {h0:?}"))?;

    let mot = a2_motivic_large()?;
    let mc = mot.chart();
    let class = |n: &str| mc.class(n).ok_or_else(|| format!("motivic chart has no {n}"));
    let h2e0 = mot.product(&class("h2")?, &class("e0")?).map_err(err)?;
    ensure(h2e0 == class("h0g")?, || "h2·e0 is not h0g".into())?;
    let mut cands = cands;
    bx::confirm_hidden(&mut cands, einf, coeff, mot).map_err(err)?;
    ensure(cands.iter().all(|c| c.confirmed == Some(true)), || format!("unconfirmed candidates {cands:?}"))?;
    Ok(format!(
        "E2 matches the three-summand form in {cells} exact degrees; {} d2 values; E3 = E-infinity; {} hidden h1 extensions confirmed (h2·e0 = h0g); no hidden h0",
        d2.len(),
        cands.len()
    ))
}

fn c5() -> Result<String, String> {
    let cw = CHOW1_COWEIGHT;
    let f_res = CHOW1_RESOLUTION_F;
    // The BX run reaches one filtration higher so that differentials out of
    // the compared range are determined.
    let coeff = ResolutionExt::new(resolve(DualAlgebra::new(&Preset::Acl1.build()).map_err(err)?, Region::Stem { max_stem: cw + 1, max_filtration: f_res + 1 })?).map_err(err)?;
    let run = BxRun::run(&coeff, &[0, 1, 2], 1, cw + 1, f_res + 2, true).map_err(err)?;
    let einf = run.e_infinity();
    let mot = a2_motivic(cw, f_res)?;
    let bounds = ChartBounds { max_coweight: Some(cw), chow: Some((1, 1)), ..ChartBounds::stems(2 * cw + CHOW1_COBAR_F, CHOW1_COBAR_F) };
    let cobar = ext_compute(&Preset::A2mot.build(), bounds, CobarBudget::default()).map_err(err)?;
    let mut compared = 0;
    for f in 0..=f_res {
        for s in 0..=cw {
            ensure(einf.exact_at(s, f), || format!("E-infinity at ({s}, {f}) is not exact"))?;
            let d = bx::motivic_degree(s, f);
            let e = einf.total_dim(s, f);
            ensure(mot.chart().dim(d) == e, || format!("resolution {} vs E-infinity {e} at {d}", mot.chart().dim(d)))?;
            if f <= CHOW1_COBAR_F {
                ensure(cobar.chart().dim(d) == e, || format!("cobar {} vs E-infinity {e} at {d}", cobar.chart().dim(d)))?;
            }
            compared += 1;
        }
    }
    for (d, names) in cobar.chart().groups() {
        let (s, f) = bx::regraded_degree(d).ok_or_else(|| format!("cobar class off Chow degree one at {d}"))?;
        ensure(names.len() == einf.total_dim(s, f), || format!("cobar class at {d} not matched"))?;
    }
    Ok(format!("{compared} degrees with coweight ≤ {cw}: cobar (f ≤ {}) and resolution (f ≤ {f_res}) equal E-infinity", CHOW1_COBAR_F))
}

fn c6() -> Result<String, String> {
    let cobar = ext_compute(&Preset::Acl1.build(), ChartBounds::stems(12, 6), CobarBudget::default()).map_err(err)?;
    let res = a1_ext()?;
    let engines: [(&str, &dyn ExtEngine); 2] = [("cobar", &cobar), ("resolution", res)];
    let mut report = Vec::new();
    for (name, e) in engines {
        let c = |n: &str| e.chart().class(n).ok_or_else(|| format!("{name}: no class {n}"));
        for (x, y, z, want) in [("h0", "h1", "h0", "h1^2"), ("a", "h1", "h1^2", "Ph0")] {
            let m = e.massey_checked(&c(x)?, &c(y)?, &c(z)?).map_err(err)?;
            let w = c(want)?;
            ensure(m.degree == w.degree && m.contains(&w.coords), || format!("{name}: ⟨{x},{y},{z}⟩ misses {want}"))?;
            ensure(!m.contains_zero(), || format!("{name}: ⟨{x},{y},{z}⟩ contains zero"))?;
            report.push(format!("{name} ⟨{x},{y},{z}⟩ = {want} (indeterminacy dim {})", m.indeterminacy.len()));
        }
    }
    Ok(report.join("; "))
}

fn c7() -> Result<String, String> {
    let (s_max, f_max) = FULL_RANGE;
    let start = Instant::now();
    let ext = full_ext()?;
    let res = ext.resolution();
    ensure(res.is_minimal(), || "resolution is not minimal".into())?;
    res.check_d_squared().map_err(err)?;
    let chart = ext.chart();
    let built = start.elapsed().as_secs_f64();

    for (d, _) in chart.groups() {
        ensure(d.intercept() >= -3 || (d.s == 0 && d.f >= 2), || format!("class below the vanishing line at {d}"))?;
    }
    for f in 2..=f_max {
        ensure(chart.dim(TriDegree::classical(0, f)) == 1, || format!("h0 tower broken at f = {f}"))?;
    }

    let family = |base: (i32, i32)| -> Vec<TriDegree> {
        (0..).map(|k| TriDegree::classical(base.0 + 8 * k, base.1 + 4 * k)).take_while(|d| d.s <= s_max).collect()
    };
    let expect: [(i32, Vec<TriDegree>); 3] = [
        (-2, [vec![TriDegree::classical(0, 1)], family((2, 2))].concat()),
        (0, vec![TriDegree::classical(0, 0)]),
        (1, [family((3, 1)), family((7, 3)), family((9, 4))].concat()),
    ];
    for (v, want) in &expect {
        let scan = intercept_scan(chart, *v, s_max);
        ensure(scan.warning.is_none(), || format!("intercept {v}: {}", scan.warning.clone().unwrap_or_default()))?;
        let got: BTreeSet<TriDegree> = scan.classes.iter().map(|(d, _)| *d).collect();
        let want: BTreeSet<TriDegree> = want.iter().copied().collect();
        ensure(got == want, || format!("intercept {v}: {got:?}, expected {want:?}"))?;
        ensure(scan.classes.iter().all(|(_, n)| n.len() == 1), || format!("intercept {v}: a group of dimension > 1"))?;
    }
    for (d, n) in [((0, 1), "h0"), ((2, 2), "h1^2"), ((3, 1), "h2"), ((7, 3), "h0^2h3"), ((9, 4), "h1c0")] {
        ensure(chart.names(TriDegree::classical(d.0, d.1)) == [n], || format!("expected {n} at {d:?}"))?;
    }

    // Table of intercept -1 on the BX E1-page, with q_n up to the range.
    let qs: Vec<u32> = (0..).take_while(|&q| (1 << q) - 1 <= s_max).collect();
    let e1 = BxPage::e1(chart, &qs, 1, s_max, f_max + 1).map_err(err)?;
    let got: BTreeSet<(i32, i32, u32)> = e1
        .elements()
        .iter()
        .filter(|e| e.pos.0 - 2 * e.pos.1 == -1)
        .map(|e| e.pos)
        .collect();
    let mut want = BTreeSet::new();
    for k in 0..=s_max / 8 {
        for (s, f, q) in [(8 * k + 3, 4 * k + 2, 0), (8 * k + 7, 4 * k + 4, 0), (8 * k + 9, 4 * k + 5, 0), (8 * k + 5, 4 * k + 3, 2)] {
            if s <= s_max {
                want.insert((s, f, q));
            }
        }
    }
    want.insert((1, 1, 1));
    for n in 2.. {
        let s = (1 << n) - 1;
        if s > s_max {
            break;
        }
        want.insert((s, 1 << (n - 1), n as u32));
    }
    ensure(got == want, || format!("intercept -1 census on E1: {got:?}, expected {want:?}"))?;
    ensure(e1.elements().iter().filter(|e| e.pos.0 - 2 * e.pos.1 == -1).count() == want.len(), || "census classes are not one per degree".into())?;

    let machine = MachineChart::from_ext_chart(chart);
    let mut co = Vec::new();
    for (s, f, n) in [(11, 7, 3), (19, 11, 3), (27, 15, 3), (35, 19, 3), (23, 12, 6), (39, 20, 6), (7, 4, 4), (15, 8, 8), (31, 16, 16)] {
        let c = coexponent_scan(&machine, "h0", TriDegree::classical(s, f)).map_err(err)?;
        ensure(c.value == n && !c.lower_bound, || format!("h0-coexponent at ({s}, {f}) is {}, expected {n}", c.value))?;
        co.push(format!("{s}:{n}"));
    }
    Ok(format!(
        "resolution to ({s_max}, {f_max}) in {built:.1}s is minimal with d^2 = 0; vanishing holds; intercept -2/0/1 and E1 intercept -1 censuses match; h0-coexponents {}",
        co.join(" ")
    ))
}

fn c8() -> Result<String, String> {
    let (s_max, f_max) = FULL_BX_RANGE;
    let coeff = full_ext()?;
    let qs: Vec<u32> = (0..).take_while(|&q| (1 << q) - 1 <= s_max).collect();
    let run = BxRun::run(coeff, &qs, 1, s_max, f_max, true).map_err(err)?;
    let e1 = &run.pages[0];
    let find = |pos: bx::Pos| {
        e1.elements().into_iter().find(|e| e.pos == pos && e.name.ends_with("h1^2")).ok_or_else(|| format!("no q0·P^k h1^2 at {pos:?}"))
    };
    let c = bx::permanent_cycle_certificate(&run, &find((2, 3, 0))?);
    ensure(c == Certificate::Hit { r: 2, source: "q2·h0".into() }, || format!("q0·h1^2: {c:?}"))?;
    let mut lines = vec!["k = 0 hit by d2(q2·h0)".to_string()];
    for k in 1..=3 {
        let pos = (8 * k + 2, 4 * k + 3, 0);
        let el = find(pos)?;
        let c = bx::permanent_cycle_certificate(&run, &el);
        ensure(c.is_certified(), || format!("{}: {c:?}", el.name))?;
        let m = bx::motivic_degree(pos.0, pos.1);
        ensure(m == TriDegree::new(20 * k + 6, 4 * k + 3, 12 * k + 4), || format!("motivic degree {m}"))?;
        let g = if k == 1 { "g".to_string() } else { format!("g^{k}") };
        lines.push(format!("k = {k}: {} certified, so h0h2·h2{g} ≠ 0 at {m}", el.name));
    }
    Ok(lines.join("; "))
}

fn c9() -> Result<String, String> {
    let classical = a1_ext()?.chart().clone();
    let motivic = a2_motivic(12, 8)?.chart().clone();
    let mut report = Vec::new();
    for (name, chart) in [("classical A(1)", classical), ("motivic A(2)", motivic)] {
        let m = MachineChart::from_ext_chart(&chart);
        let text = m.emit();
        let (back, r) = parse_machine_chart(&text, &ColumnMap::default()).map_err(err)?;
        ensure(r.errored == 0 && r.warned == 0 && r.parsed == r.total, || format!("{name}: {r:?}"))?;
        ensure(back.emit() == text, || format!("{name}: emit is not byte-stable"))?;
        let c1 = back.filter_chow(1);
        ensure(c1.gens.iter().all(|g| g.degree.chow() == 1), || format!("{name}: Chow filter leaks"))?;
        ensure(c1.filter_chow(1) == c1, || format!("{name}: Chow filter is not idempotent"))?;
        let (again, _) = parse_machine_chart(&c1.emit(), &ColumnMap::default()).map_err(err)?;
        ensure(again.emit() == c1.emit(), || format!("{name}: Chow-one extract is not byte-stable"))?;
        report.push(format!("{name}: {} generators, {} in Chow degree one", m.gens.len(), c1.gens.len()));
    }
    Ok(report.join("; "))
}
