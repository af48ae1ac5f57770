use std::sync::{Arc, OnceLock};

use super::*;
use crate::hopf::Preset;
use crate::resolution::{DualAlgebra, MilnorAlgebra, Region, Resolution, ResolutionExt};

const S: i32 = 28;
const F: i32 = 14;

fn ext_over(alg: impl crate::resolution::GradedAlgebra + 'static, s: i32, f: i32) -> ResolutionExt {
    let mut r = Resolution::new(Arc::new(alg));
    r.extend(Region::Stem { max_stem: s, max_filtration: f }).unwrap();
    ResolutionExt::new(r).unwrap()
}

fn a1() -> &'static ResolutionExt {
    static E: OnceLock<ResolutionExt> = OnceLock::new();
    E.get_or_init(|| ext_over(DualAlgebra::new(&Preset::Acl1.build()).unwrap(), S, F - 1))
}

fn a2_run() -> &'static BxRun {
    static R: OnceLock<BxRun> = OnceLock::new();
    R.get_or_init(|| BxRun::run(a1(), &q_indices(&Preset::A2mot.build()), 1, S, F, true).unwrap())
}

/// `P^k x` in the coefficient naming, with `x = ""` for `P^k` itself.
fn pk(k: i32, x: &str) -> String {
    match (k, x) {
        (0, "") => "1".into(),
        (0, _) => x.into(),
        (1, _) => format!("P{x}"),
        _ => format!("P^{k}{x}"),
    }
}

fn find(page: &BxPage, name: &str) -> BxElement {
    page.element(name).unwrap_or_else(|| panic!("no element {name} on page {}", page.r))
}

#[test]
fn q_indices_follow_tau_generators() {
    assert_eq!(q_indices(&Preset::A2mot.build()), [0, 1, 2]);
    assert_eq!(q_indices(&Preset::A1mot.build()), [0, 1]);
}

#[test]
fn degree_conversion() {
    assert_eq!(motivic_degree(3, 3), TriDegree::new(8, 3, 5));
    assert_eq!(regraded_degree(TriDegree::new(8, 3, 5)), Some((3, 3)));
    assert_eq!(regraded_degree(TriDegree::new(8, 3, 4)), None);
    for q in 0..3 {
        let (s, f) = ((1 << q) - 1, 1);
        assert_eq!(coefficient_degree((s, f, q)), TriDegree::classical(0, 0), "q{q} sits at ({s}, {f})");
    }
}

#[test]
fn e1_is_a_direct_sum() {
    let e1 = &a2_run().pages[0];
    let chart = a1().chart();
    for s in 0..=S {
        for f in 0..=F {
            let expect: usize = [0u32, 1, 2]
                .iter()
                .map(|&i| coefficient_degree((s, f, i)))
                .filter(|d| d.s >= 0 && d.f >= 0)
                .map(|d| chart.dim(d))
                .sum();
            assert_eq!(e1.total_dim(s, f), expect, "E1 at ({s}, {f})");
            for e in e1.elements().iter().filter(|e| e.pos.0 == s && e.pos.1 == f) {
                assert_eq!(e1.motivic(s, f).chow(), 1, "Chow degree of {}", e.name);
            }
        }
    }
}

#[test]
fn d1_and_e2() {
    let run = a2_run();
    let e1 = &run.pages[0];
    assert_eq!(e1.status((1, 1, 1), 0), "supports d1 -> q0·h0");
    // d1 ∘ d1 = 0, composing the recorded matrices.
    let value = |pos: Pos, i: usize| {
        e1.differentials.iter().find(|d| d.source == pos && d.class == i).map(|d| (d.target, d.value.clone()))
    };
    for d in e1.differentials.iter().filter(|d| d.source.2 == 2) {
        let DiffValue::Known(v) = &d.value else { continue };
        let mut sum: Option<BitVec> = None;
        for i in v.iter_ones() {
            match value(d.target, i) {
                Some((_, DiffValue::Known(w))) => match &mut sum {
                    Some(acc) => acc.xor_assign(&w),
                    None => sum = Some(w),
                },
                Some((_, DiffValue::Unknown(_))) => sum = None,
                None => {}
            }
        }
        assert!(sum.is_none_or(|w| w.is_zero()), "d1 d1 != 0 from {:?}", d.source);
    }
    let e2 = run.page(2).unwrap();
    let q1: Vec<String> = e2.elements().into_iter().filter(|e| e.pos.2 == 1 && e2.cells[&e.pos].exact).map(|e| e.name).collect();
    assert!(q1.is_empty(), "q1 summand survives to E2: {q1:?}");
    // q0 part: F2[h1, a, P]/(h1^3, h1 a, a^2).
    let mut q0: Vec<String> = e2.elements().into_iter().filter(|e| e.pos.2 == 0).map(|e| e.name).collect();
    let mut want = Vec::new();
    for k in 0.. {
        if 8 * k > S || 4 * k + 1 > F {
            break;
        }
        for (x, dx, df) in [("", 0, 0), ("h1", 1, 1), ("h1^2", 2, 2), ("a", 4, 3)] {
            if 8 * k + dx <= S && 4 * k + df < F {
                want.push(format!("q0·{}", pk(k, x)));
            }
        }
    }
    q0.sort();
    want.sort();
    assert_eq!(q0, want);
    // q2 part: h0 F2[h0, P] + h1^2 F2[P] + a F2[h0, P].
    for e in e2.elements().into_iter().filter(|e| e.pos.2 == 2 && e2.cells[&e.pos].exact) {
        let coeff = e.name.strip_prefix("q2·").unwrap();
        assert!(coeff.contains("h0") || coeff.ends_with("h1^2") || coeff.contains('a'), "unexpected E2 class {}", e.name);
        assert!(!coeff.contains("h1") || coeff.ends_with("h1^2") && !coeff.contains("h0"), "unexpected E2 class {}", e.name);
    }
    assert_eq!((e2.total_dim(3, 2), e2.total_dim(2, 3)), (1, 1), "q2·h0 and q0·h1^2");
}

#[test]
fn d2_families_and_collapse() {
    let run = a2_run();
    let e2 = run.page(2).unwrap();
    let mut got: Vec<(String, String)> = e2
        .differentials
        .iter()
        .map(|d| match &d.value {
            DiffValue::Known(v) => (e2.class_name(d.source, d.class), e2.format_value(d.target, v)),
            DiffValue::Unknown(m) => (e2.class_name(d.source, d.class), format!("unknown: {m}")),
        })
        .filter(|(_, t)| !t.starts_with("unknown"))
        .collect();
    let mut want = Vec::new();
    for k in 0..=S / 8 {
        let (a, b) = ((8 * k + 3, 4 * k + 2), (8 * k + 5, 4 * k + 3));
        if a.0 <= S && a.1 < F {
            want.push((format!("q2·{}", pk(k, "h0")), format!("q0·{}", pk(k, "h1^2"))));
        }
        if b.0 <= S && b.1 < F {
            want.push((format!("q2·{}", pk(k, "h1^2")), format!("q0·{}", pk(k, "a"))));
        }
    }
    got.sort();
    want.sort();
    assert_eq!(got, want);
    let e3 = run.page(3).unwrap();
    assert!(e3.is_final());
    assert_eq!(run.e_infinity().r, 3);
    assert!(e3.status((2, 3, 0), 0).starts_with("alive") || e3.dim((2, 3, 0)) == 0);
    assert_eq!(e3.dim((2, 3, 0)), 0);
}

#[test]
fn hidden_h1_extensions() {
    let run = a2_run();
    let einf = run.e_infinity();
    let cands = hidden_extension_candidates(einf, a1().chart(), "h1").unwrap();
    let mut got: Vec<(String, String)> = cands.iter().map(|c| (c.source_name.clone(), c.target_name.clone())).collect();
    let mut want = Vec::new();
    for k in 0..=S / 8 {
        if 8 * k + 8 <= S && 4 * k + 5 <= F {
            want.push((format!("q2·{}", pk(k, "a")), format!("q0·{}", pk(k + 1, ""))));
        }
    }
    got.sort();
    want.sort();
    assert_eq!(got, want);
    assert!(hidden_extension_candidates(einf, a1().chart(), "h0").unwrap().is_empty());
}

#[test]
fn hidden_extensions_confirmed_motivically() {
    let (s, f) = (9, 6);
    let coeff = ext_over(DualAlgebra::new(&Preset::Acl1.build()).unwrap(), s, f - 1);
    let run = BxRun::run(&coeff, &[0, 1, 2], 1, s, f, true).unwrap();
    let mut cands = hidden_extension_candidates(run.e_infinity(), coeff.chart(), "h1").unwrap();
    assert_eq!(cands.len(), 1);
    let mut mot = Resolution::new(Arc::new(DualAlgebra::new(&Preset::A2mot.build().mod_tau()).unwrap()));
    mot.extend(Region::Chow { max_chow: 1, max_coweight: s, max_filtration: f }).unwrap();
    let mot = ResolutionExt::new(mot).unwrap();
    confirm_hidden(&mut cands, run.e_infinity(), coeff.chart(), &mot).unwrap();
    assert_eq!(cands[0].confirmed, Some(true));
}

#[test]
fn certificates_over_a2() {
    let run = a2_run();
    let e1 = &run.pages[0];
    let c = permanent_cycle_certificate(run, &find(e1, "q0·h1^2"));
    assert_eq!(c, Certificate::Hit { r: 2, source: "q2·h0".into() });
    let c = permanent_cycle_certificate(run, &find(e1, "q0·P"));
    assert!(c.is_certified(), "{c:?}");
    assert!(matches!(permanent_cycle_certificate(run, &find(e1, "q1·1")), Certificate::Supports { r: 1 }));
    assert!(matches!(permanent_cycle_certificate(run, &find(e1, "q2·h0")), Certificate::Supports { r: 2 }));
}

#[test]
fn certificates_over_full_a() {
    let (s, f) = (27, 15);
    let coeff = ext_over(MilnorAlgebra::full(s + 2), s, f - 1);
    let qs: Vec<u32> = (0..=4).collect();
    let run = BxRun::run(&coeff, &qs, 1, s, f, true).unwrap();
    let e1 = &run.pages[0];
    let at = |pos: Pos| {
        let found: Vec<BxElement> = e1.elements().into_iter().filter(|e| e.pos == pos).collect();
        found.iter().find(|e| e.name.ends_with("h1^2")).cloned().unwrap_or_else(|| panic!("{:?}", found.iter().map(|e| &e.name).collect::<Vec<_>>()))
    };
    let c = permanent_cycle_certificate(&run, &at((2, 3, 0)));
    assert_eq!(c, Certificate::Hit { r: 2, source: "q2·h0".into() });
    for k in 1..=3 {
        let el = at((8 * k + 2, 4 * k + 3, 0));
        let c = permanent_cycle_certificate(&run, &el);
        assert!(c.is_certified(), "{}: {c:?}", el.name);
    }
}

#[test]
fn chow_zero_has_one_summand() {
    let run = BxRun::run(a1(), &[0, 1, 2], 0, 12, 6, true).unwrap();
    assert_eq!(run.pages.len(), 1);
    let e = run.e_infinity();
    assert!(e.is_final());
    assert_eq!(e.total_dim(8, 4), 1);
    assert_eq!(find(e, "1·P").pos, (8, 4, 0));
    assert!(permanent_cycle_certificate(&run, &find(e, "1·a")).is_certified());
    assert!(matches!(BxPage::e1(a1().chart(), &[0], 2, 4, 4), Err(Error::Usage(_))));
}

#[test]
fn dump_lines() {
    let text = a2_run().dump();
    assert!(text.lines().any(|l| l == "page 1 chow 1 : q1 1 1 1 supports d1 -> q0·h0"));
    assert!(text.lines().any(|l| l.starts_with("page 2 chow 1 : q2 h0 3 2 supports d2 -> q0·h1^2")));
    assert!(text.lines().all(|l| l.starts_with("page ")));
}

#[test]
fn out_of_order_use_is_refused() {
    let mut p = BxPage::e1(a1().chart(), &[0, 1, 2], 1, 8, 4).unwrap();
    assert!(matches!(p.turn_page(), Err(Error::Usage(_))));
    assert!(matches!(p.compute_d2(a1()), Err(Error::Usage(_))));
    p.compute_d1(a1().chart()).unwrap();
    assert!(p.turn_page().is_ok());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn regraded_degrees_round_trip(s in 0i32..200, f in 0i32..100) {
            let d = motivic_degree(s, f);
            prop_assert_eq!(d.chow(), 1);
            prop_assert_eq!(regraded_degree(d), Some((s, f)));
        }

        #[test]
        fn elements_sit_in_the_page_chow_degree(k in 0usize..40) {
            let run = a2_run();
            for p in &run.pages {
                let els = p.elements();
                if let Some(e) = els.get(k % els.len().max(1)) {
                    prop_assert_eq!(p.motivic(e.pos.0, e.pos.1).chow(), p.chow);
                    prop_assert_eq!(coefficient_degree(e.pos) + TriDegree::classical((1 << e.pos.2) - 1, 1), TriDegree::classical(e.pos.0, e.pos.1));
                }
            }
        }
    }
}
