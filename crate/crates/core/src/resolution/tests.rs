use super::*;
use crate::chart::{Class, ExtEngine};
use crate::cobar::{ext_compute, CobarBudget};
use crate::hopf::Preset;
use crate::oracle;

fn resolve(alg: impl GradedAlgebra + 'static, region: Region) -> Resolution {
    let mut r = Resolution::new(Arc::new(alg));
    r.extend(region).unwrap();
    r
}

fn stem(max_stem: i32, max_filtration: i32) -> Region {
    Region::Stem { max_stem, max_filtration }
}

fn class(e: &ResolutionExt, name: &str) -> Class {
    e.chart().class(name).unwrap_or_else(|| panic!("no class named {name}"))
}

#[test]
fn classical_dimensions_match_cobar() {
    let r = resolve(MilnorAlgebra::full(40), stem(12, 4));
    let c = ext_compute(&Preset::Acl.build(), ChartBounds::stems(12, 4), CobarBudget::default()).unwrap();
    let chart = r.chart().unwrap();
    for s in 0..=12 {
        for f in 0..=4 {
            let d = TriDegree::classical(s, f);
            assert_eq!(chart.dim(d), c.chart().dim(d), "dimension at {d}");
        }
    }
}

#[test]
fn a1_three_ways() {
    let (s_max, f_max) = (20, 8);
    let milnor = resolve(MilnorAlgebra::a(1, 40), stem(s_max, f_max)).chart().unwrap();
    let dual = resolve(DualAlgebra::new(&Preset::Acl1.build()).unwrap(), stem(s_max, f_max)).chart().unwrap();
    let ring = oracle::acl1_ring().standard_monomials(f_max, |d| d.s <= s_max);
    for s in 0..=s_max {
        for f in 0..=f_max {
            let d = TriDegree::classical(s, f);
            let expect = ring.get(&d).map_or(0, Vec::len);
            assert_eq!(milnor.dim(d), expect, "Milnor A(1) at {d}");
            assert_eq!(dual.dim(d), expect, "dual A(1) at {d}");
        }
    }
    assert_eq!(dual.names(TriDegree::classical(8, 4)), ["P"]);
}

#[test]
fn structural_invariants() {
    let r = resolve(MilnorAlgebra::full(40), stem(16, 8));
    assert!(r.is_minimal());
    r.check_d_squared().unwrap();
    let chart = r.chart().unwrap();
    for f in 0..=8 {
        assert_eq!(chart.dim(TriDegree::classical(0, f)), 1, "h0 tower at f = {f}");
    }
    // Adams vanishing: nothing in 0 < s < 2f - 3.
    for (d, _) in chart.groups() {
        assert!(!(d.s > 0 && d.s < 2 * d.f - 3), "class above the vanishing line at {d}");
    }
}

#[test]
fn h_tables_and_chain_map_products_agree() {
    let e = ResolutionExt::new(resolve(MilnorAlgebra::full(40), stem(15, 6))).unwrap();
    let (h0, h1, h2) = (class(&e, "h0"), class(&e, "h1"), class(&e, "h2"));
    assert!(e.product(&h1, &h2).unwrap().is_zero());
    assert!(e.product(&h0, &h1).unwrap().is_zero());
    assert_eq!(e.product(&h0, &h2).unwrap(), class(&e, "h0h2"));
    let h0sq_h2 = e.product(&h0, &class(&e, "h0h2")).unwrap();
    assert_eq!(h0sq_h2, e.product(&h1, &class(&e, "h1^2")).unwrap());
    for (d, names) in e.chart().groups() {
        for i in 0..names.len() {
            let x = Class::basis(d, names.len(), i);
            for (h, hd) in [("h0", h0.degree), ("h1", h1.degree), ("h2", h2.degree)] {
                if !e.chart().bounds.contains(d + hd) {
                    continue;
                }
                let y = if h == "h0" { &h0 } else if h == "h1" { &h1 } else { &h2 };
                assert_eq!(e.chart().multiply(h, &x).unwrap(), e.product(&x, y).unwrap(), "{h} times {}", names[i]);
                assert_eq!(e.product(y, &x).unwrap(), e.product(&x, y).unwrap(), "commutativity at {d}");
            }
        }
    }
}

#[test]
fn massey_products() {
    let e = ResolutionExt::new(resolve(MilnorAlgebra::full(40), stem(10, 5))).unwrap();
    let (h0, h1, h2) = (class(&e, "h0"), class(&e, "h1"), class(&e, "h2"));
    let m = e.massey_checked(&h0, &h1, &h0).unwrap();
    assert!(m.contains(&class(&e, "h1^2").coords) && !m.contains_zero());
    let m = e.massey_checked(&h1, &h0, &h1).unwrap();
    assert!(m.contains(&class(&e, "h0h2").coords));
    let m = e.massey_checked(&h2, &h1, &h2).unwrap();
    assert!(m.contains_zero() || m.degree == TriDegree::classical(8, 2));
    assert!(matches!(e.massey_checked(&h0, &h0, &h1), Err(Error::Undefined(_))));

    let a1 = ResolutionExt::new(resolve(DualAlgebra::new(&Preset::Acl1.build()).unwrap(), stem(12, 6))).unwrap();
    let (a, h1) = (class(&a1, "a"), class(&a1, "h1"));
    let m = a1.massey_checked(&a, &h1, &class(&a1, "h1^2")).unwrap();
    assert!(m.contains(&class(&a1, "Ph0").coords));
}

#[test]
fn out_of_region_is_range() {
    let e = ResolutionExt::new(resolve(MilnorAlgebra::full(40), stem(6, 3))).unwrap();
    let h0 = class(&e, "h0");
    assert!(matches!(e.product(&h0, &class(&e, "h0^3")), Err(Error::Range(_))));
    assert!(matches!(e.dim(TriDegree::classical(7, 1)), Err(Error::Range(_))));
}

#[test]
fn persistence_and_resume() {
    let alg: Arc<dyn GradedAlgebra> = Arc::new(MilnorAlgebra::full(40));
    let mut small = Resolution::new(alg.clone());
    small.extend(stem(8, 4)).unwrap();
    let text = small.to_text();
    let mut back = Resolution::from_text(alg.clone(), &text).unwrap();
    assert_eq!(back.to_text(), text);
    back.extend(stem(14, 6)).unwrap();
    let mut direct = Resolution::new(alg.clone());
    direct.extend(stem(14, 6)).unwrap();
    assert_eq!(back.dims(), direct.dims());
    back.check_d_squared().unwrap();
    assert!(matches!(back.extend(stem(10, 6)), Err(Error::Usage(_))));
    assert!(matches!(back.extend(Region::Chow { max_chow: 1, max_coweight: 4, max_filtration: 4 }), Err(Error::Usage(_))));
    let other: Arc<dyn GradedAlgebra> = Arc::new(MilnorAlgebra::a(1, 40));
    assert!(Resolution::from_text(other, &text).is_err());
    assert!(matches!(Resolution::from_text(alg, "gen 0 0 0 0"), Err(Error::Parse { .. })));
}

#[test]
fn budget_is_enforced() {
    let mut r = Resolution::new(Arc::new(MilnorAlgebra::full(40)));
    r.max_module_dim = 20;
    assert!(matches!(r.extend(stem(20, 6)), Err(Error::Budget(_))));
}

#[test]
fn motivic_chow_region_matches_cobar() {
    let p = Preset::A2mot.build();
    let alg = DualAlgebra::new(&p.mod_tau()).unwrap();
    let region = Region::Chow { max_chow: 1, max_coweight: 6, max_filtration: 4 };
    let chart = resolve(alg, region).chart().unwrap();
    let c = ext_compute(&p, region.bounds(), CobarBudget::default()).unwrap();
    for (d, names) in c.chart().groups() {
        if region.contains_degree(d) {
            assert_eq!(chart.dim(d), names.len(), "dimension at {d}");
        }
    }
    for (d, names) in chart.groups() {
        assert_eq!(c.chart().dim(d), names.len(), "dimension at {d}");
    }
    assert_eq!(chart.names(TriDegree::new(3, 1, 2)), ["h2"]);
}

#[test]
fn intercept_scan_reports_incomplete_lines() {
    let chart = resolve(MilnorAlgebra::full(40), stem(15, 6)).chart().unwrap();
    let scan = intercept_scan(&chart, -1, 15);
    assert!(scan.warning.is_some() && scan.classes.iter().all(|(d, _)| d.intercept() == -1));
    let scan = intercept_scan(&chart, 1, 11);
    assert!(scan.warning.is_none());
    assert!(scan.classes.iter().any(|(_, n)| n == &["h2"]));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn products_are_bilinear_and_associative(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
            let e = shared();
            let classes: Vec<Class> = e.chart().groups().filter(|(d, _)| d.f >= 1 && d.s <= 7).flat_map(|(d, n)| (0..n.len()).map(move |i| Class::basis(d, n.len(), i))).collect();
            let (x, y, z) = (&classes[i % classes.len()], &classes[j % classes.len()], &classes[k % classes.len()]);
            let inside = |d: TriDegree| e.chart().bounds.contains(d);
            if inside(x.degree + y.degree + z.degree) {
                let xy = e.product(x, y).unwrap();
                let yz = e.product(y, z).unwrap();
                prop_assert_eq!(e.product(&xy, z).unwrap(), e.product(x, &yz).unwrap());
                prop_assert_eq!(xy, e.product(y, x).unwrap());
            }
        }
    }

    fn shared() -> &'static ResolutionExt {
        use std::sync::OnceLock;
        static E: OnceLock<ResolutionExt> = OnceLock::new();
        E.get_or_init(|| ResolutionExt::new(resolve(MilnorAlgebra::full(40), stem(14, 6))).unwrap())
    }
}
