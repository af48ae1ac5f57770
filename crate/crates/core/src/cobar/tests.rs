use super::*;
use crate::hopf::Preset;
use crate::oracle;

fn ext(preset: Preset, bounds: ChartBounds) -> CobarExt {
    ext_compute(&preset.build(), bounds, CobarBudget::default()).unwrap()
}

fn class(e: &CobarExt, name: &str) -> Class {
    e.chart().class(name).unwrap_or_else(|| panic!("no class named {name}"))
}

#[test]
fn differential_squares_to_zero() {
    for (preset, max_t) in [(Preset::Acl, 14), (Preset::Acl1, 12), (Preset::B2, 16), (Preset::A1mot, 10), (Preset::A2mot, 11)] {
        let p = preset.build();
        let c = CobarComplex::new(&p, max_t, 5, CobarBudget::default());
        let ws: Vec<i32> = if p.grading() == Grading::Classical { vec![0] } else { (-2..=max_t).collect() };
        for t in 1..=max_t {
            for &w in &ws {
                for f in 1..=3 {
                    let (a, b, d) = (c.slice(f, t, w).unwrap(), c.slice(f + 1, t, w).unwrap(), c.slice(f + 2, t, w).unwrap());
                    let d1 = c.differential(&a, &b).unwrap();
                    let d2 = c.differential(&b, &d).unwrap();
                    assert!(d2.mul(&d1).is_zero(), "{preset}: d^2 != 0 at ({f},{t},{w})");
                }
            }
        }
    }
}

#[test]
fn slice_sizes_match_estimates() {
    let p = Preset::A2mot.build();
    let c = CobarComplex::new(&p, 12, 4, CobarBudget::default());
    for t in 0..=12 {
        for w in -3..=8 {
            for f in 0..=4 {
                assert_eq!(c.slice(f, t, w).unwrap().len() as u64, c.slice_size(f, t, w));
            }
        }
    }
}

#[test]
fn primitive_range_has_zero_differential() {
    // Below degree 3 every monomial of A^cl is a power of ζ_1 of degree ≤ 2,
    // and ζ_1^2 is primitive.
    let p = Preset::Acl.build();
    let c = CobarComplex::new(&p, 2, 2, CobarBudget::default());
    let (a, b) = (c.slice(1, 2, 0).unwrap(), c.slice(2, 2, 0).unwrap());
    assert_eq!(c.tensors(&a), vec!["[zeta1^2]"]);
    assert!(c.differential(&a, &b).unwrap().is_zero());
}

#[test]
fn b2_differential_terms() {
    let p = Preset::B2.build();
    let c = CobarComplex::new(&p, 6, 2, CobarBudget::default());
    let (a, b) = (c.slice(1, 6, 3).unwrap(), c.slice(2, 6, 3).unwrap());
    let xi2 = c.tensors(&a).iter().position(|s| s == "[xi2]").unwrap();
    let img = c.differential_images(&a, &b).unwrap();
    let terms: Vec<String> = img[xi2].iter_ones().map(|j| c.tensors(&b)[j].clone()).collect();
    assert_eq!(terms, vec!["[xi1^2|xi1]"]);
    // ξ_1^2 is primitive in characteristic two.
    let (a, b) = (c.slice(1, 4, 2).unwrap(), c.slice(2, 4, 2).unwrap());
    let sq = c.tensors(&a).iter().position(|s| s == "[xi1^2]").unwrap();
    assert!(c.differential_images(&a, &b).unwrap()[sq].is_zero());
}

#[test]
fn mismatched_slices_are_usage_errors() {
    let p = Preset::Acl1.build();
    let c = CobarComplex::new(&p, 6, 3, CobarBudget::default());
    let (a, b) = (c.slice(1, 4, 0).unwrap(), c.slice(2, 5, 0).unwrap());
    assert!(matches!(c.differential(&a, &b), Err(Error::Usage(_))));
}

#[test]
fn euler_characteristic() {
    let e = ext(Preset::Acl1, ChartBounds::stems(6, 6));
    for t in 0..=6 {
        let (chain, hom) = e.euler_characteristics(t, 0).unwrap();
        assert_eq!(chain, hom, "column t = {t}");
    }
    let b = ChartBounds { max_coweight: Some(8), chow: Some((0, 3)), ..ChartBounds::stems(8, 5) };
    let e = ext(Preset::A1mot, b);
    for t in 0..=5 {
        for w in -2..=3 {
            let (chain, hom) = e.euler_characteristics(t, w).unwrap();
            assert_eq!(chain, hom, "column ({t},{w})");
        }
    }
}

#[test]
fn acl1_dimensions_match_ring() {
    let (s_max, f_max) = (14, 5);
    let e = ext(Preset::Acl1, ChartBounds::stems(s_max, f_max));
    let ring = oracle::acl1_ring().standard_monomials(f_max, |d| d.s <= s_max);
    for s in 0..=s_max {
        for f in 0..=f_max {
            let d = TriDegree::classical(s, f);
            let expect = ring.get(&d).map_or(0, Vec::len);
            assert_eq!(e.chart().dim(d), expect, "dimension at {d}");
        }
    }
    assert_eq!(e.chart().names(TriDegree::classical(8, 5)), ["Ph0"]);
}

#[test]
fn products_over_acl1() {
    let e = ext(Preset::Acl1, ChartBounds::stems(9, 6));
    let (h0, h1, a) = (class(&e, "h0"), class(&e, "h1"), class(&e, "a"));
    assert!(e.product(&h0, &h1).unwrap().is_zero());
    assert_eq!(e.product(&a, &a).unwrap(), class(&e, "Ph0^2"));
    assert_eq!(e.product(&h0, &a).unwrap(), class(&e, "h0a"));
    assert!(e.chart().multiply("h1", &class(&e, "h1^2")).unwrap().is_zero());
    assert_eq!(e.chart().multiply("h0", &h0).unwrap(), class(&e, "h0^2"));
}

#[test]
fn massey_products() {
    let e = ext(Preset::Acl1, ChartBounds::stems(9, 6));
    let (h0, h1, a) = (class(&e, "h0"), class(&e, "h1"), class(&e, "a"));
    let m = e.massey_checked(&h0, &h1, &h0).unwrap();
    assert!(m.contains(&class(&e, "h1^2").coords));
    assert!(!m.contains_zero());
    let m = e.massey_checked(&a, &h1, &class(&e, "h1^2")).unwrap();
    assert_eq!(m.degree, TriDegree::classical(8, 5));
    assert!(m.contains(&class(&e, "Ph0").coords));
    let zero = Class::zero(h0.degree, 1);
    assert!(e.massey_checked(&zero, &h1, &h0).unwrap().contains_zero());
    assert!(matches!(e.massey_checked(&h0, &h0, &h1), Err(Error::Undefined(_))));

    let full = ext(Preset::Acl, ChartBounds::stems(3, 3));
    let (h0, h1) = (class(&full, "h0"), class(&full, "h1"));
    assert!(full.massey_checked(&h0, &h1, &h0).unwrap().contains(&class(&full, "h1^2").coords));
}

#[test]
fn motivic_chow_degrees_are_non_negative() {
    let b = ChartBounds { max_coweight: Some(6), ..ChartBounds::stems(10, 4) };
    let e = ext(Preset::A2mot, b);
    assert!(e.chart().total_dim() > 0);
    for d in e.chart().degrees() {
        assert!(d.chow() >= 0, "class of negative Chow degree at {d}");
    }
    // Every τ-multiple of the unit survives.
    for k in 0..4 {
        assert_eq!(e.chart().dim(TriDegree::new(0, 0, -k)), 1);
    }
}

#[test]
fn b2_matches_acl1_after_shift() {
    let e = ext(Preset::B2, ChartBounds { max_coweight: Some(8), ..ChartBounds::stems(20, 4) });
    let c = ext(Preset::Acl1, ChartBounds::stems(8, 4));
    for (d, names) in e.chart().groups() {
        assert_eq!(d.chow(), 0, "B(2) class off Chow degree zero at {d}");
        let (s, f) = d.unembed_classical().unwrap();
        assert_eq!(names.len(), c.chart().dim(TriDegree::classical(s, f)));
    }
    for (d, names) in c.chart().groups() {
        assert_eq!(e.chart().dim(TriDegree::embed_classical(d.s, d.f)), names.len());
    }
}

#[test]
fn refusals() {
    let tiny = CobarBudget { max_slice: 10, max_dense_bits: 1 << 20 };
    assert!(matches!(ext_compute(&Preset::Acl.build(), ChartBounds::stems(20, 5), tiny), Err(Error::Budget(_))));
    let r = ext_compute(&Preset::A2mot.build(), ChartBounds::stems(5, 2), CobarBudget::default());
    assert!(matches!(r, Err(Error::Usage(_))));
    let e = ext(Preset::Acl1, ChartBounds::stems(4, 3));
    let h0 = class(&e, "h0");
    assert!(matches!(e.chart().multiply("h0", &class(&e, "h0^3")), Err(Error::Range(_))));
    assert!(e.product(&h0, &h0).is_ok());
}

#[test]
fn unit_only_at_stem_zero() {
    let e = ext(Preset::Acl1, ChartBounds::stems(0, 0));
    assert_eq!(e.chart().total_dim(), 1);
    assert_eq!(e.chart().names(TriDegree::classical(0, 0)), ["1"]);
}

#[test]
fn motivic_a2_product_h2_e0() {
    let b = ChartBounds { max_coweight: Some(8), chow: Some((0, 1)), ..ChartBounds::stems(20, 5) };
    let e = ext(Preset::A2mot, b);
    let (h2, e0) = (class(&e, "h2"), class(&e, "e0"));
    assert_eq!(e.product(&h2, &e0).unwrap(), class(&e, "h0g"));
}
