use std::sync::Arc;

use super::*;
use crate::hopf::Preset;
use crate::resolution::{DualAlgebra, MilnorAlgebra, Region, Resolution};

fn chart_of(alg: impl crate::resolution::GradedAlgebra + 'static, region: Region) -> ExtChart {
    let mut r = Resolution::new(Arc::new(alg));
    r.extend(region).unwrap();
    r.chart().unwrap()
}

#[test]
fn named_generator_lands_at_its_degree() {
    let text = "stem\tfiltration\tweight\tname\n107\t13\t60\t{13-300}\n";
    let (chart, report) = parse_machine_chart(text, &ColumnMap::default()).unwrap();
    assert_eq!(chart.gens.len(), 1);
    assert_eq!(chart.get("{13-300}").unwrap().degree, TriDegree::new(107, 13, 60));
    assert_eq!((report.total, report.parsed), (1, 1));
}

#[test]
fn empty_input_is_an_empty_chart() {
    let (chart, report) = parse_machine_chart("", &ColumnMap::default()).unwrap();
    assert!(chart.gens.is_empty());
    assert_eq!(report, IngestReport::default());
}

#[test]
fn round_trip_is_byte_stable() {
    let classical = chart_of(MilnorAlgebra::full(30), Region::Stem { max_stem: 16, max_filtration: 8 });
    let motivic = chart_of(
        DualAlgebra::new(&Preset::A2mot.build().mod_tau()).unwrap(),
        Region::Chow { max_chow: 1, max_coweight: 8, max_filtration: 6 },
    );
    for chart in [classical, motivic] {
        let m = MachineChart::from_ext_chart(&chart);
        let text = m.emit();
        let (back, report) = parse_machine_chart(&text, &ColumnMap::default()).unwrap();
        assert_eq!(report.errored + report.warned, 0, "{report:?}");
        assert_eq!(back, m);
        assert_eq!(back.emit(), text);
        let c1 = back.filter_chow(1);
        let (again, _) = parse_machine_chart(&c1.emit(), &ColumnMap::default()).unwrap();
        assert_eq!(again.emit(), c1.emit());
    }
}

#[test]
fn row_errors_carry_line_numbers() {
    let text = "\
# multiplier h0 0 1 0
stem\tfiltration\tweight\tname\tedges\tcomment
0\t1\t0\t{1-1}\th0:{2-1}\tfine
0\t2\t0\t{2-1}\th0:{3-9}\tedge to nowhere
x\t2\t0\t{2-2}\t\tbad stem
1\t2\t0\t{3-4}\t\tname disagrees
1\t1\t1\t{1-1}\t\tduplicate
";
    let (chart, r) = parse_machine_chart(text, &ColumnMap::default()).unwrap();
    assert_eq!((r.total, r.parsed, r.warned, r.errored), (5, 1, 1, 3));
    assert_eq!(r.parsed + r.warned + r.errored, r.total);
    let lines: Vec<usize> = r.errors.iter().map(|e| e.0).collect();
    assert_eq!(lines, [5, 6, 7]);
    assert!(r.warnings.iter().any(|(l, m)| *l == 4 && m.contains("{3-9}")));
    assert!(r.warnings.iter().any(|(_, m)| m.contains("comment")));
    assert!(!chart.get("{2-1}").unwrap().edges.contains_key("h0"), "dropped edge makes the product unknown");
}

#[test]
fn missing_mandatory_column_is_fatal() {
    let r = parse_machine_chart("stem\tweight\tname\n1\t0\t{1-1}\n", &ColumnMap::default());
    assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
}

#[test]
fn custom_column_map() {
    let map = ColumnMap::parse("delimiter=comma\nstem=s\nfiltration=af\nweight=\nname=id\nlabel=\nedges=mult\n").unwrap();
    assert_eq!(map.weight, None);
    let text = "id,s,af,mult\n{1-1},0,1,\"h0:{2-1}\"\n{2-1},0,2,h0:\n";
    let (chart, r) = parse_machine_chart(text, &map).unwrap();
    assert_eq!(r.parsed, 2);
    assert_eq!(chart.get("{1-1}").unwrap().edges["h0"], ["{2-1}"]);
    assert_eq!(chart.multipliers["h0"], TriDegree::new(0, 1, 0));
    assert!(ColumnMap::parse("colour=red").is_err());
}

#[test]
fn chow_filter() {
    let text = "stem\tfiltration\tweight\tname\n0\t1\t0\t{1-1}\n3\t1\t2\t{1-2}\n8\t3\t5\t{3-1}\n";
    let (chart, _) = parse_machine_chart(text, &ColumnMap::default()).unwrap();
    let c1 = chart.filter_chow(1);
    assert_eq!(c1.gens.iter().map(|g| g.name.as_str()).collect::<Vec<_>>(), ["{1-1}", "{3-1}"]);
    assert_eq!(c1.filter_chow(1), c1);
    assert!(chart.filter_chow(0).filter_chow(1).gens.is_empty());
}

#[test]
fn h0_coexponents_in_low_stems() {
    let chart = chart_of(MilnorAlgebra::full(30), Region::Stem { max_stem: 16, max_filtration: 9 });
    let m = MachineChart::from_ext_chart(&chart);
    let co = |s, f| coexponent_scan(&m, "h0", TriDegree::classical(s, f)).unwrap();
    assert_eq!(co(7, 4).value, 4);
    assert_eq!(co(3, 3).value, 3);
    assert_eq!(co(11, 7).value, 3);
    assert_eq!(co(15, 8).value, 8);
    assert!(!co(15, 8).lower_bound);
    assert!(matches!(coexponent_scan(&m, "h0", TriDegree::classical(5, 1)), Err(Error::Usage(_))));
    assert!(matches!(coexponent_scan(&m, "h7", TriDegree::classical(7, 4)), Err(Error::Dependency(_))));
}

#[test]
fn missing_edges_give_lower_bounds() {
    let text = "# multiplier h0 0 1 0\nstem\tfiltration\tweight\tname\tedges\n3\t1\t0\t{1-1}\t\n3\t2\t0\t{2-1}\th0:{3-1}\n3\t3\t0\t{3-1}\th0:\n";
    let (chart, _) = parse_machine_chart(text, &ColumnMap::default()).unwrap();
    let c = coexponent_scan(&chart, "h0", TriDegree::classical(3, 3)).unwrap();
    assert_eq!((c.value, c.lower_bound), (2, true));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn synthetic() -> impl Strategy<Value = Vec<(i32, i32, i32)>> {
        prop::collection::vec((0i32..12, 0i32..5, -2i32..10), 0..20)
    }

    proptest! {
        #[test]
        fn filter_is_idempotent(rows in synthetic(), c in -2i32..4) {
            let mut text = String::from("stem\tfiltration\tweight\tname\n");
            for (i, (s, f, w)) in rows.iter().enumerate() {
                text.push_str(&format!("{s}\t{f}\t{w}\t{{{f}-{i}}}\n"));
            }
            let (chart, _) = parse_machine_chart(&text, &ColumnMap::default()).unwrap();
            let once = chart.filter_chow(c);
            prop_assert_eq!(once.filter_chow(c), once.clone());
            prop_assert!(once.gens.iter().all(|g| g.degree.chow() == c));
        }

        #[test]
        fn rows_are_never_dropped(lines in prop::collection::vec("[0-9x{}\\-\t]{0,12}", 0..30)) {
            let mut text = String::from("stem\tfiltration\tweight\tname\n");
            for l in &lines {
                text.push_str(l);
                text.push('\n');
            }
            let (_, r) = parse_machine_chart(&text, &ColumnMap::default()).unwrap();
            prop_assert_eq!(r.parsed + r.warned + r.errored, r.total);
        }
    }
}

#[test]
fn coexponents_transfer_from_chow_zero() {
    let classical = MachineChart::from_ext_chart(&chart_of(DualAlgebra::new(&Preset::Acl1.build()).unwrap(), Region::Stem { max_stem: 12, max_filtration: 8 }));
    let motivic = MachineChart::from_ext_chart(&chart_of(
        DualAlgebra::new(&Preset::A2mot.build().mod_tau()).unwrap(),
        Region::Chow { max_chow: 0, max_coweight: 12, max_filtration: 8 },
    ));
    let mut checked = 0;
    for g in &classical.gens {
        let d = g.degree;
        if classical.at(d).len() != 1 {
            continue;
        }
        let c = coexponent_scan(&classical, "h0", d).unwrap();
        let m = coexponent_scan(&motivic, "h1", TriDegree::embed_classical(d.s, d.f)).unwrap();
        assert_eq!((c.value, c.lower_bound), (m.value, m.lower_bound), "at {d}");
        checked += 1;
    }
    assert!(checked > 20);
}
