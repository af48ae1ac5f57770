//! Rendered A(2) pages in Chow degree one against checked-in files.
//! Set `CHOWEXT_BLESS=1` to rewrite them.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use chowext::bx::{self, BxRun};
use chowext::charts::render_page;
use chowext::hopf::Preset;
use chowext::resolution::{DualAlgebra, Region, Resolution, ResolutionExt};

const RANGE: (i32, i32) = (24, 13);

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("CHOWEXT_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}; run with CHOWEXT_BLESS=1", path.display()));
    assert!(expected == actual, "{name} differs from the golden file");
}

#[test]
fn a2_chow_one_pages() {
    let mut r = Resolution::new(Arc::new(DualAlgebra::new(&Preset::Acl1.build()).unwrap()));
    r.extend(Region::Stem { max_stem: RANGE.0 + 1, max_filtration: RANGE.1 }).unwrap();
    let ext = ResolutionExt::new(r).unwrap();
    let run = BxRun::run(&ext, &[0, 1, 2], 1, RANGE.0, RANGE.1, true).unwrap();
    let coeff = chowext::chart::ExtEngine::chart(&ext);
    let e2 = run.page(2).unwrap();
    let einf = run.e_infinity();
    let hidden = bx::hidden_extension_candidates(einf, coeff, "h1").unwrap();

    // The top computed row still carries edge differentials; leave it out.
    let shown = Some((RANGE.0, RANGE.1 - 1));
    let e2_doc = render_page(e2, coeff, &[], shown);
    let einf_doc = render_page(einf, coeff, &hidden, shown);
    let (e2_tsv, einf_tsv) = (e2_doc.to_tsv(), einf_doc.to_tsv());

    // Content checks that do not depend on the stored files.
    assert!(e2_tsv.contains("line\t3\t2\tmagenta\td2\tto=2,3"), "d2(q2·h0) = q0·h1^2 is drawn");
    assert!(e2_tsv.contains("line\t5\t3\tmagenta\td2\tto=4,4"), "d2(q2·h1^2) = q0·a is drawn");
    assert!(einf_tsv.contains("line\t7\t4\torange\thidden-h1\tto=8,5"), "hidden h1 from q2·a to q0·P is drawn");
    let dots: Vec<&str> = einf_tsv.lines().filter(|l| l.starts_with("dot\t")).collect();
    assert!(dots.iter().all(|l| !l.starts_with("dot\t2\t3\t")), "q0·h1^2 is gone");
    assert!(dots.iter().all(|l| !l.contains("\tred\t")), "no q1 class survives");

    golden("a2_e2.tsv", &e2_tsv);
    golden("a2_e2.svg", &e2_doc.to_svg());
    golden("a2_einf.tsv", &einf_tsv);
    golden("a2_einf.svg", &einf_doc.to_svg());
}
