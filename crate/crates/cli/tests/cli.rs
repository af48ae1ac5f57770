use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chowext(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chowext"))
        .args(args)
        .current_dir(dir)
        .env("CHOWEXT_LOG", "warn")
        .env_remove("CHOWEXT_MAX_STEM")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ext_unit_chart() {
    let dir = tempfile::tempdir().unwrap();
    let o = chowext(&["ext", "--max-stem", "0", "--max-filtration", "0"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "s\tf\tw\tdim\tnames\n0\t0\t0\t1\t1\n");
}

#[test]
fn ext_a1_cobar_matches_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ext", "--algebra", "Acl1", "--max-stem", "16", "--max-filtration", "4"];
    let cobar = chowext(&args, dir.path());
    let res = chowext(&[&args[..], &["--engine", "resolution"]].concat(), dir.path());
    assert!(cobar.status.success() && res.status.success());
    let dims = |o: &Output| stdout(o).lines().map(|l| l.split('\t').take(4).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>();
    assert_eq!(dims(&cobar), dims(&res));
    assert!(stdout(&cobar).contains("8\t4\t0\t1\tP\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |n: &str, out: &str| {
        let o = chowext(&["--threads", n, "ext", "--algebra", "A2mot", "--max-coweight", "6", "--max-filtration", "3", "-o", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (stdout(&o), fs::read(dir.path().join(out)).unwrap())
    };
    assert_eq!(run("1", "a.chart"), run("4", "b.chart"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| chowext(args, dir.path()).status.code();
    assert_eq!(code(&["ext", "--algebra", "Amot", "--engine", "resolution", "--max-stem", "3"]), Some(2));
    assert_eq!(code(&["ext", "--algebra", "nope", "--max-stem", "3"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["ext", "--algebra", "A2mot", "--max-coweight", "30", "--max-filtration", "8", "--max-chow", "0"]), Some(4));
    assert_eq!(code(&["verify", "nope"]), Some(2));
}

#[test]
fn config_file_then_environment_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "# defaults\nmax-filtration = 0\n[ext]\nmax_stem=3\n[bx]\nchow=0\n").unwrap();
    let stems = |o: &Output| stdout(o).lines().skip(1).map(|l| l.split('\t').next().unwrap().to_string()).collect::<Vec<_>>();
    let o = chowext(&["--config", "run.conf", "ext", "--algebra", "Acl1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stems(&o), ["0"]);
    let o = chowext(&["--config", "run.conf", "ext", "--algebra", "Acl1", "--max-filtration", "1"], dir.path());
    assert_eq!(stems(&o), ["0", "0", "1"]);
    let o = Command::new(env!("CARGO_BIN_EXE_chowext"))
        .args(["--config", "run.conf", "ext", "--algebra", "Acl1", "--max-filtration", "1"])
        .current_dir(dir.path())
        .env("CHOWEXT_MAX_STEM", "0")
        .env("CHOWEXT_LOG", "warn")
        .output()
        .unwrap();
    assert_eq!(stems(&o), ["0", "0"]);
}

#[test]
fn bx_writes_pages_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = chowext(&["bx", "--max-stem", "12", "--max-filtration", "8", "-o", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("E1\t") && s.contains("\nE3\t"), "{s}");
    for f in ["pages.txt", "hidden.tsv", "E1.svg", "E2.tsv", "E3.svg"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let hidden = fs::read_to_string(dir.path().join("out/hidden.tsv")).unwrap();
    assert!(hidden.contains("h1\tq2·a\tq0·P\tunchecked"), "{hidden}");
}

#[test]
fn bx_from_a_loaded_chart_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let o = chowext(&["ext", "--algebra", "Acl1", "--engine", "resolution", "--max-stem", "13", "--max-filtration", "8", "-o", "a1.chart"], dir.path());
    assert!(o.status.success());
    let o = chowext(&["bx", "--coefficients", "a1.chart", "--max-stem", "12", "--max-filtration", "8"], dir.path());
    assert_eq!(o.status.code(), Some(6));
    assert!(!stdout(&o).contains("undetermined differentials 0\n"));
}

#[test]
fn bx_chow_zero_collapses() {
    let dir = tempfile::tempdir().unwrap();
    let o = chowext(&["bx", "--chow", "0", "--max-stem", "8", "--max-filtration", "4"], dir.path());
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("collapses in Chow degree zero"));
    assert!(stdout(&o).starts_with("E1\t"));
}

#[test]
fn ingest_round_trip_and_coexponent() {
    let dir = tempfile::tempdir().unwrap();
    let o = chowext(&["ext", "--algebra", "Acl", "--engine", "resolution", "--max-stem", "16", "--max-filtration", "10", "-o", "full.chart"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("full.chart")).unwrap();
    let chart = chowext::chart::ExtChart::from_text(&text).unwrap();
    fs::write(dir.path().join("full.tsv"), chowext::ingest::MachineChart::from_ext_chart(&chart).emit()).unwrap();
    let o = chowext(&["ingest", "full.tsv", "--coexponent", "3,3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), fs::read_to_string(dir.path().join("full.tsv")).unwrap());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("errored 0") && err.contains("coexponent at (3,3,0): 3"), "{err}");
}

#[test]
fn chart_render_clips_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    chowext(&["ext", "--algebra", "Acl1", "--max-stem", "8", "--max-filtration", "3", "-o", "c.chart"], dir.path());
    let o = chowext(&["chart", "c.chart", "--format", "tsv", "--range", "50,50"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("# warning: requested range (50, 50)"));
    let svg = chowext(&["chart", "c.chart"], dir.path());
    assert!(stdout(&svg).contains("<svg"));
}

#[test]
fn verify_reports_one_line_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = chowext(&["verify", "linalg"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("linalg PASS"));
    let o = chowext(&["verify", "9"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}
