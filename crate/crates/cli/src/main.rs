//! `chowext`: compute Ext charts, run the Burklund–Xu spectral sequence,
//! ingest machine charts, render charts and run the verification suite.
//!
//! Every flag can also be set by a `CHOWEXT_<FLAG>` environment variable
//! (upper case, dashes as underscores) or by a `key=value` line in the file
//! named by `--config`. Flags beat the environment, which beats the file.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::info;

use chowext::bx::{self, BxRun, DiffValue};
use chowext::chart::{ChartBounds, ExtChart, ExtEngine, StaticChart};
use chowext::charts::{render_chart, render_page};
use chowext::cobar::{ext_compute, CobarBudget};
use chowext::hopf::{parse_presentation, HopfPresentation, Preset, TriDegree};
use chowext::ingest::{coexponent_scan, parse_machine_chart, ColumnMap};
use chowext::resolution::{DualAlgebra, GradedAlgebra, MilnorAlgebra, Region, Resolution, ResolutionExt};
use chowext::{verify, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RANGE: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_VERIFY: u8 = 5;
const EXIT_PARTIAL: u8 = 6;

#[derive(Parser, Debug)]
#[command(name = "chowext", version, about = "Ext over Steenrod algebra quotients and the Burklund–Xu spectral sequence")]
#[command(args_override_self = true)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "CHOWEXT_THREADS")]
    threads: Option<usize>,
    /// A `key=value` file mirroring the flags; `[command]` headers scope keys.
    #[arg(long, global = true, env = "CHOWEXT_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute an Ext chart.
    Ext(ExtArgs),
    /// Run the Burklund–Xu spectral sequence in Chow degree 0 or 1.
    Bx(BxArgs),
    /// Read a machine chart, report, filter and re-emit it.
    Ingest(IngestArgs),
    /// Render a persisted Ext chart as TSV or SVG.
    Chart(ChartArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Cobar,
    Resolution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Svg,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ExtArgs {
    /// Built-in algebra.
    #[arg(long, env = "CHOWEXT_ALGEBRA", default_value = "Acl", conflicts_with = "presentation")]
    algebra: String,
    /// Presentation file instead of a built-in algebra.
    #[arg(long, env = "CHOWEXT_PRESENTATION")]
    presentation: Option<PathBuf>,
    #[arg(long, env = "CHOWEXT_ENGINE", value_enum, default_value = "cobar")]
    engine: Engine,
    /// Largest stem; defaults to twice the coweight bound plus the filtration cap.
    #[arg(long, env = "CHOWEXT_MAX_STEM")]
    max_stem: Option<i32>,
    #[arg(long, env = "CHOWEXT_MAX_FILTRATION", default_value_t = 5)]
    max_filtration: i32,
    #[arg(long, env = "CHOWEXT_MAX_COWEIGHT")]
    max_coweight: Option<i32>,
    #[arg(long, env = "CHOWEXT_MIN_CHOW")]
    min_chow: Option<i32>,
    #[arg(long, env = "CHOWEXT_MAX_CHOW")]
    max_chow: Option<i32>,
    /// Cobar slice cap in basis elements.
    #[arg(long, env = "CHOWEXT_MAX_SLICE", default_value_t = CobarBudget::default().max_slice)]
    max_slice: u64,
    /// Write the chart here.
    #[arg(long, short, env = "CHOWEXT_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct BxArgs {
    /// Target algebra: A2mot (coefficients over classical A(1)) or Amot.
    #[arg(long, env = "CHOWEXT_ALGEBRA", default_value = "A2mot")]
    algebra: String,
    #[arg(long, env = "CHOWEXT_CHOW", default_value_t = 1)]
    chow: i32,
    /// Largest regraded stem.
    #[arg(long, env = "CHOWEXT_MAX_STEM", default_value_t = 40)]
    max_stem: i32,
    #[arg(long, env = "CHOWEXT_MAX_FILTRATION", default_value_t = 21)]
    max_filtration: i32,
    /// A persisted coefficient chart; d2 is then reported as unknown.
    #[arg(long, env = "CHOWEXT_COEFFICIENTS")]
    coefficients: Option<PathBuf>,
    /// Confirm hidden-extension candidates against motivic A(2).
    #[arg(long, env = "CHOWEXT_CONFIRM")]
    confirm: bool,
    /// Plot range `x,y` for rendered pages.
    #[arg(long, env = "CHOWEXT_RANGE", value_parser = parse_pair)]
    range: Option<(i32, i32)>,
    /// Directory for dumps and figures.
    #[arg(long, short, env = "CHOWEXT_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct IngestArgs {
    input: PathBuf,
    /// Column map file (`stem=...`, `delimiter=...`).
    #[arg(long, env = "CHOWEXT_COLUMNS")]
    columns: Option<PathBuf>,
    /// Keep only this Chow degree.
    #[arg(long, env = "CHOWEXT_CHOW")]
    chow: Option<i32>,
    /// Report the coexponent of the tower through `s,f[,w]`.
    #[arg(long, env = "CHOWEXT_COEXPONENT", value_parser = parse_degree)]
    coexponent: Vec<TriDegree>,
    #[arg(long, env = "CHOWEXT_MULTIPLIER", default_value = "h0")]
    multiplier: String,
    #[arg(long, short, env = "CHOWEXT_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ChartArgs {
    /// A persisted Ext chart.
    input: PathBuf,
    #[arg(long, env = "CHOWEXT_FORMAT", value_enum, default_value = "svg")]
    format: Format,
    #[arg(long, env = "CHOWEXT_RANGE", value_parser = parse_pair)]
    range: Option<(i32, i32)>,
    #[arg(long, short, env = "CHOWEXT_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// all, a1, a2, tables, ingest, linalg or a criterion number.
    #[arg(default_value = "all")]
    suite: String,
}

fn parse_pair(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_degree(s: &str) -> Result<TriDegree, String> {
    let v: Vec<i32> = s.split(',').map(|x| x.trim().parse::<i32>().map_err(|e| format!("{e}"))).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok(TriDegree::classical(a, b)),
        [a, b, c] => Ok(TriDegree::new(a, b, c)),
        _ => Err("expected s,f or s,f,w".into()),
    }
}

/// Config lines become flags placed before the user's own, so the user's
/// flags override them; keys with a set environment variable are skipped.
fn config_args(path: &Path, command: &str) -> anyhow::Result<Vec<OsString>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut section: Option<String> = None;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.trim().to_string());
            continue;
        }
        if section.as_deref().is_some_and(|s| s != command) {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(i + 1, format!("expected key=value in {}", path.display())))?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        if std::env::var_os(format!("CHOWEXT_{}", k.to_uppercase().replace('-', "_"))).is_some() {
            continue;
        }
        match v {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{k}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

fn parse_cli() -> anyhow::Result<Cli> {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let first = Cli::try_parse_from(&argv).map_err(Usage::Clap)?;
    let Some(path) = first.config.clone() else { return Ok(first) };
    let command = match first.command {
        Command::Ext(_) => "ext",
        Command::Bx(_) => "bx",
        Command::Ingest(_) => "ingest",
        Command::Chart(_) => "chart",
        Command::Verify(_) => "verify",
    };
    let pos = argv.iter().position(|a| a == command).ok_or_else(|| anyhow!("cannot locate the subcommand"))?;
    let mut merged: Vec<OsString> = argv[..=pos].to_vec();
    merged.extend(config_args(&path, command)?);
    merged.extend(argv[pos + 1..].iter().cloned());
    let m = Cli::command().try_get_matches_from(merged).map_err(Usage::Clap)?;
    Ok(Cli::from_arg_matches(&m).map_err(Usage::Clap)?)
}

/// Argument errors, kept apart so clap can print them itself.
#[derive(Debug)]
enum Usage {
    Clap(clap::Error),
}

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Usage::Clap(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for Usage {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("CHOWEXT_LOG", "info")).format_timestamp(None).init();
    let cli = match parse_cli() {
        Ok(c) => c,
        Err(e) => {
            if let Some(Usage::Clap(c)) = e.downcast_ref::<Usage>() {
                let _ = c.print();
                return ExitCode::from(if c.use_stderr() { EXIT_USAGE } else { 0 });
            }
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    let outcome = match cli.command {
        Command::Ext(a) => cmd_ext(a),
        Command::Bx(a) => cmd_bx(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Chart(a) => cmd_chart(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Usage(_) | Error::Parse { .. }) => EXIT_USAGE,
        Some(Error::Range(_)) => EXIT_RANGE,
        Some(Error::Budget(_)) => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn presentation(a: &ExtArgs) -> anyhow::Result<(HopfPresentation, Option<Preset>)> {
    if let Some(path) = &a.presentation {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let name = path.file_stem().map_or("custom".into(), |s| s.to_string_lossy().into_owned());
        return Ok((parse_presentation(&name, &text)?, None));
    }
    let p: Preset = a.algebra.parse()?;
    Ok((p.build(), Some(p)))
}

fn resolve(alg: impl GradedAlgebra + 'static, region: Region) -> anyhow::Result<ExtChart> {
    let mut r = Resolution::new(Arc::new(alg));
    r.extend(region)?;
    Ok(r.chart()?)
}

fn cmd_ext(a: ExtArgs) -> anyhow::Result<u8> {
    let (p, preset) = presentation(&a)?;
    let f = a.max_filtration;
    if f < 0 || a.max_stem.is_some_and(|s| s < 0) || a.max_coweight.is_some_and(|c| c < 0) {
        return Err(Error::Usage("range bounds must be non-negative".into()).into());
    }
    let chow = match (a.min_chow, a.max_chow) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(0), hi.unwrap_or(i32::MAX / 4))),
    };
    let max_stem = match (a.max_stem, a.max_coweight) {
        (Some(s), _) => s,
        (None, Some(c)) => 2 * c + f + chow.map_or(0, |(_, hi)| hi.min(2 * c + f)),
        (None, None) => return Err(Error::Usage("give --max-stem or --max-coweight".into()).into()),
    };
    let chart = match a.engine {
        Engine::Cobar => {
            let bounds = ChartBounds { max_stem, max_filtration: f, max_coweight: a.max_coweight, chow };
            let budget = CobarBudget { max_slice: a.max_slice, ..CobarBudget::default() };
            ext_compute(&p, bounds, budget)?.chart().clone()
        }
        Engine::Resolution => ext_resolution(&a, &p, preset, max_stem, chow)?,
    };
    info!("{} classes in {} degrees", chart.total_dim(), chart.groups().count());
    if let Some(out) = &a.output {
        fs::write(out, chart.to_text()).with_context(|| format!("writing {}", out.display()))?;
    }
    let mut table = String::from("s\tf\tw\tdim\tnames\n");
    for (d, names) in chart.groups() {
        table.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", d.s, d.f, d.w, names.len(), names.join(" ")));
    }
    print!("{table}");
    Ok(0)
}

fn ext_resolution(a: &ExtArgs, p: &HopfPresentation, preset: Option<Preset>, max_stem: i32, chow: Option<(i32, i32)>) -> anyhow::Result<ExtChart> {
    let f = a.max_filtration;
    let stem = Region::Stem { max_stem, max_filtration: f };
    match preset {
        Some(Preset::Acl) => resolve(MilnorAlgebra::full(max_stem + f + 1), stem),
        Some(Preset::Acl1) => resolve(MilnorAlgebra::a(1, max_stem + f + 1), stem),
        Some(Preset::Acl2) => resolve(MilnorAlgebra::a(2, max_stem + f + 1), stem),
        Some(Preset::A1mot | Preset::A2mot) => {
            let (lo, hi) = chow.unwrap_or((0, 1));
            if lo != 0 || hi > 1 {
                return Err(Error::Usage(format!(
                    "the resolution engine handles {} only in Chow degrees 0..=1 (through the quotient by tau); use --engine cobar",
                    p.name()
                ))
                .into());
            }
            let cw = a.max_coweight.ok_or_else(|| Error::Usage("a motivic resolution needs --max-coweight".into()))?;
            resolve(DualAlgebra::new(&p.mod_tau())?, Region::Chow { max_chow: hi, max_coweight: cw, max_filtration: f })
        }
        Some(Preset::Amot | Preset::B) => Err(Error::Usage(format!(
            "{} is infinite and not a classical profile algebra; use --engine cobar",
            p.name()
        ))
        .into()),
        Some(Preset::B2) | None => {
            let alg = DualAlgebra::new(p).map_err(|e| match e {
                Error::Usage(m) => Error::Usage(format!("{m}; use --engine cobar")),
                e => e,
            })?;
            match (a.max_coweight, chow) {
                (Some(cw), Some((0, hi))) => resolve(alg, Region::Chow { max_chow: hi, max_coweight: cw, max_filtration: f }),
                (Some(_), _) => Err(Error::Usage("a Chow-bounded resolution needs --max-chow and min Chow 0".into()).into()),
                (None, _) => resolve(alg, stem),
            }
        }
    }
}

fn cmd_bx(a: BxArgs) -> anyhow::Result<u8> {
    let target: Preset = a.algebra.parse()?;
    if !(0..=1).contains(&a.chow) {
        return Err(Error::Usage(format!("Chow degree {} is not supported; use 0 or 1", a.chow)).into());
    }
    let (s, f) = (a.max_stem, a.max_filtration);
    let qs: Vec<u32> = bx::q_indices(&target.build()).into_iter().filter(|&q| (1i64 << q) - 1 <= s as i64).collect();
    let coeff_region = Region::Stem { max_stem: s + 1, max_filtration: f };
    let (engine, massey): (Box<dyn ExtEngine>, bool) = match &a.coefficients {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            (Box::new(StaticChart(ExtChart::from_text(&text)?)), false)
        }
        None => {
            let mut r = match target {
                Preset::A2mot => Resolution::new(Arc::new(DualAlgebra::new(&Preset::Acl1.build())?)),
                Preset::Amot => Resolution::new(Arc::new(MilnorAlgebra::full(s + f + 2))),
                p => return Err(Error::Usage(format!("no built-in coefficient algebra for {p}; pass --coefficients")).into()),
            };
            r.extend(coeff_region)?;
            (Box::new(ResolutionExt::new(r)?), true)
        }
    };
    let run = BxRun::run(engine.as_ref(), &qs, a.chow, s, f, massey)?;
    if a.chow == 0 {
        eprintln!("notice: the spectral sequence collapses in Chow degree zero; E1 is the coefficient chart reindexed");
    }
    let coeff = engine.chart();
    let einf = run.e_infinity();
    let mut hidden = Vec::new();
    for h in ["h0", "h1", "h2"] {
        if coeff.multiplier_degree(h).is_some() && a.chow == 1 {
            hidden.extend(bx::hidden_extension_candidates(einf, coeff, h)?);
        }
    }
    if a.confirm {
        if target != Preset::A2mot {
            return Err(Error::Usage("--confirm is available for A2mot only".into()).into());
        }
        let mut r = Resolution::new(Arc::new(DualAlgebra::new(&Preset::A2mot.build().mod_tau())?));
        r.extend(Region::Chow { max_chow: 1, max_coweight: s, max_filtration: f })?;
        bx::confirm_hidden(&mut hidden, einf, coeff, &ResolutionExt::new(r)?)?;
    }
    let mut report = String::from("multiplier\tsource\ttarget\tconfirmed\n");
    for c in &hidden {
        let conf = c.confirmed.map_or("unchecked", |b| if b { "yes" } else { "no" });
        report.push_str(&format!("{}\t{}\t{}\t{conf}\n", c.multiplier, c.source_name, c.target_name));
    }
    // Unknowns whose target leaves the range are expected at the edges.
    let (mut unknown, mut edge) = (0, 0);
    for p in &run.pages {
        for d in p.differentials.iter().filter(|d| matches!(d.value, DiffValue::Unknown(_))) {
            if p.in_range(d.target.0, d.target.1) {
                unknown += 1;
            } else {
                edge += 1;
            }
        }
    }
    if let Some(dir) = &a.output_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("pages.txt"), run.dump())?;
        fs::write(dir.join("hidden.tsv"), &report)?;
        for p in &run.pages {
            let shown: Vec<_> = if p.r == einf.r { hidden.clone() } else { Vec::new() };
            let doc = render_page(p, coeff, &shown, a.range);
            fs::write(dir.join(format!("E{}.tsv", p.r)), doc.to_tsv())?;
            fs::write(dir.join(format!("E{}.svg", p.r)), doc.to_svg())?;
        }
    }
    let mut summary = String::new();
    for p in &run.pages {
        let known = p.differentials.iter().filter(|d| matches!(d.value, DiffValue::Known(_))).count();
        let total: usize = p.cells.keys().map(|&pos| p.dim(pos)).sum();
        summary.push_str(&format!("E{}\tclasses {total}\tdifferentials {known}\n", p.r));
    }
    summary.push_str(&format!("hidden extension candidates {}\nundetermined differentials {unknown}\nedge differentials {edge}\n", hidden.len()));
    print!("{summary}");
    if a.output_dir.is_none() {
        print!("{report}");
    }
    Ok(if unknown > 0 { EXIT_PARTIAL } else { 0 })
}

fn cmd_ingest(a: IngestArgs) -> anyhow::Result<u8> {
    let map = match &a.columns {
        Some(p) => ColumnMap::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => ColumnMap::default(),
    };
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (mut chart, report) = parse_machine_chart(&text, &map)?;
    for (line, msg) in report.warnings.iter().chain(&report.errors) {
        eprintln!("line {line}: {msg}");
    }
    eprintln!("rows {}: parsed {}, warned {}, errored {}", report.total, report.parsed, report.warned, report.errored);
    if let Some(c) = a.chow {
        chart = chart.filter_chow(c);
    }
    for d in &a.coexponent {
        let c = coexponent_scan(&chart, &a.multiplier, *d)?;
        let bound = if c.lower_bound { " (lower bound)" } else { "" };
        eprintln!("coexponent at {d}: {} with cogenerator {}{bound}", c.value, c.cogenerator);
    }
    write_or_print(a.output.as_deref(), &chart.emit())?;
    Ok(0)
}

fn cmd_chart(a: ChartArgs) -> anyhow::Result<u8> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let chart = ExtChart::from_text(&text)?;
    let doc = render_chart(&chart, a.range);
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    let out = match a.format {
        Format::Tsv => doc.to_tsv(),
        Format::Svg => doc.to_svg(),
    };
    write_or_print(a.output.as_deref(), &out)?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<u8> {
    let Some(ids) = verify::suite(&a.suite) else {
        bail!(Error::Usage(format!("unknown suite {:?}; expected one of {}", a.suite, verify::SUITES.join(", "))));
    };
    let mut failed = false;
    for id in ids {
        let r = verify::run_check(id);
        println!("{r}");
        failed |= !r.passed;
    }
    Ok(if failed { EXIT_VERIFY } else { 0 })
}
