use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nlhide_core::discrimination::SolverOptions;
use nlhide_core::ensembles::{example1, example2, Ensemble, ExampleParams};
use nlhide_core::folding::{coarse_ensemble, corollary1_curve, direct_encoding, prop2_bound, FoldSpec};
use nlhide_core::hiding::{
    check_hiding, coalition_table, direct_encode, run_protocol, HidingOptions, HidingReport, Mode, SchemeConfig, Status,
};
use nlhide_core::io as files;
use nlhide_core::tensor::DimCap;
use nlhide_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "nlhide",
    version,
    about = "Partial-transpose discrimination bounds and multi-player data hiding"
)]
struct Cli {
    /// Largest explicit matrix dimension.
    #[arg(long, global = true, env = "NLHIDE_DIM_CAP", default_value_t = DimCap::DEFAULT.0)]
    dim_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an example ensemble and write it as JSON.
    Example(ExampleArgs),
    /// Decide whether an ensemble satisfies the hiding condition.
    Check(CheckArgs),
    /// Tabulate the coalition bound (and the exact curve when known) over L.
    Bounds(BoundsArgs),
    /// Run seeded simulations of the hiding protocol.
    Simulate(SimulateArgs),
    /// Write the coarse-grained L-fold ensemble.
    Fold(FoldArgs),
    /// Tabulate bounds for every nontrivial partition of the parties.
    Coalition(CoalitionArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    /// 1: GHZ and its complement; 2: the 2^t-state parity family.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    kind: u8,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Target coalition advantage for the fold-count estimate.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, visible_alias = "Lmax")]
    lmax: usize,
    /// Tabulate even without a hiding guarantee.
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long = "L", visible_alias = "folds")]
    folds: usize,
    #[arg(long)]
    x: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Send the coarse state for x instead of broadcasting x ⊕ y.
    #[arg(long)]
    direct: bool,
    /// Run without a hiding guarantee.
    #[arg(long)]
    force: bool,
    /// Write one JSON transcript per line here.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct FoldArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long = "L", visible_alias = "folds")]
    folds: usize,
    /// Uniform prior over the coarse states.
    #[arg(long)]
    direct: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CoalitionArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Fold counts, comma separated.
    #[arg(long = "L", visible_alias = "folds", value_delimiter = ',', required = true)]
    folds: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Exit status plus message.
struct Failure {
    code: u8,
    message: String,
}

const EXIT_INADMISSIBLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_UNDECIDED: u8 = 4;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionCap { .. } => EXIT_CAP,
            Error::Inadmissible(_) => EXIT_INADMISSIBLE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

/// 17 significant digits, positional where the exponent allows.
fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (16 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(value: &impl Serialize) -> Result<(), Failure> {
    let mut out = sink(None)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn load(path: &Path) -> Result<Ensemble<f64>, Failure> {
    files::load_path(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_ensemble(e: &Ensemble<f64>, path: Option<&Path>) -> Result<(), Failure> {
    let mut out = sink(path)?;
    files::save(e, &mut out)?;
    out.flush()?;
    Ok(())
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Admissible => 0,
        Status::Inadmissible => EXIT_INADMISSIBLE,
        Status::Undecided => EXIT_UNDECIDED,
    }
}

fn cmd_example(a: &ExampleArgs, cap: DimCap) -> CmdResult {
    let e = match a.kind {
        1 => {
            if a.s.is_some() || a.t.is_some() {
                return Err(usage("--s and --t only apply to --kind 2"));
            }
            example1::<f64>(a.d, a.m, cap)?
        }
        _ => {
            let (Some(s), Some(t)) = (a.s, a.t) else {
                return Err(usage("--kind 2 needs --s and --t"));
            };
            example2::<f64>(ExampleParams::new(a.d, a.m, s, t), cap)?
        }
    };
    eprint!("{}", e.validate());
    write_ensemble(&e, a.output.as_deref())?;
    Ok(0)
}

fn report_rows(r: &HidingReport) -> Vec<(String, String)> {
    let mut rows = vec![
        ("status".to_string(), r.status.to_string()),
        ("admissible".into(), r.admissible.to_string()),
        ("n".into(), r.n.to_string()),
        ("orthogonal".into(), r.orthogonal.to_string()),
        ("max_overlap".into(), num(r.max_overlap)),
        ("p_global".into(), num(r.p_global)),
        ("max_q".into(), num(r.max_q)),
        ("two_over_n".into(), num(r.two_over_n)),
    ];
    for q in &r.q_table {
        let value = q.q.map(num).unwrap_or_default();
        rows.push((format!("q[{}]", q.bipartition), value));
        rows.push((format!("certified[{}]", q.bipartition), q.certified.to_string()));
    }
    if let Some(fp) = &r.fast_path {
        rows.push(("dominance".into(), fp.dominance.to_string()));
        rows.push(("dominant_pivot".into(), fp.pivot.to_string()));
        rows.push(("eta_pivot".into(), num(fp.eta_pivot)));
        rows.push(("fast_path".into(), if fp.holds { "holds" } else { "fails" }.into()));
    }
    if let Some(sc) = &r.size_condition {
        rows.push(("size_condition".into(), if sc.holds { "holds" } else { "fails" }.into()));
        rows.push(("size_condition_line".into(), sc.line.clone()));
    }
    rows.push(("product_basis_lower_bound".into(), num(r.product_basis_lower_bound)));
    rows.push(("epsilon".into(), num(r.epsilon)));
    rows.push((
        "min_folds".into(),
        r.min_folds.map(|l| l.to_string()).unwrap_or_default(),
    ));
    for note in &r.notes {
        rows.push(("note".into(), note.clone()));
    }
    rows
}

fn write_key_values(rows: &[(String, String)]) -> Result<(), Failure> {
    let mut out = sink(None)?;
    writeln!(out, "key,value")?;
    for (k, v) in rows {
        writeln!(out, "{},{}", csv_field(k), csv_field(v))?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_check(a: &CheckArgs) -> CmdResult {
    let e = load(&a.input)?;
    let opts = HidingOptions {
        epsilon: a.epsilon,
        ..Default::default()
    };
    let report = check_hiding(&e, &opts)?;
    match a.format {
        Format::Json => write_json(&report)?,
        Format::Csv => write_key_values(&report_rows(&report))?,
    }
    if let Some(sc) = report.size_condition.as_ref().filter(|sc| !sc.holds) {
        eprintln!("size condition fails: {}", sc.line);
    }
    Ok(status_code(report.status))
}

#[derive(Serialize)]
struct BoundRow {
    #[serde(rename = "L")]
    folds: usize,
    bound: f64,
    exact: Option<f64>,
}

fn cmd_bounds(a: &BoundsArgs) -> CmdResult {
    if a.lmax == 0 {
        return Err(usage("--lmax must be at least 1"));
    }
    let e = load(&a.input)?;
    let report = check_hiding(&e, &HidingOptions::default())?;
    if report.status != Status::Admissible && !a.force {
        eprintln!("ensemble is {}; pass --force to tabulate anyway", report.status);
        return Ok(status_code(report.status));
    }
    if !report.max_q.is_finite() {
        return Ok(EXIT_UNDECIDED);
    }
    let exact = match &report.fast_path {
        Some(fp) if report.n == 2 && fp.dominance => Some(corollary1_curve(fp.eta_pivot, a.lmax)?),
        _ => None,
    };
    let rows = (1..=a.lmax)
        .map(|l| {
            Ok(BoundRow {
                folds: l,
                bound: prop2_bound(report.n, report.max_q, l)?,
                exact: exact.as_ref().map(|c| c[l - 1]),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    match a.format {
        Format::Json => write_json(&rows)?,
        Format::Csv => {
            let mut out = sink(None)?;
            writeln!(out, "L,bound,exact")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{}",
                    r.folds,
                    num(r.bound),
                    r.exact.map(num).unwrap_or_default()
                )?;
            }
            out.flush()?;
        }
    }
    Ok(0)
}

fn cmd_simulate(a: &SimulateArgs, cap: DimCap) -> CmdResult {
    let e = load(&a.input)?;
    if a.x >= e.len() {
        return Err(usage(format!("--x {} is outside 0..{}", a.x, e.len())));
    }
    let status = check_hiding(&e, &HidingOptions::default())?.status;
    let mode = if a.direct { Mode::Direct } else { Mode::Broadcast };
    let cfg = SchemeConfig::with_status(e, a.folds, a.seed, mode, status)?.forced(a.force);
    if status != Status::Admissible && a.force {
        eprintln!("warning: ensemble is {status}; no hiding guarantee");
    }

    if a.direct {
        let d = direct_encode(&cfg, a.x, cap)?;
        match a.format {
            Format::Json => write_json(&d)?,
            Format::Csv => write_key_values(&[
                ("x".into(), d.x.to_string()),
                ("L".into(), d.folds.to_string()),
                ("dim".into(), d.dim.to_string()),
                ("prior".into(), num(d.prior)),
                ("trace".into(), num(d.trace)),
                ("purity".into(), num(d.purity)),
                ("recovery_probability".into(), num(d.recovery_probability)),
                ("confusion".into(), num(d.confusion)),
                ("recovery_ok".into(), d.recovery_ok.to_string()),
            ])?,
        }
        return Ok(if d.recovery_ok { 0 } else { EXIT_UNDECIDED });
    }

    let run = run_protocol(&cfg, a.x, a.trials)?;
    if let Some(path) = &a.transcripts {
        let mut out = sink(Some(path))?;
        for t in &run.transcripts {
            serde_json::to_writer(&mut out, t)?;
            writeln!(out)?;
        }
        out.flush()?;
    }
    let s = &run.summary;
    match a.format {
        Format::Json => write_json(s)?,
        Format::Csv => {
            let mut rows = vec![
                ("trials".to_string(), s.trials.to_string()),
                ("L".into(), s.folds.to_string()),
                ("x".into(), s.x.to_string()),
                ("seed".into(), s.seed.to_string()),
                ("recovery_rate".into(), s.recovery_rate.map(num).unwrap_or_default()),
                ("max_sigma".into(), num(s.max_sigma)),
                ("guarantee".into(), s.guarantee.to_string()),
            ];
            for (i, ((c, f), p)) in s.class_counts.iter().zip(&s.empirical).zip(&s.expected).enumerate() {
                rows.push((format!("count[{i}]"), c.to_string()));
                rows.push((format!("empirical[{i}]"), num(*f)));
                rows.push((format!("expected[{i}]"), num(*p)));
            }
            write_key_values(&rows)?;
        }
    }
    Ok(0)
}

fn cmd_fold(a: &FoldArgs, cap: DimCap) -> CmdResult {
    let e = load(&a.input)?;
    let spec = FoldSpec::new(&e, a.folds)?;
    let out = if a.direct {
        direct_encoding(&spec, cap)?
    } else {
        coarse_ensemble(&spec, cap)?
    };
    write_ensemble(&out, a.output.as_deref())?;
    Ok(0)
}

fn cmd_coalition(a: &CoalitionArgs) -> CmdResult {
    let e = load(&a.input)?;
    let rows = coalition_table(&e, &a.folds, &SolverOptions::default())?;
    match a.format {
        Format::Json => write_json(&rows)?,
        Format::Csv => {
            let mut out = sink(None)?;
            writeln!(out, "partition,L,bound_or_exact,kind")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    csv_field(&r.partition),
                    r.folds,
                    num(r.value),
                    r.kind
                )?;
            }
            out.flush()?;
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> CmdResult {
    let cap = DimCap(cli.dim_cap);
    match &cli.command {
        Command::Example(a) => cmd_example(a, cap),
        Command::Check(a) => cmd_check(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Simulate(a) => cmd_simulate(a, cap),
        Command::Fold(a) => cmd_fold(a, cap),
        Command::Coalition(a) => cmd_coalition(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
