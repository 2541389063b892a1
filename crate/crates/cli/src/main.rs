use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use k1alex_core::{
    builtin, fibered_obstruction, k1_invariant, metabelian_rep, metafinite_polynomial,
    parse_presentation, Error, FiberVerdict, GroupAut, Invertibility, MeridianPresentation,
    MetaRep, BUILTIN_NAMES, DEFAULT_PRECISION,
};
use serde::Serialize;

const SCHEMA_VERSION: u32 = 1;
const MIN_PRECISION: usize = 8;

#[derive(Parser)]
#[command(name = "k1alex", version, about = "K1-valued twisted Alexander invariants of knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline for one cyclic cover: H, kappa, Delta, logarithms, polynomial.
    Compute {
        #[command(flatten)]
        source: Source,
        /// Cover degree N.
        #[arg(long = "cover", short = 'N')]
        cover: usize,
        #[command(flatten)]
        output: Output,
        /// Exit with status 4 when invertibility is indeterminate.
        #[arg(long)]
        strict: bool,
    },
    /// Invertibility of the Fox matrix over several covers.
    Fibered {
        #[command(flatten)]
        source: Source,
        /// Comma-separated cover degrees.
        #[arg(long, value_delimiter = ',', required = true)]
        covers: Vec<usize>,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        strict: bool,
    },
    /// Torsion of the cyclic cover with its deck action and the representation.
    Cover {
        #[command(flatten)]
        source: Source,
        #[arg(long = "cover", short = 'N')]
        cover: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Built-in knot labels.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in knot label (see `list`).
    #[arg(long)]
    knot: Option<String>,
    /// Presentation file.
    #[arg(long)]
    presentation: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Series precision K.
    #[arg(long, env = "K1ALEX_PRECISION", default_value_t = DEFAULT_PRECISION)]
    precision: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A failure mapped to its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn indeterminate(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::UnknownGenerator { .. }
            | Error::RankMismatch(_)
            | Error::MeridianInWord => Failure::parse(e.to_string()),
            _ => Failure::validation(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct CoverReport {
    schema_version: u32,
    knot: String,
    cover: usize,
    group: String,
    kappa: Vec<Vec<i64>>,
    images: Vec<String>,
}

#[derive(Serialize)]
struct DeltaReport {
    series: String,
    unit: String,
    tau_power: i64,
    witt: String,
    precision: Option<i64>,
}

#[derive(Serialize)]
struct ComputeReport {
    schema_version: u32,
    knot: String,
    cover: usize,
    group: String,
    kappa: Vec<Vec<i64>>,
    images: Vec<String>,
    delta: Option<DeltaReport>,
    logs: Option<BTreeMap<usize, String>>,
    metafinite_poly: String,
    invertible: String,
    precision: usize,
}

#[derive(Serialize)]
struct FiberRow {
    cover: usize,
    invertible: String,
    reading: String,
}

#[derive(Serialize)]
struct FiberedReport {
    schema_version: u32,
    knot: String,
    verdicts: Vec<FiberRow>,
    summary: String,
    precision: usize,
}

fn load(source: &Source) -> Result<(String, MeridianPresentation), Failure> {
    if let Some(name) = &source.knot {
        return Ok((name.clone(), builtin(name)?));
    }
    let path = source.presentation.as_ref().expect("clap requires one source");
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let p = parse_presentation(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok((name, p))
}

fn check_precision(k: usize) -> Result<(), Failure> {
    if k < MIN_PRECISION {
        return Err(Failure::validation(format!("precision {k} is below the minimum {MIN_PRECISION}")));
    }
    Ok(())
}

fn check_cover(n: usize) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::validation(format!("cover degree {n} must be at least 2")));
    }
    Ok(())
}

/// Matrix entries reduced to the balanced residue range of each row's modulus.
fn balanced(kappa: &GroupAut) -> Vec<Vec<i64>> {
    let divisors = kappa.group().divisors();
    kappa
        .matrix()
        .iter()
        .zip(divisors)
        .map(|(row, &d)| {
            let d = d as i64;
            row.iter()
                .map(|&v| {
                    let r = v.rem_euclid(d);
                    if 2 * r > d {
                        r - d
                    } else {
                        r
                    }
                })
                .collect()
        })
        .collect()
}

fn cover_report(name: &str, n: usize, rep: &MetaRep) -> CoverReport {
    let g = rep.group();
    CoverReport {
        schema_version: SCHEMA_VERSION,
        knot: name.to_string(),
        cover: n,
        group: g.to_string(),
        kappa: balanced(rep.kappa()),
        images: rep.images().iter().map(|h| g.format_element(*h)).collect(),
    }
}

fn cmd_cover(source: &Source, n: usize) -> Result<CoverReport, Failure> {
    check_cover(n)?;
    let (name, p) = load(source)?;
    let rep = metabelian_rep(&p, n)?;
    Ok(cover_report(&name, n, &rep))
}

fn cmd_compute(source: &Source, n: usize, k: usize, strict: bool) -> Result<ComputeReport, Failure> {
    check_cover(n)?;
    check_precision(k)?;
    let (name, p) = load(source)?;
    let rep = metabelian_rep(&p, n)?;
    let report = k1_invariant(&p, &rep, k)?;
    if strict && report.invertible == Invertibility::Indeterminate {
        return Err(Failure::indeterminate(format!(
            "invertibility of the Fox matrix for {name} at N = {n} is indeterminate"
        )));
    }
    let poly = metafinite_polynomial(&p, &rep)?;
    let delta = match (&report.delta, &report.unit_part, &report.witt) {
        (Some(d), Some((u, e)), Some(w)) => Some(DeltaReport {
            series: d.to_string(),
            unit: u.to_string(),
            tau_power: *e,
            witt: w.to_string(),
            precision: d.precision(),
        }),
        _ => None,
    };
    let logs = report.logs.as_ref().map(|l| {
        l.entries()
            .iter()
            .map(|(k, c)| (*k, c.to_element().to_string()))
            .collect()
    });
    let c = cover_report(&name, n, &rep);
    Ok(ComputeReport {
        schema_version: SCHEMA_VERSION,
        knot: c.knot,
        cover: n,
        group: c.group,
        kappa: c.kappa,
        images: c.images,
        delta,
        logs,
        metafinite_poly: poly.to_string(),
        invertible: report.invertible.as_str().to_string(),
        precision: k,
    })
}

fn cmd_fibered(source: &Source, covers: &[usize], k: usize, strict: bool) -> Result<FiberedReport, Failure> {
    check_precision(k)?;
    for &n in covers {
        check_cover(n)?;
    }
    let (name, p) = load(source)?;
    let reps = covers
        .iter()
        .map(|&n| metabelian_rep(&p, n))
        .collect::<Result<Vec<_>, _>>()?;
    let verdicts = fibered_obstruction(&p, &reps, k)?;
    if strict && verdicts.iter().any(|v| v.invertible == Invertibility::Indeterminate) {
        return Err(Failure::indeterminate(format!("some verdict for {name} is indeterminate")));
    }
    Ok(FiberedReport {
        schema_version: SCHEMA_VERSION,
        knot: name,
        summary: FiberVerdict::summary(&verdicts).to_string(),
        verdicts: verdicts
            .iter()
            .map(|v| FiberRow {
                cover: v.cover_degree,
                invertible: v.invertible.as_str().to_string(),
                reading: v.label().to_string(),
            })
            .collect(),
        precision: k,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn text_cover(c: &CoverReport) -> String {
    let images: Vec<String> = c
        .images
        .iter()
        .enumerate()
        .map(|(i, h)| format!("x{} -> {h}", i + 1))
        .collect();
    format!(
        "knot: {}\ncover: {}\ngroup: {}\nkappa: {:?}\nimages: {}\n",
        c.knot,
        c.cover,
        c.group,
        c.kappa,
        images.join(", ")
    )
}

fn text_compute(r: &ComputeReport) -> String {
    let images: Vec<String> = r
        .images
        .iter()
        .enumerate()
        .map(|(i, h)| format!("x{} -> {h}", i + 1))
        .collect();
    let mut s = format!(
        "knot: {}\ncover: {}\ngroup: {}\nkappa: {:?}\nimages: {}\n",
        r.knot,
        r.cover,
        r.group,
        r.kappa,
        images.join(", ")
    );
    match &r.delta {
        Some(d) => {
            s.push_str(&format!("delta: {}\n", d.series));
            s.push_str(&format!("delta ambiguity: unit monomial ({})·τ^{}\n", d.unit, d.tau_power));
            s.push_str(&format!("witt: {}\n", d.witt));
        }
        None => s.push_str("delta: none\n"),
    }
    if let Some(logs) = &r.logs {
        for (k, v) in logs {
            s.push_str(&format!("log_{k}: {v}\n"));
        }
    }
    s.push_str(&format!("metafinite_poly: {}\n", r.metafinite_poly));
    s.push_str(&format!("invertible: {}\n", r.invertible));
    s.push_str(&format!("precision: {}\n", r.precision));
    s
}

fn text_fibered(r: &FiberedReport) -> String {
    let mut s = format!("knot: {}\n", r.knot);
    for v in &r.verdicts {
        s.push_str(&format!("N = {}: {} ({})\n", v.cover, v.invertible, v.reading));
    }
    s.push_str(&format!("summary: {}\n", r.summary));
    s
}

fn render<T: Serialize>(format: Format, value: &T, text: impl Fn(&T) -> String) -> String {
    match format {
        Format::Json => json(value),
        Format::Text => text(value),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Compute { source, cover, output, strict } => {
            let r = cmd_compute(source, *cover, output.precision, *strict)?;
            Ok(render(output.format, &r, text_compute))
        }
        Command::Fibered { source, covers, output, strict } => {
            let r = cmd_fibered(source, covers, output.precision, *strict)?;
            Ok(render(output.format, &r, text_fibered))
        }
        Command::Cover { source, cover, format } => {
            let r = cmd_cover(source, *cover)?;
            Ok(render(*format, &r, text_cover))
        }
        Command::List { format } => Ok(match format {
            Format::Json => json(&BUILTIN_NAMES),
            Format::Text => BUILTIN_NAMES.iter().map(|n| format!("{n}\n")).collect(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
