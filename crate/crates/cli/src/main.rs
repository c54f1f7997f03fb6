//! `mixwidth` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 precondition
//! violation (e.g. a sweep over a tuple outside the exceptional case).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mixwidth::designs::{affine_line_design, repeat_design, verify_design};
use mixwidth::norms::{
    d0_mixed, extreme_points_inf1, one_column_sign_points, sample_ball, BlockMatrix, BlockShape,
    MixedNormParams,
};
use mixwidth::partitions::{good_partition, verify_partition};
use mixwidth::spread::{
    choose_params, skew_symmetric_residual, transposition_partition, SpreadOperator,
};
use mixwidth::sweep::{size_seed, sweep, PartitionChoice, SizeOperator, SweepConfig};
use mixwidth::widths::{classify, Tuple};
use mixwidth::{Error, Exponent};

#[derive(Parser)]
#[command(
    name = "mixwidth",
    version,
    about = "Width experiments for mixed-norm balls"
)]
struct Cli {
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rigid / non-rigid verdict and proof case for a tuple.
    Classify(TupleArgs),
    /// Affine-line design over GF(r)^d.
    Design(DesignArgs),
    /// (m, r, l)-partition of the s x b grid.
    Partition(PartitionArgs),
    /// Runs the approximation pipeline on one input.
    Bound(BoundArgs),
    /// Sampled pipeline error over a list of sizes.
    Sweep(SweepArgs),
    /// Transposition partition versus the skew-symmetric witness on B_{inf,1}^{s,s}.
    ExampleTranspose(TransposeArgs),
}

#[derive(Args, Clone, Copy)]
struct TupleArgs {
    #[arg(long, value_parser = parse_exponent)]
    p1: Exponent,
    #[arg(long, value_parser = parse_exponent)]
    p2: Exponent,
    #[arg(long, value_parser = parse_exponent)]
    q1: Exponent,
    #[arg(long, value_parser = parse_exponent)]
    q2: Exponent,
}

impl TupleArgs {
    fn tuple(self) -> Tuple {
        Tuple {
            p1: self.p1,
            p2: self.p2,
            q1: self.q1,
            q2: self.q2,
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    /// Field order: a prime power.
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Number of concatenated copies.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Run the exhaustive pair check.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    b: usize,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value = "good", value_parser = parse_choice)]
    kind: PartitionChoice,
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    tuple: TupleArgs,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    b: usize,
    #[arg(long, default_value = "good", value_parser = parse_choice)]
    partition: PartitionChoice,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    /// JSON matrix `{"s", "b", "entries"}` (column-major); a seeded sample
    /// is used if omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PointKind::Sign)]
    point: PointKind,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PointKind {
    /// One column with entries `+-s^{-1/p1}`.
    Sign,
    /// Point of the `(p1, p2)` unit ball.
    Ball,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    tuple: TupleArgs,
    /// Sizes as `SxB` (or `S` for a square size), comma separated.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_size)]
    sizes: Vec<(usize, usize)>,
    #[arg(long, default_value = "good", value_parser = parse_choice)]
    partition: PartitionChoice,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    /// Samples of each kind (sign points and ball points) per size.
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Args)]
struct TransposeArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16])]
    s: Vec<usize>,
    /// Extreme points per size.
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_choice(s: &str) -> Result<PartitionChoice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("invalid size `{s}`: expected `SxB` or `S`");
    let (a, b) = s.split_once(['x', 'X']).unwrap_or((s, s));
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

enum Failure {
    Io(String),
    Usage(String),
    Precondition(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Precondition(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotExceptional(_)
            | Error::RigidTuple(_)
            | Error::NonRigidTuple(_)
            | Error::OutsideBall(_)
            | Error::MultiColumnSupport(..)
            | Error::ShapeMismatch { .. }
            | Error::ZeroNormalization => Failure::Precondition(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<String, Failure>;

fn json<T: Serialize>(value: &T) -> CmdResult {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> CmdResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

#[derive(Serialize)]
struct ClassifyRow {
    p1: Exponent,
    p2: Exponent,
    q1: Exponent,
    q2: Exponent,
    verdict: String,
    case_label: String,
    d0_inner: String,
    d0_outer: String,
}

fn cmd_classify(args: TupleArgs, format: Format) -> CmdResult {
    let r = classify(args.p1, args.p2, args.q1, args.q2);
    match format {
        Format::Json => json(&r),
        Format::Csv => csv_rows(&[ClassifyRow {
            p1: r.p1,
            p2: r.p2,
            q1: r.q1,
            q2: r.q2,
            verdict: format!("{:?}", r.verdict),
            case_label: r.case_label.to_string(),
            d0_inner: mixwidth::norms::ratio_string(r.d0_exponents.0),
            d0_outer: mixwidth::norms::ratio_string(r.d0_exponents.1),
        }]),
    }
}

fn cmd_design(args: &DesignArgs, format: Format) -> CmdResult {
    if args.r > 64 {
        return Err(Failure::Usage(format!("--r {} exceeds 64", args.r)));
    }
    let b = u64::from(args.r).checked_pow(args.d);
    if args.d < 2 || b.is_none_or(|b| b > 4096) {
        return Err(Failure::Usage(format!(
            "--d {} must be at least 2 with r^d <= 4096 (r = {})",
            args.d, args.r
        )));
    }
    let design = repeat_design(&affine_line_design(args.r, args.d)?, args.repeat)?;
    let report = args.verify.then(|| verify_design(&design));
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                b: usize,
                r: usize,
                l: usize,
                m: usize,
                sets: &'a [Vec<usize>],
                verification: Option<mixwidth::designs::DesignReport>,
            }
            json(&Out {
                b: design.b,
                r: design.r,
                l: design.l,
                m: design.m(),
                sets: &design.sets,
                verification: report,
            })
        }
        Format::Csv => {
            if let Some(rep) = &report {
                eprintln!("verification: {}", serde_json::to_string(rep)?);
            }
            #[derive(Serialize)]
            struct Row {
                set: usize,
                points: String,
            }
            let rows: Vec<Row> = design
                .sets
                .iter()
                .enumerate()
                .map(|(k, set)| Row {
                    set: k,
                    points: set
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                })
                .collect();
            csv_rows(&rows)
        }
    }
}

fn cmd_partition(args: &PartitionArgs, format: Format) -> CmdResult {
    let partition = match args.kind {
        PartitionChoice::Transposition => {
            if args.s != args.b {
                return Err(Failure::Precondition(format!(
                    "transposition partition needs s = b (got {}x{})",
                    args.s, args.b
                )));
            }
            transposition_partition(args.s)?
        }
        PartitionChoice::Good => {
            BlockShape::new(args.s, args.b)?;
            if args.s < args.b {
                return Err(Failure::Precondition(format!(
                    "good partition needs s >= b (got s = {}, b = {}); sweeps use the grouped construction for s < b",
                    args.s, args.b
                )));
            }
            good_partition(args.s, args.b, args.d)?
        }
    };
    let report = args.verify.then(|| verify_partition(&partition));
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                partition: &'a mixwidth::partitions::Partition,
                verification: Option<mixwidth::partitions::PartitionReport>,
            }
            json(&Out {
                partition: &partition,
                verification: report,
            })
        }
        Format::Csv => {
            if let Some(rep) = &report {
                eprintln!("verification: {}", serde_json::to_string(rep)?);
            }
            #[derive(Serialize)]
            struct Row {
                group: usize,
                i: usize,
                j: usize,
            }
            let rows: Vec<Row> = partition
                .groups()
                .iter()
                .enumerate()
                .flat_map(|(g, cells)| cells.iter().map(move |&(i, j)| Row { group: g, i, j }))
                .collect();
            csv_rows(&rows)
        }
    }
}

#[derive(Serialize)]
struct BoundRow {
    s: usize,
    b: usize,
    d: u32,
    k: usize,
    alpha: String,
    dim: usize,
    d0: f64,
    measured_error: f64,
    certified_bound: f64,
    delta: f64,
    ratio: f64,
    selected: String,
}

fn cmd_bound(args: &BoundArgs, seed: u64, format: Format) -> CmdResult {
    let tuple = args.tuple.tuple();
    let shape = BlockShape::new(args.s, args.b)?;
    let params = choose_params(tuple.p1, tuple.p2, tuple.q1, tuple.q2, args.s, args.b)?
        .with_overrides(args.d, args.k)?;
    let x = match &args.input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let x: BlockMatrix = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            if x.shape() != shape {
                return Err(Failure::Precondition(format!(
                    "input has shape {}, flags say {shape}",
                    x.shape()
                )));
            }
            x
        }
        None => {
            let base = size_seed(seed, args.s, args.b);
            match args.point {
                PointKind::Sign => one_column_sign_points(shape, tuple.p1, base, 1).remove(0),
                PointKind::Ball => sample_ball(shape, tuple.p1, tuple.p2, base, 1).remove(0),
            }
        }
    };
    let op =
        SizeOperator::build(args.s, args.b, params.d, args.partition).map_err(|e| match e {
            Error::InvalidArgument(m) => Failure::Precondition(m),
            other => other.into(),
        })?;
    let res = op.run(&x, &params)?;
    let d0 = d0_mixed(shape, tuple.p1, tuple.p2, tuple.q1, tuple.q2);
    let row = BoundRow {
        s: args.s,
        b: args.b,
        d: params.d,
        k: params.k,
        alpha: params.alpha_string(),
        dim: res.dimension,
        d0,
        measured_error: res.measured_error,
        certified_bound: res.certified_bound,
        delta: res.delta,
        ratio: res.measured_error / d0,
        selected: res
            .selected
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    };
    match format {
        Format::Json => json(&row),
        Format::Csv => csv_rows(&[row]),
    }
}

fn cmd_sweep(args: &SweepArgs, seed: u64, format: Format) -> CmdResult {
    let tuple = args.tuple.tuple();
    let report = classify(tuple.p1, tuple.p2, tuple.q1, tuple.q2);
    if !report.is_exceptional() {
        return Err(Failure::Precondition(format!(
            "{}\n{}",
            report.explanation(),
            serde_json::to_string(&report)?
        )));
    }
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    if args.partition == PartitionChoice::Transposition {
        if let Some((s, b)) = args.sizes.iter().find(|(s, b)| s != b) {
            return Err(Failure::Precondition(format!(
                "transposition partition needs s = b (got {s}x{b})"
            )));
        }
    }
    let config = SweepConfig {
        tuple,
        sizes: args.sizes.clone(),
        partition: args.partition,
        samples: args.samples,
        seed,
        d: args.d,
        k: args.k,
    };
    let rows = sweep(&config)?;
    match format {
        Format::Csv => csv_rows(&rows),
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                report: &'a mixwidth::widths::RegimeReport,
                partition: PartitionChoice,
                samples: usize,
                seed: u64,
                rows: &'a [mixwidth::sweep::SizeMeasurement],
            }
            json(&Out {
                report: &report,
                partition: args.partition,
                samples: args.samples,
                seed,
                rows: &rows,
            })
        }
    }
}

#[derive(Serialize)]
struct TransposeRow {
    s: usize,
    dim: usize,
    sup_sampled_error: f64,
    d0: f64,
    ratio: f64,
    skew_dim: usize,
    skew_error: f64,
    skew_ratio: f64,
}

fn cmd_example_transpose(args: &TransposeArgs, seed: u64, format: Format) -> CmdResult {
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    let (inf, one, two) = (Exponent::INFINITY, Exponent::ONE, Exponent::TWO);
    let target = MixedNormParams::new(one, two);
    let mut rows = Vec::new();
    for &s in &args.s {
        if s < 2 {
            return Err(Failure::Usage(format!("--s {s} must be at least 2")));
        }
        let shape = BlockShape::new(s, s)?;
        let params = choose_params(inf, one, one, two, s, s)?;
        let op = SpreadOperator::new(transposition_partition(s)?)?;
        let (mut err, mut skew) = (0.0f64, 0.0f64);
        for x in extreme_points_inf1(shape, size_seed(seed, s, s), args.samples) {
            err = err.max(mixwidth::spread::approximate(&x, &params, &op)?.measured_error);
            skew = skew.max(skew_symmetric_residual(&x, target)?);
        }
        let d0 = d0_mixed(shape, inf, one, one, two);
        rows.push(TransposeRow {
            s,
            dim: op.dimension(),
            sup_sampled_error: err,
            d0,
            ratio: err / d0,
            skew_dim: s * (s - 1) / 2,
            skew_error: skew,
            skew_ratio: skew / d0,
        });
    }
    match format {
        Format::Csv => csv_rows(&rows),
        Format::Json => json(&rows),
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Classify(a) => cmd_classify(*a, cli.format),
        Command::Design(a) => cmd_design(a, cli.format),
        Command::Partition(a) => cmd_partition(a, cli.format),
        Command::Bound(a) => cmd_bound(a, cli.seed, cli.format),
        Command::Sweep(a) => cmd_sweep(a, cli.seed, cli.format),
        Command::ExampleTranspose(a) => cmd_example_transpose(a, cli.seed, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|text| emit(cli.out.as_ref(), &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
