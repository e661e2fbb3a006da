//! `sepcodes`: build, verify and concatenate separating and intersecting codes.
//!
//! Exit status: 0 when every check passes, 1 when a property check fails
//! (the report carries a witness), 2 on invalid input.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sepcodes::agcodes::{
    build_code, build_intersecting, construct_pair, first_points, xing_check, EvalCodeSpec,
};
use sepcodes::codes::{
    check_intersecting, check_intersecting_sampled, check_mutually_intersecting,
    check_mutually_intersecting_sampled, check_sep21, check_sep21_sampled, check_set_system, distance_set, Caps,
    Code, CodeError,
};
use sepcodes::concat::{check_concat_sampled, concat_rate, concatenate, rate_ledger, ConcatSpec};
use sepcodes::curves::{Curve, Factor, Point, RationalFunction};
use sepcodes::gf::Gf;
use sepcodes::io::{parse_code, parse_divisor, point_json, write_code, write_divisor};
use sepcodes::nordrob::{build_nr16, one_shorten, shortened_nr, subcode_first};

mod report;
mod repro;

use report::{Outcome, Report};

#[derive(Parser)]
#[command(name = "sepcodes", version, about = "Separating and intersecting codes from curves")]
struct Cli {
    /// Seed threaded through every sampled checker.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Record zero elapsed time so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timings: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite field information and arithmetic.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Points, Riemann-Roch spaces and canonical divisors.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Evaluation codes from curves.
    #[command(subcommand)]
    Agcode(AgCmd),
    /// Nordstrom-Robinson codes.
    #[command(subcommand)]
    Nr(NrCmd),
    /// Concatenate an outer code with a binary inner code.
    Concat(ConcatArgs),
    /// Verify a code property.
    Check(CheckArgs),
    /// Print the rate ledger.
    Rates(RatesArgs),
    /// Run the full reproduction pipeline and write a summary report.
    Repro(ReproArgs),
}

#[derive(Subcommand)]
enum FieldCmd {
    /// Order and defining modulus of GF(p^k).
    Info {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// One arithmetic operation on integer encodings.
    Op {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(value_enum)]
        op: FieldOp,
        a: u64,
        /// Second operand; the exponent for `pow`.
        b: Option<u64>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Pow,
}

#[derive(Copy, Clone, ValueEnum)]
enum CurveChoice {
    P1,
    Hermitian,
}

#[derive(Args, Clone)]
struct CurveArgs {
    #[arg(long, value_enum)]
    curve: CurveChoice,
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
}

impl CurveArgs {
    fn build(&self) -> Result<Curve> {
        let gf = Gf::new(self.p, self.k)?;
        Ok(match self.curve {
            CurveChoice::P1 => Curve::projective_line(gf),
            CurveChoice::Hermitian => Curve::hermitian(gf)?,
        })
    }
}

#[derive(Args, Clone)]
struct LengthArgs {
    /// Use the first N points in canonical order.
    #[arg(long, conflicts_with = "all_points", required_unless_present = "all_points")]
    n: Option<usize>,
    /// Use every rational point.
    #[arg(long)]
    all_points: bool,
}

impl LengthArgs {
    fn points(&self, curve: &Curve) -> Result<Vec<usize>> {
        let n = if self.all_points { curve.num_points() } else { self.n.expect("clap enforces n") };
        Ok(first_points(curve, n)?)
    }
}

#[derive(Subcommand)]
enum CurveCmd {
    /// List rational points in canonical order.
    Points(CurveArgs),
    /// l(D) for a divisor file.
    RrDim {
        /// Divisor JSON, `-` for stdin.
        divisor: PathBuf,
    },
    /// A basis of L(D) for a divisor file.
    RrBasis { divisor: PathBuf },
    /// The canonical divisor as divisor JSON.
    Canonical(CurveArgs),
}

#[derive(Subcommand)]
enum AgCmd {
    /// Intersecting code C(G, D) with D from the divisor search.
    Build {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        length: LengthArgs,
        /// Code file destination; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Certificate JSON destination; stdout when --out is given.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Also write D as divisor JSON.
        #[arg(long)]
        divisor_out: Option<PathBuf>,
        /// Random pairs when the pair space exceeds the cap.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Certificate for C(G, D) with D from a divisor file.
    Certify {
        divisor: PathBuf,
        #[command(flatten)]
        length: LengthArgs,
        /// Random pairs when the pair space exceeds the cap.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Mutually intersecting pair with deg D = M.
    Pair {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        length: LengthArgs,
        #[arg(long)]
        m: usize,
        /// Directory for code1.txt, code2.txt, d1.json, d2.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Random pairs when the pair space exceeds the cap.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum NrCmd {
    /// The shortened (15, 128) code, or the (16, 256) code with --full.
    Build {
        #[arg(long)]
        full: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Keep words with 0 at a position and delete it.
    Shorten {
        #[arg(long, default_value_t = 0)]
        position: usize,
        /// Code file, `-` or absent for stdin.
        input: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// The M lexicographically first codewords.
    Subcode {
        #[arg(long)]
        m: usize,
        input: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Verify {
    Full,
    Sampled,
    None,
}

#[derive(Args)]
struct ConcatArgs {
    /// Outer code over GF(q).
    #[arg(long)]
    outer: PathBuf,
    /// Binary listed code with at least q words.
    #[arg(long)]
    inner: PathBuf,
    /// Full triple enumeration, seeded sampling, or no check.
    #[arg(long, value_enum, default_value_t = Verify::Full)]
    verify: Verify,
    /// Random triples for `--verify sampled`.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Concatenated code file; the report goes to stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Property {
    #[value(alias = "sep2")]
    Sep21,
    Intersecting,
    Mutual,
    Setsystem,
    Distances,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    property: Property,
    /// Code files; `-` or none reads stdin. `mutual` takes two.
    files: Vec<PathBuf>,
    /// Sample this many random triples or pairs instead of enumerating.
    #[arg(long)]
    sampled: Option<u64>,
}

#[derive(Args)]
struct RatesArgs {
    /// Field size for the q-dependent entries.
    #[arg(long, default_value_t = 121)]
    q: u32,
    /// JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReproArgs {
    /// Report destination; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Include the long-running q = 121 Hermitian construction.
    #[arg(long)]
    stretch: bool,
    /// Random pairs or triples for each sampled check.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
}

pub struct Ctx {
    pub seed: u64,
    pub timings: bool,
    pub caps: Caps,
}

fn read_input(path: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    match path {
        None => {
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        }
        Some(p) if p.as_os_str() == "-" => {
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        }
        Some(p) => s = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
    }
    Ok(s)
}

fn read_code(path: Option<&Path>) -> Result<Code> {
    let text = read_input(path)?;
    let what = path.map_or("stdin".to_string(), |p| p.display().to_string());
    parse_code(&text).with_context(|| format!("parsing code from {what}"))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Exhaustive when within the caps, seeded sampling otherwise.
pub fn intersecting_outcome(code: &Code, ctx: &Ctx, trials: u64) -> Result<Outcome> {
    match check_intersecting(code, ctx.caps) {
        Ok(v) => Ok(Outcome::verdict(v.mode, v.witness)),
        Err(CodeError::CapExceeded { .. }) => {
            let v = check_intersecting_sampled(code, trials, ctx.seed)?;
            Ok(Outcome::verdict(v.mode, v.witness))
        }
        Err(e) => Err(e.into()),
    }
}

fn mutual_outcome(a: &Code, b: &Code, ctx: &Ctx, trials: u64) -> Result<Outcome> {
    match check_mutually_intersecting(a, b, ctx.caps) {
        Ok(v) => Ok(Outcome::verdict(v.mode, v.witness)),
        Err(CodeError::CapExceeded { .. }) => {
            let v = check_mutually_intersecting_sampled(a, b, trials, ctx.seed)?;
            Ok(Outcome::verdict(v.mode, v.witness))
        }
        Err(e) => Err(e.into()),
    }
}

fn function_json(curve: &Curve, f: &RationalFunction) -> Result<Value> {
    let num: Vec<Value> = f.numerator().terms().map(|(i, j, c)| json!([i, j, c.encoding()])).collect();
    let den = f
        .denominator()
        .iter()
        .map(|&(factor, e)| {
            Ok(match factor {
                Factor::Vertical(a) => json!({"vertical": a.encoding(), "exp": e}),
                Factor::Tangent(p) => json!({"tangent": point_json(curve, p)?, "exp": e}),
            })
        })
        .collect::<Result<Vec<Value>>>()?;
    Ok(json!({"numerator": num, "denominator": den}))
}

fn run_field(cmd: FieldCmd) -> Result<bool> {
    match cmd {
        FieldCmd::Info { p, k } => {
            let gf = Gf::new(p, k)?;
            emit(None, &pretty(&json!({"p": p, "k": k, "q": gf.q(), "modulus": gf.modulus()})))?;
        }
        FieldCmd::Op { p, k, op, a, b } => {
            let gf = Gf::new(p, k)?;
            let x = gf.elem(a)?;
            let need_b = || b.context("this operation needs a second operand");
            let r = match op {
                FieldOp::Add => gf.add(x, gf.elem(need_b()?)?),
                FieldOp::Sub => gf.sub(x, gf.elem(need_b()?)?),
                FieldOp::Mul => gf.mul(x, gf.elem(need_b()?)?),
                FieldOp::Div => gf.div(x, gf.elem(need_b()?)?)?,
                FieldOp::Inv => gf.inv(x)?,
                FieldOp::Pow => gf.pow(x, need_b()?),
            };
            emit(None, &format!("{}\n", r.encoding()))?;
        }
    }
    Ok(true)
}

fn run_curve(cmd: CurveCmd) -> Result<bool> {
    match cmd {
        CurveCmd::Points(args) => {
            let c = args.build()?;
            let mut out = String::new();
            for (i, p) in c.points().iter().enumerate() {
                match p {
                    Point::Affine { x, y } => out.push_str(&format!("{i} {} {}\n", x.encoding(), y.encoding())),
                    Point::Infinity => out.push_str(&format!("{i} inf\n")),
                }
            }
            emit(None, &out)?;
        }
        CurveCmd::RrDim { divisor } => {
            let (c, d) = parse_divisor(&read_input(Some(&divisor))?)?;
            let l = c.l_dim(&d)?;
            emit(None, &pretty(&json!({"degree": d.degree(), "genus": c.genus(), "l": l})))?;
        }
        CurveCmd::RrBasis { divisor } => {
            let (c, d) = parse_divisor(&read_input(Some(&divisor))?)?;
            let basis = c.riemann_roch_basis(&d)?;
            let funcs = basis.iter().map(|f| function_json(&c, f)).collect::<Result<Vec<_>>>()?;
            emit(None, &pretty(&json!({"l": basis.len(), "basis": funcs})))?;
        }
        CurveCmd::Canonical(args) => {
            let c = args.build()?;
            emit(None, &write_divisor(&c, &c.canonical_divisor())?)?;
        }
    }
    Ok(true)
}

fn run_agcode(cmd: AgCmd, ctx: &Ctx) -> Result<bool> {
    match cmd {
        AgCmd::Build { curve, length, out, cert, divisor_out, trials } => {
            let c = curve.build()?;
            let n = length.points(&c)?.len();
            let ic = build_intersecting(&c, n)?;
            let mut report = Report::new(ctx.seed);
            report.run("xing", ctx.timings, || Ok(Outcome::exact(ic.certificate.certified)))?;
            report.run("intersecting", ctx.timings, || intersecting_outcome(&ic.code.code, ctx, trials))?;
            let certificate = json!({
                "l2DG": ic.certificate.l_2dg,
                "degD": ic.certificate.deg_d,
                "deg2DG": ic.certificate.deg_2dg,
                "n": n,
                "genus": c.genus(),
                "dim": ic.code.dim(),
                "checks": report.checks,
            });
            emit(out.as_deref(), &write_code(&ic.code.code))?;
            if let Some(path) = divisor_out {
                emit(Some(&path), &write_divisor(&c, ic.spec.d())?)?;
            }
            match (cert, &out) {
                (Some(path), _) => emit(Some(&path), &pretty(&certificate))?,
                (None, Some(_)) => emit(None, &pretty(&certificate))?,
                (None, None) => {}
            }
            Ok(report.passed())
        }
        AgCmd::Certify { divisor, length, trials } => {
            let (c, d) = parse_divisor(&read_input(Some(&divisor))?)?;
            let spec = EvalCodeSpec::new(&c, length.points(&c)?, d)?;
            let cert = xing_check(&c, &spec)?;
            let code = build_code(&c, &spec)?;
            let mut report = Report::new(ctx.seed);
            report.run("xing", ctx.timings, || Ok(Outcome::exact(cert.certified)))?;
            report.run("intersecting", ctx.timings, || intersecting_outcome(&code.code, ctx, trials))?;
            emit(
                None,
                &pretty(&json!({
                    "l2DG": cert.l_2dg,
                    "degD": cert.deg_d,
                    "deg2DG": cert.deg_2dg,
                    "n": spec.n(),
                    "genus": c.genus(),
                    "dim": code.dim(),
                    "checks": report.checks,
                })),
            )?;
            Ok(report.passed())
        }
        AgCmd::Pair { curve, length, m, out_dir, trials } => {
            let c = curve.build()?;
            let pts = length.points(&c)?;
            let pair = construct_pair(&c, &pts, m)?;
            let mut report = Report::new(ctx.seed);
            report.run("l_sum_zero", ctx.timings, || Ok(Outcome::exact(pair.l_sum == 0)))?;
            report.run("mutually_intersecting", ctx.timings, || {
                mutual_outcome(&pair.code.code, &pair.code2.code, ctx, trials)
            })?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                emit(Some(&dir.join("code1.txt")), &write_code(&pair.code.code))?;
                emit(Some(&dir.join("code2.txt")), &write_code(&pair.code2.code))?;
                emit(Some(&dir.join("d1.json")), &write_divisor(&c, pair.spec.d())?)?;
                emit(Some(&dir.join("d2.json")), &write_divisor(&c, pair.spec2.d())?)?;
            }
            emit(
                None,
                &pretty(&json!({
                    "degD": pair.spec.d().degree(),
                    "degD2": pair.spec2.d().degree(),
                    "lSum": pair.l_sum,
                    "dim": pair.code.dim(),
                    "dim2": pair.code2.dim(),
                    "checks": report.checks,
                })),
            )?;
            Ok(report.passed())
        }
    }
}

fn run_nr(cmd: NrCmd) -> Result<bool> {
    let (code, out) = match cmd {
        NrCmd::Build { full, out } => (if full { build_nr16() } else { shortened_nr() }, out),
        NrCmd::Shorten { position, input, out } => (one_shorten(&read_code(input.as_deref())?, position)?, out),
        NrCmd::Subcode { m, input, out } => (subcode_first(&read_code(input.as_deref())?, m)?, out),
    };
    emit(out.as_deref(), &write_code(&code))?;
    Ok(true)
}

fn run_concat(args: ConcatArgs, ctx: &Ctx) -> Result<bool> {
    let outer = read_code(Some(&args.outer))?;
    let inner = read_code(Some(&args.inner))?;
    let spec = ConcatSpec::new(outer, inner)?;
    let mut report = Report::new(ctx.seed);
    let rate = concat_rate(&spec);
    let full = matches!(args.verify, Verify::Full) || args.out.is_some();
    let code = if full { Some(concatenate(&spec)?) } else { None };
    match args.verify {
        Verify::Full => {
            let code = code.as_ref().expect("built above");
            report.run("sep21", ctx.timings, || {
                let v = check_sep21(code, ctx.caps)?;
                Ok(Outcome::verdict(v.mode, v.witness).with_value(json!({"n": code.len(), "rate": rate})))
            })?;
        }
        Verify::Sampled => {
            report.run("sep21", ctx.timings, || {
                let v = check_concat_sampled(&spec, args.trials, ctx.seed)?;
                Ok(Outcome::verdict(v.mode, v.witness).with_value(json!({"n": spec.len(), "rate": rate})))
            })?;
        }
        Verify::None => {}
    }
    if let (Some(path), Some(code)) = (&args.out, &code) {
        emit(Some(path), &write_code(code))?;
    }
    emit(None, &report.to_json())?;
    Ok(report.passed())
}

fn run_check(args: CheckArgs, ctx: &Ctx) -> Result<bool> {
    let expected = if matches!(args.property, Property::Mutual) { 2 } else { 1 };
    if args.files.len() > expected || (expected == 2 && args.files.len() != 2) {
        bail!("this property takes {expected} code file(s), got {}", args.files.len());
    }
    let first = read_code(args.files.first().map(PathBuf::as_path))?;
    let mut report = Report::new(ctx.seed);
    let seed = ctx.seed;
    match args.property {
        Property::Sep21 => report.run("sep21", ctx.timings, || {
            let v = match args.sampled {
                Some(t) => check_sep21_sampled(&first, t, seed)?,
                None => check_sep21(&first, ctx.caps)?,
            };
            Ok(Outcome::verdict(v.mode, v.witness))
        })?,
        Property::Intersecting => report.run("intersecting", ctx.timings, || {
            let v = match args.sampled {
                Some(t) => check_intersecting_sampled(&first, t, seed)?,
                None => check_intersecting(&first, ctx.caps)?,
            };
            Ok(Outcome::verdict(v.mode, v.witness))
        })?,
        Property::Mutual => {
            let second = read_code(Some(&args.files[1]))?;
            report.run("mutually_intersecting", ctx.timings, || {
                let v = match args.sampled {
                    Some(t) => check_mutually_intersecting_sampled(&first, &second, t, seed)?,
                    None => check_mutually_intersecting(&first, &second, ctx.caps)?,
                };
                Ok(Outcome::verdict(v.mode, v.witness))
            })?
        }
        Property::Setsystem => {
            if args.sampled.is_some() {
                bail!("setsystem has no sampled mode");
            }
            report.run("setsystem", ctx.timings, || {
                let v = check_set_system(&first, ctx.caps)?;
                Ok(Outcome::verdict(v.mode, v.witness))
            })?
        }
        Property::Distances => {
            if args.sampled.is_some() {
                bail!("distances has no sampled mode");
            }
            report.run("distances", ctx.timings, || {
                let d: BTreeSet<usize> = distance_set(&first, ctx.caps)?;
                Ok(Outcome::exact(true).with_value(d))
            })?
        }
    };
    emit(None, &report.to_json())?;
    Ok(report.passed())
}

fn run_rates(args: RatesArgs) -> Result<bool> {
    let r = rate_ledger(args.q)?;
    emit(None, &if args.json { pretty(&r) } else { r.table() })?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    let ctx = Ctx { seed: cli.seed, timings: !cli.no_timings, caps: Caps::from_env() };
    match cli.cmd {
        Command::Field(c) => run_field(c),
        Command::Curve(c) => run_curve(c),
        Command::Agcode(c) => run_agcode(c, &ctx),
        Command::Nr(c) => run_nr(c),
        Command::Concat(a) => run_concat(a, &ctx),
        Command::Check(a) => run_check(a, &ctx),
        Command::Rates(a) => run_rates(a),
        Command::Repro(a) => {
            let report = repro::run(&ctx, a.trials, a.stretch)?;
            emit(a.out.as_deref(), &report.to_json())?;
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
