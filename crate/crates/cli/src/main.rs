//! Command-line front end. Machine-readable results (JSON or CSV) go to
//! stdout or --out; progress and human commentary go to stderr.
//!
//! Exit codes: 0 success, 1 validation/check failure, 2 usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use divcorr_core::moment::{MomentParams, ThetaKind};
use divcorr_core::quadform::{DivisorClosedSet, WeightFn};
use divcorr_core::{mf, moment, quadform, selftest, special, Error};

#[derive(Parser)]
#[command(
    name = "divcorr",
    version,
    about = "Divisor error-term correlations, periodic multiplicative functions and moment integrals",
    after_help = "Grid syntax: log:<lo>:<hi>:<points-per-decade> (default log:max(10, X/1000):X:4).\n\
                  DIVCORR_THREADS is honored when --threads is not given."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: logical cores, or DIVCORR_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format for machine-readable results
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write machine output to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress progress output on stderr
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact D(x) and the error term delta(x)
    Delta(DeltaArgs),
    /// Validate or display a periodic multiplicative function
    Mf(MfArgs),
    /// Coefficients g = f1 * f2 * mu * mu on the divisors of M1*M2
    Convolve(ConvolveArgs),
    /// Closed-form correlation limit c_{a,b}
    Limit(LimitArgs),
    /// Running normalized correlation integral for integer scales
    Correlate(CorrelateArgs),
    /// Running normalized correlation of delta(x) with delta(theta x)
    CorrelateTheta(CorrelateThetaArgs),
    /// Exact-route second moment of the partial sums of f1 * f2
    SecondMoment(SecondMomentArgs),
    /// GCD/LCM quadratic-form checks
    #[command(subcommand)]
    Quadform(QuadformCommand),
    /// Run the acceptance criteria
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct DeltaArgs {
    /// Evaluation point (real >= 1)
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    x: Option<f64>,
    /// Integer range start
    #[arg(long, requires = "hi")]
    lo: Option<u64>,
    /// Integer range end (inclusive)
    #[arg(long, requires = "lo")]
    hi: Option<u64>,
}

#[derive(Args)]
struct MfArgs {
    #[command(subcommand)]
    action: MfAction,
}

#[derive(Subcommand)]
enum MfAction {
    /// Check conditions i-iii, periodicity and the period sum
    Validate(MfFileArgs),
    /// Print the parsed table and validation summary
    Show(MfFileArgs),
}

#[derive(Args)]
struct MfFileArgs {
    /// Function-spec JSON {"M": .., "values": [{"p","k","re","im"}]}
    #[arg(long)]
    file: PathBuf,
    /// Accept residuals up to 1e-12 instead of exact zero
    #[arg(long)]
    tolerance: bool,
}

#[derive(Args)]
struct ConvolveArgs {
    #[arg(long)]
    f1: PathBuf,
    #[arg(long)]
    f2: PathBuf,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    a: u64,
    #[arg(long)]
    b: u64,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    a: u64,
    #[arg(long)]
    b: u64,
    /// Integration endpoint
    #[arg(long = "X", visible_alias = "x")]
    x: f64,
    /// Evaluation grid, e.g. log:1e4:1e6:5
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct CorrelateThetaArgs {
    /// Scale factor theta > 0 (as represented in double precision)
    #[arg(long)]
    theta: Option<f64>,
    /// Declare theta rational as p/q (routes through the integer engine)
    #[arg(long, value_parser = parse_fraction, conflicts_with = "theta")]
    rational: Option<(u64, u64)>,
    #[arg(long = "X", visible_alias = "x")]
    x: f64,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct SecondMomentArgs {
    #[arg(long)]
    f1: PathBuf,
    #[arg(long)]
    f2: PathBuf,
    #[arg(long = "X", visible_alias = "x")]
    x: f64,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum QuadformCommand {
    /// Sylvester certificate for the correlation matrix over divisors of N
    CheckPd(CheckPdArgs),
    /// Closed-form vs direct determinant for a completely multiplicative weight
    SelbergDet(SelbergArgs),
    /// Conjugated prime-power matrix vs its banded closed form
    PropA(PropAArgs),
    /// Prime-by-prime factorization of the quadratic form
    TensorCheck(TensorArgs),
    /// Export a gcd/lcm matrix (header = index set)
    Matrix(MatrixArgs),
}

#[derive(Args)]
struct CheckPdArgs {
    /// Modulus product N; the index set is its divisor lattice
    #[arg(long)]
    n: Option<u64>,
    /// Function-spec files; N = M1 * M2
    #[arg(long, requires = "f2")]
    f1: Option<PathBuf>,
    #[arg(long, requires = "f1")]
    f2: Option<PathBuf>,
}

#[derive(Args)]
struct SelbergArgs {
    /// The index set is the divisor lattice of this integer
    #[arg(long)]
    n: u64,
    /// Use a seeded random admissible weight instead of n^{-3/4}
    #[arg(long)]
    random: bool,
}

#[derive(Args)]
struct PropAArgs {
    #[arg(long)]
    p: u64,
    #[arg(long = "K", visible_alias = "k")]
    k: usize,
}

#[derive(Args)]
struct TensorArgs {
    /// Comma-separated index set, e.g. 1,2,3,5,6,10
    #[arg(long, value_delimiter = ',')]
    set: Vec<u64>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long)]
    n: u64,
    /// Weight: phi | star | corr | pow:<exponent>
    #[arg(long, default_value = "corr")]
    weight: String,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run only the fast criteria (skips the X = 1e7 integrals)
    #[arg(long)]
    fast: bool,
}

fn parse_fraction(s: &str) -> Result<(u64, u64), String> {
    let (p, q) = s.split_once('/').ok_or("expected p/q")?;
    let p = p.trim().parse().map_err(|e| format!("numerator: {e}"))?;
    let q = q.trim().parse().map_err(|e| format!("denominator: {e}"))?;
    if q == 0 {
        return Err("zero denominator".into());
    }
    Ok((p, q))
}

/// Failure modes mapped onto the exit-code contract.
enum CliError {
    /// exit 2: bad arguments, malformed inputs
    Usage(String),
    /// exit 1: a validation or mathematical check failed
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(_)
            | Error::NonPositiveMinor { .. }
            | Error::IdentityDeviation { .. }
            | Error::IdentityCheckFailed { .. }
            | Error::NotProductClosed(_)
            | Error::NotDivisorClosed(_)
            | Error::NonPositiveLimit(_)
            | Error::ResidualImaginary(_) => CliError::Failure(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads.or_else(|| {
        std::env::var("DIVCORR_THREADS").ok().and_then(|v| v.parse().ok())
    }) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("divcorr: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("divcorr: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("divcorr: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Delta(args) => cmd_delta(cli, args),
        Command::Mf(args) => cmd_mf(cli, args),
        Command::Convolve(args) => cmd_convolve(cli, args),
        Command::Limit(args) => cmd_limit(cli, args),
        Command::Correlate(args) => cmd_correlate(cli, args),
        Command::CorrelateTheta(args) => cmd_correlate_theta(cli, args),
        Command::SecondMoment(args) => cmd_second_moment(cli, args),
        Command::Quadform(q) => cmd_quadform(cli, q),
        Command::Selftest(args) => cmd_selftest(cli, args),
    }
}

fn emit(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            println!("{}", content.trim_end_matches('\n'));
            Ok(())
        }
    }
}

fn load_mf(path: &PathBuf, tolerant: bool) -> Result<mf::PeriodicMF, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let spec: mf::PeriodicMFSpec = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: malformed function spec at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let mode = if tolerant {
        mf::Validation::Tolerance(mf::Validation::DEFAULT_TOLERANCE)
    } else {
        mf::Validation::Exact
    };
    spec.build(mode).map_err(CliError::from)
}

fn grid_params(grid: &Option<String>, x: f64, quiet: bool) -> Result<MomentParams, CliError> {
    let grid_vals = match grid {
        Some(spec) => parse_grid(spec, x)?,
        None => MomentParams::log_grid((x / 1000.0).max(10.0).min(x), x, 4)
            .map_err(CliError::from)?,
    };
    let mut p = MomentParams::new(grid_vals).map_err(CliError::from)?;
    p.progress = !quiet;
    Ok(p)
}

fn parse_grid(spec: &str, x: f64) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 || parts[0] != "log" {
        return Err(CliError::Usage(format!(
            "grid {spec:?} does not match log:<lo>:<hi>:<points-per-decade>"
        )));
    }
    let lo: f64 = parts[1]
        .parse()
        .map_err(|e| CliError::Usage(format!("grid lo: {e}")))?;
    let hi: f64 = parts[2]
        .parse()
        .map_err(|e| CliError::Usage(format!("grid hi: {e}")))?;
    let ppd: u32 = parts[3]
        .parse()
        .map_err(|e| CliError::Usage(format!("grid points-per-decade: {e}")))?;
    if hi > x {
        return Err(CliError::Usage(format!("grid hi {hi} exceeds X = {x}")));
    }
    let mut g = MomentParams::log_grid(lo, hi, ppd).map_err(CliError::from)?;
    if hi < x {
        g.push(x);
    }
    Ok(g)
}

fn cmd_delta(cli: &Cli, args: &DeltaArgs) -> Result<(), CliError> {
    let rows: Vec<(f64, u64, f64)> = match (args.x, args.lo, args.hi) {
        (Some(x), None, None) => {
            let d = divcorr_core::divisor_summatory(x as u64);
            vec![(x, d, divcorr_core::delta(x).map_err(CliError::from)?)]
        }
        (None, Some(lo), Some(hi)) => {
            if lo < 1 || hi < lo {
                return Err(CliError::Usage(format!("bad range [{lo}, {hi}]")));
            }
            let ctx = divcorr_core::DeltaContext::with_cache(lo, hi).map_err(CliError::from)?;
            (lo..=hi)
                .map(|n| {
                    let x = n as f64;
                    Ok((x, ctx.divisor_summatory(n), ctx.delta(x).map_err(CliError::from)?))
                })
                .collect::<Result<_, CliError>>()?
        }
        _ => return Err(CliError::Usage("provide --x or --lo/--hi".into())),
    };
    let content = match cli.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|&(x, d, delta)| serde_json::json!({"x": x, "d": d, "delta": delta}))
                .collect();
            serde_json::to_string_pretty(&items).expect("serializable")
        }
        Format::Csv => {
            let mut s = String::from("x,d,delta\n");
            for (x, d, delta) in rows {
                s.push_str(&format!("{x},{d},{delta}\n"));
            }
            s
        }
    };
    emit(cli, &content)
}

fn cmd_mf(cli: &Cli, args: &MfArgs) -> Result<(), CliError> {
    let (file_args, show) = match &args.action {
        MfAction::Validate(f) => (f, false),
        MfAction::Show(f) => (f, true),
    };
    match load_mf(&file_args.file, file_args.tolerance) {
        Ok(f) => {
            let mut advisories = Vec::new();
            if f.period_value_is_zero() {
                advisories.push(format!("f({}) = 0", f.period()));
            }
            match cli.format {
                Format::Json => {
                    let v = serde_json::json!({
                        "valid": true,
                        "M": f.period(),
                        "witness": f.witness(),
                        "advisories": advisories,
                    });
                    emit(cli, &serde_json::to_string_pretty(&v).expect("serializable"))?;
                }
                Format::Csv => {
                    emit(cli, &format!("valid,witness\ntrue,{}\n", f.witness()))?;
                }
            }
            eprintln!(
                "valid, witness q={}{}",
                f.witness(),
                if advisories.is_empty() {
                    String::new()
                } else {
                    format!(" (advisory: {})", advisories.join(", "))
                }
            );
            if show {
                let spec = mf::PeriodicMFSpec::from_function(&f);
                eprintln!("{}", serde_json::to_string_pretty(&spec).expect("serializable"));
            }
            Ok(())
        }
        Err(CliError::Failure(msg)) => Err(CliError::Failure(msg)),
        Err(other) => Err(other),
    }
}

fn cmd_convolve(cli: &Cli, args: &ConvolveArgs) -> Result<(), CliError> {
    let f1 = load_mf(&args.f1, false)?;
    let f2 = load_mf(&args.f2, false)?;
    let g = divcorr_core::g_coefficients(&f1, &f2).map_err(CliError::from)?;
    let content = match cli.format {
        Format::Json => {
            let coeffs: Vec<serde_json::Value> = g
                .coeffs()
                .iter()
                .map(|(&n, v)| {
                    serde_json::json!({
                        "n": n,
                        "re": divcorr_core::exact::format_rational(&v.re),
                        "im": divcorr_core::exact::format_rational(&v.im),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({
                "modulus_product": g.modulus_product(),
                "coefficients": coeffs,
            }))
            .expect("serializable")
        }
        Format::Csv => {
            let mut s = String::from("n,re,im\n");
            for (&n, v) in g.coeffs() {
                s.push_str(&format!(
                    "{n},{},{}\n",
                    divcorr_core::exact::format_rational(&v.re),
                    divcorr_core::exact::format_rational(&v.im)
                ));
            }
            s
        }
    };
    emit(cli, &content)
}

fn cmd_limit(cli: &Cli, args: &LimitArgs) -> Result<(), CliError> {
    if args.a < 1 || args.b < 1 {
        return Err(CliError::Usage("scales must be >= 1".into()));
    }
    let c = special::correlation_limit(args.a, args.b).map_err(CliError::from)?;
    let content = match cli.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "a": c.a, "b": c.b, "lambda": c.lambda, "c": c.c, "d": c.d, "value": c.value,
        }))
        .expect("serializable"),
        Format::Csv => format!(
            "a,b,lambda,c,d,value\n{},{},{},{},{},{}\n",
            c.a, c.b, c.lambda, c.c, c.d, c.value
        ),
    };
    emit(cli, &content)
}

fn emit_series(cli: &Cli, series: &moment::MomentSeries) -> Result<(), CliError> {
    let content = match cli.format {
        Format::Json => serde_json::to_string(series).expect("serializable"),
        Format::Csv => series.to_csv(),
    };
    emit(cli, &content)?;
    eprintln!(
        "done in {:.2}s; final normalized value {:.6e}",
        series.elapsed_seconds,
        series.final_value()
    );
    if let Ok(slope) = moment::convergence_report(series) {
        eprintln!("fitted residual slope: {slope:.4}");
    }
    Ok(())
}

fn cmd_correlate(cli: &Cli, args: &CorrelateArgs) -> Result<(), CliError> {
    if args.a < 1 || args.b < 1 {
        return Err(CliError::Usage("scales must be >= 1".into()));
    }
    let params = grid_params(&args.grid, args.x, cli.quiet)?;
    let series = moment::correlation_integral(args.a, args.b, &params).map_err(CliError::from)?;
    emit_series(cli, &series)
}

fn cmd_correlate_theta(cli: &Cli, args: &CorrelateThetaArgs) -> Result<(), CliError> {
    let kind = match (args.theta, args.rational) {
        (Some(t), None) => ThetaKind::Irrational(t),
        (None, Some((p, q))) => ThetaKind::Rational { p, q },
        _ => return Err(CliError::Usage("provide exactly one of --theta or --rational".into())),
    };
    let params = grid_params(&args.grid, args.x, cli.quiet)?;
    let series = moment::theta_correlation(kind, &params).map_err(CliError::from)?;
    emit_series(cli, &series)
}

fn cmd_second_moment(cli: &Cli, args: &SecondMomentArgs) -> Result<(), CliError> {
    let f1 = load_mf(&args.f1, false)?;
    let f2 = load_mf(&args.f2, false)?;
    let params = grid_params(&args.grid, args.x, cli.quiet)?;
    let series = moment::second_moment_integral(&f1, &f2, &params).map_err(CliError::from)?;
    emit_series(cli, &series)
}

fn parse_weight(spec: &str) -> Result<WeightFn, CliError> {
    match spec {
        "phi" => Ok(WeightFn::Phi),
        "star" => Ok(WeightFn::PhiStar),
        _ => {
            if let Some(e) = spec.strip_prefix("pow:") {
                let e: f64 = e
                    .parse()
                    .map_err(|err| CliError::Usage(format!("weight exponent: {err}")))?;
                Ok(WeightFn::Power(e))
            } else {
                Err(CliError::Usage(format!(
                    "unknown weight {spec:?}; expected phi | star | corr | pow:<e>"
                )))
            }
        }
    }
}

fn cmd_quadform(cli: &Cli, q: &QuadformCommand) -> Result<(), CliError> {
    match q {
        QuadformCommand::CheckPd(args) => {
            let n = match (&args.n, &args.f1, &args.f2) {
                (Some(n), None, None) => *n,
                (None, Some(f1), Some(f2)) => {
                    load_mf(f1, false)?.period() * load_mf(f2, false)?.period()
                }
                _ => return Err(CliError::Usage("provide --n or both --f1/--f2".into())),
            };
            let mat = quadform::correlation_matrix(n).map_err(CliError::from)?;
            let (pd, minors) = quadform::sylvester_pd(mat.matrix()).map_err(CliError::from)?;
            let cert = quadform::PdCertificate {
                index_set: mat.index().to_vec(),
                minors,
                positive_definite: pd,
            };
            let content = match cli.format {
                Format::Json => serde_json::to_string(&cert).expect("serializable"),
                Format::Csv => {
                    let mut s = String::from("index,leading_minor\n");
                    for (i, m) in cert.index_set.iter().zip(&cert.minors) {
                        s.push_str(&format!("{i},{m}\n"));
                    }
                    s.push_str(&format!("positive_definite,{}\n", cert.positive_definite));
                    s
                }
            };
            emit(cli, &content)?;
            if !pd {
                return Err(CliError::Failure(format!(
                    "correlation matrix over divisors of {n} has a non-positive leading minor"
                )));
            }
            eprintln!("all {} leading principal minors positive", cert.minors.len());
            Ok(())
        }
        QuadformCommand::SelbergDet(args) => {
            let set = DivisorClosedSet::divisors_of(args.n).map_err(CliError::from)?;
            let weight = if args.random {
                WeightFn::random_admissible(
                    &set,
                    cli.seed.unwrap_or(quadform::DEFAULT_SEED),
                    0.05,
                    0.95,
                )
                .map_err(CliError::from)?
            } else {
                WeightFn::Power(-0.75)
            };
            let closed = quadform::selberg_determinant(&set, &weight).map_err(CliError::from)?;
            let direct = quadform::build_matrix(&set, &weight)
                .map_err(CliError::from)?
                .matrix()
                .det();
            let rel = (closed - direct).abs() / direct.abs().max(f64::MIN_POSITIVE);
            let v = serde_json::json!({
                "n": args.n,
                "weight": weight.describe(),
                "closed_form": closed,
                "direct": direct,
                "relative_error": rel,
            });
            emit(cli, &serde_json::to_string_pretty(&v).expect("serializable"))?;
            if rel > 1e-9 {
                return Err(CliError::Failure(format!(
                    "determinant mismatch: relative error {rel:e}"
                )));
            }
            Ok(())
        }
        QuadformCommand::PropA(args) => {
            let dev = quadform::check_conjugation_identity(args.k, args.p)
                .map_err(CliError::from)?;
            let v = serde_json::json!({"p": args.p, "K": args.k, "max_deviation": dev});
            emit(cli, &serde_json::to_string_pretty(&v).expect("serializable"))?;
            eprintln!("max deviation <= {dev:.2e}");
            Ok(())
        }
        QuadformCommand::TensorCheck(args) => {
            let set = DivisorClosedSet::new(args.set.clone()).map_err(CliError::from)?;
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                cli.seed.unwrap_or(quadform::DEFAULT_SEED),
            );
            let mut split = std::collections::BTreeMap::new();
            for (&p, &kmax) in &set.prime_components().map_err(CliError::from)? {
                for k in 1..=kmax {
                    split.insert(p.pow(k), rng.gen_range(-1.0..1.0));
                }
            }
            let (lhs, rhs) = quadform::tensor_factor_check(&set, &WeightFn::PhiStar, &split)
                .map_err(CliError::from)?;
            let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
            let v = serde_json::json!({"lhs": lhs, "rhs": rhs, "relative_error": rel});
            emit(cli, &serde_json::to_string_pretty(&v).expect("serializable"))?;
            if rel > 1e-10 {
                return Err(CliError::Failure(format!("factorization mismatch: {rel:e}")));
            }
            Ok(())
        }
        QuadformCommand::Matrix(args) => {
            let mat = if args.weight == "corr" {
                quadform::correlation_matrix(args.n).map_err(CliError::from)?
            } else {
                let set = DivisorClosedSet::divisors_of(args.n).map_err(CliError::from)?;
                quadform::build_matrix(&set, &parse_weight(&args.weight)?)
                    .map_err(CliError::from)?
            };
            let content = match cli.format {
                Format::Csv => mat.to_csv(),
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "index_set": mat.index(),
                    "descriptor": mat.descriptor(),
                    "rows": (0..mat.index().len())
                        .map(|i| (0..mat.index().len()).map(|j| mat.entry(i, j)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }))
                .expect("serializable"),
            };
            emit(cli, &content)
        }
    }
}

fn cmd_selftest(cli: &Cli, args: &SelftestArgs) -> Result<(), CliError> {
    let reports = if args.fast {
        selftest::fast_criteria().map_err(CliError::from)?
    } else {
        selftest::all_criteria().map_err(CliError::from)?
    };
    let mut all_pass = true;
    let mut lines = String::new();
    for r in &reports {
        lines.push_str(&r.line());
        lines.push('\n');
        all_pass &= r.passed;
    }
    emit(cli, &lines)?;
    if !all_pass {
        return Err(CliError::Failure("one or more criteria failed".into()));
    }
    Ok(())
}
