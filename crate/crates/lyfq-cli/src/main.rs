//! Command-line pipelines for Lee-Yang Fourier quasicrystals: verification,
//! line zero sets, gap distributions three ways, regularization, ergodic
//! averages, distribution comparison, and the demo data generator.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 verification fail,
//! 4 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lyfq::ellexpr;
use lyfq::gapdist::{self, GapDistribution};
use lyfq::io;
use lyfq::lycheck;
use lyfq::nuij;
use lyfq::polycore::MultiPoly;
use lyfq::randutil::SeededStream;
use lyfq::torusdyn;
use lyfq::zeroline::{self, TrackOpts};

mod demo;

const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "lyfq", about = "Fourier quasicrystals from Lee-Yang polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Lee-Yang verification battery and emit a JSON report.
    Verify(VerifyArgs),
    /// Zeros of p(exp(i x ell)) on an interval, with density/max-gap report.
    Zeros(ZerosArgs),
    /// Empirical gap distribution along a line (histogram / CDF / atoms CSV).
    Gaps(GapsArgs),
    /// Unit-direction gap distribution by torus Monte-Carlo.
    Nu1(Nu1Args),
    /// Rational-direction gap distribution via power substitution.
    Nuq(NuqArgs),
    /// Apply the regularizing perturbation and write the polynomial back out.
    Perturb(PerturbArgs),
    /// Orbit vs space ergodic averages for a box indicator.
    Ergodic(ErgodicArgs),
    /// KS and Wasserstein-1 distance between two CDF CSV files.
    Compare(CompareArgs),
    /// Regenerate the bundled demonstration datasets (figures 1-5).
    Demo(DemoArgs),
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Polynomial JSON file.
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 200)]
    degree_cap: usize,
    #[arg(long, default_value_t = 1e-8)]
    circle_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ZerosArgs {
    #[arg(long)]
    poly: PathBuf,
    /// Direction, e.g. "5pi/22,1" or "1,sqrt(2)".
    #[arg(long)]
    ell: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Output CSV (columns x,mult).
    #[arg(long)]
    out: PathBuf,
    /// Density/max-gap report JSON (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GapsArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    ell: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Prefix for <prefix>.hist.csv, <prefix>.cdf.csv, <prefix>.atoms.csv.
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long, default_value_t = 60)]
    bins: usize,
    /// Atom window; default 1e-3 * mean gap.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    mass_threshold: f64,
}

#[derive(Args, Serialize)]
struct Nu1Args {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long, default_value_t = 60)]
    bins: usize,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    mass_threshold: f64,
}

#[derive(Args, Serialize)]
struct NuqArgs {
    #[arg(long)]
    poly: PathBuf,
    /// Numerator vector, e.g. "2,1".
    #[arg(long)]
    k: String,
    /// Common denominator.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long, default_value_t = 60)]
    bins: usize,
}

#[derive(Args, Serialize)]
struct PerturbArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    lambda: f64,
    /// Number of operator applications; defaults to the total degree.
    #[arg(long)]
    steps: Option<usize>,
    /// Anchor angles, e.g. "1.3,0.2"; chosen by random probing when omitted.
    #[arg(long)]
    anchor: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ErgodicArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    ell: String,
    /// Box indicator "lo:hi,lo:hi,..." (one range per coordinate).
    #[arg(long)]
    r#box: String,
    #[arg(long, default_value_t = 10_000)]
    orbit_n: usize,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    /// Anchor on the zero set, e.g. "0,0"; defaults to the first zero on the
    /// line through the origin.
    #[arg(long)]
    x0: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DemoArgs {
    /// Figure number 1-5.
    #[arg(long)]
    figure: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "demo-out")]
    out_dir: PathBuf,
}

enum CliError {
    Config(String),
    VerifyFailed,
    Numeric(String),
}

impl From<lyfq::Error> for CliError {
    fn from(e: lyfq::Error) -> Self {
        match e {
            lyfq::Error::Parse(_)
            | lyfq::Error::Invalid(_)
            | lyfq::Error::DimensionMismatch { .. }
            | lyfq::Error::ZeroPolynomial => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Zeros(a) => cmd_zeros(a),
        Command::Gaps(a) => cmd_gaps(a),
        Command::Nu1(a) => cmd_nu1(a),
        Command::Nuq(a) => cmd_nuq(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Ergodic(a) => cmd_ergodic(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Demo(a) => demo::run(a.figure, a.seed, &a.out_dir).map_err(Into::into),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::VerifyFailed) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn read_poly(path: &Path) -> Result<MultiPoly, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(io::poly_from_json_str(&text)?)
}

fn echo_config(name: &str, args: &impl Serialize) {
    let value = serde_json::json!({ "command": name, "config": args });
    println!("{value}");
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => println!("{content}"),
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    echo_config("verify", &args);
    let p = read_poly(&args.poly)?;
    let mut rng = SeededStream::new(args.seed, 0).rng();
    let report = lycheck::verify(&p, args.trials, args.degree_cap, args.circle_tol, &mut rng)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_or_print(&args.out, &json)?;
    if !report.verdict {
        return Err(CliError::VerifyFailed);
    }
    Ok(())
}

#[derive(Serialize)]
struct ZerosReport {
    count: usize,
    count_with_multiplicity: u64,
    density_max_err: f64,
    density_bound: usize,
    max_gap: f64,
    max_gap_bound: f64,
    worst_residual: f64,
}

fn cmd_zeros(args: ZerosArgs) -> CliResult {
    echo_config("zeros", &args);
    let p = read_poly(&args.poly)?;
    let ell = ellexpr::parse_direction(&args.ell)?;
    let opts = TrackOpts::default();
    let zs = zeroline::find_zeros(&p, &ell, args.from, args.to, &opts)?;
    std::fs::write(&args.out, io::zeros_to_csv(&zs))?;
    let span = args.to - args.from;
    let windows: Vec<f64> = [5.0, 20.0, 100.0]
        .into_iter()
        .filter(|&t| t <= span)
        .collect();
    let report = ZerosReport {
        count: zs.zeros().len(),
        count_with_multiplicity: zs.total_multiplicity(),
        density_max_err: zeroline::density_check(&zs, p.degree(), &windows),
        density_bound: p.total_degree(),
        max_gap: zeroline::max_gap_check(&zs),
        max_gap_bound: zeroline::gap_bound(p.degree(), &ell),
        worst_residual: zs.diagnostics.worst_residual,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_or_print(&args.report, &json)
}

fn write_distribution(
    prefix: &Path,
    g: &mut GapDistribution,
    bins: usize,
    window: f64,
    mass_threshold: f64,
) -> CliResult {
    let atoms = g.detect_atoms(window, mass_threshold);
    let base = prefix.to_string_lossy();
    std::fs::write(format!("{base}.hist.csv"), io::histogram_csv(g, bins))?;
    std::fs::write(format!("{base}.cdf.csv"), io::cdf_csv(g))?;
    std::fs::write(format!("{base}.atoms.csv"), io::atoms_csv(&atoms))?;
    Ok(())
}

fn cmd_gaps(args: GapsArgs) -> CliResult {
    echo_config("gaps", &args);
    let p = read_poly(&args.poly)?;
    let ell = ellexpr::parse_direction(&args.ell)?;
    let opts = TrackOpts::default();
    let zs = zeroline::find_zeros(&p, &ell, args.from, args.to, &opts)?;
    let mut g = gapdist::empirical_gaps(&zs)?;
    let window = args.window.unwrap_or(1e-3 * gapdist::mean_gap(&g));
    write_distribution(&args.out_prefix, &mut g, args.bins, window, args.mass_threshold)
}

fn cmd_nu1(args: Nu1Args) -> CliResult {
    echo_config("nu1", &args);
    let p = read_poly(&args.poly)?;
    let mut rng = SeededStream::new(args.seed, 0).rng();
    let mut g = gapdist::nu_one(&p, args.count, &mut rng)?;
    let window = args.window.unwrap_or(1e-3 * gapdist::mean_gap(&g));
    write_distribution(&args.out_prefix, &mut g, args.bins, window, args.mass_threshold)
}

fn cmd_nuq(args: NuqArgs) -> CliResult {
    echo_config("nuq", &args);
    let p = read_poly(&args.poly)?;
    let k: Vec<u32> = args
        .k
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| CliError::Config(format!("bad k entry '{s}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    let mut rng = SeededStream::new(args.seed, 0).rng();
    let mut g = gapdist::nu_rational(&p, &k, args.m, args.count, &mut rng)?;
    let window = 1e-3 * gapdist::mean_gap(&g);
    write_distribution(&args.out_prefix, &mut g, args.bins, window, 0.05)
}

fn cmd_perturb(args: PerturbArgs) -> CliResult {
    echo_config("perturb", &args);
    let p = read_poly(&args.poly)?;
    if args.lambda < 0.0 {
        return Err(CliError::Config("lambda must be >= 0".into()));
    }
    let anchor = match &args.anchor {
        Some(text) => text
            .split(',')
            .map(|s| ellexpr::parse_scalar(s).map_err(CliError::from))
            .collect::<Result<Vec<f64>, _>>()?,
        None => {
            let mut rng = SeededStream::new(args.seed, 0).rng();
            nuij::select_anchor(&p, &mut rng)?
        }
    };
    let steps = args.steps.unwrap_or_else(|| p.total_degree());
    let mut q = p;
    for _ in 0..steps {
        q = nuij::perturb_once(&q, &anchor, args.lambda)?;
    }
    std::fs::write(&args.out, io::poly_to_json_string(&q))?;
    Ok(())
}

#[derive(Serialize)]
struct ErgodicReport {
    orbit_avg: f64,
    space_avg: f64,
    mc_stderr: f64,
    regular_fraction: f64,
}

fn parse_box(text: &str, n: usize) -> Result<Vec<(f64, f64)>, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != n {
        return Err(CliError::Config(format!(
            "box needs {n} ranges, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|part| {
            let mut halves = part.split(':');
            let lo = halves
                .next()
                .ok_or_else(|| CliError::Config("missing box lower bound".into()))?;
            let hi = halves
                .next()
                .ok_or_else(|| CliError::Config("missing box upper bound".into()))?;
            let lo = ellexpr::parse_scalar(lo).map_err(CliError::from)?;
            let hi = ellexpr::parse_scalar(hi).map_err(CliError::from)?;
            if hi < lo {
                return Err(CliError::Config("empty box range".into()));
            }
            Ok((lo, hi))
        })
        .collect()
}

fn cmd_ergodic(args: ErgodicArgs) -> CliResult {
    echo_config("ergodic", &args);
    let p = read_poly(&args.poly)?;
    let ell = ellexpr::parse_direction(&args.ell)?;
    let ranges = parse_box(&args.r#box, p.n())?;
    let h = move |x: &[f64]| {
        let inside = x
            .iter()
            .zip(&ranges)
            .all(|(&xi, &(lo, hi))| xi >= lo && xi <= hi);
        if inside {
            1.0
        } else {
            0.0
        }
    };
    let opts = TrackOpts::default();
    let x0 = match &args.x0 {
        Some(text) => text
            .split(',')
            .map(|s| ellexpr::parse_scalar(s).map_err(CliError::from))
            .collect::<Result<Vec<f64>, _>>()?,
        None => {
            // steer onto the zero set along the line through the origin
            let zs = zeroline::find_zeros(&p, &ell, 0.0, 64.0, &opts)?;
            let first = zs
                .zeros()
                .first()
                .ok_or_else(|| CliError::Numeric("no zero found near the origin".into()))?
                .0;
            zs.torus_point(first)
        }
    };
    let orbit = torusdyn::ergodic_orbit_average(&p, &ell, &h, args.orbit_n, &x0, &opts)?;
    let mut rng = SeededStream::new(args.seed, 1).rng();
    let space = torusdyn::ergodic_space_average(&p, &ell, &h, args.count, &mut rng)?;
    let report = ErgodicReport {
        orbit_avg: orbit,
        space_avg: space.value,
        mc_stderr: space.mc_stderr,
        regular_fraction: space.regular_fraction,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_or_print(&args.out, &json)
}

#[derive(Serialize)]
struct CompareReport {
    ks: f64,
    w1: f64,
}

fn cmd_compare(args: CompareArgs) -> CliResult {
    echo_config("compare", &args);
    let a = io::parse_cdf_csv(&std::fs::read_to_string(&args.a)?)?;
    let b = io::parse_cdf_csv(&std::fs::read_to_string(&args.b)?)?;
    let report = CompareReport {
        ks: a.ks(&b),
        w1: a.wasserstein1(&b),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_or_print(&args.out, &json)
}
