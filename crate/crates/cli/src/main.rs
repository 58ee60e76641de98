//! `pade`: Padé approximants and the noise/branch-cut experiments from the
//! command line.
//!
//! Exit status is 0 on success, 2 when the numerics fail (a degenerate
//! system, a collapsed pole set, ...), and 3 for usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pade_pencil::experiments::{
    approximate, roots_csv, run_geometric_noise, run_log_branch, ApproximationJson, ConformationJson,
    ExperimentConfig, Method, ResidueJson,
};
use pade_pencil::pm2::FilterParams;
use pade_pencil::series::{gen_geometric_noisy, gen_log_series, seeded_rng};
use pade_pencil::{Complex64, Conformation, PadeError, PowerSeries};

#[derive(Parser)]
#[command(name = "pade", version, about = "Padé approximants via the direct, SVD and matrix-pencil methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one approximant and print its coefficients, poles, zeros and residues.
    Approximate(ApproxArgs),
    /// Print only the poles and zeros of one approximant.
    Poles(ApproxArgs),
    /// Run one of the reproducible experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Write a coefficient file for one of the test series.
    Generate(GenerateArgs),
}

#[derive(Subcommand)]
enum Experiment {
    /// Noisy geometric series swept over noise levels and seeds.
    GeometricNoise(GeometricArgs),
    /// The series of ln(1.2 − z): DM at the diagonal versus PM².
    LogBranch(LogArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dm,
    Svd,
    Pm1,
    Pm2,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dm => Method::Dm,
            MethodArg::Svd => Method::Svd,
            MethodArg::Pm1 => Method::Pm1,
            MethodArg::Pm2 => Method::Pm2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKind {
    Geometric,
    Log,
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ApproxArgs {
    /// Coefficient file: a JSON array (numbers or [re, im] pairs) or one "re [im]" per line.
    #[arg(long)]
    coeffs: PathBuf,
    #[arg(long, value_enum, default_value = "pm2")]
    method: MethodArg,
    /// Denominator degree.
    #[arg(long)]
    m: usize,
    /// Numerator degree minus denominator degree.
    #[arg(long, allow_negative_numbers = true)]
    k: i64,
    /// Accurate digits for PM² filtering.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = pade_pencil::pm2::DEFAULT_ORIGIN_RADIUS)]
    origin_radius: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GeometricArgs {
    #[arg(long, value_enum, default_value = "pm2")]
    method: MethodArg,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    k: i64,
    /// Noise level; repeat for a sweep. Defaults to 1e-3, 1e-6 and 1e-10.
    #[arg(long)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accurate digits for PM²; defaults to −log10(eps) per noise level.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = pade_pencil::pm2::DEFAULT_ORIGIN_RADIUS)]
    origin_radius: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LogArgs {
    #[arg(long, default_value_t = 41)]
    n: usize,
    #[arg(long, default_value_t = pade_pencil::pm2::DEFAULT_T)]
    t: f64,
    #[arg(long, default_value_t = pade_pencil::pm2::DEFAULT_ORIGIN_RADIUS)]
    origin_radius: f64,
    /// Lattice spacing of the unit-disk error mesh (0.02 gives 7845 points).
    #[arg(long, default_value_t = 0.02)]
    mesh_spacing: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: SeriesKind,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Noise level for the geometric series.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Numerical(String),
    Input(String),
}

impl From<PadeError> for Failure {
    fn from(e: PadeError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Input(format!("serialization failed: {e}")))
}

#[derive(serde::Serialize)]
struct RootsJson {
    method: Method,
    conformation: ConformationJson,
    poles: Vec<Complex64>,
    zeros: Vec<Complex64>,
    residues: Vec<ResidueJson>,
}

fn run_approximate(args: &ApproxArgs, roots_only: bool) -> Result<(), Failure> {
    let s = PowerSeries::read_file(&args.coeffs)?;
    let conf = Conformation::new(args.m, args.k)?;
    let mut params = FilterParams::for_series(&s);
    params.origin_radius = args.origin_radius;
    if let Some(t) = args.t {
        params.t = t;
    }
    params.validate()?;
    let a = approximate(&s, &conf, args.method.into(), &params)?;
    let text = match (args.output.format, roots_only) {
        (Format::Csv, _) => roots_csv(&a),
        (Format::Json, false) => to_json(&ApproximationJson::from(&a))?,
        (Format::Json, true) => {
            let full = ApproximationJson::from(&a);
            to_json(&RootsJson {
                method: full.method,
                conformation: full.conformation,
                poles: full.poles,
                zeros: full.zeros,
                residues: full.residues,
            })?
        }
    };
    emit(&text, &args.output.out)
}

fn run_geometric(args: &GeometricArgs) -> Result<(), Failure> {
    let defaults = ExperimentConfig::default();
    let cfg = ExperimentConfig {
        n: args.n,
        m: args.m,
        k: args.k,
        eps_list: if args.eps.is_empty() { defaults.eps_list } else { args.eps.clone() },
        samples: args.samples,
        seed: args.seed,
        t: args.t,
        method: args.method.into(),
        origin_radius: args.origin_radius,
        ..defaults
    };
    let report = run_geometric_noise(&cfg)?;
    let text = match args.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => report.to_csv(),
    };
    emit(&text, &args.output.out)
}

fn run_log(args: &LogArgs) -> Result<(), Failure> {
    let cfg = ExperimentConfig {
        n: args.n,
        t: Some(args.t),
        origin_radius: args.origin_radius,
        mesh_spacing: args.mesh_spacing,
        ..ExperimentConfig::log_branch()
    };
    let report = run_log_branch(&cfg)?;
    let text = match args.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => report.to_csv(),
    };
    emit(&text, &args.output.out)
}

fn run_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let s = match args.kind {
        SeriesKind::Geometric => gen_geometric_noisy(args.n, args.eps, &mut seeded_rng(args.seed))?,
        SeriesKind::Log => gen_log_series(args.n)?,
    };
    emit(&s.to_json(), &args.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Approximate(a) => run_approximate(a, false),
        Command::Poles(a) => run_approximate(a, true),
        Command::Experiment(Experiment::GeometricNoise(a)) => run_geometric(a),
        Command::Experiment(Experiment::LogBranch(a)) => run_log(a),
        Command::Generate(a) => run_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(msg)) => {
            eprintln!("pade: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("pade: {msg}");
            ExitCode::from(3)
        }
    }
}
