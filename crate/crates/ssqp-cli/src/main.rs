//! Command-line harness for the composite L_q solver.
//!
//! Subcommands: `solve` (run the solver on a problem file, emit a trace CSV
//! and a JSON certificate report), `verify` (check a certificate at a given
//! point), `gen` (produce problem files: svm, power, decoding, 3partition,
//! random), and `bench` (sweep a suite over accuracy/exponent grids and
//! validate the iteration bounds).
//!
//! Exit codes: 0 certificate passed; 2 parse/validation error; 3 numerical
//! failure; 4 certificate failed. Reports go to stdout, diagnostics to
//! stderr; outputs are deterministic for fixed seeds (wall time appears only
//! in bench summaries).

mod format;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssqp_core::driver::{solve, LipschitzMode, SolverConfig};
use ssqp_core::kkt::{clarke_kkt_check, eps_kkt_check};
use ssqp_core::problems::{
    make_decoding, make_power_control, make_random, make_svm, make_three_partition, HKind, XKind,
};
use ssqp_core::subproblems::StepMode;
use ssqp_core::{Error as CoreError, Mat, ProblemSpec};

use format::{
    read_problem, write_problem, write_trace, ClarkeJson, KktJson, SolveReportJson,
};

const EXIT_PASS: i32 = 0;
const EXIT_INVALID: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;
const EXIT_CERT_FAIL: i32 = 4;

#[derive(Parser)]
#[command(
    name = "ssqp",
    about = "Composite L_q minimization over polyhedra with certified output",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a problem file; writes a JSON report (stdout and optionally a
    /// file) plus an optional per-iteration trace CSV
    Solve(SolveArgs),
    /// Check a certificate at a given point
    Verify(VerifyArgs),
    /// Generate problem files
    #[command(subcommand)]
    Gen(GenCmd),
    /// Sweep a suite of problems over accuracy/exponent grids
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StepArg {
    Proj,
    Snorm,
    Exact,
}

impl From<StepArg> for StepMode {
    fn from(v: StepArg) -> StepMode {
        match v {
            StepArg::Proj => StepMode::Proj,
            StepArg::Snorm => StepMode::Snorm,
            StepArg::Exact => StepMode::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LipArg {
    Known,
    Adaptive,
}

impl From<LipArg> for LipschitzMode {
    fn from(v: LipArg) -> LipschitzMode {
        match v {
            LipArg::Known => LipschitzMode::Known,
            LipArg::Adaptive => LipschitzMode::Adaptive,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file (JSON)
    #[arg(long)]
    problem: PathBuf,
    /// Target accuracy in (0, 1]
    #[arg(long)]
    epsilon: f64,
    /// Smoothing shrink factor in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Estimate inflation factor (> 1)
    #[arg(long, default_value_t = 2.0)]
    eta: f64,
    /// Step kind for the inner iteration
    #[arg(long, value_enum, default_value_t = StepArg::Proj)]
    step: StepArg,
    /// How the curvature constant of h is handled
    #[arg(long, value_enum, default_value_t = LipArg::Known)]
    lipschitz: LipArg,
    /// Write the per-QP-solve trace CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the JSON report here (it is always printed to stdout)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Seed for the start point when the problem file carries none
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem file (JSON)
    #[arg(long)]
    problem: PathBuf,
    /// The point to check: a JSON array, or a path to a file holding one
    #[arg(long)]
    point: String,
    /// Certificate accuracy
    #[arg(long)]
    epsilon: f64,
    /// Check the q = 1 Clarke conditions instead (requires --mu)
    #[arg(long)]
    clarke: bool,
    /// Smoothing parameter for the Clarke check
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Two seeded Gaussian clusters for soft-margin classification
    Svm {
        #[arg(long, default_value_t = 8)]
        patterns: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Normalized joint power and admission control instance
    Power {
        #[arg(long, alias = "k", default_value_t = 3)]
        links: usize,
        #[arg(long, default_value_t = 0.01)]
        rho: f64,
        #[arg(long, default_value_t = 0.1)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Linear decoding with sparse corruptions
    Decoding {
        #[arg(long, default_value_t = 6)]
        rows: usize,
        #[arg(long, default_value_t = 2)]
        cols: usize,
        #[arg(long, default_value_t = 1)]
        corruptions: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// 3-partition hardness reduction from explicit weights
    #[command(name = "3partition")]
    ThreePartition {
        /// Comma-separated positive integers (3m of them)
        #[arg(long)]
        weights: String,
        /// Bin target; weights must lie strictly between target/4 and
        /// target/2 and sum to m * target
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded random instance
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, value_parser = ["zero", "linear", "quadratic"], default_value = "quadratic")]
        h: String,
        #[arg(long, value_parser = ["box", "box-simplex"], default_value = "box")]
        x: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Text file listing problem-file paths, one per line ('#' comments)
    #[arg(long)]
    suite: PathBuf,
    /// Comma-separated accuracy grid
    #[arg(long, default_value = "0.1,0.05,0.01")]
    epsilons: String,
    /// Comma-separated exponent grid; empty means each problem's own q
    #[arg(long, default_value = "")]
    qs: String,
    #[arg(long, value_enum, default_value_t = StepArg::Proj)]
    step: StepArg,
    #[arg(long, value_enum, default_value_t = LipArg::Known)]
    lipschitz: LipArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the summary CSV here (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::NumericalFailure(_)
            | CoreError::Infeasible
            | CoreError::BoundViolation { .. } => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        };
    }
    EXIT_INVALID
}

/// Deterministic start point inside (or near) the bounds when the problem
/// file does not carry one; the solver projects it onto the feasible set.
fn seeded_start(spec: &ProblemSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spec.set()
        .lower()
        .iter()
        .zip(spec.set().upper())
        .map(|(l, u)| match (l.is_finite(), u.is_finite()) {
            (true, true) => l + (u - l) * rng.gen::<f64>(),
            (true, false) => l + rng.gen::<f64>(),
            (false, true) => u - rng.gen::<f64>(),
            (false, false) => 2.0 * rng.gen::<f64>() - 1.0,
        })
        .collect()
}

fn build_config(
    epsilon: f64,
    sigma: f64,
    eta: f64,
    step: StepArg,
    lipschitz: LipArg,
) -> SolverConfig {
    let mut config = SolverConfig::new(epsilon);
    config.sigma = sigma;
    config.eta = eta;
    config.step_mode = step.into();
    config.lipschitz_mode = lipschitz.into();
    config
}

fn run_solve(args: SolveArgs) -> Result<i32> {
    let spec = read_problem(&args.problem)?;
    let config = build_config(args.epsilon, args.sigma, args.eta, args.step, args.lipschitz);
    config.validate()?;
    let x0 = match spec.x0() {
        Some(x0) => x0.to_vec(),
        None => seeded_start(&spec, args.seed),
    };
    let result = solve(&spec, &x0, &config)?;
    if let Some(path) = &args.trace {
        write_trace(path, &result.trace)?;
    }
    let report = serde_json::to_string_pretty(&SolveReportJson::from_result(&result))?;
    if let Some(path) = &args.report {
        std::fs::write(path, report.clone() + "\n")
            .with_context(|| format!("cannot write report {}", path.display()))?;
    }
    println!("{report}");
    Ok(if result.kkt.pass { EXIT_PASS } else { EXIT_CERT_FAIL })
}

fn parse_point(raw: &str) -> Result<Vec<f64>> {
    if let Ok(v) = serde_json::from_str::<Vec<f64>>(raw) {
        return Ok(v);
    }
    let path = Path::new(raw);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read point file {}", path.display()))?;
        return serde_json::from_str(&text)
            .with_context(|| format!("cannot parse point file {}", path.display()));
    }
    bail!("--point must be a JSON array or a path to one, got {raw:?}")
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    let spec = read_problem(&args.problem)?;
    let point = parse_point(&args.point)?;
    if point.len() != spec.dim() {
        return Err(CoreError::DimensionMismatch {
            what: "verification point",
            expected: spec.dim(),
            actual: point.len(),
        }
        .into());
    }
    if args.clarke {
        let mu = args
            .mu
            .ok_or_else(|| anyhow!("--clarke requires --mu <value>"))?;
        let report = clarke_kkt_check(&spec, &point, mu, args.epsilon)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&ClarkeJson::from_report(&report))?
        );
        Ok(if report.pass { EXIT_PASS } else { EXIT_CERT_FAIL })
    } else {
        let report = eps_kkt_check(&spec, &point, args.epsilon)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&KktJson::from_report(&report))?
        );
        Ok(if report.pass { EXIT_PASS } else { EXIT_CERT_FAIL })
    }
}

fn run_gen(cmd: GenCmd) -> Result<i32> {
    match cmd {
        GenCmd::Svm {
            patterns,
            dim,
            rho,
            q,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pats = Vec::with_capacity(patterns);
            let mut labels = Vec::with_capacity(patterns);
            for i in 0..patterns {
                let label = if i % 2 == 0 { 1.0 } else { -1.0 };
                let pattern: Vec<f64> = (0..dim)
                    .map(|d| {
                        let center = if d == 0 { 1.5 * label } else { 0.0 };
                        center + rng.sample::<f64, _>(rand_distr::StandardNormal) * 0.5
                    })
                    .collect();
                pats.push(pattern);
                labels.push(label);
            }
            let spec = make_svm(&pats, &labels, rho, q)?.with_x0(vec![0.0; dim + 1])?;
            write_problem(&out, &spec)?;
        }
        GenCmd::Power {
            links,
            rho,
            q,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut gains = Mat::identity(links);
            for i in 0..links {
                for j in 0..links {
                    if i != j {
                        gains.set(i, j, 0.6 * rng.gen::<f64>());
                    }
                }
            }
            let noise: Vec<f64> = (0..links).map(|_| 0.05 + 0.3 * rng.gen::<f64>()).collect();
            let x0: Vec<f64> = (0..links).map(|_| rng.gen::<f64>()).collect();
            let spec = make_power_control(&gains, &noise, rho, q)?.with_x0(x0)?;
            write_problem(&out, &spec)?;
        }
        GenCmd::Decoding {
            rows,
            cols,
            corruptions,
            q,
            seed,
            out,
        } => {
            if corruptions > rows {
                bail!("cannot corrupt more rows than exist");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut coding = Mat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    coding.set(i, j, 2.0 * rng.gen::<f64>() - 1.0);
                }
            }
            let x_true: Vec<f64> = (0..cols).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
            let mut measurement = coding.matvec(&x_true);
            let mut corrupted = std::collections::BTreeSet::new();
            while corrupted.len() < corruptions {
                corrupted.insert(rng.gen::<u64>() as usize % rows);
            }
            for &row in &corrupted {
                let sign = if rng.gen::<f64>() < 0.5 { -1.0 } else { 1.0 };
                measurement[row] += 2.0 * sign;
            }
            let spec = make_decoding(&coding, &measurement, q)?.with_x0(vec![0.0; cols])?;
            write_problem(&out, &spec)?;
        }
        GenCmd::ThreePartition {
            weights,
            target,
            q,
            seed,
            out,
        } => {
            let weights: Vec<u64> = weights
                .split(',')
                .map(|w| w.trim().parse::<u64>().context("weights must be integers"))
                .collect::<Result<_>>()?;
            let spec = make_three_partition(&weights, target, q)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = spec.dim();
            let x0: Vec<f64> = (0..n).map(|_| 1.5 * rng.gen::<f64>() - 0.25).collect();
            let spec = spec.with_x0(x0)?;
            write_problem(&out, &spec)?;
        }
        GenCmd::Random {
            n,
            m,
            q,
            h,
            x,
            seed,
            out,
        } => {
            let h_kind = match h.as_str() {
                "zero" => HKind::Zero,
                "linear" => HKind::Linear,
                _ => HKind::Quadratic,
            };
            let x_kind = if x == "box" { XKind::Box } else { XKind::BoxSimplex };
            let spec = make_random(seed, n, m, q, h_kind, x_kind)?;
            write_problem(&out, &spec)?;
        }
    }
    Ok(EXIT_PASS)
}

fn parse_grid(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse {what} entry {s:?}"))
        })
        .collect()
}

fn run_bench(args: BenchArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.suite)
        .with_context(|| format!("cannot read suite file {}", args.suite.display()))?;
    let paths: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(PathBuf::from)
        .collect();
    if paths.is_empty() {
        bail!("suite file lists no problems");
    }
    let epsilons = parse_grid(&args.epsilons, "epsilon")?;
    if epsilons.is_empty() {
        bail!("empty epsilon grid");
    }
    let qs = parse_grid(&args.qs, "q")?;

    let mut out = String::from("problem,epsilon,q,qp_solves,bound,final_residual,wall_ms\n");
    let mut bound_violations = 0u32;
    let mut failures = 0u32;
    for path in &paths {
        let base = read_problem(path)?;
        let q_list: Vec<f64> = if qs.is_empty() { vec![base.q()] } else { qs.clone() };
        for &q in &q_list {
            let spec = base.clone().with_exponent(q)?;
            let x0 = match spec.x0() {
                Some(x0) => x0.to_vec(),
                None => seeded_start(&spec, args.seed),
            };
            for &eps in &epsilons {
                let config = build_config(eps, 0.5, 2.0, args.step, args.lipschitz);
                let started = Instant::now();
                match solve(&spec, &x0, &config) {
                    Ok(r) => {
                        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
                        if matches!(args.lipschitz, LipArg::Known) && r.qp_solves > r.bound {
                            bound_violations += 1;
                            eprintln!(
                                "bound violated: {} eps={eps} q={q}: {} > {}",
                                path.display(),
                                r.qp_solves,
                                r.bound
                            );
                        }
                        out.push_str(&format!(
                            "{},{},{},{},{},{},{:.3}\n",
                            path.display(),
                            eps,
                            q,
                            r.qp_solves,
                            r.bound,
                            r.kkt.projected_residual,
                            wall_ms
                        ));
                    }
                    Err(e) => {
                        failures += 1;
                        eprintln!("row failed: {} eps={eps} q={q}: {e}", path.display());
                    }
                }
            }
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, &out)
            .with_context(|| format!("cannot write summary {}", path.display()))?,
        None => print!("{out}"),
    }
    if bound_violations > 0 || failures > 0 {
        eprintln!("{bound_violations} bound violations, {failures} failed rows");
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_PASS)
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Solve(args) => run_solve(args),
        Cmd::Verify(args) => run_verify(args),
        Cmd::Gen(cmd) => run_gen(cmd),
        Cmd::Bench(args) => run_bench(args),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    };
    std::process::exit(code);
}
