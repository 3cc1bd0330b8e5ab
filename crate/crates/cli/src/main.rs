//! `mosd`: solve single problems, validate the registry, and run benchmark campaigns.
//!
//! Exit codes: 0 on success, 1 when a run fails, 2 on a usage or input error.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mosd::bench::io::{
    read_results_csv, read_runs_jsonl, write_front_csv, write_profile_csv, write_results_csv,
    write_runs_jsonl, FrontRow,
};
use mosd::bench::svg::render_profile_svg;
use mosd::bench::{
    pareto_front_points, performance_profile, profile_from_runs, run_campaign, summarize,
    CampaignSpec, Metric, ProfileCurve, RunRecord,
};
use mosd::problems::{manifest, sample_start, standard_suite, DEFAULT_SEED};
use mosd::{
    check_jacobian, sample_starts, solve, Error, Problem, ProblemSpec, SamplerSpec, SolverConfig,
    SolverKind, Status,
};

#[derive(Debug, Parser)]
#[command(name = "mosd", version, about = "Multi-objective steepest descent solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one solver from one start and print the iteration table.
    Solve(SolveArgs),
    /// Check every problem's Jacobian against central differences.
    Validate(ValidateArgs),
    /// Run a multi-start campaign; writes results.csv and runs.jsonl.
    Bench(BenchArgs),
    /// Build performance profiles from a results CSV (or runs JSONL with --per-run).
    Profile(ProfileArgs),
    /// Export the final objective values of converged runs on a bi-objective problem.
    Front(FrontArgs),
    /// Print the problem registry as JSON.
    Manifest(ManifestArgs),
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Iteration cap.
    #[arg(long, default_value_t = 1000)]
    max_iters: u64,
    /// Upper bound on the MSD-II modifier theta.
    #[arg(long)]
    cap_theta: Option<f64>,
}

impl SolverFlags {
    fn config(&self, kind: SolverKind) -> SolverConfig {
        let mut cfg = SolverConfig::new(kind);
        cfg.max_iters = self.max_iters;
        cfg.theta_cap = self.cap_theta;
        cfg
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Problem name, e.g. BK1 or JOS1.
    #[arg(long)]
    problem: String,
    /// Dimension for scalable problems.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "msd")]
    solver: String,
    /// Comma-separated start point; a single value is repeated n times.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Seed for the sampled start used when --x0 is absent.
    #[arg(long, env = "MOSD_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Index of the sampled start used when --x0 is absent.
    #[arg(long, default_value_t = 0)]
    start_index: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    solver_flags: SolverFlags,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Comma-separated NAME[:n] list; defaults to the standard suite.
    #[arg(long, value_delimiter = ',')]
    problems: Vec<String>,
    #[arg(long, env = "MOSD_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Points checked per problem.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Relative central-difference step. Badly scaled instances such as large FDS
    /// need a larger step to stay above roundoff.
    #[arg(long, default_value_t = 1e-6)]
    step: f64,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated NAME[:n] list; defaults to the standard suite.
    #[arg(long, value_delimiter = ',')]
    problems: Vec<String>,
    /// Comma-separated solver list; defaults to all four.
    #[arg(long, value_delimiter = ',')]
    solvers: Vec<String>,
    #[arg(long, default_value_t = 100)]
    starts: usize,
    #[arg(long, env = "MOSD_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    solver_flags: SolverFlags,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// results.csv from `bench`, or runs.jsonl with --per-run.
    input: PathBuf,
    /// One of it, fE, gE, T.
    #[arg(long, default_value = "it")]
    metric: String,
    /// Treat every (problem, start) pair as a separate problem; input is runs.jsonl.
    #[arg(long)]
    per_run: bool,
    /// Also write an SVG plot.
    #[arg(long)]
    svg: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct FrontArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated solver list; defaults to all four.
    #[arg(long, value_delimiter = ',')]
    solvers: Vec<String>,
    #[arg(long, default_value_t = 100)]
    starts: usize,
    #[arg(long, env = "MOSD_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    solver_flags: SolverFlags,
}

#[derive(Debug, Args)]
struct ManifestArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 2 and 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl Failure {
    fn io(path: &Path, e: io::Error) -> Self {
        Failure::Run(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Run(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Profile(a) => cmd_profile(&a),
        Command::Front(a) => cmd_front(&a),
        Command::Manifest(a) => cmd_manifest(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_specs(names: &[String]) -> Result<Vec<ProblemSpec>, Failure> {
    if names.is_empty() {
        return Ok(standard_suite());
    }
    names
        .iter()
        .map(|s| {
            let spec: ProblemSpec = s.parse()?;
            spec.instantiate()?;
            Ok(spec)
        })
        .collect()
}

fn parse_solvers(names: &[String]) -> Result<Vec<SolverKind>, Failure> {
    if names.is_empty() {
        return Ok(SolverKind::ALL.to_vec());
    }
    names.iter().map(|s| Ok(s.parse()?)).collect()
}

fn create_out_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::io(path, e))
}

fn open_input(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |t| format!("{t:.6e}"))
}

fn cmd_solve(a: &SolveArgs) -> CliResult {
    let problem = ProblemSpec::new(a.problem.clone(), a.n).instantiate()?;
    let kind: SolverKind = a.solver.parse()?;
    let config = a.solver_flags.config(kind);
    config.validate()?;
    let n = problem.dim();
    let x0 = match &a.x0 {
        Some(v) if v.len() == 1 => vec![v[0]; n],
        Some(v) if v.len() == n => v.clone(),
        Some(v) => {
            return Err(Failure::Usage(format!(
                "--x0 has {} entries, {} needs {n}",
                v.len(),
                problem.label()
            )))
        }
        None => sample_start(&problem, a.seed, a.start_index),
    };

    let trace = solve(&problem, &x0, &config);
    let mut out = io::stdout().lock();
    let write_err = |e: io::Error| Failure::Run(format!("stdout: {e}"));
    match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &trace).map_err(|e| Failure::Run(e.to_string()))?;
            writeln!(out).map_err(write_err)?;
        }
        Format::Text => {
            let modifier = match kind {
                SolverKind::Msd => "-",
                SolverKind::Msd2 => "theta",
                SolverKind::Mdsd | SolverKind::Msd1 => "tau",
            };
            writeln!(out, "{} with {} from {} start", problem.label(), kind.label(), if a.x0.is_some() { "given" } else { "sampled" })
                .map_err(write_err)?;
            writeln!(out, "{:>6} {:>14} {:>14} {:>14} {:>14}", "k", "|gamma|", "|v|", "t", modifier)
                .map_err(write_err)?;
            for r in &trace.records {
                let m = if kind == SolverKind::Msd || r.t.is_none() { None } else { Some(r.modifier) };
                writeln!(
                    out,
                    "{:>6} {:>14.6e} {:>14.6e} {:>14} {:>14}",
                    r.k,
                    r.gamma.abs(),
                    r.v_norm,
                    fmt_opt(r.t),
                    fmt_opt(m)
                )
                .map_err(write_err)?;
            }
            let c = &trace.counters;
            writeln!(out, "status: {}", trace.status.as_str()).map_err(write_err)?;
            writeln!(out, "iterations: {}  fE: {}  gE: {}  time: {:.3e}s", c.iterations, c.f_evals, c.g_evals, c.wall_time.as_secs_f64())
                .map_err(write_err)?;
            writeln!(out, "x: {:?}", trace.final_x).map_err(write_err)?;
            writeln!(out, "F(x): {:?}", trace.final_f).map_err(write_err)?;
        }
    }
    if trace.converged() {
        Ok(())
    } else {
        Err(Failure::Run(format!("run ended with status {}", trace.status.as_str())))
    }
}

fn cmd_validate(a: &ValidateArgs) -> CliResult {
    let specs = parse_specs(&a.problems)?;
    let mut failed = Vec::new();
    for spec in &specs {
        let p = spec.instantiate()?;
        let worst = sample_starts(&p, &SamplerSpec { seed: a.seed, count: a.points })
            .iter()
            .map(|x| check_jacobian(&p, x, a.step))
            .fold(0.0f64, f64::max);
        let ok = worst <= a.tol;
        println!("{:<12} {:>12.3e} {}", spec.to_string(), worst, if ok { "ok" } else { "FAIL" });
        if !ok {
            failed.push(spec.to_string());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("Jacobian check failed for {}", failed.join(", "))))
    }
}

fn cmd_bench(a: &BenchArgs) -> CliResult {
    let spec = CampaignSpec {
        problems: parse_specs(&a.problems)?,
        solvers: parse_solvers(&a.solvers)?
            .into_iter()
            .map(|k| a.solver_flags.config(k))
            .collect(),
        starts: SamplerSpec { seed: a.seed, count: a.starts },
        parallelism: a.jobs,
    };
    let records = run_campaign(&spec)?;
    let summaries = summarize(&records);

    create_out_dir(&a.out_dir)?;
    let results = a.out_dir.join("results.csv");
    write_results_csv(create_file(&results)?, &summaries)?;
    let runs = a.out_dir.join("runs.jsonl");
    write_runs_jsonl(create_file(&runs)?, &records)?;

    println!("{:<12} {:<8} {:>10} {:>10} {:>10} {:>10} {:>8}", "problem", "solver", "it", "fE", "gE", "T", "%");
    for s in &summaries {
        println!(
            "{:<12} {:<8} {:>10.2} {:>10.2} {:>10.2} {:>10.2e} {:>8.1}",
            s.problem,
            s.solver.label(),
            s.it_avg,
            s.fe_avg,
            s.ge_avg,
            s.t_avg,
            s.success_pct
        );
    }
    println!("wrote {} and {}", results.display(), runs.display());

    if records.iter().all(|r| r.trace.status != Status::Converged) {
        return Err(Failure::Run("every run failed".into()));
    }
    Ok(())
}

fn cmd_profile(a: &ProfileArgs) -> CliResult {
    let metric: Metric = a.metric.parse()?;
    let input = open_input(&a.input)?;
    let curves: Vec<ProfileCurve> = if a.per_run {
        let records: Vec<RunRecord> = read_runs_jsonl(input)?.into_iter().map(RunRecord::from).collect();
        profile_from_runs(&records, metric)?
    } else {
        performance_profile(&read_results_csv(input)?, metric)?
    };

    create_out_dir(&a.out_dir)?;
    let csv_path = a.out_dir.join(format!("profile_{}.csv", metric.as_str()));
    write_profile_csv(create_file(&csv_path)?, &curves)?;
    println!("wrote {}", csv_path.display());
    if a.svg {
        let svg_path = a.out_dir.join(format!("profile_{}.svg", metric.as_str()));
        let title = format!("Performance profile ({})", metric.as_str());
        fs::write(&svg_path, render_profile_svg(&curves, &title)).map_err(|e| Failure::io(&svg_path, e))?;
        println!("wrote {}", svg_path.display());
    }
    for c in &curves {
        println!("{:<8} rho(1) = {:.4}, breakpoints {}", c.solver, c.rho(1.0), c.breakpoints.len());
    }
    Ok(())
}

fn cmd_front(a: &FrontArgs) -> CliResult {
    let problem = ProblemSpec::new(a.problem.clone(), a.n).instantiate()?;
    let kinds = parse_solvers(&a.solvers)?;
    let starts = sample_starts(&problem, &SamplerSpec { seed: a.seed, count: a.starts });
    let label = problem.label();
    let mut rows = Vec::new();
    for kind in kinds {
        let points = pareto_front_points(&problem, &a.solver_flags.config(kind), &starts)?;
        println!("{:<8} {} of {} runs converged", kind.label(), points.len(), starts.len());
        rows.extend(points.iter().map(|p| FrontRow::new(&label, kind, p)));
    }
    create_out_dir(&a.out_dir)?;
    let path = a.out_dir.join("front.csv");
    write_front_csv(create_file(&path)?, &rows)?;
    println!("wrote {}", path.display());
    if rows.is_empty() {
        return Err(Failure::Run("no run converged".into()));
    }
    Ok(())
}

fn cmd_manifest(a: &ManifestArgs) -> CliResult {
    let json = serde_json::to_string_pretty(&manifest()).map_err(|e| Failure::Run(e.to_string()))?;
    match &a.out {
        Some(path) => fs::write(path, json + "\n").map_err(|e| Failure::io(path, e)),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}
