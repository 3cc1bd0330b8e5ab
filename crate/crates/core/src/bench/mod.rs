//! Multi-start benchmark campaigns, per-problem aggregation, performance
//! profiles, and Pareto-front export.

pub mod io;
mod profile;
pub mod svg;

pub use profile::{performance_profile, profile_from_runs, profile_from_table, Metric, ProfileCurve};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{sample_starts, ProblemSpec, SamplerSpec, TestProblem};
use crate::solvers::{solve, RunTrace, Status};
use crate::types::{Problem, SolverConfig, SolverKind};

#[derive(Debug, Clone)]
pub struct CampaignSpec {
    pub problems: Vec<ProblemSpec>,
    pub solvers: Vec<SolverConfig>,
    pub starts: SamplerSpec,
    /// Worker threads; 0 uses rayon's default.
    pub parallelism: usize,
}

/// One (problem, solver, start) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Problem label, `NAME` or `NAME:n`.
    pub problem: String,
    pub start_index: usize,
    pub trace: RunTrace,
}

impl RunRecord {
    pub fn solver(&self) -> SolverKind {
        self.trace.kind
    }
}

/// Runs every (problem, solver, start) combination.
///
/// Output order is problem, then solver, then start index, regardless of the
/// number of workers. Each solver sees the same starts for a given problem.
pub fn run_campaign(spec: &CampaignSpec) -> Result<Vec<RunRecord>> {
    for cfg in &spec.solvers {
        cfg.validate()?;
    }
    if spec.starts.count == 0 {
        return Err(Error::InvalidConfig("start count must be positive".into()));
    }
    let problems: Vec<(String, TestProblem, Vec<Vec<f64>>)> = spec
        .problems
        .iter()
        .map(|ps| {
            let p = ps.instantiate()?;
            let starts = sample_starts(&p, &spec.starts);
            Ok((p.label(), p, starts))
        })
        .collect::<Result<_>>()?;

    let mut tasks = Vec::new();
    for (pi, (_, _, starts)) in problems.iter().enumerate() {
        for si in 0..spec.solvers.len() {
            for xi in 0..starts.len() {
                tasks.push((pi, si, xi));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(pi, si, xi)| {
                let (label, problem, starts) = &problems[pi];
                RunRecord {
                    problem: label.clone(),
                    start_index: xi,
                    trace: solve(problem, &starts[xi], &spec.solvers[si]),
                }
            })
            .collect()
    });
    Ok(records)
}

/// Per (problem, solver) averages over all runs, failed runs included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub problem: String,
    pub solver: SolverKind,
    #[serde(rename = "it")]
    pub it_avg: f64,
    #[serde(rename = "fE")]
    pub fe_avg: f64,
    #[serde(rename = "gE")]
    pub ge_avg: f64,
    /// Seconds.
    #[serde(rename = "T")]
    pub t_avg: f64,
    pub success_pct: f64,
}

/// Groups runs by (problem, solver) in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<ProblemSummary> {
    let mut keys: Vec<(&str, SolverKind)> = Vec::new();
    for r in records {
        let key = (r.problem.as_str(), r.solver());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(problem, solver)| {
            let group: Vec<&RunTrace> = records
                .iter()
                .filter(|r| r.problem == problem && r.solver() == solver)
                .map(|r| &r.trace)
                .collect();
            let n = group.len() as f64;
            let avg = |f: &dyn Fn(&RunTrace) -> f64| group.iter().map(|t| f(t)).sum::<f64>() / n;
            let converged = group.iter().filter(|t| t.status == Status::Converged).count();
            ProblemSummary {
                problem: problem.to_string(),
                solver,
                it_avg: avg(&|t| t.counters.iterations as f64),
                fe_avg: avg(&|t| t.counters.f_evals as f64),
                ge_avg: avg(&|t| t.counters.g_evals as f64),
                t_avg: avg(&|t| t.counters.wall_time.as_secs_f64()),
                success_pct: 100.0 * converged as f64 / n,
            }
        })
        .collect()
}

/// Final objective values of one converged run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub start_index: usize,
    pub f: Vec<f64>,
}

/// Raw final objective vectors of every converged run, without dominance filtering.
pub fn pareto_front_points<P: Problem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    starts: &[Vec<f64>],
) -> Result<Vec<FrontPoint>> {
    if problem.num_objectives() != 2 {
        return Err(Error::InvalidConfig(format!(
            "front export needs two objectives, `{}` has {}",
            problem.name(),
            problem.num_objectives()
        )));
    }
    config.validate()?;
    let points = starts
        .par_iter()
        .enumerate()
        .map(|(i, x0)| (i, solve(problem, x0, config)))
        .filter(|(_, tr)| tr.converged())
        .map(|(start_index, tr)| FrontPoint {
            start_index,
            f: tr.final_f,
        })
        .collect();
    Ok(points)
}
