use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ProblemSummary, RunRecord};
use crate::error::{Error, Result};
use crate::solvers::Status;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    It,
    FE,
    GE,
    T,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::It, Metric::FE, Metric::GE, Metric::T];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::It => "it",
            Metric::FE => "fE",
            Metric::GE => "gE",
            Metric::T => "T",
        }
    }

    pub fn of_summary(self, s: &ProblemSummary) -> f64 {
        match self {
            Metric::It => s.it_avg,
            Metric::FE => s.fe_avg,
            Metric::GE => s.ge_avg,
            Metric::T => s.t_avg,
        }
    }

    pub fn of_run(self, r: &RunRecord) -> f64 {
        let c = &r.trace.counters;
        match self {
            Metric::It => c.iterations as f64,
            Metric::FE => c.f_evals as f64,
            Metric::GE => c.g_evals as f64,
            Metric::T => c.wall_time.as_secs_f64(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "it" | "iterations" => Ok(Metric::It),
            "fe" => Ok(Metric::FE),
            "ge" => Ok(Metric::GE),
            "t" | "time" => Ok(Metric::T),
            _ => Err(Error::Parse(format!("unknown metric `{s}` (expected it, fE, gE or T)"))),
        }
    }
}

/// Cumulative distribution `rho_s(tau)` of one solver's performance ratios, as
/// the breakpoints of a right-continuous step function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    /// `(tau, rho(tau))` with `tau >= 1` strictly increasing. The first entry is
    /// at `tau = 1`; `rho` stays constant up to the next breakpoint.
    pub breakpoints: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// `rho(tau)`; zero below 1.
    pub fn rho(&self, tau: f64) -> f64 {
        self.breakpoints
            .iter()
            .take_while(|(t, _)| *t <= tau)
            .last()
            .map_or(0.0, |&(_, r)| r)
    }
}

/// Dolan-More profiles from a problems x solvers table, where `None` marks a
/// failed pair (ratio `+inf`). Problems on which every solver failed are dropped
/// from the denominator.
pub fn profile_from_table(solvers: &[String], table: &[Vec<Option<f64>>]) -> Result<Vec<ProfileCurve>> {
    if solvers.is_empty() {
        return Err(Error::Profile("no solvers".into()));
    }
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); solvers.len()];
    let mut n_p = 0usize;
    for (p, row) in table.iter().enumerate() {
        if row.len() != solvers.len() {
            return Err(Error::Profile(format!(
                "instance {p} has {} entries for {} solvers",
                row.len(),
                solvers.len()
            )));
        }
        if let Some(bad) = row.iter().flatten().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Profile(format!(
                "metric value {bad} on instance {p} is not positive; ratios are undefined"
            )));
        }
        let Some(best) = row.iter().flatten().copied().reduce(f64::min) else {
            continue;
        };
        n_p += 1;
        for (s, v) in row.iter().enumerate() {
            if let Some(v) = v {
                ratios[s].push(v / best);
            }
        }
    }
    if n_p == 0 {
        return Err(Error::Profile("every solver failed on every instance".into()));
    }
    Ok(solvers
        .iter()
        .zip(ratios)
        .map(|(name, mut z)| {
            z.sort_by(f64::total_cmp);
            let mut breakpoints = vec![(1.0, 0.0)];
            for (count, &tau) in z.iter().enumerate() {
                let rho = (count + 1) as f64 / n_p as f64;
                let last = breakpoints.last_mut().expect("nonempty");
                if tau <= last.0 {
                    last.1 = rho;
                } else {
                    breakpoints.push((tau, rho));
                }
            }
            ProfileCurve {
                solver: name.clone(),
                breakpoints,
            }
        })
        .collect())
}

/// One instance per problem, using per-problem averages. A pair with zero
/// successful runs counts as failed.
pub fn performance_profile(summaries: &[ProblemSummary], metric: Metric) -> Result<Vec<ProfileCurve>> {
    let mut solvers: Vec<String> = Vec::new();
    let mut problems: Vec<&str> = Vec::new();
    for s in summaries {
        let name = s.solver.as_str().to_string();
        if !solvers.contains(&name) {
            solvers.push(name);
        }
        if !problems.contains(&s.problem.as_str()) {
            problems.push(&s.problem);
        }
    }
    let mut table = vec![vec![None; solvers.len()]; problems.len()];
    for s in summaries {
        let p = problems.iter().position(|&p| p == s.problem).expect("collected");
        let k = solvers.iter().position(|k| k == s.solver.as_str()).expect("collected");
        if table[p][k].is_some() {
            return Err(Error::Profile(format!("duplicate row for ({}, {})", s.problem, s.solver)));
        }
        if s.success_pct > 0.0 {
            table[p][k] = Some(metric.of_summary(s));
        }
    }
    profile_from_table(&solvers, &table)
}

/// One instance per (problem, start); runs that did not converge count as failed.
pub fn profile_from_runs(records: &[RunRecord], metric: Metric) -> Result<Vec<ProfileCurve>> {
    let mut solvers: Vec<String> = Vec::new();
    let mut instances: Vec<(&str, usize)> = Vec::new();
    for r in records {
        let name = r.solver().as_str().to_string();
        if !solvers.contains(&name) {
            solvers.push(name);
        }
        let key = (r.problem.as_str(), r.start_index);
        if !instances.contains(&key) {
            instances.push(key);
        }
    }
    let mut table = vec![vec![None; solvers.len()]; instances.len()];
    for r in records {
        let p = instances
            .iter()
            .position(|&(p, i)| p == r.problem && i == r.start_index)
            .expect("collected");
        let k = solvers.iter().position(|k| k == r.solver().as_str()).expect("collected");
        if r.trace.status == Status::Converged {
            table[p][k] = Some(metric.of_run(r));
        }
    }
    profile_from_table(&solvers, &table)
}
