//! Readers and writers for the benchmark file formats.
//!
//! | file        | shape                                                  |
//! |-------------|--------------------------------------------------------|
//! | results CSV | `problem,solver,it,fE,gE,T,success_pct`                |
//! | runs JSONL  | one [`RunLine`] object per line                        |
//! | profile CSV | `solver,tau,rho`, `tau` in log2 units                  |
//! | front CSV   | `problem,solver,start_index,f1,f2`                     |

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::{FrontPoint, ProblemSummary, ProfileCurve, RunRecord};
use crate::error::{Error, Result};
use crate::solvers::{RunTrace, Status};
use crate::types::{Counters, SolverKind};

pub const RESULTS_HEADER: [&str; 7] = ["problem", "solver", "it", "fE", "gE", "T", "success_pct"];
pub const PROFILE_HEADER: [&str; 3] = ["solver", "tau", "rho"];
pub const FRONT_HEADER: [&str; 5] = ["problem", "solver", "start_index", "f1", "f2"];

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

pub fn write_results_csv<W: Write>(out: W, rows: &[ProblemSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(RESULTS_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ProblemSummary>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &RESULTS_HEADER)?;
    let rows = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<ProblemSummary>, _>>()
        .map_err(|e| Error::Parse(format!("results CSV: {e}")))?;
    for r in &rows {
        if !(0.0..=100.0).contains(&r.success_pct) {
            return Err(Error::Parse(format!("success_pct {} out of range", r.success_pct)));
        }
    }
    Ok(rows)
}

/// Flat per-run record of the runs JSONL file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLine {
    pub problem: String,
    pub solver: SolverKind,
    pub start_index: usize,
    pub status: Status,
    pub counters: Counters,
    pub final_x: Vec<f64>,
    pub final_f: Vec<f64>,
    pub final_lambda: Vec<f64>,
    pub final_gamma: f64,
}

impl From<&RunRecord> for RunLine {
    fn from(r: &RunRecord) -> Self {
        Self {
            problem: r.problem.clone(),
            solver: r.solver(),
            start_index: r.start_index,
            status: r.trace.status,
            counters: r.trace.counters,
            final_x: r.trace.final_x.clone(),
            final_f: r.trace.final_f.clone(),
            final_lambda: r.trace.final_lambda.clone(),
            final_gamma: r.trace.final_gamma,
        }
    }
}

impl From<RunLine> for RunRecord {
    /// Per-iteration records are not stored in the JSONL file and come back empty.
    fn from(l: RunLine) -> Self {
        RunRecord {
            problem: l.problem,
            start_index: l.start_index,
            trace: RunTrace {
                kind: l.solver,
                records: Vec::new(),
                status: l.status,
                final_x: l.final_x,
                final_f: l.final_f,
                final_lambda: l.final_lambda,
                final_gamma: l.final_gamma,
                counters: l.counters,
            },
        }
    }
}

pub fn write_runs_jsonl<W: Write>(mut out: W, records: &[RunRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &RunLine::from(r))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_runs_jsonl<R: BufRead>(input: R) -> Result<Vec<RunLine>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let run = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("runs JSONL line {}: {e}", i + 1)))?;
        out.push(run);
    }
    Ok(out)
}

pub fn write_profile_csv<W: Write>(out: W, curves: &[ProfileCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for c in curves {
        for &(tau, rho) in &c.breakpoints {
            w.write_record([c.solver.clone(), tau.log2().to_string(), rho.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_profile_csv`]; `tau` is converted back from log2 units.
pub fn read_profile_csv<R: Read>(input: R) -> Result<Vec<ProfileCurve>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &PROFILE_HEADER)?;
    let mut curves: Vec<ProfileCurve> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| Error::Parse(format!("profile CSV: bad number `{}`", &rec[i])))
        };
        let point = (num(1)?.exp2(), num(2)?);
        match curves.last_mut() {
            Some(c) if c.solver == rec[0] => c.breakpoints.push(point),
            _ => curves.push(ProfileCurve {
                solver: rec[0].to_string(),
                breakpoints: vec![point],
            }),
        }
    }
    Ok(curves)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub problem: String,
    pub solver: SolverKind,
    pub start_index: usize,
    pub f1: f64,
    pub f2: f64,
}

impl FrontRow {
    pub fn new(problem: &str, solver: SolverKind, p: &FrontPoint) -> Self {
        Self {
            problem: problem.to_string(),
            solver,
            start_index: p.start_index,
            f1: p.f[0],
            f2: p.f[1],
        }
    }
}

pub fn write_front_csv<W: Write>(out: W, rows: &[FrontRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(FRONT_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_front_csv<R: Read>(input: R) -> Result<Vec<FrontRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &FRONT_HEADER)?;
    rdr.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("front CSV: {e}")))
}
