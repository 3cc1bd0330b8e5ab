//! The four descent methods over one shared loop.
//!
//! Every method solves the direction subproblem at `x^k`, stops once
//! `|gamma(x^k)| <= gamma_tol`, and otherwise takes an Armijo step. They differ
//! only in how the step is scaled:
//!
//! | kind   | update                              | modifier                                     |
//! |--------|-------------------------------------|----------------------------------------------|
//! | MSD    | `x + t v`                           | none                                         |
//! | MDSD   | `x + t v / tau`                     | `max(tau0, s^T y / s^T s)` (weighted secant) |
//! | MSD-I  | `x + t v / tau`                     | tau fitted to the observed weighted decrease  |
//! | MSD-II | `x + theta t v`, Armijo on `v`      | `theta = p / q` from a Jacobian at `x + t v` |

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::linesearch::{armijo, Armijo};
use crate::subproblem::{is_critical, psi, solve_dual, SubproblemSolution};
use crate::types::{
    evaluate_counted, jacobian_counted, norm_sq, Counters, Jacobian, Problem, SolverConfig,
    SolverKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Converged,
    IterationCap,
    LineSearchFailure,
    NumericalFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::IterationCap => "IterationCap",
            Status::LineSearchFailure => "LineSearchFailure",
            Status::NumericalFailure => "NumericalFailure",
        }
    }
}

/// State at `x^k`, plus the step taken from it (absent on the last record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: u64,
    /// `x^k`, only kept when `SolverConfig::keep_iterates` is set.
    pub x: Option<Vec<f64>>,
    /// `F(x^k)` when it was evaluated. MSD-II evaluates `F` lazily, so its final
    /// point may have none.
    pub f: Option<Vec<f64>>,
    pub gamma: f64,
    pub v_norm: f64,
    pub t: Option<f64>,
    /// tau for MDSD / MSD-I, theta for MSD-II, 1 for MSD.
    pub modifier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub kind: SolverKind,
    pub records: Vec<IterationRecord>,
    pub status: Status,
    pub final_x: Vec<f64>,
    /// `F(final_x)`. Evaluated outside the counters when the run itself never needed it.
    pub final_f: Vec<f64>,
    pub final_lambda: Vec<f64>,
    pub final_gamma: f64,
    pub counters: Counters,
}

impl RunTrace {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

pub fn run_msd<P: Problem + ?Sized>(problem: &P, x0: &[f64], config: &SolverConfig) -> RunTrace {
    solve(problem, x0, &config.clone().with_kind(SolverKind::Msd))
}

pub fn run_mdsd<P: Problem + ?Sized>(problem: &P, x0: &[f64], config: &SolverConfig) -> RunTrace {
    solve(problem, x0, &config.clone().with_kind(SolverKind::Mdsd))
}

pub fn run_msd1<P: Problem + ?Sized>(problem: &P, x0: &[f64], config: &SolverConfig) -> RunTrace {
    solve(problem, x0, &config.clone().with_kind(SolverKind::Msd1))
}

pub fn run_msd2<P: Problem + ?Sized>(problem: &P, x0: &[f64], config: &SolverConfig) -> RunTrace {
    solve(problem, x0, &config.clone().with_kind(SolverKind::Msd2))
}

/// MSD-I update of the curvature estimate from the weighted decrease
/// `sum_i lambda_i (F_i(x+) - F_i(x))`. Nonpositive or non-finite results reset to 1.
pub fn tau_from_decrease(tau: f64, weighted_decrease: f64, t: f64, v_norm_sq: f64) -> f64 {
    let next = 2.0 * tau * (tau * weighted_decrease + t * v_norm_sq) / (t * t * v_norm_sq);
    if next > 0.0 && next.is_finite() {
        next
    } else {
        1.0
    }
}

/// MDSD update: `max(tau0, (sum_i lambda_i (g_i(x+) - g_i(x)))^T s / |s|^2)` with `s = x+ - x`.
pub fn tau_from_secant(tau0: f64, lambda: &[f64], jac_old: &Jacobian, jac_new: &Jacobian, step: &[f64]) -> f64 {
    let mut num = 0.0;
    for (i, &l) in lambda.iter().enumerate() {
        if l != 0.0 {
            let y: f64 = jac_new
                .row(i)
                .iter()
                .zip(jac_old.row(i))
                .zip(step)
                .map(|((a, b), s)| (a - b) * s)
                .sum();
            num += l * y;
        }
    }
    let ratio = num / norm_sq(step);
    if ratio.is_finite() {
        ratio.max(tau0)
    } else {
        tau0
    }
}

/// MSD-II modifier `theta = p / q` with `p = t |v|^2` and
/// `q = t (sum_i lambda_i (g_i(z) - g_i(x)))^T v`. Falls back to 1 when `q` is not
/// safely positive.
pub fn theta_from_secant(p: f64, q: f64, cap: Option<f64>) -> f64 {
    let floor = 1e-12 * p.max(1.0);
    let theta = if q > floor { p / q } else { 1.0 };
    let theta = if theta.is_finite() && theta > 0.0 { theta } else { 1.0 };
    match cap {
        Some(c) => theta.min(c),
        None => theta,
    }
}

/// Runs the method selected by `config.kind` from `x0`.
pub fn solve<P: Problem + ?Sized>(problem: &P, x0: &[f64], config: &SolverConfig) -> RunTrace {
    let started = Instant::now();
    let mut run = Run::new(problem, x0, config);
    run.iterate();
    let mut trace = run.finish();
    trace.counters.wall_time = started.elapsed();
    trace
}

struct Run<'a, P: ?Sized> {
    problem: &'a P,
    config: &'a SolverConfig,
    counters: Counters,
    records: Vec<IterationRecord>,
    x: Vec<f64>,
    f: Option<Vec<f64>>,
    jac: Option<Jacobian>,
    modifier: f64,
    last: Option<SubproblemSolution>,
    status: Status,
}

/// Outcome of one step: the next point with whatever was already computed there.
struct Step {
    t: f64,
    x: Vec<f64>,
    f: Option<Vec<f64>>,
    jac: Option<Jacobian>,
    next_modifier: f64,
}

impl<'a, P: Problem + ?Sized> Run<'a, P> {
    fn new(problem: &'a P, x0: &[f64], config: &'a SolverConfig) -> Self {
        let modifier = match config.kind {
            SolverKind::Mdsd => config.tau0,
            _ => 1.0,
        };
        Self {
            problem,
            config,
            counters: Counters::default(),
            records: Vec::new(),
            x: x0.to_vec(),
            f: None,
            jac: None,
            modifier,
            last: None,
            status: Status::NumericalFailure,
        }
    }

    fn iterate(&mut self) {
        if self.x.len() != self.problem.dim() || !self.x.iter().all(|v| v.is_finite()) {
            self.status = Status::NumericalFailure;
            return;
        }
        let cfg = self.config;
        loop {
            let jac = match self.jac.take() {
                Some(j) => j,
                None => match jacobian_counted(self.problem, &self.x, &mut self.counters) {
                    Ok(j) => j,
                    Err(_) => {
                        self.status = Status::NumericalFailure;
                        return;
                    }
                },
            };
            let sol = solve_dual(&jac, cfg.dual_tol, cfg.dual_max_iters);
            let k = self.counters.iterations;
            self.records.push(IterationRecord {
                k,
                x: cfg.keep_iterates.then(|| self.x.clone()),
                f: self.f.clone(),
                gamma: sol.gamma,
                v_norm: sol.v_norm(),
                t: None,
                modifier: self.modifier,
            });

            if is_critical(&sol, cfg.gamma_tol) {
                self.last = Some(sol);
                self.status = Status::Converged;
                return;
            }
            if k >= cfg.max_iters {
                self.last = Some(sol);
                self.status = Status::IterationCap;
                return;
            }
            let f = match self.f.take() {
                Some(f) => f,
                None => match evaluate_counted(self.problem, &self.x, &mut self.counters) {
                    Ok(f) => {
                        self.records.last_mut().unwrap().f = Some(f.clone());
                        f
                    }
                    Err(_) => {
                        self.last = Some(sol);
                        self.status = Status::NumericalFailure;
                        return;
                    }
                },
            };

            // a step onto a point where the Jacobian cannot be evaluated is rejected,
            // so the run ends at the last valid iterate
            let step = self.step(&jac, &sol, &f).and_then(|mut step| {
                if step.jac.is_none() {
                    let j = jacobian_counted(self.problem, &step.x, &mut self.counters)
                        .map_err(|_| Status::NumericalFailure)?;
                    step.jac = Some(j);
                }
                Ok(step)
            });
            let step = match step {
                Ok(step) => step,
                Err(status) => {
                    self.f = Some(f);
                    self.last = Some(sol);
                    self.status = status;
                    return;
                }
            };
            let rec = self.records.last_mut().unwrap();
            rec.t = Some(step.t);
            if cfg.kind == SolverKind::Msd2 {
                rec.modifier = step.next_modifier;
            } else {
                self.modifier = step.next_modifier;
            }
            self.x = step.x;
            self.f = step.f;
            self.jac = step.jac;
            self.counters.iterations += 1;
        }
    }

    fn step(&mut self, jac: &Jacobian, sol: &SubproblemSolution, f: &[f64]) -> Result<Step, Status> {
        let cfg = self.config;
        let params = Armijo {
            rho: cfg.rho,
            delta: cfg.delta,
            max_steps: cfg.max_linesearch_steps,
        };
        let v = &sol.v;
        let v_sq = norm_sq(v);

        match cfg.kind {
            SolverKind::Msd => {
                let ls = armijo(self.problem, &self.x, f, v, sol.psi_at_v, params, &mut self.counters)
                    .map_err(|_| Status::LineSearchFailure)?;
                Ok(Step {
                    t: ls.t,
                    x: ls.point,
                    f: Some(ls.values),
                    jac: None,
                    next_modifier: 1.0,
                })
            }
            SolverKind::Msd1 | SolverKind::Mdsd => {
                let tau = self.modifier;
                let d: Vec<f64> = v.iter().map(|vi| vi / tau).collect();
                let psi_d = psi(jac, &d);
                let ls = armijo(self.problem, &self.x, f, &d, psi_d, params, &mut self.counters)
                    .map_err(|_| Status::LineSearchFailure)?;
                if cfg.kind == SolverKind::Msd1 {
                    let decrease: f64 = sol
                        .lambda
                        .iter()
                        .zip(ls.values.iter().zip(f))
                        .map(|(l, (new, old))| l * (new - old))
                        .sum();
                    Ok(Step {
                        t: ls.t,
                        next_modifier: tau_from_decrease(tau, decrease, ls.t, v_sq),
                        x: ls.point,
                        f: Some(ls.values),
                        jac: None,
                    })
                } else {
                    let jac_new = jacobian_counted(self.problem, &ls.point, &mut self.counters)
                        .map_err(|_| Status::NumericalFailure)?;
                    let s: Vec<f64> = ls.point.iter().zip(&self.x).map(|(a, b)| a - b).collect();
                    Ok(Step {
                        t: ls.t,
                        next_modifier: tau_from_secant(cfg.tau0, &sol.lambda, jac, &jac_new, &s),
                        x: ls.point,
                        f: Some(ls.values),
                        jac: Some(jac_new),
                    })
                }
            }
            SolverKind::Msd2 => {
                let ls = armijo(self.problem, &self.x, f, v, sol.psi_at_v, params, &mut self.counters)
                    .map_err(|_| Status::LineSearchFailure)?;
                let t = ls.t;
                let z = ls.point;
                let jac_z = jacobian_counted(self.problem, &z, &mut self.counters)
                    .map_err(|_| Status::NumericalFailure)?;
                let mut weighted = 0.0;
                for (i, &l) in sol.lambda.iter().enumerate() {
                    if l != 0.0 {
                        let y: f64 = jac_z
                            .row(i)
                            .iter()
                            .zip(jac.row(i))
                            .zip(v)
                            .map(|((a, b), vj)| (a - b) * vj)
                            .sum();
                        weighted += l * y;
                    }
                }
                let p = t * v_sq;
                let q = t * weighted;
                let theta = theta_from_secant(p, q, cfg.theta_cap);
                let scale = theta * t;
                let x_next: Vec<f64> = self.x.iter().zip(v).map(|(xi, vi)| xi + scale * vi).collect();
                if x_next == z {
                    Ok(Step {
                        t,
                        x: z,
                        f: Some(ls.values),
                        jac: Some(jac_z),
                        next_modifier: theta,
                    })
                } else {
                    Ok(Step {
                        t,
                        x: x_next,
                        f: None,
                        jac: None,
                        next_modifier: theta,
                    })
                }
            }
        }
    }

    fn finish(self) -> RunTrace {
        let final_f = match &self.f {
            Some(f) => f.clone(),
            None if self.x.len() == self.problem.dim() => self.problem.values(&self.x),
            None => vec![f64::NAN; self.problem.num_objectives()],
        };
        let (final_lambda, final_gamma) = match &self.last {
            Some(sol) => (sol.lambda.clone(), sol.gamma),
            None => (Vec::new(), f64::NAN),
        };
        RunTrace {
            kind: self.config.kind,
            records: self.records,
            status: self.status,
            final_x: self.x,
            final_f,
            final_lambda,
            final_gamma,
            counters: self.counters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{get_problem, sample_starts, SamplerSpec};

    struct Square;

    impl Problem for Square {
        fn name(&self) -> &str {
            "square"
        }
        fn num_objectives(&self) -> usize {
            1
        }
        fn dim(&self) -> usize {
            1
        }
        fn lower_bound(&self) -> &[f64] {
            &[-1.0]
        }
        fn upper_bound(&self) -> &[f64] {
            &[1.0]
        }
        fn is_convex(&self) -> bool {
            true
        }
        fn evaluate(&self, x: &[f64], out: &mut [f64]) {
            out[0] = x[0] * x[0];
        }
        fn jacobian(&self, x: &[f64], jac: &mut Jacobian) {
            jac.set(0, 0, 2.0 * x[0]);
        }
    }

    #[test]
    fn msd_on_bk1_from_six_six() {
        let p = get_problem("BK1", None).unwrap();
        let tr = run_msd(&p, &[6.0, 6.0], &SolverConfig::default());
        assert_eq!(tr.status, Status::Converged);
        assert_eq!(tr.counters.iterations, 1);
        assert_eq!(tr.records[0].t, Some(0.5));
        assert_eq!(tr.final_x, vec![5.0, 5.0]);
        assert_eq!(tr.final_f, vec![50.0, 0.0]);
        assert_eq!(tr.final_lambda, vec![0.0, 1.0]);
        assert_eq!(tr.final_gamma, 0.0);
        // F(x0) + two trials, J(x0) + J(x1)
        assert_eq!((tr.counters.f_evals, tr.counters.g_evals), (3, 2));
        assert_eq!(tr.records.len(), 2);
    }

    #[test]
    fn already_critical_start() {
        let p = get_problem("BK1", None).unwrap();
        for kind in SolverKind::ALL {
            let tr = solve(&p, &[0.0, 0.0], &SolverConfig::new(kind));
            assert_eq!(tr.status, Status::Converged);
            assert_eq!(tr.counters.iterations, 0);
            assert_eq!(tr.records.len(), 1);
            assert_eq!(tr.counters.f_evals, 0);
        }
    }

    #[test]
    fn msd1_first_step_recovers_curvature() {
        let mut cfg = SolverConfig::new(SolverKind::Msd1);
        cfg.max_iters = 1;
        let tr = solve(&Square, &[1.0], &cfg);
        assert_eq!(tr.records[0].t, Some(0.5));
        assert_eq!(tr.records[0].modifier, 1.0);
        assert_eq!(tr.final_x, vec![0.0]);
        assert_eq!(tr.records[1].modifier, 2.0);
        assert_eq!(tr.status, Status::Converged);
    }

    #[test]
    fn tau_update_rules() {
        // 2 * 1 * (1 * (0 - 1) + 0.5 * 4) / (0.25 * 4)
        assert_eq!(tau_from_decrease(1.0, -1.0, 0.5, 4.0), 2.0);
        // raw value -3 is replaced by 1
        let raw = 2.0 * 1.0 * (1.0 * -2.5 + 1.0 * 1.0) / 1.0;
        assert_eq!(raw, -3.0);
        assert_eq!(tau_from_decrease(1.0, -2.5, 1.0, 1.0), 1.0);
        // no decrease at all gives 2 tau / t
        assert_eq!(tau_from_decrease(3.0, 0.0, 0.25, 7.0), 2.0 * 3.0 / 0.25);
        assert_eq!(tau_from_decrease(1.0, f64::NAN, 1.0, 1.0), 1.0);
    }

    #[test]
    fn secant_update_rules() {
        // f = x^2 from 1 to 0: y = -2, s = -1
        let j_old = Jacobian::from_rows(&[[2.0]]);
        let j_new = Jacobian::from_rows(&[[0.0]]);
        assert_eq!(tau_from_secant(1e-4, &[1.0], &j_old, &j_new, &[-1.0]), 2.0);
        // negative curvature floors at tau0
        let j_new = Jacobian::from_rows(&[[3.0]]);
        assert_eq!(tau_from_secant(1e-4, &[1.0], &j_old, &j_new, &[-1.0]), 1e-4);
        // linear objective: no gradient change
        assert_eq!(tau_from_secant(1e-4, &[1.0], &j_old, &j_old, &[-1.0]), 1e-4);
    }

    #[test]
    fn theta_rules() {
        assert_eq!(theta_from_secant(2.0, 2.0, None), 1.0);
        assert_eq!(theta_from_secant(2.0, -1.0, None), 1.0);
        assert_eq!(theta_from_secant(2.0, 1e-13, None), 1.0);
        assert_eq!(theta_from_secant(2.0, 0.5, None), 4.0);
        assert_eq!(theta_from_secant(2.0, 0.5, Some(3.0)), 3.0);
    }

    #[test]
    fn mdsd_first_step_on_square() {
        let mut cfg = SolverConfig::new(SolverKind::Mdsd);
        cfg.max_iters = 1;
        let tr = solve(&Square, &[1.0], &cfg);
        assert_eq!(tr.records[0].modifier, 1e-4);
        // tau = 1e-4 makes d = -2e4; backtracks to t = 2^-15 so that x+ = 1 - 2e4 * 2^-15
        let t = tr.records[0].t.unwrap();
        let x1 = 1.0 - 2e4 * t;
        assert!(x1 * x1 < 1.0);
        assert_eq!(tr.final_x, vec![x1]);
        // secant of x^2 is exactly 2 regardless of the step
        assert_eq!(tr.records[1].modifier, 2.0);
    }

    #[test]
    fn msd2_single_objective_quadratic() {
        let tr = run_msd2(&Square, &[1.0], &SolverConfig::default());
        assert_eq!(tr.status, Status::Converged);
        assert_eq!(tr.counters.iterations, 1);
        assert_eq!(tr.records[0].t, Some(0.5));
        assert_eq!(tr.records[0].modifier, 1.0);
        assert_eq!(tr.final_x, vec![0.0]);
    }

    #[test]
    fn msd2_jos1_from_three_is_one_step() {
        for n in [3, 10, 50] {
            let p = get_problem("JOS1", Some(n)).unwrap();
            let tr = run_msd2(&p, &vec![3.0; n], &SolverConfig::default());
            assert_eq!(tr.status, Status::Converged);
            assert_eq!(tr.counters.iterations, 1);
            assert_eq!(tr.records[0].t, Some(1.0));
            assert!((tr.records[0].modifier - n as f64 / 2.0).abs() < 1e-9 * n as f64);
            assert!(tr.final_x.iter().all(|&x| (x - 2.0).abs() < 1e-12));
            // F(x0), one trial; J(x0), J(z0), J(x1)
            assert_eq!((tr.counters.f_evals, tr.counters.g_evals), (2, 3));
        }
    }

    #[test]
    fn msd2_falls_back_on_negative_curvature() {
        // single concave objective -x^2: q < 0 so the MSD step is taken unchanged
        struct Cap;
        impl Problem for Cap {
            fn name(&self) -> &str {
                "cap"
            }
            fn num_objectives(&self) -> usize {
                1
            }
            fn dim(&self) -> usize {
                1
            }
            fn lower_bound(&self) -> &[f64] {
                &[-1.0]
            }
            fn upper_bound(&self) -> &[f64] {
                &[1.0]
            }
            fn is_convex(&self) -> bool {
                false
            }
            fn evaluate(&self, x: &[f64], out: &mut [f64]) {
                out[0] = -x[0] * x[0];
            }
            fn jacobian(&self, x: &[f64], jac: &mut Jacobian) {
                jac.set(0, 0, -2.0 * x[0]);
            }
        }
        let mut cfg = SolverConfig::new(SolverKind::Msd2);
        cfg.max_iters = 1;
        let tr = solve(&Cap, &[1.0], &cfg);
        let msd = run_msd(&Cap, &[1.0], &cfg);
        assert_eq!(tr.records[0].modifier, 1.0);
        assert_eq!(tr.final_x, msd.final_x);
        assert_eq!(tr.final_x, vec![3.0]);
    }

    #[test]
    fn iteration_cap_and_record_count() {
        let p = get_problem("JOS1", Some(200)).unwrap();
        let mut cfg = SolverConfig::new(SolverKind::Msd);
        cfg.max_iters = 25;
        let tr = solve(&p, &vec![50.0; 200], &cfg);
        assert_eq!(tr.status, Status::IterationCap);
        assert_eq!(tr.counters.iterations, 25);
        assert_eq!(tr.records.len(), 26);
        assert!(tr.counters.f_evals >= tr.counters.iterations);
    }

    #[test]
    fn non_finite_start_is_numerical_failure() {
        let p = get_problem("BK1", None).unwrap();
        let tr = run_msd(&p, &[f64::NAN, 0.0], &SolverConfig::default());
        assert_eq!(tr.status, Status::NumericalFailure);
        let p = get_problem("MMR1", None).unwrap();
        let tr = run_msd(&p, &[0.0, 0.5], &SolverConfig::default());
        assert_eq!(tr.status, Status::NumericalFailure);
    }

    #[test]
    fn monotone_descent_and_positive_modifiers() {
        let spec = SamplerSpec { seed: 11, count: 5 };
        for name in ["Far1", "SP1", "Lov3", "AP4", "FDS"] {
            let p = get_problem(name, None).unwrap();
            for x0 in sample_starts(&p, &spec) {
                for kind in SolverKind::ALL {
                    let mut cfg = SolverConfig::new(kind);
                    cfg.max_iters = 200;
                    let tr = solve(&p, &x0, &cfg);
                    assert!(tr.records.iter().all(|r| r.modifier > 0.0));
                    assert!(tr.records.iter().all(|r| r.gamma <= cfg.dual_tol));
                    if tr.converged() {
                        let again = solve_dual(&p.gradients(&tr.final_x), cfg.dual_tol, cfg.dual_max_iters);
                        assert!(again.gamma.abs() <= cfg.gamma_tol);
                    }
                    if kind == SolverKind::Msd2 {
                        continue;
                    }
                    for w in tr.records.windows(2) {
                        let (a, b) = (w[0].f.as_ref().unwrap(), w[1].f.as_ref().unwrap());
                        assert!(b.iter().zip(a).all(|(new, old)| new < old), "{name} {kind}");
                    }
                }
            }
        }
    }
}
