//! Multi-objective Armijo backtracking.

use thiserror::Error;

use crate::types::{evaluate_counted, Counters, Problem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Armijo {
    pub rho: f64,
    pub delta: f64,
    pub max_steps: u32,
}

impl Default for Armijo {
    fn default() -> Self {
        Self {
            rho: 1e-4,
            delta: 0.5,
            max_steps: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchResult {
    /// Accepted step `delta^j`.
    pub t: f64,
    /// Function evaluations spent, including the accepted one.
    pub trial_count: u32,
    pub point: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineSearchError {
    #[error("direction is not a descent direction (psi = {0})")]
    NotDescent(f64),
    #[error("no acceptable step after {0} trials")]
    Exhausted(u32),
}

/// Largest `t` in `{1, delta, delta^2, ...}` with
/// `F_i(x + t d) - F_i(x) <= rho * t * psi(x, d)` for every objective `i`.
///
/// `f_x` must already hold `F(x)`; it is not re-evaluated. Each trial costs one
/// counted function evaluation. A trial point where `F` is not finite (outside the
/// domain of a formula) is rejected and the search keeps backtracking.
pub fn armijo<P: Problem + ?Sized>(
    problem: &P,
    x: &[f64],
    f_x: &[f64],
    d: &[f64],
    psi_xd: f64,
    params: Armijo,
    counters: &mut Counters,
) -> Result<LineSearchResult, LineSearchError> {
    if !(psi_xd < 0.0) {
        return Err(LineSearchError::NotDescent(psi_xd));
    }
    let mut point = vec![0.0; x.len()];
    for j in 0..params.max_steps {
        let t = params.delta.powi(j as i32);
        for ((p, xi), di) in point.iter_mut().zip(x).zip(d) {
            *p = xi + t * di;
        }
        let bound = params.rho * t * psi_xd;
        if let Ok(values) = evaluate_counted(problem, &point, counters) {
            if sufficient_decrease(f_x, &values, bound) {
                return Ok(LineSearchResult {
                    t,
                    trial_count: j + 1,
                    point,
                    values,
                });
            }
        }
    }
    Err(LineSearchError::Exhausted(params.max_steps))
}

/// Componentwise Armijo test written on differences, so an accepted step always
/// strictly decreases every objective even when `rho t psi` is below one ulp of `F`.
pub fn sufficient_decrease(f_x: &[f64], f_trial: &[f64], bound: f64) -> bool {
    f_trial.iter().zip(f_x).all(|(new, old)| new - old <= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::get_problem;
    use crate::types::Jacobian;
    use proptest::prelude::*;

    /// `f(x) = c2 x^2 + c1 x` in one variable.
    struct Poly1 {
        c2: f64,
        c1: f64,
    }

    impl Problem for Poly1 {
        fn name(&self) -> &str {
            "poly1"
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
            self.c2 >= 0.0
        }
        fn evaluate(&self, x: &[f64], out: &mut [f64]) {
            out[0] = self.c2 * x[0] * x[0] + self.c1 * x[0];
        }
        fn jacobian(&self, x: &[f64], jac: &mut Jacobian) {
            jac.set(0, 0, 2.0 * self.c2 * x[0] + self.c1);
        }
    }

    #[test]
    fn quadratic_backtracks_once() {
        let p = Poly1 { c2: 1.0, c1: 0.0 };
        let mut c = Counters::default();
        let r = armijo(&p, &[1.0], &[1.0], &[-2.0], -4.0, Armijo::default(), &mut c).unwrap();
        assert_eq!(r.t, 0.5);
        assert_eq!(r.trial_count, 2);
        assert_eq!(r.point, vec![0.0]);
        assert_eq!(r.values, vec![0.0]);
        assert_eq!(c.f_evals, 2);
    }

    #[test]
    fn linear_accepts_unit_step() {
        let p = Poly1 { c2: 0.0, c1: 1.0 };
        let mut c = Counters::default();
        let r = armijo(&p, &[0.0], &[0.0], &[-1.0], -1.0, Armijo::default(), &mut c).unwrap();
        assert_eq!((r.t, r.trial_count), (1.0, 1));
        assert_eq!(c.f_evals, 1);
    }

    #[test]
    fn bk1_from_six_six() {
        let p = get_problem("BK1", None).unwrap();
        let mut c = Counters::default();
        let x = [6.0, 6.0];
        let fx = p.values(&x);
        assert_eq!(fx, vec![72.0, 2.0]);
        let r = armijo(&p, &x, &fx, &[-2.0, -2.0], -8.0, Armijo::default(), &mut c).unwrap();
        assert_eq!((r.t, r.trial_count), (0.5, 2));
        assert_eq!(r.point, vec![5.0, 5.0]);
        assert_eq!(r.values, vec![50.0, 0.0]);
    }

    #[test]
    fn rejects_ascent_direction() {
        let p = Poly1 { c2: 1.0, c1: 0.0 };
        let mut c = Counters::default();
        let err = armijo(&p, &[1.0], &[1.0], &[2.0], 4.0, Armijo::default(), &mut c).unwrap_err();
        assert_eq!(err, LineSearchError::NotDescent(4.0));
        assert_eq!(c.f_evals, 0);
    }

    #[test]
    fn exhaustion_is_reported() {
        // claimed slope far steeper than the true one: nothing is ever accepted
        let p = Poly1 { c2: 0.0, c1: 1.0 };
        let mut c = Counters::default();
        let params = Armijo {
            rho: 0.5,
            delta: 0.5,
            max_steps: 5,
        };
        let err = armijo(&p, &[0.0], &[0.0], &[-1.0], -100.0, params, &mut c).unwrap_err();
        assert_eq!(err, LineSearchError::Exhausted(5));
        assert_eq!(c.f_evals, 5);
    }

    #[test]
    fn non_finite_trials_are_backtracked() {
        // DGO2's second objective is only defined on |x| < 9
        let p = get_problem("DGO2", None).unwrap();
        let x = [8.0];
        let fx = p.values(&x);
        let d = [-20.0];
        let psi_xd = crate::subproblem::psi(&p.gradients(&x), &d);
        let mut c = Counters::default();
        let r = armijo(&p, &x, &fx, &d, psi_xd, Armijo::default(), &mut c).unwrap();
        assert_eq!(r.trial_count, 2);
        assert_eq!(r.point, vec![-2.0]);
        assert!(r.values.iter().all(|v| v.is_finite()));
    }

    proptest! {
        #[test]
        fn accepted_step_is_armijo_and_maximal(
            c2 in 0.01f64..50.0, c1 in -5.0f64..5.0, x0 in -10.0f64..10.0,
        ) {
            let p = Poly1 { c2, c1 };
            let g = 2.0 * c2 * x0 + c1;
            prop_assume!(g.abs() > 1e-6);
            let d = [-g];
            let psi_xd = -g * g;
            let fx = p.values(&[x0]);
            let params = Armijo::default();
            let mut c = Counters::default();
            let r = armijo(&p, &[x0], &fx, &d, psi_xd, params, &mut c).unwrap();

            prop_assert!(r.values[0] - fx[0] <= params.rho * r.t * psi_xd);
            prop_assert_eq!(r.trial_count as u64, c.f_evals);
            prop_assert_eq!(r.t, params.delta.powi(r.trial_count as i32 - 1));
            if r.t < 1.0 {
                let prev = r.t / params.delta;
                let f_prev = p.values(&[x0 + prev * d[0]]);
                prop_assert!(f_prev[0] - fx[0] > params.rho * prev * psi_xd);
            }
        }
    }
}
