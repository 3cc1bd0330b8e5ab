//! Steepest common descent direction.
//!
//! The direction `v(x) = argmin_d max_i <grad F_i(x), d> + |d|^2 / 2` is recovered from
//! the dual problem `min_{lambda in simplex} |sum_i lambda_i grad F_i(x)|^2 / 2` as
//! `v(x) = -sum_i lambda_i grad F_i(x)`. The dual is solved with a conditional-gradient
//! (Frank-Wolfe) method working on the `m x m` Gram matrix of the gradients, so the
//! cost per iteration does not depend on `n`.

use serde::{Deserialize, Serialize};

use crate::types::{dot, norm_sq, Jacobian};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubproblemSolution {
    /// Simplex weights of the dual problem.
    pub lambda: Vec<f64>,
    /// Steepest descent direction `v(x)`.
    pub v: Vec<f64>,
    /// Optimal value `psi(x, v) + |v|^2 / 2` of the direction subproblem.
    pub gamma: f64,
    pub psi_at_v: f64,
    /// Frank-Wolfe duality gap at the returned weights. Equals `psi_at_v + |v|^2`.
    pub gap: f64,
    pub iterations: usize,
    /// Set when the iteration cap was reached before the gap fell below tolerance.
    pub inexact: bool,
}

impl SubproblemSolution {
    pub fn v_norm(&self) -> f64 {
        norm_sq(&self.v).sqrt()
    }

    /// Value of the dual objective, `|v|^2 / 2`.
    pub fn dual_value(&self) -> f64 {
        0.5 * norm_sq(&self.v)
    }
}

/// `psi(x, d) = max_i <grad F_i(x), d>`.
pub fn psi(jac: &Jacobian, d: &[f64]) -> f64 {
    assert_eq!(jac.ncols(), d.len(), "direction has wrong dimension");
    jac.rows().map(|g| dot(g, d)).fold(f64::NEG_INFINITY, f64::max)
}

/// `|gamma| <= gamma_tol`.
pub fn is_critical(sol: &SubproblemSolution, gamma_tol: f64) -> bool {
    sol.gamma.abs() <= gamma_tol
}

/// Solves the dual direction problem. Two objectives are handled in closed form,
/// everything else goes through [`frank_wolfe`].
pub fn solve_dual(jac: &Jacobian, dual_tol: f64, dual_max_iters: usize) -> SubproblemSolution {
    match jac.nrows() {
        1 => from_weights(jac, vec![1.0], 0, false),
        2 => two_objective(jac),
        _ => frank_wolfe(jac, dual_tol, dual_max_iters),
    }
}

fn two_objective(jac: &Jacobian) -> SubproblemSolution {
    let (g1, g2) = (jac.row(0), jac.row(1));
    // minimizer of |l g1 + (1-l) g2|^2 / 2: l = <g2, g2 - g1> / |g1 - g2|^2 and
    // 1 - l = <g1, g1 - g2> / |g1 - g2|^2
    let diff_sq: f64 = g1.iter().zip(g2).map(|(a, b)| (a - b) * (a - b)).sum();
    let weights = if diff_sq > 0.0 {
        let num1: f64 = g2.iter().zip(g1).map(|(b, a)| b * (b - a)).sum();
        let num2: f64 = g1.iter().zip(g2).map(|(a, b)| a * (a - b)).sum();
        // the smaller weight comes from its own numerator; 1 - l would cancel
        if num1 <= num2 {
            let l = (num1 / diff_sq).clamp(0.0, 1.0);
            vec![l, 1.0 - l]
        } else {
            let l = (num2 / diff_sq).clamp(0.0, 1.0);
            vec![1.0 - l, l]
        }
    } else {
        vec![0.5, 0.5]
    };
    from_weights(jac, weights, 0, false)
}

/// Away-step Frank-Wolfe with exact line search on the simplex, started from the
/// barycenter. Stops when the Frank-Wolfe gap `<grad, lambda - e_s>` drops to `tol`.
/// Ties in the vertex oracles go to the lowest index.
///
/// Once `STALL_ITERS` steps have not closed the gap, every further step is followed
/// by a move to the minimizer over the current face (see [`correct_on_face`]); thin,
/// nearly degenerate gradient sets otherwise stall the away steps.
pub fn frank_wolfe(jac: &Jacobian, tol: f64, max_iters: usize) -> SubproblemSolution {
    let m = jac.nrows();
    let gram = gram_matrix(jac);
    let g = |i: usize, j: usize| gram[i * m + j];

    let mut lambda = vec![1.0 / m as f64; m];
    let mut grad = vec![0.0; m];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        mat_vec(&gram, &lambda, &mut grad);
        let lg = dot(&lambda, &grad);

        let s = argmin(&grad);
        let fw_gap = lg - grad[s];
        if fw_gap <= tol {
            converged = true;
            break;
        }
        let a = (0..m)
            .filter(|&i| lambda[i] > 0.0)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if grad[b] >= grad[i] => Some(b),
                _ => Some(i),
            })
            .expect("simplex weights cannot all vanish");
        let away_gap = grad[a] - lg;

        iterations += 1;
        if fw_gap >= away_gap {
            // toward e_s
            let curv = g(s, s) - 2.0 * grad[s] + lg;
            let step = if curv > 0.0 { (fw_gap / curv).min(1.0) } else { 1.0 };
            for (i, l) in lambda.iter_mut().enumerate() {
                *l *= 1.0 - step;
                if i == s {
                    *l += step;
                }
            }
        } else {
            // away from e_a
            let la = lambda[a];
            let max_step = la / (1.0 - la);
            let curv = g(a, a) - 2.0 * grad[a] + lg;
            let step = if curv > 0.0 {
                (away_gap / curv).min(max_step)
            } else {
                max_step
            };
            for (i, l) in lambda.iter_mut().enumerate() {
                *l *= 1.0 + step;
                if i == a {
                    *l -= step;
                }
            }
            if step >= max_step {
                lambda[a] = 0.0;
            }
        }
        for l in lambda.iter_mut() {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        let total: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|l| *l /= total);
        if iterations >= STALL_ITERS {
            correct_on_face(&gram, &mut lambda);
        }
    }

    if !converged {
        mat_vec(&gram, &lambda, &mut grad);
        converged = dot(&lambda, &grad) - grad[argmin(&grad)] <= tol;
    }
    from_weights(jac, lambda, iterations, !converged)
}

/// Away steps taken before fully corrective steps are switched on.
const STALL_ITERS: usize = 200;

fn dual_objective(gram: &[f64], lambda: &[f64]) -> f64 {
    let mut out = vec![0.0; lambda.len()];
    mat_vec(gram, lambda, &mut out);
    0.5 * dot(lambda, &out)
}

/// Fully corrective step: replaces `lambda` by the minimizer over the face spanned
/// by its support, following the segment toward the affine minimizer of the support
/// and dropping the first weight that reaches zero until that minimizer is feasible.
/// Leaves `lambda` unchanged when the support is affinely dependent.
fn correct_on_face(gram: &[f64], lambda: &mut [f64]) {
    let before = dual_objective(gram, lambda);
    let mut current = lambda.to_vec();
    loop {
        let support: Vec<usize> = (0..current.len()).filter(|&i| current[i] > 0.0).collect();
        if support.len() < 2 {
            break;
        }
        let Some(mu) = affine_minimizer(gram, current.len(), &support) else {
            break;
        };
        let blocking = support
            .iter()
            .zip(&mu)
            .filter(|(_, &m)| m < 0.0)
            .map(|(&i, &m)| (current[i] / (current[i] - m), i))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match blocking {
            None => {
                current.fill(0.0);
                for (&i, &m) in support.iter().zip(&mu) {
                    current[i] = m;
                }
                break;
            }
            Some((alpha, drop)) => {
                for (&i, &m) in support.iter().zip(&mu) {
                    current[i] += alpha * (m - current[i]);
                }
                current[drop] = 0.0;
                current.iter_mut().for_each(|l| *l = l.max(0.0));
            }
        }
    }
    let total: f64 = current.iter().sum();
    if total > 0.0 {
        current.iter_mut().for_each(|l| *l /= total);
        if dual_objective(gram, &current) <= before {
            lambda.copy_from_slice(&current);
        }
    }
}

/// Minimizer of `mu^T G_S mu / 2` subject to `sum(mu) = 1` over the index set `S`,
/// from the KKT system `[G_S 1; 1^T 0] [mu; -nu] = [0; 1]`. `None` when the system
/// is numerically singular.
fn affine_minimizer(gram: &[f64], m: usize, support: &[usize]) -> Option<Vec<f64>> {
    let k = support.len();
    let w = k + 2;
    let mut a = vec![0.0; (k + 1) * w];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r * w + c] = gram[i * m + j];
        }
        a[r * w + k] = 1.0;
        a[k * w + r] = 1.0;
    }
    a[k * w + k + 1] = 1.0;
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));

    for col in 0..=k {
        let pivot = (col..=k)
            .max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))
            .expect("nonempty range");
        if a[pivot * w + col].abs() <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for c in 0..w {
                a.swap(pivot * w + c, col * w + c);
            }
        }
        for r in 0..=k {
            if r != col {
                let f = a[r * w + col] / a[col * w + col];
                if f != 0.0 {
                    for c in col..w {
                        a[r * w + c] -= f * a[col * w + c];
                    }
                }
            }
        }
    }
    Some((0..k).map(|r| a[r * w + k + 1] / a[r * w + r]).collect())
}

fn from_weights(
    jac: &Jacobian,
    mut lambda: Vec<f64>,
    iterations: usize,
    inexact: bool,
) -> SubproblemSolution {
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);

    let mut v = vec![0.0; jac.ncols()];
    for (g, &l) in jac.rows().zip(&lambda) {
        if l != 0.0 {
            for (vj, gj) in v.iter_mut().zip(g) {
                *vj -= l * gj;
            }
        }
    }
    let psi_at_v = psi(jac, &v);
    let v_sq = norm_sq(&v);
    SubproblemSolution {
        lambda,
        gamma: psi_at_v + 0.5 * v_sq,
        psi_at_v,
        gap: psi_at_v + v_sq,
        v,
        iterations,
        inexact,
    }
}

fn gram_matrix(jac: &Jacobian) -> Vec<f64> {
    let m = jac.nrows();
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let v = dot(jac.row(i), jac.row(j));
            gram[i * m + j] = v;
            gram[j * m + i] = v;
        }
    }
    gram
}

fn mat_vec(mat: &[f64], x: &[f64], out: &mut [f64]) {
    let m = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot(&mat[i * m..(i + 1) * m], x);
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
