//! Independent oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    /// `m x n` matrix with entries uniform in `[lo, hi]`.
    pub fn matrix(&mut self, m: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
        (0..m).map(|_| (0..n).map(|_| self.uniform(lo, hi)).collect()).collect()
    }
}

fn gram(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

fn dual_objective(g: &[Vec<f64>], lam: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            s += lam[i] * lam[j] * g[i][j];
        }
    }
    0.5 * s
}

/// Calls `f` on every point of the simplex grid with spacing `1 / steps`.
fn for_each_grid_point(m: usize, steps: usize, f: &mut dyn FnMut(&[f64])) {
    fn rec(m: usize, steps: usize, left: usize, prefix: &mut Vec<usize>, f: &mut dyn FnMut(&[f64])) {
        if prefix.len() == m - 1 {
            let mut lam: Vec<f64> = prefix.iter().map(|&k| k as f64 / steps as f64).collect();
            lam.push(left as f64 / steps as f64);
            f(&lam);
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(m, steps, left - k, prefix, f);
            prefix.pop();
        }
    }
    rec(m, steps, steps, &mut Vec::with_capacity(m), f);
}

/// Minimum of `1/2 |sum_i lam_i g_i|^2` over the simplex by exhaustive grid search
/// followed by pairwise coordinate refinement.
///
/// The grid spacing is 1e-3 for `m <= 3` and 1e-2 for `m = 4`; refinement moves
/// weight between pairs of coordinates with a shrinking step down to 1e-12.
pub fn brute_force_dual(rows: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let m = rows.len();
    let g = gram(rows);
    if m == 1 {
        return (dual_objective(&g, &[1.0]), vec![1.0]);
    }
    let steps = if m <= 3 { 1000 } else { 100 };
    let mut best = (f64::INFINITY, vec![0.0; m]);
    for_each_grid_point(m, steps, &mut |lam| {
        let v = dual_objective(&g, lam);
        if v < best.0 {
            best = (v, lam.to_vec());
        }
    });

    let (mut val, mut lam) = best;
    let mut h = 1.0 / steps as f64;
    while h > 1e-12 {
        let mut improved = false;
        for i in 0..m {
            for j in 0..m {
                if i == j || lam[j] <= 0.0 {
                    continue;
                }
                let step = h.min(lam[j]);
                let mut trial = lam.clone();
                trial[i] += step;
                trial[j] -= step;
                let tv = dual_objective(&g, &trial);
                if tv < val {
                    val = tv;
                    lam = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (val, lam)
}

/// Least-squares fit of `y = a + b x`; returns `(a, b, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (a, b, r2)
}
