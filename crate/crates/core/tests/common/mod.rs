//! Reference implementations used as test oracles. None of these call into
//! the library's own objective, W-step or cache code.

#![allow(dead_code)]

use itertools::Itertools;
use permusmooth::DataMatrix;
use rand::Rng;

/// Σ_d w_d Σ_t (x[σ(t+1), d] − x[σ(t), d])², written as plain loops.
pub fn tour_cost(x: &DataMatrix, sigma: &[usize], w: &[f64], periodic: bool) -> f64 {
    let n = sigma.len();
    let edges = if periodic { n } else { n - 1 };
    let mut total = 0.0;
    for t in 0..edges {
        let (a, b) = (sigma[t], sigma[(t + 1) % n]);
        for (d, wd) in w.iter().enumerate() {
            let diff = x.get(b, d) - x.get(a, d);
            total += wd * diff * diff;
        }
    }
    total
}

pub fn per_dim_scores(x: &DataMatrix, sigma: &[usize], periodic: bool) -> Vec<f64> {
    (0..x.cols())
        .map(|d| {
            let mut e = vec![0.0; x.cols()];
            e[d] = 1.0;
            tour_cost(x, sigma, &e, periodic)
        })
        .collect()
}

pub fn entropy_term(w: &[f64]) -> f64 {
    w.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum()
}

pub fn full_objective(scores: &[f64], w: &[f64], eps: f64) -> f64 {
    scores.iter().zip(w).map(|(s, w)| s * w).sum::<f64>() + eps * entropy_term(w)
}

/// min over the simplex of `s·w + ε Σ w ln w`, via the convex-conjugate
/// identity `-ε ln Σ exp(-s/ε)` evaluated stably.
pub fn entropic_min_value(scores: &[f64], eps: f64) -> f64 {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = scores.iter().map(|s| (-(s - lo) / eps).exp()).sum();
    lo - eps * sum.ln()
}

#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Damped Newton minimizer of `Σ s_d w_d + ε Σ w_d ln w_d` over
/// `{w ≥ 0, Σ w = mass}`, parameterized by the first `D − 1` coordinates.
pub fn newton_simplex(scores: &[f64], eps: f64, mass: f64) -> Vec<f64> {
    let n = scores.len();
    if n == 1 {
        return vec![mass];
    }
    let m = n - 1;
    let mut w = vec![mass / n as f64; n];
    let f = |w: &[f64]| -> f64 {
        w.iter()
            .zip(scores)
            .map(|(w, s)| s * w + eps * w * w.ln())
            .sum()
    };
    for _ in 0..500 {
        let last = w[m];
        let grad: Vec<f64> = (0..m)
            .map(|k| scores[k] - scores[m] + eps * (w[k].ln() - last.ln()))
            .collect();
        let hess: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| eps * (if i == j { 1.0 / w[i] } else { 0.0 } + 1.0 / last))
                    .collect()
            })
            .collect();
        let step = solve_dense(hess, grad.iter().map(|g| -g).collect());
        let decrement: f64 = -step.iter().zip(&grad).map(|(s, g)| s * g).sum::<f64>();
        if decrement < 1e-24 {
            break;
        }
        let mut full: Vec<f64> = step.clone();
        full.push(-step.iter().sum::<f64>());
        // Largest step keeping every coordinate positive, with a margin.
        let mut alpha: f64 = 1.0;
        for (wi, di) in w.iter().zip(&full) {
            if *di < 0.0 {
                alpha = alpha.min(0.99 * wi / -di);
            }
        }
        let f0 = f(&w);
        loop {
            let trial: Vec<f64> = w
                .iter()
                .zip(&full)
                .map(|(wi, di)| wi + alpha * di)
                .collect();
            if f(&trial) <= f0 - 1e-4 * alpha * decrement || alpha < 1e-12 {
                w = trial;
                break;
            }
            alpha *= 0.5;
        }
    }
    w
}

/// Every ordering of `0..n`.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).permutations(n)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DataMatrix {
    let v = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DataMatrix::from_shape_vec(rows, cols, v).unwrap()
}

/// A random doubly-stochastic matrix from Sinkhorn balancing of positive entries.
pub fn sinkhorn<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| rng.gen_range(0.01..1.0f64).powi(3))
                .collect()
        })
        .collect();
    for _ in 0..2000 {
        for row in m.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        for c in 0..n {
            let s: f64 = m.iter().map(|r| r[c]).sum();
            m.iter_mut().for_each(|r| r[c] /= s);
        }
        let worst = m
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        if worst < 1e-14 {
            break;
        }
    }
    m
}

/// Relaxed objective for a soft ordering `p` (rows of `p x` are the ordered samples).
pub fn relaxed_objective(p: &[Vec<f64>], x: &DataMatrix, w: &[f64], eps: f64) -> f64 {
    let n = p.len();
    let px: Vec<Vec<f64>> = (0..n)
        .map(|t| {
            (0..x.cols())
                .map(|d| (0..n).map(|s| p[t][s] * x.get(s, d)).sum())
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for t in 0..n {
        for (d, wd) in w.iter().enumerate() {
            let diff = px[(t + 1) % n][d] - px[t][d];
            total += wd * diff * diff;
        }
    }
    total + eps * entropy_term(w)
}
