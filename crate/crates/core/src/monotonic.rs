//! Monotone orderings of the weighted aggregate column.
//!
//! Replaces the non-smoothness by the linear score `-t̄' P B` with
//! `B = Σ_d w_d X[:, d]`:
//!
//! ```text
//! M(w, σ) = -Σ_t t̄_t B[σ(t)] + ε Σ_d w_d ln w_d
//! ```
//!
//! For fixed `w` the best ordering sorts `B` into the order of the reference
//! sequence `t̄` (rearrangement inequality), so a P-step costs `O(T log T)`.
//! `M` is linear in `w` with per-dimension scores `b_d = -t̄' P X[:, d]`,
//! and the W-step is the same Gibbs form as for the non-smoothness objective.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::objective::{check_epsilon, ObjectiveBreakdown};
use crate::optimizer::{w_step, FitResult};
use crate::permutation::PermutationVector;
use crate::weights::FeatureWeights;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicConfig {
    pub epsilon: f64,
    pub direction: Direction,
    /// Strictly monotone reference sequence; `None` means `1..=T` (reversed when descending).
    pub tbar: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: u64,
    /// Restart 0 starts from uniform weights, later restarts from random weights.
    pub restarts: usize,
}

impl MonotonicConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            direction: Direction::Ascending,
            tbar: None,
            tol: None,
            max_iters: None,
            seed: 0,
            restarts: 1,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The reference sequence for `rows` instances.
    pub fn reference(&self, rows: usize) -> Result<Vec<f64>> {
        let tbar = match &self.tbar {
            Some(t) => t.clone(),
            None => {
                let asc = (1..=rows).map(|t| t as f64);
                match self.direction {
                    Direction::Ascending => asc.collect(),
                    Direction::Descending => asc.rev().collect(),
                }
            }
        };
        if tbar.len() != rows {
            return Err(Error::Shape(format!(
                "reference sequence has length {} but data has {rows} rows",
                tbar.len()
            )));
        }
        let increasing = tbar.windows(2).all(|p| p[0] < p[1]);
        let decreasing = tbar.windows(2).all(|p| p[0] > p[1]);
        if !(increasing || decreasing) || tbar.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(
                "reference sequence must be finite and strictly monotone".into(),
            ));
        }
        Ok(tbar)
    }
}

/// `B = Σ_d w_d X[:, d]`.
pub fn aggregate(x: &DataMatrix, w: &FeatureWeights) -> Result<Vec<f64>> {
    if w.len() != x.cols() {
        return Err(Error::Shape(format!(
            "{} weights for {} dimensions",
            w.len(),
            x.cols()
        )));
    }
    Ok((0..x.rows())
        .map(|t| x.row(t).iter().zip(w.as_slice()).map(|(v, w)| v * w).sum())
        .collect())
}

/// Stable ascending argsort; equal values keep index order.
fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// The ordering `σ` maximizing `Σ_t t̄_t B[σ(t)]`: the `k`-th smallest entry of
/// `B` goes to the position holding the `k`-th smallest entry of `t̄`.
pub fn sort_step(b: &[f64], tbar: &[f64]) -> Result<PermutationVector> {
    if b.len() != tbar.len() {
        return Err(Error::Shape(format!(
            "aggregate of length {} and reference of length {}",
            b.len(),
            tbar.len()
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("aggregate column must be finite".into()));
    }
    let mut sigma = vec![0; b.len()];
    for (&pos, &row) in argsort(tbar).iter().zip(&argsort(b)) {
        sigma[pos] = row;
    }
    PermutationVector::new(sigma)
}

/// Linear scores `b_d = -Σ_t t̄_t X[σ(t), d]`.
pub fn monotonic_scores(x: &DataMatrix, sigma: &PermutationVector, tbar: &[f64]) -> Vec<f64> {
    let mut scores = vec![0.0; x.cols()];
    for (t, &row) in sigma.as_slice().iter().enumerate() {
        for (s, &v) in scores.iter_mut().zip(x.row(row)) {
            *s -= tbar[t] * v;
        }
    }
    scores
}

/// Alternates sort steps and W-steps; returns the best restart.
///
/// The returned breakdown carries the linear scores `b_d` in `s_per_dim` and
/// the expected monotonicity term `Σ_d w_d b_d` in `expected_nonsmoothness`.
pub fn fit_monotonic(x: &DataMatrix, config: &MonotonicConfig) -> Result<FitResult> {
    check_epsilon(config.epsilon)?;
    if config.restarts == 0 {
        return Err(Error::Parameter("restarts must be at least 1".into()));
    }
    let tbar = config.reference(x.rows())?;
    let mut best: Option<FitResult> = None;
    for k in 0..config.restarts {
        let run = fit_monotonic_restart(x, config, &tbar, k)?;
        if best.as_ref().is_none_or(|b| run.f_total() < b.f_total()) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn fit_monotonic_restart(
    x: &DataMatrix,
    config: &MonotonicConfig,
    tbar: &[f64],
    k: usize,
) -> Result<FitResult> {
    let eps = config.epsilon;
    let mut w = if k == 0 {
        FeatureWeights::uniform(x.cols())
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(k as u64);
        FeatureWeights::random(x.cols(), &mut rng)
    };
    let mut sigma = PermutationVector::identity(x.rows());
    let mut breakdown = ObjectiveBreakdown::from_scores(monotonic_scores(x, &sigma, tbar), &w, eps);
    let tol = config
        .tol
        .unwrap_or_else(|| (1e-9 * breakdown.f_total.abs()).max(1e-12));
    let max_iters = config.max_iters.unwrap_or(10 * x.rows() * x.rows());
    let mut trace = vec![breakdown.f_total];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        sigma = sort_step(&aggregate(x, &w)?, tbar)?;
        let scores = monotonic_scores(x, &sigma, tbar);
        w = w_step(&scores, eps);
        let next = ObjectiveBreakdown::from_scores(scores, &w, eps);
        let decrease = breakdown.f_total - next.f_total;
        breakdown = next;
        trace.push(breakdown.f_total);
        iterations += 1;
        // Equal-objective cycling counts as converged.
        if decrease <= tol {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        sigma,
        w,
        trace,
        breakdown,
        iterations,
        converged,
        restart_index: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::Rng;

    fn tbar(n: usize) -> Vec<f64> {
        (1..=n).map(|t| t as f64).collect()
    }

    fn inner(tbar: &[f64], b: &[f64], sigma: &[usize]) -> f64 {
        tbar.iter().zip(sigma).map(|(t, &s)| t * b[s]).sum()
    }

    #[test]
    fn aggregate_examples() {
        let x = DataMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(
            aggregate(&x, &FeatureWeights::uniform(2)).unwrap(),
            vec![1.0; 3]
        );
        assert_eq!(
            aggregate(&x, &FeatureWeights::point_mass(2, 1)).unwrap(),
            vec![2.0, 0.0, 2.0]
        );
        // Constant aggregate: every ordering ties, the index tie-break gives the identity.
        let sigma = sort_step(&[1.0; 3], &tbar(3)).unwrap();
        assert_eq!(sigma, PermutationVector::identity(3));
    }

    #[test]
    fn sorted_and_reversed_inputs() {
        assert_eq!(
            sort_step(&[1.0, 2.0, 5.0, 9.0], &tbar(4)).unwrap(),
            PermutationVector::identity(4)
        );
        assert_eq!(
            sort_step(&[9.0, 5.0, 2.0, 1.0], &tbar(4)).unwrap(),
            PermutationVector::identity(4).reversed()
        );
        let desc: Vec<f64> = tbar(4).into_iter().rev().collect();
        assert_eq!(
            sort_step(&[1.0, 2.0, 5.0, 9.0], &desc).unwrap(),
            PermutationVector::identity(4).reversed()
        );
    }

    #[test]
    fn sort_step_is_optimal_by_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=7 {
            for _ in 0..10 {
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let t = tbar(n);
                let sigma = sort_step(&b, &t).unwrap();
                let got = inner(&t, &b, sigma.as_slice());
                for p in (0..n).permutations(n) {
                    assert!(got >= inner(&t, &b, &p) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_column_matches_standard_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let col: Vec<f64> = (0..40).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = DataMatrix::from_rows(&col.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap();
        let r = fit_monotonic(&x, &MonotonicConfig::new(1.0)).unwrap();
        let mut sorted = col.clone();
        sorted.sort_by(f64::total_cmp);
        let got: Vec<f64> = r.sigma.as_slice().iter().map(|&s| col[s]).collect();
        assert_eq!(got, sorted);

        let r = fit_monotonic(
            &x,
            &MonotonicConfig::new(1.0).with_direction(Direction::Descending),
        )
        .unwrap();
        let got: Vec<f64> = r.sigma.as_slice().iter().map(|&s| col[s]).collect();
        sorted.reverse();
        assert_eq!(got, sorted);
    }

    #[test]
    fn identical_columns_keep_uniform_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let col: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x =
            DataMatrix::from_rows(&col.iter().map(|&v| vec![v; 3]).collect::<Vec<_>>()).unwrap();
        let r = fit_monotonic(&x, &MonotonicConfig::new(0.5)).unwrap();
        for &w in r.w.as_slice() {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(3..30);
            let d = rng.gen_range(1..6);
            let v = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = DataMatrix::from_shape_vec(n, d, v).unwrap();
            let r = fit_monotonic(
                &x,
                &MonotonicConfig::new(rng.gen_range(0.1..5.0)).with_restarts(3),
            )
            .unwrap();
            assert!(
                r.trace.windows(2).all(|p| p[1] <= p[0] + 1e-12),
                "{:?}",
                r.trace
            );
        }
    }

    #[test]
    fn rejects_bad_reference() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let mut cfg = MonotonicConfig::new(1.0);
        cfg.tbar = Some(vec![1.0, 1.0, 2.0]);
        assert!(fit_monotonic(&x, &cfg).is_err());
        cfg.tbar = Some(vec![1.0, 2.0]);
        assert!(fit_monotonic(&x, &cfg).is_err());
        assert!(fit_monotonic(&x, &MonotonicConfig::new(-1.0)).is_err());
    }
}
