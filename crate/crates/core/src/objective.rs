//! Per-dimension non-smoothness and the entropy-regularized objective
//!
//! ```text
//! S_d = Σ_t (X[σ(t+1), d] - X[σ(t), d])²
//! F   = Σ_d w_d S_d + ε Σ_d w_d ln w_d
//! ```
//!
//! The quadratic form `x' P' Δ' Δ P x` is never assembled as a matrix: it is
//! the sum of squared successor differences of the permuted column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::permutation::PermutationVector;
use crate::weights::{FeatureWeights, SIMPLEX_TOLERANCE};

/// Boundary condition of the differencing operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// The last position neighbours the first; `Δ'Δ` is the ring Laplacian.
    #[default]
    Periodic,
    /// No wrap edge between the last and the first position.
    Open,
}

impl Boundary {
    pub fn is_periodic(self) -> bool {
        self == Boundary::Periodic
    }

    /// Number of successor edges on `n` positions.
    pub fn edge_count(self, n: usize) -> usize {
        match self {
            Boundary::Periodic => n,
            Boundary::Open => n.saturating_sub(1),
        }
    }
}

/// Evaluated objective with its parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    /// `S_d` for every dimension.
    pub s_per_dim: Vec<f64>,
    /// `Σ_d w_d S_d`.
    pub expected_nonsmoothness: f64,
    /// `Σ_d w_d ln w_d` (natural log).
    pub entropy_term: f64,
    /// `expected_nonsmoothness + epsilon * entropy_term`.
    pub f_total: f64,
    pub epsilon: f64,
}

impl ObjectiveBreakdown {
    /// Assembles the breakdown from precomputed `S_d` values.
    pub fn from_scores(s_per_dim: Vec<f64>, w: &FeatureWeights, epsilon: f64) -> Self {
        let expected_nonsmoothness = weighted_sum(&s_per_dim, w.as_slice());
        let entropy_term = w.entropy_term();
        Self {
            s_per_dim,
            expected_nonsmoothness,
            entropy_term,
            f_total: expected_nonsmoothness + epsilon * entropy_term,
            epsilon,
        }
    }

    /// Shannon entropy `-Σ w ln w`.
    pub fn shannon_entropy(&self) -> f64 {
        // Subtraction from +0 avoids printing a negative zero.
        0.0 - self.entropy_term
    }
}

pub(crate) fn weighted_sum(s: &[f64], w: &[f64]) -> f64 {
    s.iter().zip(w).map(|(s, w)| s * w).sum()
}

/// `S_d` for every column of `x` under the ordering `sigma`.
pub fn per_dim_nonsmoothness(
    x: &DataMatrix,
    sigma: &PermutationVector,
    boundary: Boundary,
) -> Result<Vec<f64>> {
    let n = x.rows();
    if sigma.len() != n {
        return Err(Error::Shape(format!(
            "permutation has length {} but data has {n} rows",
            sigma.len()
        )));
    }
    let order = sigma.as_slice();
    let mut s = vec![0.0; x.cols()];
    for e in 0..boundary.edge_count(n) {
        let a = x.row(order[e]);
        let b = x.row(order[(e + 1) % n]);
        for ((acc, &xa), &xb) in s.iter_mut().zip(a).zip(b) {
            let diff = xb - xa;
            *acc += diff * diff;
        }
    }
    Ok(s)
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )))
    }
}

/// Full objective `F(w, sigma)` for data `x`.
pub fn objective(
    x: &DataMatrix,
    sigma: &PermutationVector,
    w: &FeatureWeights,
    epsilon: f64,
    boundary: Boundary,
) -> Result<ObjectiveBreakdown> {
    check_epsilon(epsilon)?;
    if w.len() != x.cols() {
        return Err(Error::Shape(format!(
            "{} weights for {} dimensions",
            w.len(),
            x.cols()
        )));
    }
    let total: f64 = w.as_slice().iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOLERANCE || w.as_slice().iter().any(|&v| v < 0.0) {
        return Err(Error::Input(format!(
            "weights are off the simplex (sum {total})"
        )));
    }
    let s = per_dim_nonsmoothness(x, sigma, boundary)?;
    Ok(ObjectiveBreakdown::from_scores(s, w, epsilon))
}
