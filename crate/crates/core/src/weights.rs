//! Feature probability vectors on the simplex.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Allowed deviation of `Σ w_d` from 1 when accepting external weights.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A probability vector over the `D` feature dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights(Vec<f64>);

impl FeatureWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Input("feature weights must not be empty".into()));
        }
        if let Some((d, v)) = w
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::Input(format!(
                "weight {} is {v}, expected a finite non-negative value",
                d + 1
            )));
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::Input(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self(w))
    }

    /// Wraps weights produced by a normalizing computation in this crate.
    pub(crate) fn from_normalized(w: Vec<f64>) -> Self {
        debug_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self(w)
    }

    pub fn uniform(dims: usize) -> Self {
        Self(vec![1.0 / dims as f64; dims])
    }

    pub fn point_mass(dims: usize, d: usize) -> Self {
        let mut w = vec![0.0; dims];
        w[d] = 1.0;
        Self(w)
    }

    /// Uniform mass `1 - pinned_weight` over every dimension except `pinned`.
    pub fn uniform_pinned(dims: usize, pinned: usize, pinned_weight: f64) -> Self {
        let free = (1.0 - pinned_weight) / (dims - 1) as f64;
        let mut w = vec![free; dims];
        w[pinned] = pinned_weight;
        Self(w)
    }

    /// Random point on the simplex from normalized exponential draws (flat Dirichlet).
    pub fn random<R: Rng + ?Sized>(dims: usize, rng: &mut R) -> Self {
        let draws: Vec<f64> = (0..dims)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln() + f64::MIN_POSITIVE)
            .collect();
        let total: f64 = draws.iter().sum();
        Self(draws.into_iter().map(|v| v / total).collect())
    }

    /// Random weights with `w[pinned] = pinned_weight` and the rest spread randomly.
    pub fn random_pinned<R: Rng + ?Sized>(
        dims: usize,
        pinned: usize,
        pinned_weight: f64,
        rng: &mut R,
    ) -> Self {
        let free = Self::random(dims - 1, rng).0;
        let mut w = Vec::with_capacity(dims);
        let mut it = free.into_iter();
        for d in 0..dims {
            w.push(if d == pinned {
                pinned_weight
            } else {
                (1.0 - pinned_weight) * it.next().unwrap()
            });
        }
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `Σ_d w_d ln w_d` with `0 ln 0 = 0`; lies in `[-ln D, 0]`.
    pub fn entropy_term(&self) -> f64 {
        self.0
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * w.ln())
            .sum()
    }
}

impl AsRef<[f64]> for FeatureWeights {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Serialize for FeatureWeights {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FeatureWeights {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Self::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}
