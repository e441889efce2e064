//! Two periodic signals hidden among uniform-noise columns, rows scrambled.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::permutation::PermutationVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub rows: usize,
    /// Total columns: two signals plus `dims - 2` noise columns.
    pub dims: usize,
    /// Full periods of the sine and the cosine over the `rows` samples.
    pub periods: [f64; 2],
    /// Phases (radians) of the sine and the cosine.
    pub phases: [f64; 2],
    /// Seeds the noise draws and the row scramble.
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            rows: 50,
            dims: 52,
            periods: [1.0, 2.0],
            phases: [0.0, FRAC_PI_4],
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    /// Signals in their generating order.
    pub smooth: DataMatrix,
    /// `scrambled[t] = smooth[true_sigma(t)]`.
    pub scrambled: DataMatrix,
    pub true_sigma: PermutationVector,
}

impl SyntheticData {
    /// True when `recovered` (an ordering of the scrambled rows) visits the
    /// original rows in generating order up to a cyclic shift and a flip.
    pub fn recovers(&self, recovered: &PermutationVector) -> bool {
        self.true_sigma
            .compose(recovered)
            .is_ok_and(|p| p.is_ring_symmetry())
    }
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    let (rows, dims) = (spec.rows, spec.dims);
    if rows < crate::matrix::MIN_ROWS {
        return Err(Error::Parameter(format!(
            "synthetic data needs at least 3 rows, got {rows}"
        )));
    }
    if dims < 3 {
        return Err(Error::Parameter(format!(
            "synthetic data needs two signals and at least one noise column, got {dims} columns"
        )));
    }
    let grid = |k: usize| {
        (0..rows)
            .map(|t| 2.0 * PI * spec.periods[k] * t as f64 / rows as f64 + spec.phases[k])
            .collect::<Vec<_>>()
    };
    let sine: Vec<f64> = grid(0).into_iter().map(f64::sin).collect();
    let cosine: Vec<f64> = grid(1).into_iter().map(f64::cos).collect();
    let signal_var = 0.5 * (mean_var(&sine).1 + mean_var(&cosine).1);

    // Uniform draws, affinely standardized so every noise column has the
    // signals' (empirical) variance exactly.
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    noise_rng.set_stream(0);
    let noise: Vec<Vec<f64>> = (2..dims)
        .map(|_| {
            let draws: Vec<f64> = (0..rows).map(|_| noise_rng.gen_range(-1.0..1.0)).collect();
            let (mean, var) = mean_var(&draws);
            let scale = if var > 0.0 {
                (signal_var / var).sqrt()
            } else {
                0.0
            };
            draws.into_iter().map(|v| (v - mean) * scale).collect()
        })
        .collect();

    let mut values = Vec::with_capacity(rows * dims);
    for t in 0..rows {
        values.push(sine[t]);
        values.push(cosine[t]);
        values.extend(noise.iter().map(|col| col[t]));
    }
    let names = ["signal_sin".to_owned(), "signal_cos".to_owned()]
        .into_iter()
        .chain((1..=dims - 2).map(|k| format!("noise_{k}")))
        .collect();
    let smooth = DataMatrix::from_shape_vec(rows, dims, values)?.with_column_names(names)?;

    let mut scramble_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    scramble_rng.set_stream(1);
    let true_sigma = PermutationVector::random(rows, &mut scramble_rng);
    let scrambled = smooth.permute_rows(&true_sigma)?;
    Ok(SyntheticData {
        smooth,
        scrambled,
        true_sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{per_dim_nonsmoothness, Boundary};

    #[test]
    fn default_shape() {
        let data = generate_synthetic(&SyntheticSpec::default()).unwrap();
        assert_eq!((data.smooth.rows(), data.smooth.cols()), (50, 52));
        assert_eq!((data.scrambled.rows(), data.scrambled.cols()), (50, 52));
    }

    #[test]
    fn inverse_scramble_restores_bitwise() {
        let data = generate_synthetic(&SyntheticSpec::default().with_seed(9)).unwrap();
        let restored = data
            .scrambled
            .permute_rows(&data.true_sigma.inverse())
            .unwrap();
        assert_eq!(restored.as_slice(), data.smooth.as_slice());
        assert!(data.recovers(&data.true_sigma.inverse()));
        assert!(data.recovers(&data.true_sigma.inverse().shifted(7).reversed()));
        assert!(!data.recovers(&data.true_sigma));
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let spec = SyntheticSpec::default().with_seed(42);
        assert_eq!(
            generate_synthetic(&spec).unwrap(),
            generate_synthetic(&spec).unwrap()
        );
        assert_ne!(
            generate_synthetic(&spec).unwrap(),
            generate_synthetic(&spec.clone().with_seed(43)).unwrap()
        );
    }

    #[test]
    fn noise_variance_matches_signal_variance() {
        let data = generate_synthetic(&SyntheticSpec::default().with_seed(1)).unwrap();
        let col = |d: usize| data.smooth.column(d).to_vec();
        let signal = 0.5 * (mean_var(&col(0)).1 + mean_var(&col(1)).1);
        for d in 2..data.smooth.cols() {
            let v = mean_var(&col(d)).1;
            assert!(
                (v - signal).abs() <= 0.01 * signal,
                "column {d}: {v} vs {signal}"
            );
        }
    }

    #[test]
    fn signals_are_smoother_than_every_noise_column() {
        for seed in 0..20 {
            let data = generate_synthetic(&SyntheticSpec::default().with_seed(seed)).unwrap();
            let id = PermutationVector::identity(data.smooth.rows());
            let s = per_dim_nonsmoothness(&data.smooth, &id, Boundary::Periodic).unwrap();
            let worst_signal = s[0].max(s[1]);
            let best_noise = s[2..].iter().copied().fold(f64::INFINITY, f64::min);
            assert!(
                worst_signal < best_noise,
                "seed {seed}: {worst_signal} vs {best_noise}"
            );
        }
    }

    #[test]
    fn rejects_degenerate_specs() {
        let spec = SyntheticSpec {
            dims: 2,
            ..SyntheticSpec::default()
        };
        assert!(generate_synthetic(&spec).is_err());
    }
}
