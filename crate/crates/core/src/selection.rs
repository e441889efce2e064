//! Choosing ε from the L-curve of expected non-smoothness against entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::objective::per_dim_nonsmoothness;
use crate::optimizer::{fit, fit_parallel, FitConfig, FitResult};

/// Minimum number of ε values for elbow detection.
pub const MIN_GRID: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub epsilon: f64,
    pub expected_nonsmoothness: f64,
    /// `Σ_d w_d ln w_d` of the fitted weights.
    pub entropy_term: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Sorted by ascending ε.
    pub entries: Vec<SweepEntry>,
    pub elbow_index: usize,
}

impl SweepResult {
    pub fn elbow(&self) -> &SweepEntry {
        &self.entries[self.elbow_index]
    }
}

/// `count` log-spaced values spanning `[1e-3, 1e3] × median(S_d)` where
/// `S_d` is evaluated at the first restart's starting ordering.
pub fn auto_grid(x: &DataMatrix, base: &FitConfig, count: usize) -> Result<Vec<f64>> {
    if count < MIN_GRID {
        return Err(Error::Parameter(format!(
            "an epsilon grid needs at least {MIN_GRID} values, got {count}"
        )));
    }
    let (sigma, _) = base.initial_state(x, 0);
    let mut s = per_dim_nonsmoothness(x, &sigma, base.boundary)?;
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    let median = if s.len() % 2 == 0 {
        0.5 * (s[mid - 1] + s[mid])
    } else {
        s[mid]
    };
    let scale = if median > 0.0 { median } else { 1.0 };
    Ok((0..count)
        .map(|k| scale * 10f64.powf(-3.0 + 6.0 * k as f64 / (count - 1) as f64))
        .collect())
}

fn check_grid(epsilons: &[f64]) -> Result<Vec<f64>> {
    if epsilons.len() < MIN_GRID {
        return Err(Error::Parameter(format!(
            "an epsilon grid needs at least {MIN_GRID} values, got {}",
            epsilons.len()
        )));
    }
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::Parameter(format!(
            "epsilon must be positive and finite, got {e}"
        )));
    }
    let mut sorted = epsilons.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Fits every ε with the restarts and seeds of `base` and locates the elbow.
pub fn sweep(x: &DataMatrix, epsilons: &[f64], base: &FitConfig) -> Result<SweepResult> {
    let grid = check_grid(epsilons)?;
    let fits = grid
        .iter()
        .map(|&eps| {
            fit(
                x,
                &FitConfig {
                    epsilon: eps,
                    ..base.clone()
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(grid, fits)
}

/// [`sweep`] with the ε values and restarts spread over the rayon pool.
pub fn sweep_parallel(x: &DataMatrix, epsilons: &[f64], base: &FitConfig) -> Result<SweepResult> {
    use rayon::prelude::*;
    let grid = check_grid(epsilons)?;
    let fits = grid
        .par_iter()
        .map(|&eps| {
            fit_parallel(
                x,
                &FitConfig {
                    epsilon: eps,
                    ..base.clone()
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(grid, fits)
}

fn assemble(grid: Vec<f64>, fits: Vec<FitResult>) -> Result<SweepResult> {
    let entries: Vec<SweepEntry> = grid
        .into_iter()
        .zip(fits)
        .map(|(epsilon, fit)| SweepEntry {
            epsilon,
            expected_nonsmoothness: fit.breakdown.expected_nonsmoothness,
            entropy_term: fit.breakdown.entropy_term,
            fit,
        })
        .collect();
    let points: Vec<(f64, f64)> = entries
        .iter()
        .map(|e| (e.entropy_term, e.expected_nonsmoothness))
        .collect();
    let elbow_index = find_elbow(&points)?;
    Ok(SweepResult {
        entries,
        elbow_index,
    })
}

fn min_max_normalize(values: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.clone().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    values
        .map(|v| if range > 0.0 { (v - lo) / range } else { 0.0 })
        .collect()
}

/// Index of the point farthest from the chord joining the first and last
/// points, measured after min-max normalization of both axes.
///
/// Ties go to the smaller index; a degenerate chord selects index 0.
pub fn find_elbow(points: &[(f64, f64)]) -> Result<usize> {
    if points.len() < MIN_GRID {
        return Err(Error::Parameter(format!(
            "elbow detection needs at least {MIN_GRID} points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|(x, y)| !(x.is_finite() && y.is_finite()))
    {
        return Err(Error::Input("L-curve points must be finite".into()));
    }
    let xs = min_max_normalize(points.iter().map(|p| p.0));
    let ys = min_max_normalize(points.iter().map(|p| p.1));
    let last = points.len() - 1;
    let (dx, dy) = (xs[last] - xs[0], ys[last] - ys[0]);
    let chord = dx.hypot(dy);
    if chord == 0.0 {
        return Ok(0);
    }
    let mut best = (0, 0.0);
    for k in 0..points.len() {
        let dist = (dx * (ys[k] - ys[0]) - dy * (xs[k] - xs[0])).abs() / chord;
        if dist > best.1 {
            best = (k, dist);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collinear_points_pick_first() {
        assert_eq!(
            find_elbow(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap(),
            0
        );
    }

    #[test]
    fn right_angle_is_selected() {
        assert_eq!(
            find_elbow(&[(0.0, 1.0), (0.0, 0.0), (1.0, 0.0)]).unwrap(),
            1
        );
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            find_elbow(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)]).unwrap(),
            0
        );
        // Constant x (single-dimension data): every point lies on the chord.
        assert_eq!(
            find_elbow(&[(0.0, 1.0), (0.0, 5.0), (0.0, 2.0)]).unwrap(),
            0
        );
        assert!(find_elbow(&[(0.0, 1.0), (1.0, 0.0)]).is_err());
    }

    /// Independent detector: largest turning angle between consecutive normalized segments.
    fn max_turn_elbow(points: &[(f64, f64)]) -> usize {
        let xs = min_max_normalize(points.iter().map(|p| p.0));
        let ys = min_max_normalize(points.iter().map(|p| p.1));
        let mut best = (0, f64::NEG_INFINITY);
        for k in 1..points.len() - 1 {
            let a = (ys[k] - ys[k - 1]).atan2(xs[k] - xs[k - 1]);
            let b = (ys[k + 1] - ys[k]).atan2(xs[k + 1] - xs[k]);
            let mut turn = (b - a).abs();
            if turn > std::f64::consts::PI {
                turn = 2.0 * std::f64::consts::PI - turn;
            }
            if turn > best.1 {
                best = (k, turn);
            }
        }
        best.0
    }

    #[test]
    fn agrees_with_curvature_detector_on_convex_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut agree = 0;
        for _ in 0..100 {
            // Convex decreasing curve with a corner: steep branch, kink, shallow branch.
            let n = rng.gen_range(7..16);
            let corner = rng.gen_range(2..n - 2);
            let steep = rng.gen_range(5.0..20.0);
            let shallow = rng.gen_range(0.02..0.2);
            let mut pts = Vec::with_capacity(n);
            let mut y = 0.0;
            for k in 0..n {
                let x = k as f64 + rng.gen_range(-0.1..0.1);
                let slope = if k <= corner {
                    steep * (1.0 + 0.05 * (corner - k) as f64)
                } else {
                    shallow
                };
                if k > 0 {
                    y -= slope;
                }
                pts.push((x, y));
            }
            if find_elbow(&pts).unwrap() == max_turn_elbow(&pts) {
                agree += 1;
            }
        }
        assert!(agree >= 80, "agreement {agree}/100");
    }

    #[test]
    fn grid_validation() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let base = FitConfig::new(1.0);
        assert!(matches!(
            sweep(&x, &[1.0, 2.0], &base),
            Err(Error::Parameter(_))
        ));
        assert!(sweep(&x, &[1.0, -2.0, 3.0], &base).is_err());
        let grid = auto_grid(&x, &base, 16).unwrap();
        assert_eq!(grid.len(), 16);
        assert!(grid.windows(2).all(|p| p[0] < p[1]));
        assert!(((grid[15] / grid[0]).log10() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn single_dimension_curve_is_flat_in_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let col: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.gen_range(0.0..1.0)]).collect();
        let x = DataMatrix::from_rows(&col).unwrap();
        let base = FitConfig::new(1.0).with_seed(4);
        let grid = auto_grid(&x, &base, 5).unwrap();
        let result = sweep(&x, &grid, &base).unwrap();
        assert!(result.entries.iter().all(|e| e.entropy_term == 0.0));
        assert_eq!(result.elbow_index, 0);
    }

    #[test]
    fn entries_are_sorted_and_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = (0..20 * 4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = DataMatrix::from_shape_vec(20, 4, v).unwrap();
        let base = FitConfig::new(1.0).with_restarts(2);
        let result = sweep(&x, &[10.0, 0.1, 1.0, 0.01], &base).unwrap();
        let eps: Vec<f64> = result.entries.iter().map(|e| e.epsilon).collect();
        assert_eq!(eps, vec![0.01, 0.1, 1.0, 10.0]);
        for e in &result.entries {
            let check =
                crate::objective::objective(&x, &e.fit.sigma, &e.fit.w, e.epsilon, base.boundary)
                    .unwrap();
            assert!((check.expected_nonsmoothness - e.expected_nonsmoothness).abs() < 1e-9);
            assert!((check.entropy_term - e.entropy_term).abs() < 1e-9);
        }
        assert_eq!(
            result,
            sweep_parallel(&x, &[10.0, 0.1, 1.0, 0.01], &base).unwrap()
        );
    }

    #[test]
    fn entropy_grows_with_epsilon_on_a_fixed_optimal_order() {
        // Co-monotone columns on an open path: the identity ordering is
        // optimal for every weighting, so only the W-step reacts to epsilon.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut acc = [0.0; 4];
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| {
                for (d, a) in acc.iter_mut().enumerate() {
                    *a += rng.gen_range(0.1..1.0) * (d + 1) as f64;
                }
                acc.to_vec()
            })
            .collect();
        let x = DataMatrix::from_rows(&rows).unwrap();
        let base = FitConfig::new(1.0)
            .with_init(crate::optimizer::InitMode::Identity)
            .with_boundary(crate::objective::Boundary::Open);
        let grid = auto_grid(&x, &base, 10).unwrap();
        let result = sweep(&x, &grid, &base).unwrap();
        let shannon: Vec<f64> = result
            .entries
            .iter()
            .map(|e| e.fit.breakdown.shannon_entropy())
            .collect();
        assert!(
            shannon.windows(2).all(|p| p[1] >= p[0] - 1e-6),
            "{shannon:?}"
        );
        assert!(shannon[9] > shannon[0]);
    }
}
