//! Per-iteration timing over a (T, D) grid and log-log slope fits.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::objective::Boundary;
use crate::optimizer::Descent;
use crate::permutation::PermutationVector;
use crate::weights::FeatureWeights;

pub const MIN_REPEATS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    /// T used while varying D.
    pub fixed_rows: usize,
    pub dims: Vec<usize>,
    /// D used while varying T.
    pub fixed_dims: usize,
    pub rows: Vec<usize>,
    pub repeats: usize,
    /// Each repeat runs enough iterations to last at least this long.
    pub min_repeat_seconds: f64,
    pub seed: u64,
}

impl Default for BenchGrid {
    fn default() -> Self {
        Self {
            fixed_rows: 200,
            dims: vec![64, 128, 256, 512, 1024],
            fixed_dims: 8,
            rows: vec![64, 128, 256, 512],
            repeats: MIN_REPEATS,
            min_repeat_seconds: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub rows: usize,
    pub dims: usize,
    pub repeats: usize,
    pub iterations_per_repeat: usize,
    /// Mean and standard deviation of the per-iteration time over repeats.
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval of the slope.
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

impl SlopeFit {
    pub fn ci_contains(&self, value: f64) -> bool {
        (self.ci_low..=self.ci_high).contains(&value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub grid: BenchGrid,
    pub cells: Vec<BenchCell>,
    pub slope_d: SlopeFit,
    pub slope_t: SlopeFit,
}

/// Ordinary least squares of `ln y` on `ln x` with a 95% Student-t interval.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::Parameter(format!(
            "a slope interval needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Input("log-log points must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("log-log points need distinct sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = n - 2.0;
    let se = (ssr / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Parameter(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(SlopeFit {
        slope,
        intercept,
        ci_low: slope - t * se,
        ci_high: slope + t * se,
        points: points.len(),
    })
}

fn random_instance(rows: usize, dims: usize, seed: u64) -> Result<(DataMatrix, PermutationVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..rows * dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = DataMatrix::from_shape_vec(rows, dims, values)?;
    let sigma = PermutationVector::random(rows, &mut rng);
    Ok((x, sigma))
}

/// One full iteration from a fixed state: cache build, pair scan, swap, W-step.
fn iterate_once(x: &DataMatrix, sigma: &PermutationVector, w: &FeatureWeights) -> Result<f64> {
    let mut descent = Descent::new(x, 1.0, Boundary::Periodic, None, sigma.clone(), w.clone())?;
    Ok(descent.step()?.f_total)
}

/// Mean and spread of the per-iteration wall time at one grid point.
pub fn time_iteration(
    rows: usize,
    dims: usize,
    repeats: usize,
    min_repeat_seconds: f64,
    seed: u64,
) -> Result<BenchCell> {
    if repeats < MIN_REPEATS {
        return Err(Error::Parameter(format!(
            "at least {MIN_REPEATS} repeats per cell, got {repeats}"
        )));
    }
    let (x, sigma) = random_instance(rows, dims, seed)?;
    let w = FeatureWeights::uniform(dims);

    let start = Instant::now();
    black_box(iterate_once(&x, &sigma, &w)?);
    let single = start.elapsed().as_secs_f64().max(1e-9);
    let iterations = ((min_repeat_seconds / single).ceil() as usize).max(1);

    let mut per_iter = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        for _ in 0..iterations {
            black_box(iterate_once(black_box(&x), &sigma, &w)?);
        }
        per_iter.push(start.elapsed().as_secs_f64() / iterations as f64);
    }
    let mean = per_iter.iter().sum::<f64>() / repeats as f64;
    let var = per_iter.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (repeats - 1) as f64;
    Ok(BenchCell {
        rows,
        dims,
        repeats,
        iterations_per_repeat: iterations,
        mean_seconds: mean,
        std_seconds: var.sqrt(),
    })
}

/// Times both sweeps of `grid` and fits their slopes on the cell means.
pub fn run_bench(grid: &BenchGrid) -> Result<BenchReport> {
    let cell =
        |rows, dims| time_iteration(rows, dims, grid.repeats, grid.min_repeat_seconds, grid.seed);
    let d_cells = grid
        .dims
        .iter()
        .map(|&d| cell(grid.fixed_rows, d))
        .collect::<Result<Vec<_>>>()?;
    let t_cells = grid
        .rows
        .iter()
        .map(|&t| cell(t, grid.fixed_dims))
        .collect::<Result<Vec<_>>>()?;
    let slope_d = loglog_fit(
        &d_cells
            .iter()
            .map(|c| (c.dims as f64, c.mean_seconds))
            .collect::<Vec<_>>(),
    )?;
    let slope_t = loglog_fit(
        &t_cells
            .iter()
            .map(|c| (c.rows as f64, c.mean_seconds))
            .collect::<Vec<_>>(),
    )?;
    Ok(BenchReport {
        grid: grid.clone(),
        cells: d_cells.into_iter().chain(t_cells).collect(),
        slope_d,
        slope_t,
    })
}
