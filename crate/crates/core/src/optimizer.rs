//! Alternating descent on `(σ, w)`.
//!
//! Each iteration applies the single best pairwise exchange of positions
//! (P-step), then replaces `w` by the closed-form minimizer for the new
//! ordering (W-step). Both steps can only lower the objective, so the
//! recorded trace is non-increasing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cache::{PairCostCache, SwapMove};
use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::objective::{check_epsilon, per_dim_nonsmoothness, Boundary, ObjectiveBreakdown};
use crate::permutation::PermutationVector;
use crate::weights::FeatureWeights;

/// Rows above which the pair scan is split across rayon workers.
const PARALLEL_SCAN_MIN_ROWS: usize = 1024;

/// Closed-form minimizer of `w·s + ε Σ w ln w` over the simplex.
///
/// `w_d ∝ exp(-(s_d - min s)/ε)`; the shift leaves the result unchanged and
/// keeps at least one exponent at zero.
pub fn w_step(scores: &[f64], epsilon: f64) -> FeatureWeights {
    FeatureWeights::from_normalized(gibbs(scores, epsilon))
}

fn gibbs(scores: &[f64], epsilon: f64) -> Vec<f64> {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = scores
        .iter()
        .map(|&s| (-(s - min) / epsilon).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Minimizer of the same objective with `w[pinned] = pinned_weight` held fixed.
///
/// The free dimensions share the mass `1 - pinned_weight` in the same Gibbs form.
pub fn w_step_pinned(
    scores: &[f64],
    epsilon: f64,
    pinned: usize,
    pinned_weight: f64,
) -> Result<FeatureWeights> {
    let dims = scores.len();
    validate_pin(dims, pinned, pinned_weight)?;
    let free: Vec<f64> = scores
        .iter()
        .enumerate()
        .filter(|&(d, _)| d != pinned)
        .map(|(_, &s)| s)
        .collect();
    let mut free_w = gibbs(&free, epsilon).into_iter();
    let w = (0..dims)
        .map(|d| {
            if d == pinned {
                pinned_weight
            } else {
                (1.0 - pinned_weight) * free_w.next().unwrap()
            }
        })
        .collect();
    Ok(FeatureWeights::from_normalized(w))
}

fn validate_pin(dims: usize, pinned: usize, weight: f64) -> Result<()> {
    if dims < 2 {
        return Err(Error::Parameter(
            "a pinned weight needs at least two dimensions".into(),
        ));
    }
    if pinned >= dims {
        return Err(Error::Parameter(format!(
            "pinned dimension {} out of range for {dims} dimensions",
            pinned + 1
        )));
    }
    if !(weight > 0.0 && weight < 1.0) {
        return Err(Error::Parameter(format!(
            "pinned weight must lie in the open interval (0, 1), got {weight}"
        )));
    }
    Ok(())
}

/// The best pairwise exchange for the cache's ordering and weights.
pub fn p_step(cache: &PairCostCache) -> Result<SwapMove> {
    if cache.len() >= PARALLEL_SCAN_MIN_ROWS && rayon::current_num_threads() > 1 {
        cache.best_swap_parallel()
    } else {
        cache.best_swap()
    }
}

/// `w[dim]` held at `weight` during the W-step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinnedWeight {
    pub dim: usize,
    pub weight: f64,
}

/// Starting point of a restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Restart 0 starts from the identity ordering; later restarts are random.
    Identity,
    /// Every restart draws a random ordering from its own seeded stream.
    RandomPermutation,
    /// Random ordering and random weights.
    RandomPermutationAndWeights,
    /// Restart 0 starts from this ordering; later restarts are random.
    Explicit(PermutationVector),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub epsilon: f64,
    /// Absolute decrease threshold; `None` means `1e-9 · |F₀|`, floored at `1e-12`.
    pub tol: Option<f64>,
    /// `None` means `10 · T²`.
    pub max_iters: Option<usize>,
    pub init: InitMode,
    pub pinned: Option<PinnedWeight>,
    pub seed: u64,
    pub restarts: usize,
    pub boundary: Boundary,
}

impl FitConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            tol: None,
            max_iters: None,
            init: InitMode::RandomPermutation,
            pinned: None,
            seed: 0,
            restarts: 1,
            boundary: Boundary::Periodic,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_init(mut self, init: InitMode) -> Self {
        self.init = init;
        self
    }

    pub fn with_pinned(mut self, dim: usize, weight: f64) -> Self {
        self.pinned = Some(PinnedWeight { dim, weight });
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self, x: &DataMatrix) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if self.restarts == 0 {
            return Err(Error::Parameter("restarts must be at least 1".into()));
        }
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::Parameter(format!(
                    "tol must be finite and non-negative, got {tol}"
                )));
            }
        }
        if let Some(p) = self.pinned {
            validate_pin(x.cols(), p.dim, p.weight)?;
        }
        if let InitMode::Explicit(sigma) = &self.init {
            if sigma.len() != x.rows() {
                return Err(Error::Shape(format!(
                    "initial permutation has length {} but data has {} rows",
                    sigma.len(),
                    x.rows()
                )));
            }
        }
        Ok(())
    }

    fn max_iters_for(&self, rows: usize) -> usize {
        self.max_iters.unwrap_or(10 * rows * rows)
    }

    /// Starting `(σ, w)` of restart `k`; each restart owns an independent RNG stream.
    pub fn initial_state(&self, x: &DataMatrix, k: usize) -> (PermutationVector, FeatureWeights) {
        let (rows, dims) = (x.rows(), x.cols());
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let sigma = match (&self.init, k) {
            (InitMode::Identity, 0) => PermutationVector::identity(rows),
            (InitMode::Explicit(sigma), 0) => sigma.clone(),
            _ => PermutationVector::random(rows, &mut rng),
        };
        let random_w = matches!(self.init, InitMode::RandomPermutationAndWeights);
        let w = match (self.pinned, random_w) {
            (Some(p), true) => FeatureWeights::random_pinned(dims, p.dim, p.weight, &mut rng),
            (Some(p), false) => FeatureWeights::uniform_pinned(dims, p.dim, p.weight),
            (None, true) => FeatureWeights::random(dims, &mut rng),
            (None, false) => FeatureWeights::uniform(dims),
        };
        (sigma, w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub sigma: PermutationVector,
    pub w: FeatureWeights,
    /// Objective after initialization followed by the value after every iteration.
    pub trace: Vec<f64>,
    pub breakdown: ObjectiveBreakdown,
    pub iterations: usize,
    pub converged: bool,
    pub restart_index: usize,
}

impl FitResult {
    pub fn f_total(&self) -> f64 {
        self.breakdown.f_total
    }
}

/// Outcome of one descent iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub swap: SwapMove,
    pub f_total: f64,
    /// Objective before the step minus objective after it.
    pub decrease: f64,
}

/// State of a single descent run.
#[derive(Debug, Clone)]
pub struct Descent<'a> {
    x: &'a DataMatrix,
    epsilon: f64,
    boundary: Boundary,
    pinned: Option<PinnedWeight>,
    sigma: PermutationVector,
    w: FeatureWeights,
    scores: Vec<f64>,
    f_total: f64,
    cache: Option<PairCostCache>,
}

impl<'a> Descent<'a> {
    pub fn new(
        x: &'a DataMatrix,
        epsilon: f64,
        boundary: Boundary,
        pinned: Option<PinnedWeight>,
        sigma: PermutationVector,
        w: FeatureWeights,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        if w.len() != x.cols() {
            return Err(Error::Shape(format!(
                "{} weights for {} dimensions",
                w.len(),
                x.cols()
            )));
        }
        let scores = per_dim_nonsmoothness(x, &sigma, boundary)?;
        let f_total = ObjectiveBreakdown::from_scores(scores.clone(), &w, epsilon).f_total;
        Ok(Self {
            x,
            epsilon,
            boundary,
            pinned,
            sigma,
            w,
            scores,
            f_total,
            cache: None,
        })
    }

    pub fn sigma(&self) -> &PermutationVector {
        &self.sigma
    }

    pub fn weights(&self) -> &FeatureWeights {
        &self.w
    }

    pub fn f_total(&self) -> f64 {
        self.f_total
    }

    pub fn breakdown(&self) -> ObjectiveBreakdown {
        ObjectiveBreakdown::from_scores(self.scores.clone(), &self.w, self.epsilon)
    }

    fn weight_update(&self) -> Result<FeatureWeights> {
        match self.pinned {
            Some(p) => w_step_pinned(&self.scores, self.epsilon, p.dim, p.weight),
            None => Ok(w_step(&self.scores, self.epsilon)),
        }
    }

    /// One P-step followed by one W-step.
    pub fn step(&mut self) -> Result<Step> {
        let cache = match self.cache.take() {
            Some(c) if c.is_fresh_for(&self.w) => c,
            _ => PairCostCache::build(self.x, &self.w, &self.sigma, self.boundary)?,
        };
        let swap = p_step(&cache)?;
        let mut cache = Some(cache);
        if swap.is_improving() {
            self.sigma.swap(swap.i, swap.j);
            if let Some(c) = cache.as_mut() {
                c.apply_swap(swap.i, swap.j)?;
            }
            self.scores = per_dim_nonsmoothness(self.x, &self.sigma, self.boundary)?;
        }
        let w = self.weight_update()?;
        if w != self.w {
            cache = None;
        }
        self.w = w;
        let f_total =
            ObjectiveBreakdown::from_scores(self.scores.clone(), &self.w, self.epsilon).f_total;
        let decrease = self.f_total - f_total;
        self.f_total = f_total;
        self.cache = cache;
        Ok(Step {
            swap,
            f_total,
            decrease,
        })
    }
}

/// Runs every restart of `config` on `x` and returns the one with the lowest final objective.
pub fn fit(x: &DataMatrix, config: &FitConfig) -> Result<FitResult> {
    config.validate(x)?;
    let runs = (0..config.restarts)
        .map(|k| fit_restart(x, config, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(runs))
}

/// [`fit`] with restarts distributed over the rayon pool; the result is identical.
pub fn fit_parallel(x: &DataMatrix, config: &FitConfig) -> Result<FitResult> {
    use rayon::prelude::*;
    config.validate(x)?;
    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|k| fit_restart(x, config, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(runs))
}

fn select_best(runs: Vec<FitResult>) -> FitResult {
    // Strict comparison keeps the lowest restart index on ties.
    runs.into_iter()
        .reduce(|best, r| {
            if r.f_total() < best.f_total() {
                r
            } else {
                best
            }
        })
        .expect("at least one restart")
}

/// A single descent run from the starting point of restart `k`.
pub fn fit_restart(x: &DataMatrix, config: &FitConfig, k: usize) -> Result<FitResult> {
    let (sigma, w) = config.initial_state(x, k);
    let mut descent = Descent::new(x, config.epsilon, config.boundary, config.pinned, sigma, w)?;
    let f0 = descent.f_total();
    let tol = config.tol.unwrap_or_else(|| (1e-9 * f0.abs()).max(1e-12));
    let max_iters = config.max_iters_for(x.rows());
    let mut trace = vec![f0];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        let step = descent.step()?;
        iterations += 1;
        trace.push(step.f_total);
        if step.decrease <= tol {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        breakdown: descent.breakdown(),
        sigma: descent.sigma,
        w: descent.w,
        trace,
        iterations,
        converged,
        restart_index: k,
    })
}
