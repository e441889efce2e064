//! Joint learning of a crisp data ordering and sparse feature weights.
//!
//! Given a `T × D` matrix `X`, the library searches for a permutation `σ` of
//! the rows and a probability vector `w` over the columns that minimize
//!
//! ```text
//! F(w, σ) = Σ_d w_d S_d(σ) + ε Σ_d w_d ln w_d,
//! S_d(σ)  = Σ_t (X[σ(t+1), d] - X[σ(t), d])²      (ring: σ(T+1) = σ(1))
//! ```
//!
//! Small `S_d` means column `d` varies smoothly along the ordering. The
//! entropy term keeps `w` spread out; as `ε → 0` it concentrates on the
//! smoothest columns.
//!
//! * [`optimizer`]: alternating pairwise-swap / closed-form weight descent.
//! * [`cache`]: pair-cost cache with `O(1)` swap deltas.
//! * [`monotonic`]: the sort-based variant that seeks monotone rather than smooth orderings.
//! * [`selection`]: ε sweeps and L-curve elbow selection.
//! * [`dataset`], [`synthetic`], [`document`]: CSV ingestion, synthetic data, result files.
//! * [`scaling`]: per-iteration timing and log-log slope fits.

pub mod cache;
pub mod dataset;
pub mod document;
pub mod error;
pub mod matrix;
pub mod monotonic;
pub mod objective;
pub mod optimizer;
pub mod permutation;
pub mod scaling;
pub mod selection;
pub mod synthetic;
pub mod weights;

pub use cache::{PairCostCache, SwapMove};
pub use dataset::{load_csv, CsvOptions, Dataset};
pub use document::{load_result, save_result, DataFingerprint, ResultDocument};
pub use error::{Error, Result};
pub use matrix::DataMatrix;
pub use monotonic::{fit_monotonic, Direction, MonotonicConfig};
pub use objective::{objective, per_dim_nonsmoothness, Boundary, ObjectiveBreakdown};
pub use optimizer::{fit, fit_parallel, w_step, w_step_pinned, FitConfig, FitResult, InitMode};
pub use permutation::PermutationVector;
pub use scaling::{BenchGrid, BenchReport};
pub use selection::{find_elbow, sweep, SweepEntry, SweepResult};
pub use synthetic::{generate_synthetic, SyntheticData, SyntheticSpec};
pub use weights::FeatureWeights;
