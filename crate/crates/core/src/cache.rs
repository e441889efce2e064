//! Pairwise weighted squared distances between the rows of an ordering.
//!
//! With `c(a, b) = Σ_d w_d (X[a, d] - X[b, d])²` the expected non-smoothness
//! `Σ_d w_d S_d` regroups by edges into the ring-tour cost
//! `Σ_t c(σ(t), σ(t+1))`. The cache stores `c` indexed by *position* in the
//! ordering it was built for, so that the rows touched when evaluating a
//! swap of positions `i` and `j` are the contiguous rows `i - 1`, `i` and
//! `i + 1`. Building is `Θ(D T²)`; every swap delta is `O(1)`.

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::objective::Boundary;
use crate::permutation::PermutationVector;
use crate::weights::FeatureWeights;

#[derive(Debug, Clone, PartialEq)]
pub struct PairCostCache {
    n: usize,
    /// Row-major `n × n`; entry `(p, q)` is the cost between the rows at positions `p` and `q`.
    cost: Vec<f64>,
    order: PermutationVector,
    position_of: Vec<usize>,
    weights: FeatureWeights,
    boundary: Boundary,
    stale: bool,
}

impl PairCostCache {
    pub fn build(
        x: &DataMatrix,
        w: &FeatureWeights,
        sigma: &PermutationVector,
        boundary: Boundary,
    ) -> Result<Self> {
        let n = x.rows();
        if sigma.len() != n {
            return Err(Error::Shape(format!(
                "permutation has length {} but data has {n} rows",
                sigma.len()
            )));
        }
        if w.len() != x.cols() {
            return Err(Error::Shape(format!(
                "{} weights for {} dimensions",
                w.len(),
                x.cols()
            )));
        }
        let order = sigma.as_slice();
        let wv = w.as_slice();
        let mut cost = vec![0.0; n * n];
        for p in 0..n {
            let a = x.row(order[p]);
            for q in (p + 1)..n {
                let b = x.row(order[q]);
                let c = weighted_sq_dist(a, b, wv);
                cost[p * n + q] = c;
                cost[q * n + p] = c;
            }
        }
        Ok(Self {
            n,
            cost,
            order: sigma.clone(),
            position_of: sigma.inverse().as_slice().to_vec(),
            weights: w.clone(),
            boundary,
            stale: false,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// The ordering whose positions index the cache.
    pub fn order(&self) -> &PermutationVector {
        &self.order
    }

    pub fn weights(&self) -> &FeatureWeights {
        &self.weights
    }

    pub fn is_stale(&self) -> bool {
        self.stale
    }

    /// Marks the cache unusable, e.g. after the weights it was built with changed.
    pub fn invalidate(&mut self) {
        self.stale = true;
    }

    /// True when the cache was built for exactly these weights and is not stale.
    pub fn is_fresh_for(&self, w: &FeatureWeights) -> bool {
        !self.stale && self.weights == *w
    }

    fn ensure_fresh(&self) -> Result<()> {
        if self.stale {
            Err(Error::StaleCache)
        } else {
            Ok(())
        }
    }

    #[inline]
    fn at(&self, p: usize, q: usize) -> f64 {
        self.cost[p * self.n + q]
    }

    /// Cost between the rows at positions `p` and `q` of the current ordering.
    pub fn position_cost(&self, p: usize, q: usize) -> f64 {
        self.at(p, q)
    }

    /// Cost between data rows (instances) `a` and `b`.
    pub fn instance_cost(&self, a: usize, b: usize) -> f64 {
        self.at(self.position_of[a], self.position_of[b])
    }

    /// Ring-tour cost of the current ordering, equal to `Σ_d w_d S_d`.
    pub fn tour_cost(&self) -> f64 {
        (0..self.boundary.edge_count(self.n))
            .map(|e| self.at(e, (e + 1) % self.n))
            .sum()
    }

    #[inline]
    fn prev(&self, p: usize) -> Option<usize> {
        match (p, self.boundary) {
            (0, Boundary::Open) => None,
            (0, Boundary::Periodic) => Some(self.n - 1),
            _ => Some(p - 1),
        }
    }

    #[inline]
    fn next(&self, p: usize) -> Option<usize> {
        match (p + 1 == self.n, self.boundary) {
            (true, Boundary::Open) => None,
            (true, Boundary::Periodic) => Some(0),
            _ => Some(p + 1),
        }
    }

    /// Cost of the edges incident to position `p`.
    #[inline]
    fn incident(&self, p: usize) -> f64 {
        let mut c = 0.0;
        if let Some(q) = self.prev(p) {
            c += self.at(q, p);
        }
        if let Some(q) = self.next(p) {
            c += self.at(p, q);
        }
        c
    }

    /// True when positions `i < j` share a ring edge.
    #[inline]
    fn adjacent(&self, i: usize, j: usize) -> bool {
        j == i + 1 || (self.boundary.is_periodic() && i == 0 && j + 1 == self.n)
    }

    #[inline]
    fn interior(&self, p: usize) -> bool {
        self.boundary.is_periodic() || (p > 0 && p + 1 < self.n)
    }

    /// Change of the tour cost when the entries at positions `i` and `j` are exchanged.
    pub fn swap_delta(&self, i: usize, j: usize) -> Result<f64> {
        self.ensure_fresh()?;
        if i >= self.n || j >= self.n {
            return Err(Error::Input(format!(
                "swap positions ({i}, {j}) out of range for length {}",
                self.n
            )));
        }
        Ok(self.delta_unchecked(i.min(j), i.max(j)))
    }

    fn delta_unchecked(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        if !self.adjacent(i, j) && self.interior(i) && self.interior(j) {
            let (pi, ni) = (self.prev(i).unwrap(), self.next(i).unwrap());
            let (pj, nj) = (self.prev(j).unwrap(), self.next(j).unwrap());
            separated_delta(
                self.at(pi, j),
                self.at(ni, j),
                self.at(i, pj),
                self.at(i, nj),
                self.incident(i),
                self.incident(j),
            )
        } else {
            self.edge_set_delta(i, j)
        }
    }

    /// Exact delta from the (at most four, possibly shared) ring edges incident to `i` and `j`.
    ///
    /// Adjacent positions share the edge `(i, j)`, whose cost is unchanged by the
    /// swap; on a 3-ring every edge is touched. Collecting the distinct edge ids
    /// handles all of these cases with one formula.
    fn edge_set_delta(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        let edges = self.boundary.edge_count(n);
        let mut ids = [usize::MAX; 4];
        let mut len = 0;
        for p in [i, j] {
            for e in [(p + n - 1) % n, p] {
                let exists = e < edges && (self.boundary.is_periodic() || e + 1 < n);
                if exists && !ids[..len].contains(&e) {
                    ids[len] = e;
                    len += 1;
                }
            }
        }
        let moved = |p: usize| {
            if p == i {
                j
            } else if p == j {
                i
            } else {
                p
            }
        };
        let mut before = 0.0;
        let mut after = 0.0;
        for &e in &ids[..len] {
            let (a, b) = (e, (e + 1) % n);
            before += self.at(a, b);
            after += self.at(moved(a), moved(b));
        }
        after - before
    }

    /// The most improving exchange of two positions.
    ///
    /// Scans all `T(T-1)/2` pairs; ties go to the lexicographically smallest
    /// `(i, j)`. Without a strictly negative delta the identity move `(0, 0, 0.0)`
    /// is returned.
    pub fn best_swap(&self) -> Result<SwapMove> {
        self.ensure_fresh()?;
        let rem = self.incident_costs();
        let mut row = vec![0.0; self.n];
        let mut best = SwapMove::IDENTITY;
        for i in 0..self.n {
            if let Some(m) = self.best_in_row(i, &rem, &mut row) {
                if m.delta < best.delta {
                    best = m;
                }
            }
        }
        Ok(best)
    }

    /// Parallel variant of [`best_swap`](Self::best_swap); selects the identical move
    /// for any number of worker threads.
    pub fn best_swap_parallel(&self) -> Result<SwapMove> {
        use rayon::prelude::*;
        self.ensure_fresh()?;
        let rem = self.incident_costs();
        let best = (0..self.n)
            .into_par_iter()
            .map_init(
                || vec![0.0; self.n],
                |row, i| self.best_in_row(i, &rem, row).unwrap_or(SwapMove::IDENTITY),
            )
            .reduce(|| SwapMove::IDENTITY, SwapMove::better);
        Ok(best)
    }

    fn incident_costs(&self) -> Vec<f64> {
        (0..self.n).map(|p| self.incident(p)).collect()
    }

    /// Best improving move `(i, j)` with `j > i`, if any.
    fn best_in_row(&self, i: usize, rem: &[f64], row: &mut [f64]) -> Option<SwapMove> {
        let n = self.n;
        if i + 1 >= n {
            return None;
        }
        let row = &mut row[i + 1..n];
        // Positions j in lo..hi share no edge with i and have both neighbours
        // inside 0..n without wrapping; the rest go through the exact edge-set formula.
        let lo = i + 2;
        let hi = n - 1;
        if self.interior(i) && lo < hi {
            let (pi, ni) = (self.prev(i).unwrap(), self.next(i).unwrap());
            let prev_row = &self.cost[pi * n..(pi + 1) * n];
            let next_row = &self.cost[ni * n..(ni + 1) * n];
            let cur_row = &self.cost[i * n..(i + 1) * n];
            let rem_i = rem[i];
            for j in lo..hi {
                row[j - i - 1] = separated_delta(
                    prev_row[j],
                    next_row[j],
                    cur_row[j - 1],
                    cur_row[j + 1],
                    rem_i,
                    rem[j],
                );
            }
            row[0] = self.delta_unchecked(i, i + 1);
            row[n - 1 - i - 1] = self.delta_unchecked(i, n - 1);
        } else {
            for j in (i + 1)..n {
                row[j - i - 1] = self.delta_unchecked(i, j);
            }
        }
        let mut best: Option<SwapMove> = None;
        for (k, &delta) in row.iter().enumerate() {
            if delta < best.map_or(0.0, |b| b.delta) {
                best = Some(SwapMove {
                    i,
                    j: i + 1 + k,
                    delta,
                });
            }
        }
        best
    }

    /// Applies the exchange of positions `i` and `j` to the ordering and the cache in `O(T)`.
    pub fn apply_swap(&mut self, i: usize, j: usize) -> Result<()> {
        self.ensure_fresh()?;
        if i >= self.n || j >= self.n {
            return Err(Error::Input(format!(
                "swap positions ({i}, {j}) out of range for length {}",
                self.n
            )));
        }
        if i == j {
            return Ok(());
        }
        let n = self.n;
        for k in 0..n {
            self.cost.swap(i * n + k, j * n + k);
        }
        for k in 0..n {
            self.cost.swap(k * n + i, k * n + j);
        }
        self.order.swap(i, j);
        let (a, b) = (self.order.as_slice()[i], self.order.as_slice()[j]);
        self.position_of[a] = i;
        self.position_of[b] = j;
        Ok(())
    }
}

/// `c(prev_i, b) + c(next_i, b) + c(a, prev_j) + c(a, next_j) - incident(i) - incident(j)`
/// for positions that share no edge.
#[inline(always)]
fn separated_delta(
    prev_i_to_j: f64,
    next_i_to_j: f64,
    i_to_prev_j: f64,
    i_to_next_j: f64,
    rem_i: f64,
    rem_j: f64,
) -> f64 {
    ((prev_i_to_j + next_i_to_j) + (i_to_prev_j + i_to_next_j)) - (rem_i + rem_j)
}

#[inline]
pub(crate) fn weighted_sq_dist(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((x, y), w)| {
            let d = x - y;
            w * d * d
        })
        .sum()
}

/// A candidate exchange of positions `i < j` with its tour-cost change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapMove {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
}

impl SwapMove {
    /// The identity move `π_{i,i}`.
    pub const IDENTITY: SwapMove = SwapMove {
        i: 0,
        j: 0,
        delta: 0.0,
    };

    pub fn is_improving(&self) -> bool {
        self.delta < 0.0
    }

    /// Lower delta wins; ties go to the lexicographically smaller improving pair.
    fn better(a: SwapMove, b: SwapMove) -> SwapMove {
        match (a.is_improving(), b.is_improving()) {
            (false, false) => SwapMove::IDENTITY,
            (true, false) => a,
            (false, true) => b,
            (true, true) => {
                if b.delta < a.delta || (b.delta == a.delta && (b.i, b.j) < (a.i, a.j)) {
                    b
                } else {
                    a
                }
            }
        }
    }
}
