//! Crisp permutations stored as index vectors.
//!
//! A permutation `sigma` stands for the permutation matrix `P` with
//! `P[t, sigma(t)] = 1`, so row `t` of `P X` is row `sigma(t)` of `X`.
//! Indices are 0-based in memory and 1-based in every serialized form.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationVector(Vec<usize>);

impl PermutationVector {
    /// Validates that `sigma` is a bijection on `0..sigma.len()`.
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for (t, &s) in sigma.iter().enumerate() {
            if s >= n {
                return Err(Error::Input(format!(
                    "permutation entry {s} at position {t} is out of range for length {n}"
                )));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::Input(format!("permutation repeats index {s}")));
            }
        }
        Ok(Self(sigma))
    }

    /// Parses 1-based indices.
    pub fn from_one_based(sigma: &[usize]) -> Result<Self> {
        let zero_based = sigma
            .iter()
            .map(|&s| {
                s.checked_sub(1)
                    .ok_or_else(|| Error::Input("1-based permutation contains 0".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero_based)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(rng);
        Self(sigma)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|s| s + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (t, &s) in self.0.iter().enumerate() {
            inv[s] = t;
        }
        Self(inv)
    }

    /// `(self ∘ inner)(t) = self(inner(t))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.len() != inner.len() {
            return Err(Error::Shape(format!(
                "cannot compose permutations of lengths {} and {}",
                self.len(),
                inner.len()
            )));
        }
        Ok(Self(inner.0.iter().map(|&t| self.0[t]).collect()))
    }

    /// Exchanges the entries at positions `i` and `j` (the move `π_{i,j} P`).
    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }

    /// Cyclic translation of the ordering: position `t` takes the entry at `t + k`.
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.len();
        Self((0..n).map(|t| self.0[(t + k) % n]).collect())
    }

    /// The order-inverting (flipped) ordering.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// True when `self` is a cyclic shift of the identity, possibly flipped,
    /// i.e. an element of the dihedral group acting on the ring.
    pub fn is_ring_symmetry(&self) -> bool {
        let n = self.len();
        if n < 3 {
            return true;
        }
        let start = self.0[0];
        let forward = (0..n).all(|t| self.0[t] == (start + t) % n);
        let backward = (0..n).all(|t| self.0[t] == (start + n - t) % n);
        forward || backward
    }

    /// True when `self` and `other` describe the same ring ordering up to a
    /// cyclic shift and a flip.
    pub fn ring_equivalent(&self, other: &Self) -> bool {
        self.len() == other.len()
            && other
                .inverse()
                .compose(self)
                .is_ok_and(|rel| rel.is_ring_symmetry())
    }
}

impl AsRef<[usize]> for PermutationVector {
    fn as_ref(&self) -> &[usize] {
        &self.0
    }
}

impl Serialize for PermutationVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PermutationVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(deserializer)?;
        Self::from_one_based(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(PermutationVector::new(vec![0, 0, 1]).is_err());
        assert!(PermutationVector::new(vec![0, 1, 3]).is_err());
        assert!(PermutationVector::from_one_based(&[0, 1, 2]).is_err());
    }

    #[test]
    fn ring_symmetries() {
        let id = PermutationVector::identity(5);
        assert!(id.is_ring_symmetry());
        assert!(id.shifted(2).is_ring_symmetry());
        assert!(id.reversed().shifted(3).is_ring_symmetry());
        let mut swapped = id.clone();
        swapped.swap(0, 2);
        assert!(!swapped.is_ring_symmetry());
    }

    fn perm(n: usize) -> impl Strategy<Value = PermutationVector> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| PermutationVector::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(p in (3usize..40).prop_flat_map(perm)) {
            let id = PermutationVector::identity(p.len());
            prop_assert_eq!(p.compose(&p.inverse()).unwrap(), id.clone());
            prop_assert_eq!(p.inverse().compose(&p).unwrap(), id);
        }

        #[test]
        fn shifts_and_flips_are_ring_equivalent(p in (3usize..40).prop_flat_map(perm), k in 0usize..40) {
            prop_assert!(p.shifted(k).ring_equivalent(&p));
            prop_assert!(p.reversed().shifted(k).ring_equivalent(&p));
        }

        #[test]
        fn one_based_serialization_round_trips(p in (3usize..40).prop_flat_map(perm)) {
            let json = serde_json::to_string(&p).unwrap();
            let back: PermutationVector = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
