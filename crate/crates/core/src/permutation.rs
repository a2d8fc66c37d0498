//! Finite permutations of `[0, size)` and finite fragments of permutations of ω.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitPrefix;
use crate::error::{Error, Result};

/// A bijection of `[0, size)` together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePermutation {
    forward: Vec<u64>,
    inverse: Vec<u64>,
}

impl FinitePermutation {
    /// Validates that `forward` hits every value of `[0, len)` exactly once.
    pub fn from_forward(forward: Vec<u64>) -> Result<Self> {
        let size = forward.len() as u64;
        let mut inverse = vec![u64::MAX; forward.len()];
        for (i, &v) in forward.iter().enumerate() {
            if v >= size {
                return Err(Error::NotPermutation(format!(
                    "image {v} of {i} is outside [0, {size})"
                )));
            }
            if inverse[v as usize] != u64::MAX {
                return Err(Error::NotPermutation(format!(
                    "value {v} is hit by both {} and {i}",
                    inverse[v as usize]
                )));
            }
            inverse[v as usize] = i as u64;
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(size: u64) -> Self {
        let forward: Vec<u64> = (0..size).collect();
        Self { inverse: forward.clone(), forward }
    }

    /// `j ↦ size − 1 − j`.
    pub fn reversal(size: u64) -> Self {
        let forward: Vec<u64> = (0..size).rev().collect();
        Self { inverse: forward.clone(), forward }
    }

    /// Swaps `2k ↔ 2k+1`; a trailing odd element stays fixed.
    pub fn swap_pairs(size: u64) -> Self {
        let forward: Vec<u64> = (0..size)
            .map(|j| {
                let partner = j ^ 1;
                if partner < size { partner } else { j }
            })
            .collect();
        Self { inverse: forward.clone(), forward }
    }

    pub fn random<R: Rng + ?Sized>(size: u64, rng: &mut R) -> Self {
        let mut forward: Vec<u64> = (0..size).collect();
        forward.shuffle(rng);
        Self::from_forward(forward).expect("a shuffle is a bijection")
    }

    pub fn size(&self) -> u64 {
        self.forward.len() as u64
    }

    pub fn apply(&self, i: u64) -> u64 {
        self.forward[i as usize]
    }

    pub fn invert(&self, j: u64) -> u64 {
        self.inverse[j as usize]
    }

    pub fn forward(&self) -> &[u64] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u64] {
        &self.inverse
    }

    /// Sorted image of a set of points.
    pub fn image_of(&self, points: impl IntoIterator<Item = u64>) -> Vec<u64> {
        let mut image: Vec<u64> = points.into_iter().map(|p| self.apply(p)).collect();
        image.sort_unstable();
        image
    }
}

/// The characteristic function of `π(X ∩ [0, size))`: bit `j` is `X(π⁻¹(j))`.
pub fn permute_image(pi: &FinitePermutation, a: &BitPrefix) -> Result<BitPrefix> {
    if a.len() != pi.size() {
        return Err(Error::LengthMismatch { left: pi.size(), right: a.len() });
    }
    let bits = a.as_slice();
    Ok(BitPrefix::from_fn(pi.size(), |j| bits[pi.invert(j) as usize]))
}

/// The images `π(0), …, π(H−1)` of a permutation of ω, known up to a horizon `H`.
///
/// Preimages are answered only for values that actually appear among the
/// known images; anything else is a horizon error.
#[derive(Debug, Clone)]
pub struct PermutationFragment {
    name: String,
    images: Vec<u64>,
    preimages: HashMap<u64, u64>,
}

impl PermutationFragment {
    pub fn new(name: impl Into<String>, images: Vec<u64>) -> Result<Self> {
        let mut preimages = HashMap::with_capacity(images.len());
        for (i, &v) in images.iter().enumerate() {
            if let Some(previous) = preimages.insert(v, i as u64) {
                return Err(Error::NotPermutation(format!(
                    "value {v} is hit by both {previous} and {i}"
                )));
            }
        }
        Ok(Self { name: name.into(), images, preimages })
    }

    pub fn from_fn(name: impl Into<String>, horizon: u64, f: impl Fn(u64) -> u64) -> Result<Self> {
        Self::new(name, (0..horizon).map(f).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> u64 {
        self.images.len() as u64
    }

    pub fn image(&self, i: u64) -> Result<u64> {
        self.images.get(i as usize).copied().ok_or_else(|| {
            Error::Horizon(format!("{}: index {i} is beyond horizon {}", self.name, self.horizon()))
        })
    }

    pub fn preimage(&self, value: u64) -> Result<u64> {
        self.preimages.get(&value).copied().ok_or_else(|| {
            Error::Horizon(format!(
                "{}: no preimage of {value} among the first {} images",
                self.name,
                self.horizon()
            ))
        })
    }

    /// Sorted images of `[lo, hi)`.
    pub fn image_of_range(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        let mut image = (lo..hi).map(|i| self.image(i)).collect::<Result<Vec<_>>>()?;
        image.sort_unstable();
        Ok(image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_reversal_images() {
        let a: BitPrefix = "0110".parse().unwrap();
        assert_eq!(permute_image(&FinitePermutation::identity(4), &a).unwrap(), a);
        let single: BitPrefix = "1000".parse().unwrap();
        assert_eq!(
            permute_image(&FinitePermutation::reversal(4), &single).unwrap().to_string(),
            "0001"
        );
    }

    #[test]
    fn swap_pairs_image() {
        let a: BitPrefix = "101010".parse().unwrap();
        let pi = FinitePermutation::swap_pairs(6);
        assert_eq!(permute_image(&pi, &a).unwrap().to_string(), "010101");
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a: BitPrefix = "101".parse().unwrap();
        assert!(matches!(
            permute_image(&FinitePermutation::identity(4), &a),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(FinitePermutation::from_forward(vec![0, 1, 1]).is_err());
        assert!(FinitePermutation::from_forward(vec![0, 3, 1]).is_err());
        assert!(PermutationFragment::new("dup", vec![4, 2, 4]).is_err());
    }

    #[test]
    fn fragment_preimages_stop_at_horizon() {
        let frag = PermutationFragment::from_fn("shift", 5, |i| if i < 4 { i + 1 } else { 0 }).unwrap();
        assert_eq!(frag.preimage(0).unwrap(), 4);
        assert!(matches!(frag.preimage(5), Err(Error::Horizon(_))));
        assert!(matches!(frag.image(5), Err(Error::Horizon(_))));
    }
}
