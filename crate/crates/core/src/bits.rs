//! Finite initial segments of characteristic functions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The first `len` bits of a characteristic function `A ⊆ ω`.
///
/// Positions at or beyond `len` are undefined: reading them is an error, never
/// an implicit zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitPrefix {
    bits: Vec<bool>,
}

impl BitPrefix {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: u64) -> Self {
        Self { bits: vec![false; len as usize] }
    }

    pub fn ones(len: u64) -> Self {
        Self { bits: vec![true; len as usize] }
    }

    pub fn from_fn(len: u64, mut f: impl FnMut(u64) -> bool) -> Self {
        Self { bits: (0..len).map(&mut f).collect() }
    }

    /// Characteristic function of `members` restricted to `[0, len)`.
    pub fn from_members(len: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut bits = vec![false; len as usize];
        for m in members {
            if m >= len {
                return Err(Error::OutOfRange { index: m, len });
            }
            bits[m as usize] = true;
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: u64) -> Result<bool> {
        self.bits
            .get(index as usize)
            .copied()
            .ok_or(Error::OutOfRange { index, len: self.len() })
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Members of the set, in increasing order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64)
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    /// `|A ↾ n|`.
    pub fn count_ones_below(&self, n: u64) -> Result<u64> {
        if n > self.len() {
            return Err(Error::OutOfRange { index: n, len: self.len() });
        }
        Ok(self.bits[..n as usize].iter().filter(|&&b| b).count() as u64)
    }

    /// The first `n` bits.
    pub fn truncate(&self, n: u64) -> Result<Self> {
        if n > self.len() {
            return Err(Error::OutOfRange { index: n, len: self.len() });
        }
        Ok(Self { bits: self.bits[..n as usize].to_vec() })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(Self {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.intersection(other)?.count_ones() == 0)
    }
}

impl fmt::Display for BitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.len() <= 64 {
            write!(f, "BitPrefix({self})")
        } else {
            write!(f, "BitPrefix(len={}, ones={})", self.len(), self.count_ones())
        }
    }
}

impl FromStr for BitPrefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.bytes()
            .enumerate()
            .map(|(offset, c)| match c {
                b'0' => Ok(false),
                b'1' => Ok(true),
                other => Err(Error::Parse {
                    offset,
                    message: format!("expected '0' or '1', found {:?}", other as char),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl FromIterator<bool> for BitPrefix {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self { bits: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_past_the_prefix_are_errors() {
        let a: BitPrefix = "101".parse().unwrap();
        assert_eq!(a.get(2), Ok(true));
        assert_eq!(a.get(3), Err(Error::OutOfRange { index: 3, len: 3 }));
    }

    #[test]
    fn parse_reports_offset() {
        let err = "10x1".parse::<BitPrefix>().unwrap_err();
        assert!(matches!(err, Error::Parse { offset: 2, .. }));
    }

    #[test]
    fn members_round_trip() {
        let a = BitPrefix::from_members(10, [0, 1, 4]).unwrap();
        assert_eq!(a.to_string(), "1100100000");
        assert_eq!(a.members().collect::<Vec<_>>(), vec![0, 1, 4]);
        assert!(BitPrefix::from_members(3, [3]).is_err());
    }

    #[test]
    fn set_operations_require_equal_lengths() {
        let a: BitPrefix = "1100".parse().unwrap();
        let b: BitPrefix = "0110".parse().unwrap();
        assert_eq!(a.union(&b).unwrap().to_string(), "1110");
        assert_eq!(a.difference(&b).unwrap().to_string(), "1000");
        assert!(!a.is_disjoint(&b).unwrap());
        assert!(a.union(&BitPrefix::zeros(3)).is_err());
    }
}
