use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Non-empty ordered sequence of binary symbols, leftmost symbol first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Parse("empty bit sequence".into()));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Parse(format!("symbol {b} is not binary")));
        }
        Ok(BitSequence(bits))
    }

    /// Caller guarantees every symbol is 0 or 1 and the vector is non-empty.
    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(!bits.is_empty() && bits.iter().all(|&b| b <= 1));
        BitSequence(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_raw(vec![0; len.max(1)])
    }

    /// `len` low bits of `value`, most significant bit first.
    pub fn from_value(value: u64, len: usize) -> Self {
        Self::from_raw((0..len).rev().map(|j| ((value >> j) & 1) as u8).collect())
    }

    /// Decimal value with the leftmost bit most significant.
    pub fn value(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn hamming_distance(&self, other: &BitSequence) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
            + self.len().abs_diff(other.len())
    }

    pub fn flipped(&self, pos: usize) -> BitSequence {
        let mut bits = self.0.clone();
        bits[pos] ^= 1;
        BitSequence(bits)
    }

    pub fn concat(parts: &[&[u8]]) -> BitSequence {
        Self::from_raw(parts.concat())
    }
}

impl Index<usize> for BitSequence {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        BitSequence::new(bits)
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let b: BitSequence = "01100010".parse().unwrap();
        assert_eq!(b.len(), 8);
        assert_eq!(b.weight(), 3);
        assert_eq!(b.value(), 0b01100010);
        assert_eq!(b.to_string(), "01100010");
        assert_eq!(BitSequence::from_value(0b011, 3).to_string(), "011");
    }

    #[test]
    fn rejects_bad_input() {
        assert!("".parse::<BitSequence>().is_err());
        assert!("0120".parse::<BitSequence>().is_err());
        assert!(BitSequence::new(vec![0, 2]).is_err());
        assert!(BitSequence::new(vec![]).is_err());
    }

    #[test]
    fn distance() {
        let a: BitSequence = "11100001".parse().unwrap();
        let b: BitSequence = "01100010".parse().unwrap();
        assert_eq!(a.hamming_distance(&b), 3);
        assert_eq!(a.flipped(0).hamming_distance(&a), 1);
    }
}
