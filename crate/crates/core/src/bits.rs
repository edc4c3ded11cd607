//! Fixed-width bit vectors used for members of set systems and rows of relations.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A bit vector of fixed length. Bit `i` encodes membership of element `i`.
///
/// Ordering is lexicographic on the bit string read from position 0, so
/// `"0110" < "1000"`. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::new(len);
        for i in indices {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, bound: len });
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Parses a `'0'`/`'1'` string; character `i` is bit `i`.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut out = Self::new(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.insert(i),
                other => return Err(Error::Parse(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(out)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.insert(i)
        } else {
            self.remove(i)
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    fn check_width(&self, other: &BitSet) {
        assert_eq!(self.len, other.len, "bit vector width mismatch");
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn or(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn complement(&self) -> BitSet {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// `self \ other`
    pub fn difference(&self, other: &BitSet) -> BitSet {
        self.check_width(other);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Packs the bits at `positions` into a `u128`, bit `j` of the result
    /// being bit `positions[j]` of `self`. Requires `positions.len() <= 128`.
    #[inline]
    pub fn pack(&self, positions: &[usize]) -> u128 {
        debug_assert!(positions.len() <= 128);
        let mut key = 0u128;
        for (j, &p) in positions.iter().enumerate() {
            if self.contains(p) {
                key |= 1 << j;
            }
        }
        key
    }

    /// Restriction to `positions`, reindexed to `0..positions.len()`.
    pub fn restrict(&self, positions: &[usize]) -> BitSet {
        let mut out = BitSet::new(positions.len());
        for (j, &p) in positions.iter().enumerate() {
            if self.contains(p) {
                out.insert(j);
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl Ord for BitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                // lowest differing bit decides; the side holding a 0 there sorts first
                let low = (a ^ b).trailing_zeros();
                return if a >> low & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSet({})", self.to_bit_string())
    }
}

impl fmt::Display for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let s = BitSet::from_bit_str("0110100").unwrap();
        assert_eq!(s.to_bit_string(), "0110100");
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(s.count(), 3);
    }

    #[test]
    fn rejects_bad_characters() {
        assert!(BitSet::from_bit_str("01x").is_err());
    }

    #[test]
    fn lexicographic_order_matches_strings() {
        let mut strs = vec!["1000", "0110", "0000", "0111", "1001", "0001"];
        let mut sets: Vec<BitSet> = strs.iter().map(|s| BitSet::from_bit_str(s).unwrap()).collect();
        sets.sort();
        strs.sort();
        let back: Vec<String> = sets.iter().map(|s| s.to_bit_string()).collect();
        assert_eq!(back, strs);
    }

    #[test]
    fn order_across_word_boundary() {
        let mut a = BitSet::new(130);
        let mut b = BitSet::new(130);
        a.insert(129);
        b.insert(70);
        assert!(a < b);
    }

    #[test]
    fn complement_keeps_tail_clear() {
        let s = BitSet::new(70).complement();
        assert_eq!(s.count(), 70);
        assert_eq!(s, BitSet::full(70));
    }

    #[test]
    fn pack_and_restrict() {
        let s = BitSet::from_bit_str("101101").unwrap();
        assert_eq!(s.pack(&[0, 1, 5]), 0b101);
        assert_eq!(s.restrict(&[2, 3, 4]).to_bit_string(), "110");
    }
}
