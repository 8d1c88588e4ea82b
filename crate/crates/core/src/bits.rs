//! Dense membership bitsets over point indices.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: u64,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: u64) -> BitSet {
        BitSet { len, words: vec![0; len.div_ceil(64) as usize] }
    }

    pub fn full(len: u64) -> BitSet {
        let mut b = BitSet { len, words: vec![!0; len.div_ceil(64) as usize] };
        let rem = len % 64;
        if rem != 0 {
            if let Some(last) = b.words.last_mut() {
                *last = (1u64 << rem) - 1;
            }
        }
        b
    }

    pub fn from_indices(len: u64, indices: impl IntoIterator<Item = u64>) -> BitSet {
        let mut b = BitSet::new(len);
        for i in indices {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, i: u64) -> bool {
        i < self.len && self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: u64) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: u64) {
        if i < self.len {
            self.words[(i >> 6) as usize] &= !(1 << (i & 63));
        }
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(wi as u64 * 64 + t)
            })
        })
    }

    /// True when every element of `self` is in `other`.
    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Run lengths alternating absent/present, starting with an absent run (possibly 0).
    pub fn runs(&self) -> Vec<u64> {
        let mut runs = Vec::new();
        let mut cur = false;
        let mut run = 0u64;
        for i in 0..self.len {
            if self.contains(i) != cur {
                runs.push(run);
                cur = !cur;
                run = 0;
            }
            run += 1;
        }
        runs.push(run);
        runs
    }

    pub fn from_runs(len: u64, runs: &[u64]) -> Option<BitSet> {
        let mut b = BitSet::new(len);
        let mut pos = 0u64;
        for (k, &r) in runs.iter().enumerate() {
            if k % 2 == 1 {
                for i in pos..pos.checked_add(r)?.min(len) {
                    b.insert(i);
                }
            }
            pos = pos.checked_add(r)?;
        }
        (pos == len).then_some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_round_trip() {
        let b = BitSet::from_indices(20, [0, 1, 5, 6, 7, 19]);
        let r = b.runs();
        assert_eq!(r, vec![0, 2, 3, 3, 11, 1]);
        assert_eq!(BitSet::from_runs(20, &r).unwrap(), b);
        assert_eq!(BitSet::full(70).count(), 70);
        assert_eq!(BitSet::full(70).runs(), vec![0, 70]);
        assert_eq!(BitSet::new(5).runs(), vec![5]);
        assert!(BitSet::from_runs(5, &[2, 2]).is_none());
    }

    #[test]
    fn iter_matches_contains() {
        let b = BitSet::from_indices(200, (0..200).filter(|i| i % 7 == 3));
        let v: Vec<u64> = b.iter().collect();
        assert_eq!(v, (0..200).filter(|i| i % 7 == 3).collect::<Vec<_>>());
        assert_eq!(b.count(), v.len() as u64);
    }
}
