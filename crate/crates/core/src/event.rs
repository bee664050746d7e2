//! Events: subsets of a finite universe of worlds, stored as bitsets.

use std::cmp::Ordering;
use std::fmt;

use smallvec::{smallvec, SmallVec};

const WORD: usize = 64;

/// A subset of `{0, .., universe_size - 1}`.
///
/// Ordering is canonical: by cardinality, then lexicographically by the
/// ascending list of members.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventSet {
    bits: SmallVec<[u64; 2]>,
    universe: usize,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

impl EventSet {
    pub fn empty(universe: usize) -> Self {
        EventSet { bits: smallvec![0; words_for(universe)], universe }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn singleton(universe: usize, i: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(i);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, it: I) -> Self {
        let mut s = Self::empty(universe);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Set from the low bits of `mask`; requires `universe <= 64`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= WORD, "mask constructor limited to 64 worlds");
        let keep = if universe == WORD { u64::MAX } else { (1u64 << universe) - 1 };
        EventSet { bits: smallvec![mask & keep], universe }
    }

    /// Low word of the bitset; exact when `universe <= 64`.
    pub fn mask(&self) -> u64 {
        self.bits[0]
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "world index {i} outside universe of {}", self.universe);
        self.bits[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.bits[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.bits[i / WORD] & (1 << (i % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        debug_assert_eq!(self.universe, other.universe, "universe mismatch");
        EventSet {
            bits: self.bits.iter().zip(other.bits.iter()).map(|(&a, &b)| f(a, b)).collect(),
            universe: self.universe,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.universe).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(other.bits.iter()).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.iter().zip(other.bits.iter()).all(|(&a, &b)| a & b == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in binary counting order over its members
    /// (so the empty set comes first and `self` last).
    pub fn subsets(&self) -> impl Iterator<Item = EventSet> + '_ {
        let members = self.to_vec();
        assert!(members.len() < 31, "refusing to enumerate 2^{} subsets", members.len());
        let n = self.universe;
        (0u32..(1u32 << members.len())).map(move |m| {
            EventSet::from_indices(n, members.iter().enumerate().filter(|(k, _)| m & (1 << k) != 0).map(|(_, &w)| w))
        })
    }
}

impl Ord for EventSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for EventSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
