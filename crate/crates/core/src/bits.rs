//! Growable vertex bitsets for graphs of arbitrary size.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn with_capacity(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut set = Self::with_capacity(n);
        for v in 0..n {
            set.insert(v);
        }
        set
    }

    pub fn from_iter_n(n: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::with_capacity(n);
        for v in items {
            set.insert(v);
        }
        set
    }

    pub fn insert(&mut self, v: usize) {
        let w = v / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Number of elements of `other` not already in `self`.
    pub fn count_new(&self, other: &VertexSet) -> usize {
        other
            .words
            .iter()
            .enumerate()
            .map(|(i, &b)| (b & !self.words.get(i).copied().unwrap_or(0)).count_ones() as usize)
            .sum()
    }

    /// `self \ mask` is a subset of `other \ mask`.
    pub fn is_subset_outside(&self, other: &VertexSet, mask: &VertexSet) -> bool {
        self.words.iter().enumerate().all(|(i, &a)| {
            let m = mask.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            a & !m & !b == 0
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + t)
                }
            })
        })
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
