//! Bitset of edge identifiers.

use std::cmp::Ordering;
use std::fmt;

use crate::graph::Edge;

/// A set of edge ids backed by a bitset indexed by the raw id.
///
/// Trailing zero words are always trimmed, so derived equality and hashing
/// agree with set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    words: Vec<u64>,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet { words: Vec::new() }
    }

    pub fn singleton(e: Edge) -> Self {
        let mut s = EdgeSet::new();
        s.insert(e);
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        let (w, b) = ((e / 64) as usize, e % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, e: Edge) -> bool {
        let (w, b) = ((e / 64) as usize, e % 64);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    /// Adds `e` if absent, removes it otherwise.
    pub fn toggle(&mut self, e: Edge) {
        if !self.remove(e) {
            self.insert(e);
        }
    }

    pub fn contains(&self, e: Edge) -> bool {
        let (w, b) = ((e / 64) as usize, e % 64);
        w < self.words.len() && self.words[w] >> b & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(i as u32 * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<Edge> {
        self.iter().next()
    }

    pub fn to_vec(&self) -> Vec<Edge> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let n = self.words.len().max(other.words.len());
        let get = |v: &Vec<u64>, i: usize| v.get(i).copied().unwrap_or(0);
        let mut out = EdgeSet { words: (0..n).map(|i| f(get(&self.words, i), get(&other.words, i))).collect() };
        out.trim();
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn sym_diff(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn sym_diff_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.trim();
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Parity of `|self ∩ other|`, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut s = EdgeSet::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl<'a> FromIterator<&'a Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = &'a Edge>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl Extend<Edge> for EdgeSet {
    fn extend<I: IntoIterator<Item = Edge>>(&mut self, iter: I) {
        for e in iter {
            self.insert(e);
        }
    }
}

// Lexicographic order on the sorted id lists.
impl Ord for EdgeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for EdgeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[macro_export]
macro_rules! eset {
    () => { $crate::EdgeSet::new() };
    ($($e:expr),+ $(,)?) => { [$($e),+].into_iter().collect::<$crate::EdgeSet>() };
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let a: EdgeSet = [1, 2, 70].into_iter().collect();
        let b: EdgeSet = [2, 3].into_iter().collect();
        assert_eq!(a.sym_diff(&b).to_vec(), vec![1, 3, 70]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.len(), 3);
        let mut c = a.clone();
        c.remove(70);
        assert_eq!(c.words.len(), 1);
        assert!(c.is_subset(&a));
        assert!(a.dot(&b));
    }

    #[test]
    fn lexicographic_order() {
        let a: EdgeSet = [1, 5].into_iter().collect();
        let b: EdgeSet = [2].into_iter().collect();
        let c: EdgeSet = [1, 2, 9].into_iter().collect();
        assert!(a < b);
        assert!(c < a);
    }

    proptest! {
        #[test]
        fn matches_btreeset(xs in proptest::collection::vec(0u32..200, 0..30),
                            ys in proptest::collection::vec(0u32..200, 0..30)) {
            use std::collections::BTreeSet;
            let (sa, sb): (BTreeSet<u32>, BTreeSet<u32>) =
                (xs.iter().copied().collect(), ys.iter().copied().collect());
            let (a, b): (EdgeSet, EdgeSet) = (xs.iter().collect(), ys.iter().collect());
            let sd: Vec<u32> = sa.symmetric_difference(&sb).copied().collect();
            prop_assert_eq!(a.sym_diff(&b).to_vec(), sd);
            prop_assert_eq!(a.is_subset(&b), sa.is_subset(&sb));
            prop_assert_eq!(a.cmp(&b), sa.iter().cmp(sb.iter()));
            prop_assert_eq!(a == b, sa == sb);
        }
    }
}
