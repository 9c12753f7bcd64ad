//! Enumeration of all subsets of the trace set.

use crate::idset::{IdSet, TraceId};
use alloc::vec::Vec;

/// All subsets of `{0, .., n-1}`, by cardinality and then lexicographically.
pub fn subsets(n: usize) -> Subsets {
    Subsets {
        n,
        current: Some(Vec::new()),
    }
}

pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = IdSet;

    fn next(&mut self) -> Option<IdSet> {
        let combo = self.current.as_mut()?;
        let out: IdSet = combo.iter().map(|&k| TraceId(k as u32)).collect();
        let k = combo.len();
        // Advance to the next k-combination, or to the first of size k+1.
        let mut pos = k;
        while pos > 0 && combo[pos - 1] == self.n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            if k == self.n {
                self.current = None;
            } else {
                *combo = (0..=k).collect();
            }
        } else {
            combo[pos - 1] += 1;
            for j in pos..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(s: &IdSet) -> Vec<u32> {
        s.iter().map(|t| t.0).collect()
    }

    #[test]
    fn two_elements() {
        let all: Vec<_> = subsets(2).map(|s| ids(&s)).collect();
        assert_eq!(all, [alloc::vec![], alloc::vec![0], alloc::vec![1], alloc::vec![0, 1]]);
    }

    #[test]
    fn empty_universe() {
        assert_eq!(subsets(0).count(), 1);
    }

    #[test]
    fn counts_and_order() {
        for n in 0..9 {
            let all: Vec<_> = subsets(n).collect();
            assert_eq!(all.len(), 1 << n);
            for w in all.windows(2) {
                let (a, b) = (ids(&w[0]), ids(&w[1]));
                assert!(a.len() < b.len() || (a.len() == b.len() && a < b));
            }
        }
    }
}
