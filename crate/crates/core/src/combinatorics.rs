//! Deterministic enumeration helpers shared by the cause search.

use alloc::vec;
use alloc::vec::Vec;

/// All `k`-element index combinations of `0..n`, in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Subsets of `0..n` ordered by size, then lexicographically.
pub(crate) fn subsets_by_size(n: usize, sizes: core::ops::RangeInclusive<usize>) -> impl Iterator<Item = Vec<usize>> {
    sizes.flat_map(move |k| Combinations::new(n, k))
}

/// Mixed-radix counter: every tuple with `t[i] < radices[i]`, first position most significant.
pub(crate) struct Product {
    radices: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl Product {
    pub(crate) fn new(radices: Vec<usize>) -> Self {
        let done = radices.contains(&0);
        let cur = vec![0; radices.len()];
        Product { radices, cur, done }
    }
}

impl Iterator for Product {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.radices.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.radices[i] {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}
