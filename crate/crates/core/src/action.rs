//! Fixed-width bit-vector representation of an action (a subset of arms).

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const BITS: usize = 64;

/// A subset of the ground set `[n]`, stored as a fixed-width bit vector.
///
/// The width is fixed at construction; every operation that combines two
/// sets requires them to share the same ground-set size. Iteration is always
/// in ascending index order, so a set round-trips losslessly with a sorted
/// index list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ActionSet {
    n: usize,
    blocks: Vec<u64>,
}

impl ActionSet {
    /// The empty subset of `[n]`.
    pub fn empty(n: usize) -> Self {
        ActionSet {
            n,
            blocks: vec![0; n.div_ceil(BITS)],
        }
    }

    /// Builds a set from arm indices; duplicates are allowed and collapse.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut set = ActionSet::empty(n);
        for &i in indices {
            if i >= n {
                return Err(Error::invalid(format!(
                    "arm index {i} out of range for ground set of size {n}"
                )));
            }
            set.insert(i);
        }
        Ok(set)
    }

    /// Ground-set size this set is defined over.
    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Number of arms in the set.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Inserts arm `i`. Panics if `i` is out of range.
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "arm index {} out of range (n = {})", i, self.n);
        self.blocks[i / BITS] |= 1u64 << (i % BITS);
    }

    /// Removes arm `i`. Panics if `i` is out of range.
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.n, "arm index {} out of range (n = {})", i, self.n);
        self.blocks[i / BITS] &= !(1u64 << (i % BITS));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.blocks[i / BITS] >> (i % BITS) & 1 == 1
    }

    /// Returns a copy with arm `i` inserted.
    pub fn with(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    /// Returns a copy with arm `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    /// Arms in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut bits = block;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(bi * BITS + tz)
                }
            })
        })
    }

    /// Sorted index list.
    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Orders sets by the numeric value of their bit pattern (arm `i` weighs
/// `2^i`), which is the tie-break used by the brute-force oracles.
impl Ord for ActionSet {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.n, other.n, "comparing sets over different ground sets");
        for (a, b) in self.blocks.iter().rev().zip(other.blocks.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for ActionSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
