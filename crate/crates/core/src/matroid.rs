//! Matroid representations with an independence oracle, rank, greedy linear
//! maximization, and an exhaustive enumeration oracle for small instances.

use crate::action::ActionSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Whether feasible actions are all independent sets or only the bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintMode {
    IndependentSets,
    Bases,
}

/// Supported matroid families.
#[derive(Clone, Debug)]
pub enum MatroidKind {
    /// Sets of cardinality at most `k`.
    Uniform { k: usize },
    /// At most `caps[b]` elements from each block of a partition of `[n]`.
    Partition {
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    /// Forests of a multigraph; arm `i` is the `i`-th edge.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
}

/// A matroid over ground set `[n]`.
#[derive(Clone, Debug)]
pub struct Matroid {
    n: usize,
    kind: MatroidKind,
    rank: usize,
    /// Partition matroids: block id per element, for O(1) oracle queries.
    block_of: Vec<usize>,
}

impl Matroid {
    /// Uniform matroid of rank `k` on `n` elements.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::invalid(format!(
                "uniform matroid requires k <= n, got k = {k}, n = {n}"
            )));
        }
        Ok(Matroid {
            n,
            kind: MatroidKind::Uniform { k },
            rank: k,
            block_of: Vec::new(),
        })
    }

    /// Partition matroid. `blocks` must partition `[n]` where `n` is the
    /// total number of listed elements.
    pub fn partition(blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::invalid(format!(
                "partition matroid has {} blocks but {} caps",
                blocks.len(),
                caps.len()
            )));
        }
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= n {
                    return Err(Error::invalid(format!(
                        "partition block element {i} out of range for n = {n}"
                    )));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::invalid(format!(
                        "element {i} appears in more than one partition block"
                    )));
                }
                block_of[i] = b;
            }
        }
        // Every index covered: counts match and no duplicates were found.
        let rank = blocks.iter().zip(&caps).map(|(b, &c)| b.len().min(c)).sum();
        Ok(Matroid {
            n,
            kind: MatroidKind::Partition { blocks, caps },
            rank,
            block_of,
        })
    }

    /// Graphic matroid of a multigraph. Arm `i` is `edges[i]`; self-loops are
    /// rejected, parallel edges are allowed.
    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (idx, &(u, v)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices {
                return Err(Error::invalid(format!(
                    "edge {idx} = ({u},{v}) has an endpoint outside [0,{vertices})"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!(
                    "edge {idx} = ({u},{v}) is a self-loop"
                )));
            }
        }
        let mut uf = UnionFind::new(vertices);
        for &(u, v) in &edges {
            uf.union(u, v);
        }
        let rank = vertices - uf.components();
        Ok(Matroid {
            n: edges.len(),
            kind: MatroidKind::Graphic { vertices, edges },
            rank,
            block_of: Vec::new(),
        })
    }

    /// Complete graph on `v` vertices with edges in lexicographic vertex
    /// order.
    pub fn complete_graph(v: usize) -> Self {
        let mut edges = Vec::with_capacity(v * (v - 1) / 2);
        for u in 0..v {
            for w in u + 1..v {
                edges.push((u, w));
            }
        }
        Matroid::graphic(v, edges).expect("complete graph edges are valid")
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    /// Cardinality of every maximal independent set.
    pub fn rank(&self) -> usize {
        self.rank
    }

    fn check_ground(&self, a: &ActionSet) -> Result<()> {
        if a.ground_size() != self.n {
            return Err(Error::invalid(format!(
                "action over ground set of size {} queried against matroid with n = {}",
                a.ground_size(),
                self.n
            )));
        }
        Ok(())
    }

    /// Independence oracle: is `a` in the independent-set family?
    pub fn is_independent(&self, a: &ActionSet) -> Result<bool> {
        self.check_ground(a)?;
        let mut oracle = IncrementalOracle::new(self);
        Ok(a.iter().all(|i| oracle.try_add(i)))
    }

    /// Maximizes a linear set function `a -> sum of weights over a` over the
    /// independent sets or the bases, by the greedy algorithm.
    ///
    /// Items are scanned in order of decreasing weight, ties broken by lowest
    /// index. In `IndependentSets` mode only items with nonnegative weight
    /// are considered; in `Bases` mode items are added regardless of sign
    /// until the output reaches full rank. Weights may be infinite (used for
    /// forced-exploration indices) but not NaN.
    pub fn linear_max_greedy<F: Scalar>(
        &self,
        weights: &[F],
        mode: ConstraintMode,
    ) -> Result<ActionSet> {
        if weights.len() != self.n {
            return Err(Error::invalid(format!(
                "{} weights supplied for ground set of size {}",
                weights.len(),
                self.n
            )));
        }
        if weights.iter().any(|w| w.is_nan()) {
            return Err(Error::invalid("NaN weight in linear maximization"));
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&i, &j| {
            weights[j]
                .partial_cmp(&weights[i])
                .expect("weights are NaN-free")
                .then(i.cmp(&j))
        });
        let mut out = ActionSet::empty(self.n);
        let mut oracle = IncrementalOracle::new(self);
        let mut taken = 0usize;
        for i in order {
            if mode == ConstraintMode::IndependentSets && weights[i] < F::zero() {
                break;
            }
            if oracle.try_add(i) {
                out.insert(i);
                taken += 1;
                if mode == ConstraintMode::Bases && taken == self.rank {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// All feasible actions in a deterministic order (depth-first by
    /// ascending index; the empty set first in `IndependentSets` mode).
    ///
    /// Guarded to `n <= 20`; this is a test oracle, not a production path.
    pub fn enumerate_feasible(&self, mode: ConstraintMode) -> Result<Vec<ActionSet>> {
        const LIMIT: usize = 20;
        if self.n > LIMIT {
            return Err(Error::Capacity {
                what: "feasible-set enumeration",
                limit: LIMIT,
                actual: self.n,
            });
        }
        let mut out = Vec::new();
        let mut current = ActionSet::empty(self.n);
        self.enumerate_rec(&mut current, 0, mode, &mut out);
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        current: &mut ActionSet,
        start: usize,
        mode: ConstraintMode,
        out: &mut Vec<ActionSet>,
    ) {
        match mode {
            ConstraintMode::IndependentSets => out.push(current.clone()),
            ConstraintMode::Bases => {
                if current.len() == self.rank {
                    out.push(current.clone());
                    return;
                }
            }
        }
        for i in start..self.n {
            current.insert(i);
            if self.is_independent(current).expect("ground sizes match") {
                self.enumerate_rec(current, i + 1, mode, out);
            }
            current.remove(i);
        }
    }
}

/// Incremental independence tracker: answers "can this element join the set
/// built so far" in near-constant time per query.
pub(crate) enum IncrementalOracle<'a> {
    Uniform {
        size: usize,
        k: usize,
    },
    Partition {
        counts: Vec<usize>,
        m: &'a Matroid,
    },
    Graphic {
        uf: UnionFind,
        edges: &'a [(usize, usize)],
    },
}

impl<'a> IncrementalOracle<'a> {
    pub(crate) fn new(m: &'a Matroid) -> Self {
        match &m.kind {
            MatroidKind::Uniform { k } => IncrementalOracle::Uniform { size: 0, k: *k },
            MatroidKind::Partition { caps, .. } => IncrementalOracle::Partition {
                counts: vec![0; caps.len()],
                m,
            },
            MatroidKind::Graphic { vertices, edges } => IncrementalOracle::Graphic {
                uf: UnionFind::new(*vertices),
                edges,
            },
        }
    }

    /// Adds element `i` if the set stays independent; reports whether it did.
    pub(crate) fn try_add(&mut self, i: usize) -> bool {
        match self {
            IncrementalOracle::Uniform { size, k } => {
                if *size < *k {
                    *size += 1;
                    true
                } else {
                    false
                }
            }
            IncrementalOracle::Partition { counts, m } => {
                let b = m.block_of[i];
                let cap = match &m.kind {
                    MatroidKind::Partition { caps, .. } => caps[b],
                    _ => unreachable!(),
                };
                if counts[b] < cap {
                    counts[b] += 1;
                    true
                } else {
                    false
                }
            }
            IncrementalOracle::Graphic { uf, edges } => {
                let (u, v) = edges[i];
                uf.union(u, v)
            }
        }
    }
}

/// Union-find with path compression and union by rank.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `x` and `y`; false if they were already joined.
    pub(crate) fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (hi, lo) = if self.rank[rx] >= self.rank[ry] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        self.components -= 1;
        true
    }

    pub(crate) fn components(&self) -> usize {
        self.components
    }
}
