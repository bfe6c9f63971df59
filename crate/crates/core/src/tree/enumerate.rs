//! Exhaustive enumeration and uniform sampling of labeled unrooted binary
//! topologies by sequential leaf insertion.
//!
//! Start from the star on leaves 0, 1, 2 (centre node `n`, edges listed in
//! leaf order). Leaf `k` (k = 3..n) is inserted into one of the `2k - 3`
//! edges present at that point: the chosen edge `(u, v)` is replaced by
//! `(u, w)`, and `(w, v)` and `(w, k)` are appended, where `w = n + k - 2` is
//! the new internal node. A tree is therefore identified by its choice
//! vector `(c_3, ..., c_{n-1})` with `0 <= c_k < 2k - 3`, and enumeration
//! visits choice vectors in lexicographic order.
//!
//! Sampling draws each `c_k` uniformly with `rand_chacha::ChaCha8Rng`
//! seeded by `seed_from_u64(seed)`; sample `i` of a stream uses stream id
//! `i` (`set_stream(i)`), so sample 0 equals [`random_tree`].

use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Tree, NONE};
use crate::error::{Error, Result};

/// Largest leaf count enumerated unless a caller raises the cap.
pub const DEFAULT_ENUMERATION_CAP: usize = 11;

/// `k!!` for odd or even `k`; `0!! = (-1)!! = 1` conventions apply to
/// `k <= 0`.
pub fn double_factorial(k: i64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    let mut i = k;
    while i > 1 {
        acc *= BigUint::from(i as u64);
        i -= 2;
    }
    acc
}

/// Number of unrooted binary topologies on `n` labeled leaves, `(2n-5)!!`.
pub fn count_trees(n: usize) -> Result<BigUint> {
    if n < 3 {
        return Err(Error::TooFewLeaves { min: 3, got: n });
    }
    Ok(double_factorial(2 * n as i64 - 5))
}

fn to_labels<S: AsRef<str>>(labels: &[S]) -> Result<Arc<[String]>> {
    let owned: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
    let mut seen = std::collections::HashSet::new();
    for l in &owned {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    if owned.len() < 3 {
        return Err(Error::TooFewLeaves {
            min: 3,
            got: owned.len(),
        });
    }
    Ok(owned.into())
}

/// Builds the tree identified by an insertion choice vector.
pub(crate) fn build_from_choices(labels: Arc<[String]>, choices: &[u32]) -> Tree {
    let n = labels.len();
    debug_assert_eq!(choices.len(), n - 3);
    let centre = n as u32;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(2 * n - 3);
    edges.extend([(0, centre), (1, centre), (2, centre)]);
    for (i, &c) in choices.iter().enumerate() {
        let k = (i + 3) as u32;
        let w = n as u32 + k - 2;
        let (u, v) = edges[c as usize];
        edges[c as usize] = (u, w);
        edges.push((w, v));
        edges.push((w, k));
    }
    let mut adj = vec![[NONE; 3]; 2 * n - 2];
    let mut deg = vec![0u8; 2 * n - 2];
    for (u, v) in edges {
        adj[u as usize][deg[u as usize] as usize] = v;
        deg[u as usize] += 1;
        adj[v as usize][deg[v as usize] as usize] = u;
        deg[v as usize] += 1;
    }
    Tree::from_parts(labels, adj)
}

#[derive(Clone, Debug)]
pub struct TreeEnumerator {
    labels: Arc<[String]>,
}

/// Enumerates every topology on `labels` (cap: [`DEFAULT_ENUMERATION_CAP`]).
pub fn enumerate_trees<S: AsRef<str>>(labels: &[S]) -> Result<TreeEnumerator> {
    TreeEnumerator::with_cap(labels, DEFAULT_ENUMERATION_CAP)
}

impl TreeEnumerator {
    pub fn with_cap<S: AsRef<str>>(labels: &[S], cap: usize) -> Result<TreeEnumerator> {
        let labels = to_labels(labels)?;
        if labels.len() > cap {
            return Err(Error::CapExceeded {
                what: "leaf count",
                value: labels.len(),
                cap,
            });
        }
        Ok(TreeEnumerator { labels })
    }

    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `(2n-5)!!`.
    pub fn total(&self) -> u64 {
        (3..self.labels.len()).map(|k| 2 * k as u64 - 3).product()
    }

    /// The whole space as a single stream.
    pub fn iter(&self) -> EnumPartition {
        EnumPartition::new(self.labels.clone(), Vec::new())
    }

    /// Splits the space by the first `depth` insertion choices (clamped to
    /// the number of insertion levels). Partitions are disjoint, cover the
    /// space, and are listed in enumeration order.
    pub fn partitions(&self, depth: usize) -> Vec<EnumPartition> {
        let levels = self.labels.len() - 3;
        let depth = depth.min(levels);
        let mut prefixes: Vec<Vec<u32>> = vec![Vec::new()];
        for level in 0..depth {
            let width = 2 * (level as u32 + 3) - 3;
            prefixes = prefixes
                .into_iter()
                .flat_map(|p| {
                    (0..width).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        prefixes
            .into_iter()
            .map(|p| EnumPartition::new(self.labels.clone(), p))
            .collect()
    }

    /// Enough partitions to keep `workers` threads busy.
    pub fn partitions_for(&self, workers: usize) -> Vec<EnumPartition> {
        let mut depth = 0;
        let mut count = 1usize;
        let levels = self.labels.len() - 3;
        while depth < levels && count < workers.max(1) * 8 {
            count *= 2 * (depth + 3) - 3;
            depth += 1;
        }
        self.partitions(depth)
    }
}

/// Stream over all trees whose choice vectors start with a fixed prefix.
#[derive(Clone, Debug)]
pub struct EnumPartition {
    labels: Arc<[String]>,
    prefix_len: usize,
    choices: Vec<u32>,
    started: bool,
    finished: bool,
}

impl EnumPartition {
    fn new(labels: Arc<[String]>, prefix: Vec<u32>) -> EnumPartition {
        let levels = labels.len() - 3;
        let prefix_len = prefix.len();
        let mut choices = prefix;
        choices.resize(levels, 0);
        EnumPartition {
            labels,
            prefix_len,
            choices,
            started: false,
            finished: false,
        }
    }

    pub fn prefix(&self) -> &[u32] {
        &self.choices[..self.prefix_len]
    }

    /// Number of trees in this partition.
    pub fn size(&self) -> u64 {
        (self.prefix_len..self.choices.len())
            .map(|i| 2 * (i as u64 + 3) - 3)
            .product()
    }

    fn advance(&mut self) -> bool {
        for i in (self.prefix_len..self.choices.len()).rev() {
            let width = 2 * (i as u32 + 3) - 3;
            if self.choices[i] + 1 < width {
                self.choices[i] += 1;
                for c in &mut self.choices[i + 1..] {
                    *c = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for EnumPartition {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if self.finished {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.finished = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(build_from_choices(self.labels.clone(), &self.choices))
    }
}

/// Uniform random topology on `labels`, deterministic in `seed`.
pub fn random_tree<S: AsRef<str>>(labels: &[S], seed: u64) -> Result<Tree> {
    random_tree_stream(labels, seed, 0)
}

/// Sample number `stream` of the sequence seeded by `seed`.
pub fn random_tree_stream<S: AsRef<str>>(labels: &[S], seed: u64, stream: u64) -> Result<Tree> {
    let labels = to_labels(labels)?;
    Ok(random_with(labels, seed, stream))
}

pub(crate) fn random_with(labels: Arc<[String]>, seed: u64, stream: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let choices: Vec<u32> = (3..labels.len() as u32)
        .map(|k| rng.gen_range(0..2 * k - 3))
        .collect();
    build_from_choices(labels, &choices)
}
