use std::collections::BTreeSet;

use serde::Serialize;

use super::Tree;

/// Leaf bipartition induced by one internal edge. `block` is the side that
/// does not contain the smallest label (byte order), sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Split {
    pub block: Vec<String>,
    /// Internal edge `(u, v)`, `u < v`, that induces the split.
    pub origin: (usize, usize),
}

/// Fixed-width bit set over leaf positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitMask(Box<[u64]>);

impl SplitMask {
    pub fn empty(n: usize) -> SplitMask {
        SplitMask(vec![0u64; n.div_ceil(64)].into_boxed_slice())
    }

    pub fn set(&mut self, bit: usize) {
        self.0[bit / 64] |= 1 << (bit % 64);
    }

    pub fn contains(&self, bit: usize) -> bool {
        self.0[bit / 64] & (1 << (bit % 64)) != 0
    }

    pub fn union_with(&mut self, other: &SplitMask) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Complement within `n` bits.
    pub fn complement(&self, n: usize) -> SplitMask {
        let mut out = SplitMask(self.0.iter().map(|w| !w).collect());
        let tail = n % 64;
        if tail != 0 {
            let last = out.0.len() - 1;
            out.0[last] &= (1u64 << tail) - 1;
        }
        out
    }

    pub fn bits(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

/// Split masks of every internal edge. Leaf `i` of `tree` is placed at bit
/// `position[i]`; each mask is normalized to exclude bit 0.
pub(crate) fn split_masks(tree: &Tree, position: &[usize]) -> Vec<(SplitMask, (usize, usize))> {
    let n = tree.n_leaves();
    let nodes = tree.n_nodes();
    let root = n; // any internal node
    let mut parent = vec![usize::MAX; nodes];
    let mut preorder = Vec::with_capacity(nodes);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        preorder.push(v);
        for w in tree.neighbors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut below: Vec<Option<SplitMask>> = vec![None; nodes];
    let mut out = Vec::with_capacity(n.saturating_sub(3));
    for &v in preorder.iter().rev() {
        let mut mask = SplitMask::empty(n);
        if v < n {
            mask.set(position[v]);
        } else {
            for w in tree.neighbors(v) {
                if w != parent[v] {
                    mask.union_with(below[w].as_ref().expect("child visited"));
                    below[w] = None;
                }
            }
            if v != root && parent[v] >= n {
                let normalized = if mask.contains(0) {
                    mask.complement(n)
                } else {
                    mask.clone()
                };
                out.push((normalized, (v.min(parent[v]), v.max(parent[v]))));
            }
        }
        below[v] = Some(mask);
    }
    out
}

/// Split masks only; see [`split_masks`].
pub(crate) fn split_masks_for(tree: &Tree, position: &[usize]) -> Vec<SplitMask> {
    split_masks(tree, position).into_iter().map(|(m, _)| m).collect()
}

pub(crate) fn splits(tree: &Tree) -> Vec<Split> {
    let labels = tree.labels();
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| labels[a].as_bytes().cmp(labels[b].as_bytes()));
    let mut position = vec![0; labels.len()];
    for (p, &leaf) in order.iter().enumerate() {
        position[leaf] = p;
    }
    let mut out: Vec<Split> = split_masks(tree, &position)
        .into_iter()
        .map(|(mask, origin)| {
            let block: BTreeSet<&String> = mask.bits().map(|p| &labels[order[p]]).collect();
            Split {
                block: block.into_iter().cloned().collect(),
                origin,
            }
        })
        .collect();
    out.sort();
    out
}
