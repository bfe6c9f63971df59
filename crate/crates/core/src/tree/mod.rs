//! Unrooted binary trees with labeled leaves.
//!
//! Node layout is fixed: leaves occupy ids `0..n` (leaf `i` carries
//! `labels[i]`), internal nodes occupy `n..2n-2`. Every internal node has
//! exactly three neighbors and every leaf exactly one, so a tree on `n`
//! leaves always has `2n - 2` nodes and `2n - 3` edges.

mod enumerate;
pub(crate) mod newick;
mod nni;
mod paths;
pub(crate) mod splits;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use enumerate::{
    count_trees, double_factorial, enumerate_trees, random_tree, random_tree_stream,
    EnumPartition, TreeEnumerator, DEFAULT_ENUMERATION_CAP,
};
pub(crate) use enumerate::random_with;
pub use newick::{parse_newick, write_newick, CanonicalForm};
pub use paths::PathLengthMatrix;
pub use splits::{Split, SplitMask};

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Tree {
    labels: Arc<[String]>,
    adj: Vec<[u32; 3]>,
}

impl Tree {
    /// Builds a tree from leaf labels and an undirected edge list using the
    /// fixed node layout (leaves `0..n`, internal nodes `n..2n-2`).
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Tree> {
        let n = labels.len();
        if n < 3 {
            return Err(Error::TooFewLeaves { min: 3, got: n });
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let nodes = 2 * n - 2;
        if edges.len() != nodes - 1 {
            return Err(Error::Malformed(format!(
                "expected {} edges for {} leaves, got {}",
                nodes - 1,
                n,
                edges.len()
            )));
        }
        let mut adj = vec![[NONE; 3]; nodes];
        let mut deg = vec![0usize; nodes];
        for &(u, v) in edges {
            if u >= nodes || v >= nodes || u == v {
                return Err(Error::Malformed(format!("bad edge ({u}, {v})")));
            }
            for (a, b) in [(u, v), (v, u)] {
                let cap = if a < n { 1 } else { 3 };
                if deg[a] >= cap {
                    return Err(Error::NonBinary {
                        node: node_name(&labels, a),
                        degree: deg[a] + 1,
                    });
                }
                adj[a][deg[a]] = b as u32;
                deg[a] += 1;
            }
        }
        for (v, &d) in deg.iter().enumerate() {
            let want = if v < n { 1 } else { 3 };
            if d != want {
                return Err(Error::NonBinary {
                    node: node_name(&labels, v),
                    degree: d,
                });
            }
        }
        let tree = Tree {
            labels: labels.into(),
            adj,
        };
        if tree.reachable_from(0) != nodes {
            return Err(Error::Malformed("tree is not connected".into()));
        }
        Ok(tree)
    }

    /// Internal constructor for callers that already guarantee the layout.
    pub(crate) fn from_parts(labels: Arc<[String]>, adj: Vec<[u32; 3]>) -> Tree {
        debug_assert_eq!(adj.len(), 2 * labels.len() - 2);
        Tree { labels, adj }
    }

    fn reachable_from(&self, start: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        count
    }

    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub(crate) fn shared_labels(&self) -> &Arc<[String]> {
        &self.labels
    }

    pub fn label(&self, leaf: usize) -> &str {
        &self.labels[leaf]
    }

    pub fn leaf_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Map from label to leaf id.
    pub fn label_map(&self) -> HashMap<&str, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v < self.n_leaves()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v]
            .iter()
            .take_while(|&&w| w != NONE)
            .map(|&w| w as usize)
    }

    pub(crate) fn adjacency(&self) -> &[[u32; 3]] {
        &self.adj
    }

    /// All edges `(u, v)` with `u < v`, in ascending order of `u` then `v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.adj.len() - 1);
        for u in 0..self.adj.len() {
            for v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Edges joining two internal nodes.
    pub fn internal_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_leaves();
        self.edges()
            .into_iter()
            .filter(|&(u, v)| u >= n && v >= n)
            .collect()
    }

    /// Same topology, leaf `i` renamed to `labels[i]`.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Tree> {
        if labels.len() != self.n_leaves() {
            return Err(Error::LeafCountMismatch(self.n_leaves(), labels.len()));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Tree {
            labels: labels.into(),
            adj: self.adj.clone(),
        })
    }

    /// Number of internal nodes adjacent to exactly two leaves.
    pub fn cherry_count(&self) -> Result<usize> {
        self.require_four("cherry_count")?;
        Ok(self.cherries().len())
    }

    /// Leaf pairs `(a, b)`, `a < b`, that share an internal neighbor.
    pub fn cherries(&self) -> Vec<(usize, usize)> {
        let n = self.n_leaves();
        let mut out = Vec::new();
        for v in n..self.adj.len() {
            let leaves: Vec<usize> = self.neighbors(v).filter(|&w| w < n).collect();
            if leaves.len() == 2 {
                out.push((leaves[0].min(leaves[1]), leaves[0].max(leaves[1])));
            }
        }
        out
    }

    pub fn is_caterpillar(&self) -> Result<bool> {
        Ok(self.cherry_count()? == 2)
    }

    /// Longest leaf-to-leaf path, in edges.
    pub fn diameter(&self) -> usize {
        // Double sweep: the farthest leaf from any leaf is a diameter endpoint.
        let (far, _) = self.farthest_leaf(0);
        self.farthest_leaf(far).1
    }

    fn farthest_leaf(&self, from: usize) -> (usize, usize) {
        let dist = self.distances_from(from);
        let mut best = (from, 0);
        for (leaf, &d) in dist.iter().enumerate().take(self.n_leaves()) {
            if d as usize > best.1 {
                best = (leaf, d as usize);
            }
        }
        best
    }

    /// Edge distances from `from` to every node.
    pub(crate) fn distances_from(&self, from: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut queue = std::collections::VecDeque::with_capacity(self.adj.len());
        dist[from] = 0;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            let d = dist[v] + 1;
            for w in self.neighbors(v) {
                if dist[w] == u32::MAX {
                    dist[w] = d;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn path_length_matrix(&self) -> PathLengthMatrix {
        PathLengthMatrix::from_tree(self)
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm::of(self)
    }

    pub fn to_newick(&self) -> String {
        write_newick(self)
    }

    /// True when both trees carry the same labels on the same topology.
    pub fn same_topology(&self, other: &Tree) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    pub fn splits(&self) -> Result<Vec<Split>> {
        self.require_four("splits")?;
        Ok(splits::splits(self))
    }

    pub fn nni_neighbors(&self) -> Result<Vec<Tree>> {
        self.require_four("nni_neighbors")?;
        Ok(nni::nni_neighbors(self))
    }

    /// Label-free shape signature: equal for two trees iff they are
    /// isomorphic as unlabeled trees.
    pub fn unlabeled_shape(&self) -> String {
        let n = self.n_leaves();
        (n..self.adj.len())
            .map(|root| self.ahu(root, usize::MAX))
            .min()
            .unwrap_or_default()
    }

    fn ahu(&self, v: usize, parent: usize) -> String {
        if self.is_leaf(v) && parent != usize::MAX {
            return "x".to_string();
        }
        let mut parts: Vec<String> = self
            .neighbors(v)
            .filter(|&w| w != parent)
            .map(|w| self.ahu(w, v))
            .collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    fn require_four(&self, op: &str) -> Result<()> {
        if self.n_leaves() < 4 {
            return Err(Error::InvalidParameter(format!(
                "{op} needs at least 4 leaves, tree has {}",
                self.n_leaves()
            )));
        }
        Ok(())
    }
}

fn node_name(labels: &[String], v: usize) -> String {
    if v < labels.len() {
        format!("leaf {:?}", labels[v])
    } else {
        format!("internal #{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartet() -> Tree {
        parse_newick("((A,B),(C,D));").unwrap()
    }

    #[test]
    fn layout_of_parsed_quartet() {
        let t = quartet();
        assert_eq!(t.n_leaves(), 4);
        assert_eq!(t.n_nodes(), 6);
        assert_eq!(t.edges().len(), 5);
        assert_eq!(t.internal_edges().len(), 1);
    }

    #[test]
    fn from_edges_rejects_degree_violations() {
        let labels: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
        // Leaf 0 attached twice.
        let err = Tree::from_edges(labels.clone(), &[(0, 4), (0, 5), (1, 4), (2, 5), (3, 5)])
            .unwrap_err();
        assert!(matches!(err, Error::NonBinary { .. }));
        let ok = Tree::from_edges(labels, &[(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)]).unwrap();
        assert_eq!(ok.cherry_count().unwrap(), 2);
    }

    #[test]
    fn from_edges_rejects_duplicates_and_small() {
        let labels: Vec<String> = ["A", "A", "C"].iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            Tree::from_edges(labels, &[(0, 3), (1, 3), (2, 3)]),
            Err(Error::DuplicateLabel(_))
        ));
        let labels: Vec<String> = ["A", "B"].iter().map(|s| s.to_string()).collect();
        assert!(matches!(
            Tree::from_edges(labels, &[(0, 1)]),
            Err(Error::TooFewLeaves { .. })
        ));
    }

    #[test]
    fn cherry_counts_of_fixed_shapes() {
        let cat6 = parse_newick("(A,B,(C,(D,(E,F))));").unwrap();
        assert_eq!(cat6.cherry_count().unwrap(), 2);
        assert!(cat6.is_caterpillar().unwrap());
        let three = parse_newick("((A,B),(C,D),(E,F));").unwrap();
        assert_eq!(three.cherry_count().unwrap(), 3);
        assert!(!three.is_caterpillar().unwrap());
        let bal8 = parse_newick("(((A,B),(C,D)),((E,F),(G,H)));").unwrap();
        assert_eq!(bal8.cherry_count().unwrap(), 4);
        assert!(quartet().is_caterpillar().unwrap());
    }

    #[test]
    fn cherry_count_rejects_three_leaves() {
        let star = parse_newick("(A,B,C);").unwrap();
        assert!(star.cherry_count().is_err());
        assert!(star.is_caterpillar().is_err());
    }

    #[test]
    fn diameters() {
        let cat7 = parse_newick("(A,B,(C,(D,(E,(F,G)))));").unwrap();
        assert_eq!(cat7.diameter(), 6);
        let three = parse_newick("((A,B),(C,D),(E,F));").unwrap();
        assert_eq!(three.diameter(), 4);
        assert_eq!(quartet().diameter(), 3);
    }

    #[test]
    fn unlabeled_shape_ignores_labels() {
        let a = parse_newick("((A,B),(C,D),(E,F));").unwrap();
        let b = parse_newick("((F,C),(A,E),(B,D));").unwrap();
        let c = parse_newick("(A,B,(C,(D,(E,F))));").unwrap();
        assert_eq!(a.unlabeled_shape(), b.unlabeled_shape());
        assert_ne!(a.unlabeled_shape(), c.unlabeled_shape());
    }

    #[test]
    fn relabel_keeps_topology() {
        let t = quartet();
        let r = t
            .relabeled(vec!["w".into(), "x".into(), "y".into(), "z".into()])
            .unwrap();
        assert_eq!(r.to_newick(), "(w,x,(y,z));");
    }
}
