//! Exact NNI distance. The general problem is NP-complete, so the search is
//! bounded by the number of distinct topologies it may store.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::assoc::LeafAssociation;
use crate::error::{Error, Result};
use crate::tree::{enumerate_trees, CanonicalForm, Tree, TreeEnumerator};

/// Default limit on stored topologies for [`nni_exact`].
pub const DEFAULT_NNI_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NniSearch {
    Exact { distance: u32 },
    /// Budget ran out; the distance is at least `lower_bound`.
    Exhausted { lower_bound: u32, visited: usize },
}

impl NniSearch {
    pub fn exact(&self) -> Option<u32> {
        match *self {
            NniSearch::Exact { distance } => Some(distance),
            NniSearch::Exhausted { .. } => None,
        }
    }

    pub fn lower_bound(&self) -> u32 {
        match *self {
            NniSearch::Exact { distance } => distance,
            NniSearch::Exhausted { lower_bound, .. } => lower_bound,
        }
    }
}

struct Side {
    seen: HashMap<CanonicalForm, u32>,
    frontier: Vec<Tree>,
    depth: u32,
}

impl Side {
    fn new(tree: Tree) -> Side {
        let mut seen = HashMap::new();
        seen.insert(tree.canonical_form(), 0);
        Side {
            seen,
            frontier: vec![tree],
            depth: 0,
        }
    }
}

/// Bidirectional breadth-first search over the NNI graph, deduplicating by
/// canonical form. `node_budget` bounds the number of stored topologies
/// across both directions.
pub fn nni_exact(
    t1: &Tree,
    t2: &Tree,
    assoc: &LeafAssociation,
    node_budget: usize,
) -> Result<NniSearch> {
    if node_budget == 0 {
        return Err(Error::InvalidParameter("NNI node budget must be at least 1".into()));
    }
    let target = assoc.carry_into_first(t1, t2)?;
    if t1.canonical_form() == target.canonical_form() {
        return Ok(NniSearch::Exact { distance: 0 });
    }
    let mut sides = [Side::new(t1.clone()), Side::new(target)];
    let mut visited = 2usize;
    loop {
        // Grow the smaller frontier by one full layer. The first meeting
        // point found is optimal: both sides are complete up to their depths
        // and no earlier meeting occurred.
        let (me, other) = if sides[0].frontier.len() <= sides[1].frontier.len() {
            (0, 1)
        } else {
            (1, 0)
        };
        let frontier = std::mem::take(&mut sides[me].frontier);
        let next_depth = sides[me].depth + 1;
        let mut next = Vec::new();
        for tree in &frontier {
            for nb in tree.nni_neighbors()? {
                let cf = nb.canonical_form();
                if sides[me].seen.contains_key(&cf) {
                    continue;
                }
                if let Some(&d) = sides[other].seen.get(&cf) {
                    return Ok(NniSearch::Exact {
                        distance: next_depth + d,
                    });
                }
                if visited >= node_budget {
                    return Ok(NniSearch::Exhausted {
                        lower_bound: sides[0].depth + sides[1].depth + 1,
                        visited,
                    });
                }
                sides[me].seen.insert(cf, next_depth);
                visited += 1;
                next.push(nb);
            }
        }
        if next.is_empty() {
            // Whole component explored without meeting; cannot happen for
            // two trees on the same leaf set.
            return Err(Error::Association(
                "trees are not connected by NNI moves".into(),
            ));
        }
        sides[me].frontier = next;
        sides[me].depth = next_depth;
    }
}

/// The complete NNI graph on one label set, for exhaustive checks at small n.
pub struct NniGraph {
    trees: Vec<Tree>,
    index: HashMap<CanonicalForm, usize>,
    adjacency: Vec<Vec<u32>>,
}

impl NniGraph {
    pub fn build<S: AsRef<str>>(labels: &[S]) -> Result<NniGraph> {
        NniGraph::from_enumerator(&enumerate_trees(labels)?)
    }

    pub fn from_enumerator(e: &TreeEnumerator) -> Result<NniGraph> {
        if e.n_leaves() < 4 {
            return Err(Error::InvalidParameter("NNI graph needs at least 4 leaves".into()));
        }
        let trees: Vec<Tree> = e.iter().collect();
        let index: HashMap<CanonicalForm, usize> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.canonical_form(), i))
            .collect();
        let adjacency = trees
            .iter()
            .map(|t| {
                t.nni_neighbors()
                    .map(|nbs| {
                        nbs.iter()
                            .map(|nb| index[&nb.canonical_form()] as u32)
                            .collect()
                    })
            })
            .collect::<Result<Vec<Vec<u32>>>>()?;
        Ok(NniGraph {
            trees,
            index,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn index_of(&self, tree: &Tree) -> Option<usize> {
        self.index.get(&tree.canonical_form()).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    /// NNI distance from tree `source` to every tree.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.trees.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}
