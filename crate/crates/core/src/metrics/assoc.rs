use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::Tree;

/// One-to-one pairing between the leaf labels of two trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafAssociation {
    pairs: Vec<(String, String)>,
}

impl LeafAssociation {
    pub fn new(pairs: Vec<(String, String)>) -> Result<LeafAssociation> {
        let mut left = HashSet::with_capacity(pairs.len());
        let mut right = HashSet::with_capacity(pairs.len());
        for (a, b) in &pairs {
            if !left.insert(a.as_str()) {
                return Err(Error::Association(format!(
                    "label {a:?} appears twice in the first column"
                )));
            }
            if !right.insert(b.as_str()) {
                return Err(Error::Association(format!(
                    "label {b:?} appears twice in the second column"
                )));
            }
        }
        Ok(LeafAssociation { pairs })
    }

    /// Every label of `tree` paired with itself.
    pub fn identity(tree: &Tree) -> LeafAssociation {
        LeafAssociation {
            pairs: tree.labels().iter().map(|l| (l.clone(), l.clone())).collect(),
        }
    }

    /// Identity when both trees carry the same label set.
    pub fn by_shared_labels(t1: &Tree, t2: &Tree) -> Result<LeafAssociation> {
        let a: HashSet<&String> = t1.labels().iter().collect();
        let b: HashSet<&String> = t2.labels().iter().collect();
        if a != b {
            let mut missing: Vec<&&String> = a.symmetric_difference(&b).collect();
            missing.sort();
            return Err(Error::Association(format!(
                "label sets differ ({} labels not shared, e.g. {:?}); supply an association",
                missing.len(),
                missing[0]
            )));
        }
        Ok(LeafAssociation::identity(t1))
    }

    /// Two tab-separated columns per line; blank lines and `#` comments are
    /// skipped.
    pub fn from_tsv(text: &str) -> Result<LeafAssociation> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 || cols[0].is_empty() || cols[1].is_empty() {
                return Err(Error::Association(format!(
                    "line {}: expected two non-empty tab-separated labels",
                    lineno + 1
                )));
            }
            pairs.push((cols[0].to_string(), cols[1].to_string()));
        }
        LeafAssociation::new(pairs)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# label_t1\tlabel_t2\n");
        for (a, b) in &self.pairs {
            out.push_str(a);
            out.push('\t');
            out.push_str(b);
            out.push('\n');
        }
        out
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inverse(&self) -> LeafAssociation {
        LeafAssociation {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    /// `self` then `next`: pairs `a -> c` whenever `a -> b` and `b -> c`.
    pub fn compose(&self, next: &LeafAssociation) -> Result<LeafAssociation> {
        let forward: HashMap<&str, &str> = next
            .pairs
            .iter()
            .map(|(b, c)| (b.as_str(), c.as_str()))
            .collect();
        let pairs = self
            .pairs
            .iter()
            .map(|(a, b)| {
                forward
                    .get(b.as_str())
                    .map(|c| (a.clone(), c.to_string()))
                    .ok_or_else(|| Error::Association(format!("{b:?} has no image")))
            })
            .collect::<Result<Vec<_>>>()?;
        LeafAssociation::new(pairs)
    }

    /// Leaf id mapping: entry `i` is the leaf of `t2` paired with leaf `i`
    /// of `t1`. Fails unless the association covers both trees exactly.
    pub fn resolve(&self, t1: &Tree, t2: &Tree) -> Result<Vec<usize>> {
        let n = t1.n_leaves();
        if n != t2.n_leaves() {
            return Err(Error::LeafCountMismatch(n, t2.n_leaves()));
        }
        if self.pairs.len() != n {
            return Err(Error::Association(format!(
                "association has {} pairs but the trees have {} leaves",
                self.pairs.len(),
                n
            )));
        }
        let m1 = t1.label_map();
        let m2 = t2.label_map();
        let mut mapping = vec![usize::MAX; n];
        for (a, b) in &self.pairs {
            let i = *m1
                .get(a.as_str())
                .ok_or_else(|| Error::Association(format!("{a:?} is not a leaf of tree 1")))?;
            let j = *m2
                .get(b.as_str())
                .ok_or_else(|| Error::Association(format!("{b:?} is not a leaf of tree 2")))?;
            mapping[i] = j;
        }
        // Distinct first-column labels that all exist cover every leaf.
        debug_assert!(mapping.iter().all(|&j| j != usize::MAX));
        Ok(mapping)
    }

    /// `t2` renamed into `t1`'s labels through this association.
    pub fn carry_into_first(&self, t1: &Tree, t2: &Tree) -> Result<Tree> {
        let mapping = self.resolve(t1, t2)?;
        let mut labels = vec![String::new(); t2.n_leaves()];
        for (i, &j) in mapping.iter().enumerate() {
            labels[j] = t1.label(i).to_string();
        }
        t2.relabeled(labels)
    }
}
