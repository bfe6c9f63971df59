use serde::Serialize;

use super::Tree;

/// Leaf-to-leaf edge counts. Row/column `i` is leaf `i` of the source tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathLengthMatrix {
    labels: Vec<String>,
    n: usize,
    entries: Vec<u32>,
}

impl PathLengthMatrix {
    /// One breadth-first traversal per leaf; `O(n^2)` overall.
    pub fn from_tree(tree: &Tree) -> PathLengthMatrix {
        let n = tree.n_leaves();
        let mut entries = vec![0u32; n * n];
        for leaf in 0..n {
            let dist = tree.distances_from(leaf);
            entries[leaf * n..(leaf + 1) * n].copy_from_slice(&dist[..n]);
        }
        PathLengthMatrix {
            labels: tree.labels().to_vec(),
            n,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// `max |self[i][j] - other[m(i)][m(j)]|` over all leaf pairs, where `m`
    /// maps rows of `self` to rows of `other`.
    pub fn max_abs_diff(&self, other: &PathLengthMatrix, mapping: &[usize]) -> u32 {
        debug_assert_eq!(mapping.len(), self.n);
        let mut best = 0;
        for i in 0..self.n {
            let row = self.row(i);
            let orow = other.row(mapping[i]);
            for j in (i + 1)..self.n {
                best = best.max(row[j].abs_diff(orow[mapping[j]]));
            }
        }
        best
    }

    /// Same as [`max_abs_diff`](Self::max_abs_diff) when both matrices use
    /// the same leaf order.
    pub fn max_abs_diff_aligned(&self, other: &PathLengthMatrix) -> u32 {
        debug_assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    /// Sum of squared per-pair differences over unordered pairs.
    pub fn sum_sq_diff(&self, other: &PathLengthMatrix, mapping: &[usize]) -> u64 {
        let mut total = 0u64;
        for i in 0..self.n {
            let row = self.row(i);
            let orow = other.row(mapping[i]);
            for j in (i + 1)..self.n {
                let d = row[j].abs_diff(orow[mapping[j]]) as u64;
                total += d * d;
            }
        }
        total
    }

    /// Four-point condition: for all leaves a, b, c, d the two largest of
    /// `d(a,b)+d(c,d)`, `d(a,c)+d(b,d)`, `d(a,d)+d(b,c)` are equal. `O(n^4)`.
    pub fn satisfies_four_point(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let mut s = [
                            self.get(a, b) + self.get(c, d),
                            self.get(a, c) + self.get(b, d),
                            self.get(a, d) + self.get(b, c),
                        ];
                        s.sort_unstable();
                        if s[1] != s[2] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}
