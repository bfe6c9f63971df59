//! Library results against slow, independent reimplementations written
//! only from definitions: Floyd-Warshall distances, leaf-set splits, a
//! separate insertion enumerator and direct formula evaluation.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use kic_core::metrics::{path_difference, precise_kic, rf_distance, LeafAssociation};
use kic_core::neighborhood::{brute_force_interval_neighborhood, closed_form_for};
use kic_core::tree::random_tree_stream;
use kic_core::{enumerate_trees, parse_newick, Tree};

const INF: u32 = u32::MAX / 4;

/// A tree as plain data: labels plus an edge list over nodes `0..2n-2`.
#[derive(Clone)]
struct Raw {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Raw {
    fn of(t: &Tree) -> Raw {
        Raw {
            labels: t.labels().to_vec(),
            edges: t.edges(),
        }
    }

    fn nodes(&self) -> usize {
        self.edges.len() + 1
    }

    fn n(&self) -> usize {
        self.labels.len()
    }

    fn floyd(&self) -> Vec<Vec<u32>> {
        let m = self.nodes();
        let mut d = vec![vec![INF; m]; m];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for &(u, v) in &self.edges {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    /// Leaf distances keyed by unordered label pair.
    fn label_distances(&self) -> HashMap<(String, String), u32> {
        let d = self.floyd();
        let mut out = HashMap::new();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let (a, b) = ordered(&self.labels[i], &self.labels[j]);
                out.insert((a, b), d[i][j]);
            }
        }
        out
    }

    /// Nontrivial splits as label sets, each stored as the side lacking the
    /// smallest label.
    fn splits(&self) -> BTreeSet<Vec<String>> {
        let n = self.n();
        let anchor = self.labels.iter().min().unwrap().clone();
        let d = self.floyd();
        let mut out = BTreeSet::new();
        for &(u, v) in &self.edges {
            if u < n || v < n {
                continue;
            }
            let mut side: Vec<String> = (0..n)
                .filter(|&l| d[l][u] < d[l][v])
                .map(|l| self.labels[l].clone())
                .collect();
            if side.contains(&anchor) {
                side = (0..n)
                    .filter(|&l| d[l][v] < d[l][u])
                    .map(|l| self.labels[l].clone())
                    .collect();
            }
            side.sort();
            out.insert(side);
        }
        out
    }

    fn cherries(&self) -> usize {
        let n = self.n();
        let mut leaf_nbrs = vec![0; self.nodes()];
        for &(u, v) in &self.edges {
            if u < n {
                leaf_nbrs[v] += 1;
            }
            if v < n {
                leaf_nbrs[u] += 1;
            }
        }
        leaf_nbrs.iter().filter(|&&k| k == 2).count()
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a < b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn oracle_kic(a: &Raw, b: &Raw) -> u32 {
    let da = a.label_distances();
    let db = b.label_distances();
    da.iter().map(|(k, &x)| x.abs_diff(db[k])).max().unwrap_or(0)
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("L{i}")).collect()
}

fn odd_double_factorial(k: i64) -> u64 {
    (1..=k).step_by(2).map(|x| x as u64).product()
}

/// All trees on `names`, by inserting each new leaf on every edge of every
/// smaller tree. Internal node ids follow insertion order.
fn own_enumeration(names: &[String]) -> Vec<Raw> {
    let n = names.len();
    let centre = n;
    let mut trees = vec![vec![(0, centre), (1, centre), (2, centre)]];
    for leaf in 3..n {
        let w = n + leaf - 2;
        let mut next = Vec::new();
        for edges in &trees {
            for i in 0..edges.len() {
                let (u, v) = edges[i];
                let mut e: Vec<(usize, usize)> = edges.clone();
                e[i] = (u, w);
                e.push((w, v));
                e.push((leaf, w));
                next.push(e);
            }
        }
        trees = next;
    }
    trees
        .into_iter()
        .map(|edges| Raw {
            labels: names.to_vec(),
            edges,
        })
        .collect()
}

fn library_trees(n: usize) -> Vec<Tree> {
    enumerate_trees(&labels(n)).unwrap().iter().collect()
}

#[test]
fn path_matrix_matches_floyd_warshall() {
    for n in 4..=7 {
        for t in library_trees(n) {
            let d = Raw::of(&t).floyd();
            let m = t.path_length_matrix();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(m.get(i, j), d[i][j]);
                }
            }
        }
    }
    for s in 0..20 {
        let t = random_tree_stream(&labels(40), 11, s).unwrap();
        let d = Raw::of(&t).floyd();
        let m = t.path_length_matrix();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(m.get(i, j), d[i][j]);
            }
        }
        let diam = (0..40).flat_map(|i| (0..40).map(move |j| (i, j))).map(|(i, j)| d[i][j]).max();
        assert_eq!(t.diameter() as u32, diam.unwrap());
    }
}

#[test]
fn own_enumeration_agrees_with_library() {
    for n in 3..=8 {
        let names = labels(n);
        let ours = own_enumeration(&names);
        assert_eq!(ours.len() as u64, odd_double_factorial(2 * n as i64 - 5));
        if n < 4 {
            continue;
        }
        let ours: HashSet<_> = ours.iter().map(Raw::splits).collect();
        assert_eq!(ours.len() as u64, odd_double_factorial(2 * n as i64 - 5), "n = {n}");
        let theirs: HashSet<_> = library_trees(n).iter().map(|t| Raw::of(t).splits()).collect();
        assert_eq!(ours, theirs);
    }
}

#[test]
fn kic_rf_and_path_difference_match_definitions() {
    for s in 0..60 {
        let n = 5 + (s as usize % 20);
        let names = labels(n);
        let a = random_tree_stream(&names, 3, s).unwrap();
        let b = random_tree_stream(&names, 4, s).unwrap();
        // Rename the second tree and associate through the new names.
        let assoc = LeafAssociation::new(
            names.iter().cloned().zip(names.iter().map(|l| format!("x{l}"))).collect(),
        )
        .unwrap();
        let b_named = b.relabeled(b.labels().iter().map(|l| format!("x{l}")).collect()).unwrap();

        let (ra, rb) = (Raw::of(&a), Raw::of(&b));
        let kic = oracle_kic(&ra, &rb);
        assert_eq!(precise_kic(&a, &b_named, &assoc).unwrap(), kic);

        let da = ra.label_distances();
        let db = rb.label_distances();
        let ss: u64 = da.iter().map(|(k, &x)| (x.abs_diff(db[k]) as u64).pow(2)).sum();
        let pd = path_difference(&a, &b_named, &assoc).unwrap();
        assert!((pd - (ss as f64).sqrt()).abs() < 1e-9);

        let sa = ra.splits();
        let sb = rb.splits();
        let rf = rf_distance(&a, &b_named, &assoc).unwrap();
        assert_eq!(rf.raw, sa.symmetric_difference(&sb).count());
        assert_eq!(rf.shared_splits, sa.intersection(&sb).count());
    }
}

#[test]
fn cherries_match_leaf_adjacency() {
    for n in 4..=8 {
        for t in library_trees(n) {
            assert_eq!(t.cherry_count().unwrap(), Raw::of(&t).cherries());
        }
    }
}

#[test]
fn nni_closure_reaches_all_of_tree_space() {
    for n in 5..=7 {
        let names = labels(n);
        let start = enumerate_trees(&names).unwrap().iter().next().unwrap();
        let mut seen = HashSet::new();
        seen.insert(Raw::of(&start).splits());
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            let here = Raw::of(&t);
            let nbrs = t.nni_neighbors().unwrap();
            let keys: HashSet<_> = nbrs.iter().map(|x| Raw::of(x).splits()).collect();
            assert_eq!(keys.len(), 2 * (n - 3));
            for x in nbrs {
                assert_eq!(oracle_kic(&here, &Raw::of(&x)), 1);
                if seen.insert(Raw::of(&x).splits()) {
                    queue.push_back(x);
                }
            }
        }
        assert_eq!(seen.len() as u64, odd_double_factorial(2 * n as i64 - 5));
    }
}

#[test]
fn path_matrix_determines_topology() {
    for n in 4..=7 {
        let mats: HashSet<Vec<u32>> = library_trees(n)
            .iter()
            .map(|t| {
                let d = Raw::of(t).floyd();
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| d[i][j]).collect()
            })
            .collect();
        assert_eq!(mats.len() as u64, odd_double_factorial(2 * n as i64 - 5));
    }
}

fn factorial(k: u64) -> i128 {
    (1..=k as i128).product()
}

fn df(k: i64) -> i128 {
    (1..=k).step_by(2).map(|x| x as i128).product()
}

/// Neighborhood sizes straight from the definition over our own enumeration,
/// and the closed forms evaluated here in machine integers.
#[test]
fn maximal_neighborhood_counts_from_definitions() {
    for n in 6..=8usize {
        let names = labels(n);
        let space = own_enumeration(&names);
        let dists: Vec<HashMap<(String, String), u32>> =
            space.iter().map(Raw::label_distances).collect();
        let mut by_cherries: HashMap<usize, i128> = HashMap::new();
        for t in library_trees(n) {
            let c = t.cherry_count().unwrap();
            if by_cherries.contains_key(&c) {
                continue;
            }
            let r = Raw::of(&t).label_distances();
            let count = dists
                .iter()
                .filter(|d| d.iter().map(|(k, &x)| x.abs_diff(r[k])).max() == Some(n as u32 - 3))
                .count() as i128;
            by_cherries.insert(c, count);
            let lib = brute_force_interval_neighborhood(&t, n - 3, false).unwrap();
            assert_eq!(lib.count.count, count.into());
        }
        let ni = n as i64;
        let nu = n as u64;
        for (&c, &count) in &by_cherries {
            let expected = if c == 2 {
                2 * factorial(nu - 2) + 4 * factorial(nu - 4) - 8 * factorial(nu - 3)
                    + 4 * df(2 * ni - 7)
                    - 2 * df(2 * ni - 9)
            } else {
                c as i128 * (factorial(nu - 2) - factorial(nu - 4) * (c as i128 - 1))
            };
            assert_eq!(count, expected, "n = {n}, c = {c}");
            assert_eq!(closed_form_for(n, c).unwrap(), expected.into());
        }
    }
}

/// No two trees on at most seven leaves differ in exactly one leaf-pair
/// distance, so no such pair has path difference exactly 1.
#[test]
fn single_coordinate_differences_do_not_occur() {
    for n in 4..=7 {
        let mats: Vec<Vec<u32>> = library_trees(n)
            .iter()
            .map(|t| {
                let m = t.path_length_matrix();
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).collect()
            })
            .collect();
        let mut single = 0usize;
        let mut pd_one = 0usize;
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let diffs: Vec<u32> =
                    mats[i].iter().zip(&mats[j]).map(|(a, b)| a.abs_diff(*b)).collect();
                if diffs.iter().filter(|&&d| d != 0).count() == 1 {
                    single += 1;
                }
                if diffs.iter().map(|d| d * d).sum::<u32>() == 1 {
                    pd_one += 1;
                }
            }
        }
        assert_eq!(single, 0, "n = {n}");
        assert_eq!(pd_one, 0, "n = {n}");
    }
}

#[test]
fn sampler_is_uniform_on_five_leaves() {
    let names = labels(5);
    let index: HashMap<BTreeSet<Vec<String>>, usize> = own_enumeration(&names)
        .iter()
        .enumerate()
        .map(|(i, t)| (t.splits(), i))
        .collect();
    assert_eq!(index.len(), 15);
    let samples = 30_000u64;
    let mut counts = [0u64; 15];
    for s in 0..samples {
        let t = random_tree_stream(&names, 2024, s).unwrap();
        counts[index[&Raw::of(&t).splits()]] += 1;
    }
    let expected = samples as f64 / 15.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 14 degrees of freedom, upper 0.1% point.
    assert!(chi2 < 36.12, "chi-square {chi2}, counts {counts:?}");
}

#[test]
fn quoted_labels_survive_round_trip() {
    let t = parse_newick("(('a b','it''s'),(C,D),E);").unwrap();
    let back = parse_newick(&t.to_newick()).unwrap();
    assert!(t.same_topology(&back));
    assert!(back.leaf_index("it's").is_some());
    assert!(back.leaf_index("a b").is_some());
}

/// Shifting one pendant leaf `m` places costs exactly `m`, both in k-IC and
/// in NNI moves measured by full breadth-first search over tree space.
#[test]
fn shifted_pairs_sit_m_apart() {
    use kic_core::families::shifted_caterpillar_pair;
    use kic_core::metrics::{nni_exact, NniGraph};
    for n in 6..=8 {
        let names: Vec<String> = (1..=n).map(|i| format!("i{i}")).collect();
        let graph = NniGraph::build(&names).unwrap();
        for m in 1..=n - 5 {
            let (a, b, assoc) = shifted_caterpillar_pair(n, m).unwrap();
            let moved = assoc.carry_into_first(&a, &b).unwrap();
            assert_eq!(oracle_kic(&Raw::of(&a), &Raw::of(&moved)) as usize, m);
            let from = graph.index_of(&a).unwrap();
            let to = graph.index_of(&moved).unwrap();
            assert_eq!(graph.distances_from(from)[to] as usize, m);
            let search = nni_exact(&a, &b, &assoc, 1_000_000).unwrap();
            assert_eq!(search.exact(), Some(m as u32));
        }
    }
}
