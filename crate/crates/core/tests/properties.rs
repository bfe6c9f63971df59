use proptest::prelude::*;

use kic_core::metrics::{
    diameter_gap_check, path_difference, precise_kic, rf_distance, LeafAssociation,
};
use kic_core::tree::random_tree_stream;
use kic_core::{parse_newick, Tree};

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

fn tree(n: usize, seed: u64) -> Tree {
    random_tree_stream(&labels(n), seed, 0).unwrap()
}

fn id(t: &Tree) -> LeafAssociation {
    LeafAssociation::identity(t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn metric_axioms(n in 4usize..40, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (tree(n, a), tree(n, b), tree(n, c));
        let i = id(&x);
        prop_assert_eq!(precise_kic(&x, &x, &i).unwrap(), 0);
        let xy = precise_kic(&x, &y, &i).unwrap();
        prop_assert_eq!(xy, precise_kic(&y, &x, &i).unwrap());
        let xz = precise_kic(&x, &z, &i).unwrap();
        let zy = precise_kic(&z, &y, &i).unwrap();
        prop_assert!(xy <= xz + zy);
        prop_assert_eq!(xy == 0, x.same_topology(&y));
    }

    #[test]
    fn kic_bounds(n in 4usize..60, a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (tree(n, a), tree(n, b));
        let i = id(&x);
        let k = precise_kic(&x, &y, &i).unwrap();
        prop_assert!(k as usize <= n - 3);
        let pd = path_difference(&x, &y, &i).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        prop_assert!(pd + 1e-9 >= k as f64);
        prop_assert!(pd <= k as f64 * pairs.sqrt() + 1e-9);
        let gap = diameter_gap_check(&x, &y, &i).unwrap();
        prop_assert!(gap.gap <= k);
        prop_assert!(!gap.endpoint_condition_applies || gap.endpoint_condition_holds);
    }

    #[test]
    fn rf_is_even_and_bounded(n in 4usize..60, a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (tree(n, a), tree(n, b));
        let rf = rf_distance(&x, &y, &id(&x)).unwrap();
        prop_assert_eq!(rf.raw % 2, 0);
        prop_assert!(rf.raw <= 2 * (n - 3));
        prop_assert_eq!(rf.raw + 2 * rf.shared_splits, 2 * (n - 3));
        prop_assert_eq!(rf.raw == 0, x.same_topology(&y));
    }

    #[test]
    fn newick_round_trip(n in 3usize..80, a in any::<u64>()) {
        let x = tree(n, a);
        let text = x.to_newick();
        let back = parse_newick(&text).unwrap();
        prop_assert!(x.same_topology(&back));
        prop_assert_eq!(back.to_newick(), text);
        prop_assert_eq!(x.canonical_form(), back.canonical_form());
    }

    #[test]
    fn relabelling_both_trees_is_invisible(n in 5usize..30, a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (tree(n, a), tree(n, b));
        let k = precise_kic(&x, &y, &id(&x)).unwrap();
        let rf = rf_distance(&x, &y, &id(&x)).unwrap().raw;
        let fresh: Vec<String> = x.labels().iter().map(|l| format!("{l}'")).collect();
        let x2 = x.relabeled(fresh.clone()).unwrap();
        let y2 = y.relabeled(y.labels().iter().map(|l| format!("{l}'")).collect()).unwrap();
        prop_assert_eq!(precise_kic(&x2, &y2, &id(&x2)).unwrap(), k);
        prop_assert_eq!(rf_distance(&x2, &y2, &id(&x2)).unwrap().raw, rf);
        // Same comparison through an explicit association across label sets.
        let assoc = LeafAssociation::new(
            x.labels().iter().cloned().zip(fresh).collect(),
        ).unwrap();
        prop_assert_eq!(precise_kic(&x, &y2, &assoc).unwrap(), k);
        prop_assert_eq!(x.unlabeled_shape(), x2.unlabeled_shape());
    }

    #[test]
    fn nni_neighbors_are_one_apart(n in 4usize..25, a in any::<u64>()) {
        let x = tree(n, a);
        let nbrs = x.nni_neighbors().unwrap();
        prop_assert_eq!(nbrs.len(), 2 * (n - 3));
        for y in &nbrs {
            prop_assert_eq!(precise_kic(&x, y, &id(&x)).unwrap(), 1);
            prop_assert_eq!(rf_distance(&x, y, &id(&x)).unwrap().raw, 2);
        }
    }

    #[test]
    fn association_algebra(n in 3usize..30, shift in 0usize..30) {
        let a = labels(n);
        let b: Vec<String> = (0..n).map(|i| format!("b{}", (i + shift) % n)).collect();
        let c: Vec<String> = (0..n).map(|i| format!("c{}", n - 1 - i)).collect();
        let ab = LeafAssociation::new(a.iter().cloned().zip(b.iter().cloned()).collect()).unwrap();
        let bc = LeafAssociation::new(b.iter().cloned().zip(c.iter().cloned()).collect()).unwrap();
        let round = ab.compose(&ab.inverse()).unwrap();
        prop_assert!(round.pairs().iter().all(|(x, y)| x == y));
        let ac = ab.compose(&bc).unwrap();
        prop_assert_eq!(ac.len(), n);
        prop_assert_eq!(ac.inverse().inverse(), ac.clone());
        prop_assert_eq!(LeafAssociation::from_tsv(&ac.to_tsv()).unwrap(), ac);
    }

    #[test]
    fn cherries_and_diameter_are_consistent(n in 4usize..60, a in any::<u64>()) {
        let x = tree(n, a);
        let c = x.cherry_count().unwrap();
        prop_assert!(c >= 2 && c <= n / 2);
        prop_assert_eq!(x.is_caterpillar().unwrap(), c == 2);
        let d = x.diameter();
        prop_assert!(d >= 3 && d < n);
        prop_assert_eq!(x.path_length_matrix().max_entry() as usize, d);
        prop_assert!(x.path_length_matrix().satisfies_four_point());
    }
}
