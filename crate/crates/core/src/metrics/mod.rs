//! Pairwise distances between two trees whose leaves are paired by a
//! [`LeafAssociation`].
//!
//! The primary distance is the precise k-IC value: the largest difference,
//! over all corresponding leaf pairs, between the edge counts of the two
//! leaf-to-leaf paths. It is the max-norm of the path-length difference
//! vector; the path difference distance is the Euclidean norm of the same
//! vector.

mod assoc;
mod nni_search;

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{splits::split_masks_for, PathLengthMatrix, Tree};

pub use assoc::LeafAssociation;
pub use nni_search::{nni_exact, NniGraph, NniSearch, DEFAULT_NNI_BUDGET};

fn check_sizes(t1: &Tree, t2: &Tree) -> Result<()> {
    if t1.n_leaves() != t2.n_leaves() {
        return Err(Error::LeafCountMismatch(t1.n_leaves(), t2.n_leaves()));
    }
    Ok(())
}

/// Smallest k such that every corresponding leaf pair's path lengths differ
/// by at most k. `O(n^2)`.
pub fn precise_kic(t1: &Tree, t2: &Tree, assoc: &LeafAssociation) -> Result<u32> {
    check_sizes(t1, t2)?;
    let mapping = assoc.resolve(t1, t2)?;
    Ok(t1
        .path_length_matrix()
        .max_abs_diff(&t2.path_length_matrix(), &mapping))
}

/// [`precise_kic`] as a lower bound on the NNI distance: a single
/// interchange changes any leaf-to-leaf path length by at most one.
pub fn nni_lower_bound(t1: &Tree, t2: &Tree, assoc: &LeafAssociation) -> Result<u32> {
    precise_kic(t1, t2, assoc)
}

/// Euclidean norm of the per-pair path-length differences.
pub fn path_difference(t1: &Tree, t2: &Tree, assoc: &LeafAssociation) -> Result<f64> {
    check_sizes(t1, t2)?;
    let mapping = assoc.resolve(t1, t2)?;
    let ss = t1
        .path_length_matrix()
        .sum_sq_diff(&t2.path_length_matrix(), &mapping);
    Ok((ss as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RfDistance {
    /// Splits of either tree missing from the other.
    pub raw: usize,
    /// `raw / (2(n-3))`.
    pub normalized: f64,
    /// Splits present in both trees.
    pub shared_splits: usize,
    /// `2(n-3)`.
    pub max: usize,
}

/// Robinson-Foulds distance, after mapping the second tree's splits into
/// the first tree's leaves.
pub fn rf_distance(t1: &Tree, t2: &Tree, assoc: &LeafAssociation) -> Result<RfDistance> {
    check_sizes(t1, t2)?;
    let n = t1.n_leaves();
    if n < 4 {
        return Err(Error::InvalidParameter(
            "Robinson-Foulds distance needs at least 4 leaves".into(),
        ));
    }
    let mapping = assoc.resolve(t1, t2)?;
    Ok(rf_from_mapping(t1, t2, &mapping))
}

pub(crate) fn rf_from_mapping(t1: &Tree, t2: &Tree, mapping: &[usize]) -> RfDistance {
    let n = t1.n_leaves();
    let identity: Vec<usize> = (0..n).collect();
    let mut inverse = vec![0; n];
    for (i, &j) in mapping.iter().enumerate() {
        inverse[j] = i;
    }
    let s1: HashSet<_> = split_masks_for(t1, &identity).into_iter().collect();
    let s2: HashSet<_> = split_masks_for(t2, &inverse).into_iter().collect();
    let shared = s1.intersection(&s2).count();
    let raw = (s1.len() - shared) + (s2.len() - shared);
    let max = 2 * (n - 3);
    RfDistance {
        raw,
        normalized: if max == 0 { 0.0 } else { raw as f64 / max as f64 },
        shared_splits: shared,
        max,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterGap {
    pub diameter_1: u32,
    pub diameter_2: u32,
    pub gap: u32,
    /// The gap equals the precise k-IC value.
    pub endpoint_condition_applies: bool,
    /// When the condition applies: every leaf pair realizing the larger
    /// diameter is paired with a pair realizing the other diameter. True
    /// vacuously otherwise.
    pub endpoint_condition_holds: bool,
}

pub fn diameter_gap_check(t1: &Tree, t2: &Tree, assoc: &LeafAssociation) -> Result<DiameterGap> {
    check_sizes(t1, t2)?;
    let mapping = assoc.resolve(t1, t2)?;
    let m1 = t1.path_length_matrix();
    let m2 = t2.path_length_matrix();
    Ok(diameter_gap_from(&m1, &m2, &mapping))
}

pub(crate) fn diameter_gap_from(
    m1: &PathLengthMatrix,
    m2: &PathLengthMatrix,
    mapping: &[usize],
) -> DiameterGap {
    let kic = m1.max_abs_diff(m2, mapping);
    let (d1, d2) = (m1.max_entry(), m2.max_entry());
    let gap = d1.abs_diff(d2);
    let applies = gap == kic;
    let mut holds = true;
    if applies {
        let n = m1.n();
        let mut inverse = vec![0; n];
        for (i, &j) in mapping.iter().enumerate() {
            inverse[j] = i;
        }
        if d1 >= d2 {
            holds &= endpoints_preserved(m1, m2, mapping);
        }
        if d2 >= d1 {
            holds &= endpoints_preserved(m2, m1, &inverse);
        }
    }
    DiameterGap {
        diameter_1: d1,
        diameter_2: d2,
        gap,
        endpoint_condition_applies: applies,
        endpoint_condition_holds: holds,
    }
}

fn endpoints_preserved(long: &PathLengthMatrix, short: &PathLengthMatrix, mapping: &[usize]) -> bool {
    let (dl, ds) = (long.max_entry(), short.max_entry());
    let n = long.n();
    (0..n).all(|i| {
        ((i + 1)..n).all(|j| long.get(i, j) != dl || short.get(mapping[i], mapping[j]) == ds)
    })
}

/// Settings for [`compare`].
#[derive(Clone, Copy, Debug)]
pub struct CompareOptions {
    /// Run the exact NNI search with this budget; `None` skips it.
    pub nni_budget: Option<usize>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            nni_budget: Some(DEFAULT_NNI_BUDGET),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub n_leaves: usize,
    pub kic: u32,
    pub rf_raw: usize,
    pub rf_normalized: f64,
    pub shared_splits: usize,
    pub path_difference: f64,
    pub nni_lower_bound: u32,
    pub nni_exact: Option<u32>,
    pub nni_search_exhausted: bool,
    /// Bound proven by an exhausted search (never below `nni_lower_bound`).
    pub nni_search_lower_bound: Option<u32>,
    pub diameter_1: u32,
    pub diameter_2: u32,
    pub diameter_gap: u32,
    pub endpoint_condition_applies: bool,
    pub endpoint_condition_holds: bool,
}

/// Every distance for one tree pair.
pub fn compare(
    t1: &Tree,
    t2: &Tree,
    assoc: &LeafAssociation,
    options: CompareOptions,
) -> Result<DistanceReport> {
    check_sizes(t1, t2)?;
    let mapping = assoc.resolve(t1, t2)?;
    let m1 = t1.path_length_matrix();
    let m2 = t2.path_length_matrix();
    let kic = m1.max_abs_diff(&m2, &mapping);
    let path_difference = (m1.sum_sq_diff(&m2, &mapping) as f64).sqrt();
    let gap = diameter_gap_from(&m1, &m2, &mapping);
    let rf = if t1.n_leaves() >= 4 {
        rf_from_mapping(t1, t2, &mapping)
    } else {
        RfDistance {
            raw: 0,
            normalized: 0.0,
            shared_splits: 0,
            max: 0,
        }
    };
    let search = match options.nni_budget {
        Some(budget) => Some(nni_exact(t1, t2, assoc, budget)?),
        None => None,
    };
    let (nni_exact, exhausted, search_bound) = match search {
        Some(NniSearch::Exact { distance }) => (Some(distance), false, None),
        Some(NniSearch::Exhausted { lower_bound, .. }) => {
            (None, true, Some(lower_bound.max(kic)))
        }
        None => (None, false, None),
    };
    Ok(DistanceReport {
        n_leaves: t1.n_leaves(),
        kic,
        rf_raw: rf.raw,
        rf_normalized: rf.normalized,
        shared_splits: rf.shared_splits,
        path_difference,
        nni_lower_bound: kic,
        nni_exact,
        nni_search_exhausted: exhausted,
        nni_search_lower_bound: search_bound,
        diameter_1: gap.diameter_1,
        diameter_2: gap.diameter_2,
        diameter_gap: gap.gap,
        endpoint_condition_applies: gap.endpoint_condition_applies,
        endpoint_condition_holds: gap.endpoint_condition_holds,
    })
}
