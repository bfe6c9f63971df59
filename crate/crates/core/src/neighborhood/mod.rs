//! The k-interval neighborhood `IN_k(T)`: trees at precise k-IC distance
//! exactly `k` from `T`. Exhaustive counting for any `k`, closed forms for
//! the largest case `k = n - 3`, and their growth with the cherry count.

mod closed_form;
mod growth;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tree::{CanonicalForm, PathLengthMatrix, Tree, TreeEnumerator, DEFAULT_ENUMERATION_CAP};

pub use closed_form::{
    closed_form_caterpillar, closed_form_caterpillar_variant, closed_form_for,
    closed_form_multi_cherry, factorial, multi_cherry_quadratic, CaterpillarVariant,
    MultiCherryVariant, DEFAULT_MULTI_CHERRY_VARIANT,
};
pub use growth::{
    growth_table, inequality_checks, neighborhood_proportion, proportion_limit_table,
    rf_zero_split_expected, simulate_kic_distribution, simulate_rf_zero_split,
    vertex_cherry_count, GrowthRow, GrowthTable, InequalityReport, Lemma7Row, Lemma8Row,
    ProportionRow, ProportionTable,
};

pub(crate) fn big_as_string<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn canonical_as_string<S: Serializer>(
    v: &CanonicalForm,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(v.as_str())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    BruteForce,
    ClosedFormCaterpillar,
    ClosedFormMultiCherry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborhoodCount {
    pub n: usize,
    #[serde(serialize_with = "canonical_as_string")]
    pub reference: CanonicalForm,
    pub k: usize,
    /// Decimal string in JSON.
    #[serde(serialize_with = "big_as_string")]
    pub count: BigInt,
    pub method: CountMethod,
    pub formula_variant: Option<MultiCherryVariant>,
}

/// A count plus, when requested, every tree in the neighborhood.
#[derive(Clone, Debug)]
pub struct NeighborhoodScan {
    pub count: NeighborhoodCount,
    pub members: Option<Vec<Tree>>,
}

/// Counts of enumerated trees by precise k-IC distance from a reference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub n: usize,
    #[serde(serialize_with = "canonical_as_string")]
    pub reference: CanonicalForm,
    /// Entry `k` counts trees at distance exactly `k`; length `n - 2`
    /// unless a larger distance occurs.
    pub counts: Vec<u64>,
    pub total: u64,
}

fn enumerator_for(t: &Tree, cap: usize) -> Result<TreeEnumerator> {
    TreeEnumerator::with_cap(t.labels(), cap)
}

fn check_k(t: &Tree, k: usize) -> Result<()> {
    let n = t.n_leaves();
    if k > n.saturating_sub(3) {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside 0..={} for n = {n}",
            n.saturating_sub(3)
        )));
    }
    Ok(())
}

/// Trees on the reference's labels are enumerated in the same leaf order,
/// so leaf ids already correspond.
fn scan<F, A>(t: &Tree, cap: usize, init: F) -> Result<Vec<A>>
where
    F: Fn(&PathLengthMatrix) -> A + Sync,
    A: Send + Sync + Accumulate,
{
    let e = enumerator_for(t, cap)?;
    let reference = t.path_length_matrix();
    let parts = e.partitions_for(rayon::current_num_threads());
    Ok(parts
        .into_par_iter()
        .map(|part| {
            let mut acc = init(&reference);
            for tree in part {
                let d = reference.max_abs_diff_aligned(&tree.path_length_matrix());
                acc.add(d as usize, tree);
            }
            acc
        })
        .collect())
}

trait Accumulate {
    fn add(&mut self, k: usize, tree: Tree);
}

struct HistAcc(Vec<u64>);

impl Accumulate for HistAcc {
    fn add(&mut self, k: usize, _tree: Tree) {
        if k >= self.0.len() {
            self.0.resize(k + 1, 0);
        }
        self.0[k] += 1;
    }
}

struct MemberAcc {
    k: usize,
    count: u64,
    members: Option<Vec<Tree>>,
}

impl Accumulate for MemberAcc {
    fn add(&mut self, k: usize, tree: Tree) {
        if k == self.k {
            self.count += 1;
            if let Some(m) = self.members.as_mut() {
                m.push(tree);
            }
        }
    }
}

/// Distance histogram over every tree on `t`'s labels.
pub fn interval_histogram(t: &Tree) -> Result<Histogram> {
    interval_histogram_with_cap(t, DEFAULT_ENUMERATION_CAP)
}

pub fn interval_histogram_with_cap(t: &Tree, cap: usize) -> Result<Histogram> {
    let n = t.n_leaves();
    let parts = scan(t, cap, |_| HistAcc(vec![0; n.saturating_sub(2).max(1)]))?;
    let mut counts = vec![0u64; n.saturating_sub(2).max(1)];
    for HistAcc(h) in parts {
        if h.len() > counts.len() {
            counts.resize(h.len(), 0);
        }
        for (k, c) in h.into_iter().enumerate() {
            counts[k] += c;
        }
    }
    Ok(Histogram {
        n,
        reference: t.canonical_form(),
        total: counts.iter().sum(),
        counts,
    })
}

pub fn brute_force_interval_neighborhood(
    t: &Tree,
    k: usize,
    emit_members: bool,
) -> Result<NeighborhoodScan> {
    brute_force_interval_neighborhood_with_cap(t, k, emit_members, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_interval_neighborhood_with_cap(
    t: &Tree,
    k: usize,
    emit_members: bool,
    cap: usize,
) -> Result<NeighborhoodScan> {
    check_k(t, k)?;
    let parts = scan(t, cap, |_| MemberAcc {
        k,
        count: 0,
        members: emit_members.then(Vec::new),
    })?;
    let mut count = 0u64;
    let mut members = emit_members.then(Vec::new);
    for p in parts {
        count += p.count;
        if let (Some(all), Some(mut m)) = (members.as_mut(), p.members) {
            all.append(&mut m);
        }
    }
    Ok(NeighborhoodScan {
        count: NeighborhoodCount {
            n: t.n_leaves(),
            reference: t.canonical_form(),
            k,
            count: BigInt::from(count),
            method: CountMethod::BruteForce,
            formula_variant: None,
        },
        members,
    })
}

/// Closed-form `|IN_{n-3}(t)|` using the validated variants. Needs `n >= 6`.
pub fn closed_form_count(t: &Tree) -> Result<NeighborhoodCount> {
    let n = t.n_leaves();
    let c = t.cherry_count()?;
    let (method, variant) = if c == 2 {
        (CountMethod::ClosedFormCaterpillar, None)
    } else {
        (CountMethod::ClosedFormMultiCherry, Some(DEFAULT_MULTI_CHERRY_VARIANT))
    };
    Ok(NeighborhoodCount {
        n,
        reference: t.canonical_form(),
        k: n.saturating_sub(3),
        count: closed_form_for(n, c)?,
        method,
        formula_variant: variant,
    })
}

/// One representative tree per unlabeled shape on `n` leaves, labeled
/// `t1..tn`, ordered by cherry count then shape signature.
pub fn reference_shapes(n: usize) -> Result<Vec<Tree>> {
    let labels: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
    let e = TreeEnumerator::with_cap(&labels, DEFAULT_ENUMERATION_CAP)?;
    let parts = e.partitions_for(rayon::current_num_threads());
    let found: Vec<BTreeMap<String, Tree>> = parts
        .into_par_iter()
        .map(|part| {
            let mut seen = BTreeMap::new();
            for t in part {
                seen.entry(t.unlabeled_shape()).or_insert(t);
            }
            seen
        })
        .collect();
    let mut merged: BTreeMap<String, Tree> = BTreeMap::new();
    for m in found {
        for (k, t) in m {
            merged.entry(k).or_insert(t);
        }
    }
    let mut out: Vec<(usize, String, Tree)> = merged
        .into_iter()
        .map(|(s, t)| (t.cherries().len(), s, t))
        .collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|(_, _, t)| t).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantValue {
    pub variant: String,
    #[serde(serialize_with = "big_as_string")]
    pub value: BigInt,
    pub matches: bool,
}

/// Oracle count versus every printed formula for one reference tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjudicationRow {
    pub n: usize,
    pub c: usize,
    pub shape: String,
    pub reference: String,
    #[serde(serialize_with = "big_as_string")]
    pub oracle: BigInt,
    pub variants: Vec<VariantValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantVerdict {
    pub case: String,
    pub variant: String,
    pub instances: usize,
    pub matched: usize,
    pub matches_all: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeGroup {
    pub n: usize,
    pub c: usize,
    pub shapes: usize,
    pub distinct_counts: Vec<String>,
    pub shape_independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Adjudication {
    pub rows: Vec<AdjudicationRow>,
    pub verdicts: Vec<VariantVerdict>,
    pub shape_groups: Vec<ShapeGroup>,
    /// Per case, the single variant matching every instance, if exactly
    /// one does.
    pub winners: BTreeMap<String, Option<String>>,
}

fn variant_name<T: Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Compare the oracle count of `IN_{n-3}` with every printed formula for
/// each given reference tree (`n >= 6`).
pub fn adjudicate(references: &[Tree]) -> Result<Adjudication> {
    let mut rows = Vec::with_capacity(references.len());
    for t in references {
        let n = t.n_leaves();
        let c = t.cherry_count()?;
        let oracle = brute_force_interval_neighborhood(t, n.saturating_sub(3), false)?
            .count
            .count;
        let variants: Vec<(String, BigInt)> = if c == 2 {
            CaterpillarVariant::ALL
                .iter()
                .map(|&v| Ok((variant_name(v), closed_form_caterpillar_variant(n, v)?)))
                .collect::<Result<_>>()?
        } else {
            MultiCherryVariant::ALL
                .iter()
                .map(|&v| Ok((variant_name(v), closed_form_multi_cherry(n, c, v)?)))
                .collect::<Result<_>>()?
        };
        rows.push(AdjudicationRow {
            n,
            c,
            shape: t.unlabeled_shape(),
            reference: t.to_newick(),
            variants: variants
                .into_iter()
                .map(|(variant, value)| VariantValue {
                    matches: value == oracle,
                    variant,
                    value,
                })
                .collect(),
            oracle,
        });
    }

    let case_of = |c: usize| if c == 2 { "caterpillar" } else { "multi_cherry" };
    let mut tally: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for r in &rows {
        for v in &r.variants {
            let e = tally
                .entry((case_of(r.c).to_string(), v.variant.clone()))
                .or_default();
            e.0 += 1;
            e.1 += v.matches as usize;
        }
    }
    let verdicts: Vec<VariantVerdict> = tally
        .into_iter()
        .map(|((case, variant), (instances, matched))| VariantVerdict {
            case,
            variant,
            instances,
            matched,
            matches_all: matched == instances,
        })
        .collect();
    let mut winners: BTreeMap<String, Option<String>> = BTreeMap::new();
    for case in ["caterpillar", "multi_cherry"] {
        let all: Vec<&VariantVerdict> = verdicts
            .iter()
            .filter(|v| v.case == case && v.matches_all)
            .collect();
        if verdicts.iter().any(|v| v.case == case) {
            winners.insert(
                case.to_string(),
                (all.len() == 1).then(|| all[0].variant.clone()),
            );
        }
    }

    let mut groups: BTreeMap<(usize, usize), Vec<&AdjudicationRow>> = BTreeMap::new();
    for r in &rows {
        groups.entry((r.n, r.c)).or_default().push(r);
    }
    let shape_groups = groups
        .into_iter()
        .map(|((n, c), rs)| {
            let mut counts: Vec<String> = rs.iter().map(|r| r.oracle.to_string()).collect();
            counts.sort();
            counts.dedup();
            ShapeGroup {
                n,
                c,
                shapes: rs.len(),
                shape_independent: counts.len() == 1,
                distinct_counts: counts,
            }
        })
        .collect();

    Ok(Adjudication {
        rows,
        verdicts,
        shape_groups,
        winners,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::caterpillar;
    use crate::tree::parse_newick;

    #[test]
    fn zero_distance_is_the_tree_itself() {
        let t = caterpillar(&["a", "b", "c", "d", "e", "f"]).unwrap();
        let s = brute_force_interval_neighborhood(&t, 0, true).unwrap();
        assert_eq!(s.count.count, BigInt::from(1));
        assert!(s.members.unwrap()[0].same_topology(&t));
    }

    #[test]
    fn histogram_sums_to_tree_count() {
        let t = parse_newick("((a,b),(c,d),(e,f));").unwrap();
        let h = interval_histogram(&t).unwrap();
        assert_eq!(h.total, 105);
        assert_eq!(h.counts.len(), 4);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 6);
    }

    #[test]
    fn k_range_checked() {
        let t = caterpillar(&["a", "b", "c", "d", "e"]).unwrap();
        assert!(brute_force_interval_neighborhood(&t, 3, false).is_err());
        assert!(brute_force_interval_neighborhood(&t, 2, false).is_ok());
    }

    #[test]
    fn cap_checked() {
        let labels: Vec<String> = (0..12).map(|i| format!("x{i}")).collect();
        let t = caterpillar(&labels).unwrap();
        assert!(matches!(
            brute_force_interval_neighborhood(&t, 1, false),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn six_leaf_shapes() {
        let shapes = reference_shapes(6).unwrap();
        assert_eq!(shapes.len(), 2);
        assert_eq!(shapes[0].cherries().len(), 2);
        assert_eq!(shapes[1].cherries().len(), 3);
    }
}
