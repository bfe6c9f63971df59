//! Claim-by-claim verification of the metric and neighborhood results at
//! small sizes, by exhaustive enumeration where feasible and seeded sampling
//! elsewhere.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{max_distance_pair, shifted_caterpillar_pair, triple_swap_pair};
use crate::metrics::{diameter_gap_from, nni_exact, precise_kic, rf_distance, NniGraph};
use crate::neighborhood::{
    adjudicate, growth_table, inequality_checks, interval_histogram, proportion_limit_table,
    reference_shapes, rf_zero_split_expected, vertex_cherry_count, Adjudication,
    DEFAULT_MULTI_CHERRY_VARIANT,
};
use crate::tree::{random_tree_stream, PathLengthMatrix, Tree, TreeEnumerator};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest `max_n` accepted by [`verify`].
pub const VERIFY_MAX_N: usize = 9;

/// Exhaustive all-pairs checks stop here; larger sizes are sampled.
const EXHAUSTIVE_PAIRS_MAX_N: usize = 7;

/// Exhaustive triangle checks stop here.
const EXHAUSTIVE_TRIPLES_MAX_N: usize = 6;

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub max_n: usize,
    pub seed: u64,
    /// Random triples or pairs per sampled size.
    pub samples: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_n: 7,
            seed: 1,
            samples: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trees: Vec<String>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub claim: String,
    pub sizes: String,
    pub instances: u64,
    pub passed: bool,
    pub detail: String,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub max_n: usize,
    pub seed: u64,
    pub samples: u64,
    pub claims: Vec<ClaimResult>,
    pub adjudication: Adjudication,
    pub default_multi_cherry_variant: String,
    pub all_passed: bool,
}

struct Claim {
    id: &'static str,
    claim: &'static str,
    sizes: String,
    instances: u64,
    detail: String,
    counterexample: Option<Counterexample>,
}

impl Claim {
    fn new(id: &'static str, claim: &'static str, sizes: String) -> Claim {
        Claim {
            id,
            claim,
            sizes,
            instances: 0,
            detail: String::new(),
            counterexample: None,
        }
    }

    fn fail(&mut self, trees: &[&Tree], note: String) {
        if self.counterexample.is_none() {
            self.counterexample = Some(Counterexample {
                trees: trees.iter().map(|t| t.to_newick()).collect(),
                note,
            });
        }
    }

    fn finish(self) -> ClaimResult {
        ClaimResult {
            id: self.id.to_string(),
            claim: self.claim.to_string(),
            sizes: self.sizes,
            instances: self.instances,
            passed: self.counterexample.is_none(),
            detail: self.detail,
            counterexample: self.counterexample,
        }
    }
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("t{i}")).collect()
}

/// All trees on `n` leaves with pairwise precise k-IC distances.
struct Space {
    n: usize,
    trees: Vec<Tree>,
    dist: Vec<u8>,
}

impl Space {
    fn build(n: usize) -> Result<Space> {
        let e = TreeEnumerator::with_cap(&labels(n), EXHAUSTIVE_PAIRS_MAX_N)?;
        let trees: Vec<Tree> = e.iter().collect();
        let mats: Vec<PathLengthMatrix> = trees.par_iter().map(|t| t.path_length_matrix()).collect();
        let m = trees.len();
        let dist: Vec<u8> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mats = &mats;
                (0..m).map(move |j| mats[i].max_abs_diff_aligned(&mats[j]) as u8)
            })
            .collect();
        Ok(Space { n, trees, dist })
    }

    fn len(&self) -> usize {
        self.trees.len()
    }

    fn d(&self, i: usize, j: usize) -> u8 {
        self.dist[i * self.len() + j]
    }

    fn pairs(&self) -> u64 {
        let m = self.len() as u64;
        m * (m - 1) / 2
    }
}

fn range_text(lo: usize, hi: usize) -> String {
    if lo > hi {
        "none".into()
    } else if lo == hi {
        format!("n={lo}")
    } else {
        format!("n={lo}..{hi}")
    }
}

fn metric_axioms(spaces: &[Space], opts: &VerifyOptions) -> Result<ClaimResult> {
    let mut c = Claim::new(
        "metric_axioms",
        "precise k-IC is zero exactly on identical topologies, symmetric, and satisfies the triangle inequality",
        String::new(),
    );
    let mut sizes = Vec::new();
    for s in spaces {
        let m = s.len();
        for i in 0..m {
            for j in 0..m {
                let zero = s.d(i, j) == 0;
                if zero != (i == j) {
                    c.fail(&[&s.trees[i], &s.trees[j]], "zero distance between distinct trees".into());
                }
                if s.d(i, j) != s.d(j, i) {
                    c.fail(&[&s.trees[i], &s.trees[j]], "asymmetric distance".into());
                }
            }
        }
        c.instances += (m * m) as u64;
        if s.n <= EXHAUSTIVE_TRIPLES_MAX_N {
            let bad = (0..m).into_par_iter().find_map_any(|i| {
                for j in 0..m {
                    for k in 0..m {
                        if s.d(i, k) > s.d(i, j) + s.d(j, k) {
                            return Some((i, j, k));
                        }
                    }
                }
                None
            });
            if let Some((i, j, k)) = bad {
                c.fail(&[&s.trees[i], &s.trees[j], &s.trees[k]], "triangle inequality fails".into());
            }
            c.instances += (m * m * m) as u64;
            sizes.push(format!("all triples n={}", s.n));
        } else {
            sizes.push(format!("all pairs n={}", s.n));
        }
    }
    let lo = EXHAUSTIVE_TRIPLES_MAX_N + 1;
    for n in lo..=opts.max_n {
        let l = labels(n);
        let bad = (0..opts.samples).into_par_iter().find_map_any(|i| {
            let t: Vec<Tree> = (0..3)
                .map(|r| random_tree_stream(&l, opts.seed, 3 * i + r).expect("valid labels"))
                .collect();
            let m: Vec<PathLengthMatrix> = t.iter().map(|x| x.path_length_matrix()).collect();
            let d = |a: usize, b: usize| m[a].max_abs_diff_aligned(&m[b]);
            (d(0, 2) > d(0, 1) + d(1, 2) || d(0, 1) != d(1, 0)).then_some(t)
        });
        if let Some(t) = bad {
            c.fail(&[&t[0], &t[1], &t[2]], "sampled triple violates an axiom".into());
        }
        c.instances += opts.samples;
        sizes.push(format!("{} random triples n={n}", opts.samples));
    }
    c.sizes = sizes.join("; ");
    Ok(c.finish())
}

fn lemma5(spaces: &[Space], opts: &VerifyOptions) -> Result<(ClaimResult, ClaimResult)> {
    let mut cap = Claim::new(
        "lemma5_distance_cap",
        "every pair is at most (n-3)-IC and the bound is attained",
        String::new(),
    );
    let mut cor = Claim::new(
        "corollary6_caterpillar",
        "a pair at distance n-3 contains a caterpillar",
        String::new(),
    );
    let mut notes = Vec::new();
    for s in spaces {
        let cap_n = (s.n - 3) as u8;
        let cats: Vec<bool> = s
            .trees
            .iter()
            .map(|t| t.is_caterpillar().unwrap_or(true))
            .collect();
        let mut max = 0;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                let d = s.d(i, j);
                max = max.max(d);
                if d > cap_n {
                    cap.fail(&[&s.trees[i], &s.trees[j]], format!("distance {d} > {cap_n}"));
                }
                if d == cap_n {
                    cor.instances += 1;
                    if !cats[i] && !cats[j] {
                        cor.fail(&[&s.trees[i], &s.trees[j]], "neither tree is a caterpillar".into());
                    }
                }
            }
        }
        if max != cap_n {
            cap.fail(&[], format!("largest distance at n={} is {max}, not {cap_n}", s.n));
        }
        cap.instances += s.pairs();
        notes.push(format!("n={}: max {max}", s.n));
    }
    for n in 5..=10 {
        let (a, b, assoc) = max_distance_pair(n)?;
        let d = precise_kic(&a, &b, &assoc)?;
        cap.instances += 1;
        if d as usize != n - 3 {
            cap.fail(&[&a, &b], format!("max distance pair at n={n} has distance {d}"));
        }
    }
    let lo = EXHAUSTIVE_PAIRS_MAX_N + 1;
    for n in lo..=opts.max_n {
        let l = labels(n);
        let bad = (0..opts.samples).into_par_iter().find_map_any(|i| {
            let a = random_tree_stream(&l, opts.seed, 2 * i).expect("valid labels");
            let b = random_tree_stream(&l, opts.seed, 2 * i + 1).expect("valid labels");
            let d = a.path_length_matrix().max_abs_diff_aligned(&b.path_length_matrix()) as usize;
            (d > n - 3 || (d == n - 3 && !a.is_caterpillar().unwrap() && !b.is_caterpillar().unwrap()))
                .then_some((a, b))
        });
        if let Some((a, b)) = bad {
            cap.fail(&[&a, &b], "sampled pair breaks the cap or the caterpillar condition".into());
        }
        cap.instances += opts.samples;
    }
    let exhaustive = range_text(spaces.first().map_or(5, |s| s.n), spaces.last().map_or(4, |s| s.n));
    cap.sizes = format!("all pairs {exhaustive}; max_distance_pair n=5..10");
    if lo <= opts.max_n {
        cap.sizes += &format!("; {} random pairs {}", opts.samples, range_text(lo, opts.max_n));
    }
    cap.detail = notes.join(", ");
    cor.sizes = format!("all pairs {exhaustive}");
    cor.detail = format!("{} pairs at distance n-3", cor.instances);
    Ok((cap.finish(), cor.finish()))
}

fn nni_claims(spaces: &[Space]) -> Result<Vec<ClaimResult>> {
    let mut bound = Claim::new(
        "theorem4_nni_bound",
        "precise k-IC never exceeds the NNI distance",
        String::new(),
    );
    let mut unit = Claim::new(
        "nni_unit_equivalence",
        "precise k-IC is 1 exactly when the NNI distance is 1",
        String::new(),
    );
    let mut step = Claim::new(
        "nni_step_changes_paths_by_one",
        "a single NNI changes every leaf-to-leaf path length by at most one",
        String::new(),
    );
    for s in spaces {
        let g = NniGraph::build(&labels(s.n))?;
        // NniGraph enumerates in the same order as the space.
        let rows: Vec<Vec<u32>> = (0..g.len()).into_par_iter().map(|i| g.distances_from(i)).collect();
        for (i, row) in rows.iter().enumerate() {
            for (j, &nni) in row.iter().enumerate().skip(i + 1) {
                let d = s.d(i, j) as u32;
                if d > nni {
                    bound.fail(&[&s.trees[i], &s.trees[j]], format!("k-IC {d} > NNI {nni}"));
                }
                if (d == 1) != (nni == 1) {
                    unit.fail(&[&s.trees[i], &s.trees[j]], format!("k-IC {d}, NNI {nni}"));
                }
            }
            for &j in g.neighbors(i) {
                step.instances += 1;
                if s.d(i, j as usize) != 1 {
                    step.fail(
                        &[&s.trees[i], &s.trees[j as usize]],
                        format!("NNI neighbors at distance {}", s.d(i, j as usize)),
                    );
                }
            }
        }
        bound.instances += s.pairs();
        unit.instances += s.pairs();
    }
    let sizes = format!(
        "all pairs {}",
        range_text(spaces.first().map_or(5, |s| s.n), spaces.last().map_or(4, |s| s.n))
    );
    step.sizes = sizes.replace("all pairs", "every tree and NNI neighbor");
    bound.sizes = sizes.clone();
    unit.sizes = sizes;
    Ok(vec![bound.finish(), unit.finish(), step.finish()])
}

fn theorem5(spaces: &[Space]) -> ClaimResult {
    let mut c = Claim::new(
        "theorem5_diameter_gap",
        "the diameter gap is at most the precise k-IC, and at equality diameter endpoints correspond",
        range_text(spaces.first().map_or(5, |s| s.n), spaces.last().map_or(4, |s| s.n)),
    );
    let mut equal = 0u64;
    for s in spaces {
        let mats: Vec<PathLengthMatrix> = s.trees.iter().map(|t| t.path_length_matrix()).collect();
        let id: Vec<usize> = (0..s.n).collect();
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                let g = diameter_gap_from(&mats[i], &mats[j], &id);
                if g.gap > s.d(i, j) as u32 || !g.endpoint_condition_holds {
                    c.fail(&[&s.trees[i], &s.trees[j]], format!("{g:?}"));
                }
                equal += g.endpoint_condition_applies as u64;
            }
        }
        c.instances += s.pairs();
    }
    c.detail = format!("{equal} pairs with gap equal to k-IC");
    c.sizes = format!("all pairs {}", c.sizes);
    c.finish()
}

fn neighborhood_claims(opts: &VerifyOptions) -> Result<(Vec<ClaimResult>, Adjudication)> {
    let mut out = Vec::new();
    let mut shapes = Vec::new();
    for n in 6..=opts.max_n {
        shapes.extend(reference_shapes(n)?);
    }

    let mut hist = Claim::new(
        "neighborhood_histogram",
        "per-k counts sum to (2n-5)!! and never exceed k = n-3",
        String::new(),
    );
    let hist_max = opts.max_n.min(8);
    for t in shapes.iter().filter(|t| t.n_leaves() <= hist_max) {
        let h = interval_histogram(t)?;
        hist.instances += 1;
        let n = t.n_leaves();
        let total: u64 = (3..n as u64).map(|k| 2 * k - 3).product();
        if h.total != total || h.counts.len() > n - 2 || h.counts[0] != 1 {
            hist.fail(&[t], format!("histogram {:?}", h.counts));
        }
    }
    hist.sizes = format!("every shape class {}", range_text(6, hist_max));
    out.push(hist.finish());

    let adj = adjudicate(&shapes)?;
    let mut formula = Claim::new(
        "theorem6_formula",
        "exactly one printed closed form per case matches the brute-force size of IN_(n-3)",
        format!("every shape class {}", range_text(6, opts.max_n)),
    );
    formula.instances = adj.rows.len() as u64;
    for (case, w) in &adj.winners {
        match w {
            Some(v) => formula.detail.push_str(&format!("{case}: {v} matches; ")),
            None => formula.fail(&[], format!("{case}: no single variant matches every instance")),
        }
    }
    for v in adj.verdicts.iter().filter(|v| !v.matches_all) {
        formula.detail.push_str(&format!(
            "{} refuted ({} of {} instances); ",
            v.variant, v.matched, v.instances
        ));
    }
    let default = serde_json::to_value(DEFAULT_MULTI_CHERRY_VARIANT)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    if let Some(Some(w)) = adj.winners.get("multi_cherry") {
        if *w != default {
            formula.fail(&[], format!("library default {default} disagrees with the oracle ({w})"));
        }
    }
    out.push(formula.finish());

    let mut indep = Claim::new(
        "theorem6_shape_independence",
        "for fixed n and c the neighborhood size does not depend on the finer shape",
        format!("every shape class {}", range_text(6, opts.max_n)),
    );
    for g in &adj.shape_groups {
        indep.instances += g.shapes as u64;
        if !g.shape_independent {
            indep.fail(&[], format!("n={} c={}: counts {:?}", g.n, g.c, g.distinct_counts));
        }
    }
    out.push(indep.finish());

    let mut grow = Claim::new(
        "theorem7_growth",
        "for c >= 3 the size grows strictly with c, and the vertex lies beyond floor(n/2)",
        "closed forms n=8..14; vertex n=6..50".into(),
    );
    for n in 8..=14 {
        grow.instances += 1;
        if !growth_table(n)?.strictly_increasing_in_c {
            grow.fail(&[], format!("not increasing at n={n}"));
        }
    }
    for n in 6..=50usize {
        grow.instances += 1;
        if vertex_cherry_count(n) <= num_rational::Rational64::from_integer((n / 2) as i64) {
            grow.fail(&[], format!("vertex not beyond n/2 at n={n}"));
        }
    }
    out.push(grow.finish());

    let mut cat = Claim::new(
        "theorem8_caterpillar_largest",
        "caterpillars have the largest (n-3)-interval neighborhood",
        format!("closed forms n=6..14; oracle {}", range_text(6, opts.max_n)),
    );
    for n in 6..=14 {
        cat.instances += 1;
        if !growth_table(n)?.caterpillar_largest {
            cat.fail(&[], format!("closed forms at n={n}"));
        }
    }
    let mut by_n: BTreeMap<usize, Vec<(usize, &num_bigint::BigInt)>> = BTreeMap::new();
    for r in &adj.rows {
        by_n.entry(r.n).or_default().push((r.c, &r.oracle));
    }
    for (n, rs) in by_n {
        cat.instances += 1;
        let best = rs.iter().filter(|r| r.0 == 2).map(|r| r.1).max();
        if let Some(best) = best {
            if rs.iter().any(|r| r.0 != 2 && r.1 >= best) {
                cat.fail(&[], format!("oracle counts at n={n} do not favor the caterpillar"));
            }
        }
    }
    out.push(cat.finish());

    let ineq = inequality_checks(60)?;
    let mut l7 = Claim::new(
        "lemma7",
        "3(2n-7)!! > (n-1)! for n >= 10",
        "n=10..60".into(),
    );
    l7.instances = ineq.lemma7.len() as u64;
    for r in ineq.lemma7.iter().filter(|r| !r.holds) {
        l7.fail(&[], format!("fails at n={}", r.n));
    }
    l7.detail = format!(
        "n=10: {} > {}; n=9: {} vs {}",
        ineq.lemma7[0].lhs, ineq.lemma7[0].rhs, ineq.lemma7_below_range.lhs, ineq.lemma7_below_range.rhs
    );
    out.push(l7.finish());
    let mut l8 = Claim::new(
        "lemma8",
        "n^3 - 6n^2 + 11n - 6 > n^3/2 - 5n^2 + 37n/2 - 34",
        "n=1..60".into(),
    );
    l8.instances = ineq.lemma8.len() as u64;
    for r in ineq.lemma8.iter().filter(|r| !r.holds) {
        l8.fail(&[], format!("fails at n={}", r.n));
    }
    l8.detail = format!("n=1: f={}, g={}", ineq.lemma8[0].f, ineq.lemma8[0].g);
    out.push(l8.finish());

    let mut t9 = Claim::new(
        "theorem9_proportion_vanishes",
        "the share of tree space in IN_(n-3) strictly decreases",
        "caterpillar and c=floor(n/2), n=8..14".into(),
    );
    let table = proportion_limit_table(&(8..=14).collect::<Vec<_>>())?;
    t9.instances = table.rows.len() as u64;
    if !table.caterpillar_strictly_decreasing || !table.max_cherry_strictly_decreasing {
        t9.fail(&[], "proportions not strictly decreasing".into());
    }
    out.push(t9.finish());

    let mut lim = Claim::new(
        "rf_zero_split_limit",
        "e^(-c/2n) tends to e^(-1/4) = 0.7788 at c = floor(n/2)",
        "n=10^6".into(),
    );
    lim.instances = 1;
    let v = rf_zero_split_expected(1_000_000, 500_000)?;
    lim.detail = format!("{v:.6}");
    if (v - 0.7788).abs() > 1e-4 {
        lim.fail(&[], format!("value {v}"));
    }
    out.push(lim.finish());

    Ok((out, adj))
}

fn family_claims() -> Result<Vec<ClaimResult>> {
    let mut triple = Claim::new(
        "triple_swap_family",
        "C/D triple-swap pairs are 2-IC while Robinson-Foulds grows, and need x NNI moves at x=3",
        "x=3..8".into(),
    );
    let mut last_rf = 0;
    for x in 3..=8 {
        let (a, b, assoc) = triple_swap_pair(x)?;
        let d = precise_kic(&a, &b, &assoc)?;
        let rf = rf_distance(&a, &b, &assoc)?.raw;
        triple.instances += 1;
        if d != 2 || rf <= last_rf {
            triple.fail(&[&a, &b], format!("x={x}: k-IC {d}, RF {rf}"));
        }
        last_rf = rf;
        if x == 3 {
            let s = nni_exact(&a, &b, &assoc, crate::metrics::DEFAULT_NNI_BUDGET)?;
            triple.detail = format!("NNI at x=3: {:?}", s.exact());
            if s.exact() != Some(3) {
                triple.fail(&[&a, &b], format!("NNI search: {s:?}"));
            }
        }
    }
    let mut shifted = Claim::new(
        "shifted_caterpillar_family",
        "shifting one pendant leaf m positions gives precise m-IC",
        "n=6..10, m=1..n-5".into(),
    );
    for n in 6..=10 {
        for m in 1..=n - 5 {
            let (a, b, assoc) = shifted_caterpillar_pair(n, m)?;
            shifted.instances += 1;
            let d = precise_kic(&a, &b, &assoc)?;
            if d as usize != m {
                shifted.fail(&[&a, &b], format!("n={n}, m={m}: k-IC {d}"));
            }
        }
    }
    Ok(vec![triple.finish(), shifted.finish()])
}

/// Runs every claim for sizes up to `opts.max_n` (at most [`VERIFY_MAX_N`]).
pub fn verify(opts: &VerifyOptions) -> Result<VerificationReport> {
    if opts.max_n > VERIFY_MAX_N {
        return Err(Error::CapExceeded {
            what: "verify max_n",
            value: opts.max_n,
            cap: VERIFY_MAX_N,
        });
    }
    if opts.max_n < 6 {
        return Err(Error::InvalidParameter(format!(
            "verify needs max_n >= 6, got {}",
            opts.max_n
        )));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let spaces: Vec<Space> = (4..=opts.max_n.min(EXHAUSTIVE_PAIRS_MAX_N))
        .map(Space::build)
        .collect::<Result<_>>()?;
    let mut claims = vec![metric_axioms(&spaces, opts)?];
    let (cap, cor) = lemma5(&spaces, opts)?;
    claims.push(cap);
    claims.push(cor);
    claims.extend(nni_claims(&spaces)?);
    claims.push(theorem5(&spaces));
    let (nb, adjudication) = neighborhood_claims(opts)?;
    claims.extend(nb);
    claims.extend(family_claims()?);
    let default_multi_cherry_variant = serde_json::to_value(DEFAULT_MULTI_CHERRY_VARIANT)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    Ok(VerificationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        max_n: opts.max_n,
        seed: opts.seed,
        samples: opts.samples,
        all_passed: claims.iter().all(|c| c.passed),
        claims,
        adjudication,
        default_multi_cherry_variant,
    })
}
