//! Growth of `|IN_{n-3}|` in the cherry count, the auxiliary inequalities
//! behind caterpillar maximality, and the comparison with the chance that a
//! random tree shares no split with the reference.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::closed_form::{closed_form_caterpillar, closed_form_for, factorial};
use super::big_as_string;
use crate::error::{Error, Result};
use crate::tree::splits::split_masks_for;
use crate::tree::{count_trees, double_factorial, random_with, Tree};

fn ratio_as_string<S: Serializer, T: std::fmt::Display>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `(n^2 - 5n + 7) / 2`, where the quadratic in `c` peaks.
pub fn vertex_cherry_count(n: usize) -> Rational64 {
    let n = n as i64;
    Rational64::new(n * n - 5 * n + 7, 2)
}

/// `|IN_{n-3}| / (2n-5)!!` as an exact fraction.
pub fn neighborhood_proportion(n: usize, cherries: usize) -> Result<BigRational> {
    let size = closed_form_for(n, cherries)?;
    Ok(BigRational::new(size, BigInt::from(count_trees(n)?)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub c: usize,
    #[serde(serialize_with = "big_as_string")]
    pub in_size: BigInt,
    #[serde(serialize_with = "ratio_as_string")]
    pub proportion: BigRational,
    pub proportion_approx: f64,
    pub rf_zero_split_expectation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub n: usize,
    pub rows: Vec<GrowthRow>,
    /// Over rows with `c >= 3`.
    pub strictly_increasing_in_c: bool,
    /// The `c = 2` row is the largest.
    pub caterpillar_largest: bool,
    #[serde(serialize_with = "ratio_as_string")]
    pub vertex: Rational64,
    pub vertex_beyond_max_cherries: bool,
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn growth_table(n: usize) -> Result<GrowthTable> {
    if n < 6 {
        return Err(Error::InvalidParameter(format!(
            "growth table needs n >= 6, got {n}"
        )));
    }
    let total = BigInt::from(count_trees(n)?);
    let mut rows = Vec::new();
    for c in 2..=n / 2 {
        let in_size = closed_form_for(n, c)?;
        let proportion = BigRational::new(in_size.clone(), total.clone());
        rows.push(GrowthRow {
            n,
            c,
            proportion_approx: ratio_to_f64(&proportion),
            in_size,
            proportion,
            rf_zero_split_expectation: rf_zero_split_expected(n, c)?,
        });
    }
    let strictly_increasing_in_c = rows[1..].windows(2).all(|w| w[0].in_size < w[1].in_size);
    let caterpillar_largest = rows[1..].iter().all(|r| rows[0].in_size > r.in_size);
    let vertex = vertex_cherry_count(n);
    Ok(GrowthTable {
        n,
        strictly_increasing_in_c,
        caterpillar_largest,
        vertex_beyond_max_cherries: vertex > Rational64::from_integer((n / 2) as i64),
        vertex,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma7Row {
    pub n: usize,
    /// `3(2n-7)!!`.
    #[serde(serialize_with = "big_as_string")]
    pub lhs: BigInt,
    /// `(n-1)!`.
    #[serde(serialize_with = "big_as_string")]
    pub rhs: BigInt,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma8Row {
    pub n: i64,
    /// `n^3 - 6n^2 + 11n - 6`.
    pub f: i64,
    /// `n^3/2 - 5n^2 + 37n/2 - 34`.
    #[serde(serialize_with = "ratio_as_string")]
    pub g: Rational64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub lemma7: Vec<Lemma7Row>,
    /// `n = 9`, just below the stated range.
    pub lemma7_below_range: Lemma7Row,
    pub lemma8: Vec<Lemma8Row>,
    pub all_hold: bool,
}

fn lemma7_row(n: usize) -> Lemma7Row {
    let lhs = 3 * BigInt::from(double_factorial(2 * n as i64 - 7));
    let rhs = factorial(n as u64 - 1);
    Lemma7Row {
        n,
        holds: lhs > rhs,
        lhs,
        rhs,
    }
}

fn lemma8_row(n: i64) -> Lemma8Row {
    let f = n * n * n - 6 * n * n + 11 * n - 6;
    let g = Rational64::new(n * n * n - 10 * n * n + 37 * n - 68, 2);
    Lemma8Row {
        n,
        f,
        holds: Rational64::from_integer(f) > g,
        g,
    }
}

/// `3(2n-7)!! > (n-1)!` for `10 <= n <= n_max` and
/// `n^3 - 6n^2 + 11n - 6 > n^3/2 - 5n^2 + 37n/2 - 34` for `1 <= n <= n_max`.
pub fn inequality_checks(n_max: usize) -> Result<InequalityReport> {
    if n_max < 10 {
        return Err(Error::InvalidParameter(format!(
            "inequality checks need n_max >= 10, got {n_max}"
        )));
    }
    let lemma7: Vec<Lemma7Row> = (10..=n_max).map(lemma7_row).collect();
    let lemma8: Vec<Lemma8Row> = (1..=n_max as i64).map(lemma8_row).collect();
    let all_hold = lemma7.iter().all(|r| r.holds) && lemma8.iter().all(|r| r.holds);
    Ok(InequalityReport {
        lemma7,
        lemma7_below_range: lemma7_row(9),
        lemma8,
        all_hold,
    })
}

/// `e^(-c / 2n)`: the chance that a uniform random tree shares no split
/// with a fixed tree having `c` cherries.
pub fn rf_zero_split_expected(n: usize, c: usize) -> Result<f64> {
    if n < 4 || c < 2 || c > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 4 and 2 <= c <= n/2, got n = {n}, c = {c}"
        )));
    }
    Ok((-(c as f64) / (2.0 * n as f64)).exp())
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    Ok(())
}

/// Fraction of `samples` uniform random trees on `t`'s labels that share no
/// split with `t`. Sample `i` is drawn from stream `i` of `seed`.
pub fn simulate_rf_zero_split(t: &Tree, samples: u64, seed: u64) -> Result<f64> {
    check_samples(samples)?;
    if t.n_leaves() < 4 {
        return Err(Error::TooFewLeaves {
            min: 4,
            got: t.n_leaves(),
        });
    }
    let identity: Vec<usize> = (0..t.n_leaves()).collect();
    let reference: HashSet<_> = split_masks_for(t, &identity).into_iter().collect();
    let labels = t.shared_labels();
    let hits = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let r = random_with(labels.clone(), seed, i);
            split_masks_for(&r, &identity)
                .iter()
                .all(|m| !reference.contains(m))
        })
        .count();
    Ok(hits as f64 / samples as f64)
}

/// Histogram of precise k-IC distance from `t` to `samples` uniform random
/// trees on its labels. Sample `i` is drawn from stream `i` of `seed`.
pub fn simulate_kic_distribution(t: &Tree, samples: u64, seed: u64) -> Result<Vec<u64>> {
    check_samples(samples)?;
    let reference = t.path_length_matrix();
    let labels = t.shared_labels();
    let len = t.n_leaves().saturating_sub(2).max(1);
    Ok((0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; len],
            |mut acc, i| {
                let r = random_with(labels.clone(), seed, i);
                let d = reference.max_abs_diff_aligned(&r.path_length_matrix()) as usize;
                if d >= acc.len() {
                    acc.resize(d + 1, 0);
                }
                acc[d] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                if b.len() > a.len() {
                    a.resize(b.len(), 0);
                }
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProportionRow {
    pub n: usize,
    #[serde(serialize_with = "ratio_as_string")]
    pub caterpillar: BigRational,
    /// `c = floor(n/2)`.
    #[serde(serialize_with = "ratio_as_string")]
    pub max_cherry: BigRational,
    pub caterpillar_approx: f64,
    pub max_cherry_approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProportionTable {
    pub rows: Vec<ProportionRow>,
    pub caterpillar_strictly_decreasing: bool,
    pub max_cherry_strictly_decreasing: bool,
}

pub fn proportion_limit_table(n_range: &[usize]) -> Result<ProportionTable> {
    if n_range.is_empty() {
        return Err(Error::InvalidParameter("empty range".into()));
    }
    if let Some(&n) = n_range.iter().find(|&&n| n < 6) {
        return Err(Error::InvalidParameter(format!(
            "proportion table needs n >= 6, got {n}"
        )));
    }
    let rows: Vec<ProportionRow> = n_range
        .iter()
        .map(|&n| {
            let total = BigInt::from(count_trees(n)?);
            let cat = BigRational::new(closed_form_caterpillar(n)?, total.clone());
            let max = BigRational::new(closed_form_for(n, n / 2)?, total);
            Ok(ProportionRow {
                n,
                caterpillar_approx: ratio_to_f64(&cat),
                max_cherry_approx: ratio_to_f64(&max),
                caterpillar: cat,
                max_cherry: max,
            })
        })
        .collect::<Result<_>>()?;
    let dec = |f: fn(&ProportionRow) -> &BigRational| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    Ok(ProportionTable {
        caterpillar_strictly_decreasing: dec(|r| &r.caterpillar),
        max_cherry_strictly_decreasing: dec(|r| &r.max_cherry),
        rows,
    })
}
