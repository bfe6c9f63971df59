//! Closed-form sizes of the (n-3)-interval neighborhood.
//!
//! Two printed forms exist for each case. For caterpillars (two cherries):
//!
//! * expanded: `2(n-2)! + 4(n-4)! - 8(n-3)! + 4(2n-7)!! - 2(2n-9)!!`, which
//!   is what the closed-form statement and the later inequality both expand
//!   to;
//! * proof display: `2((n-2)! - 2(2(n-3)! - (n-4)! + 2(2(2n-7)!! - (2n-9)!!)))`,
//!   the same terms with the double-factorial block pulled inside the
//!   parentheses.
//!
//! For trees with `c >= 3` cherries:
//!
//! * statement: `c((n-2)! - 2(n-4)!(c-1))`;
//! * derivation: `c((n-2)! - (n-4)!(c-1))`, the result of summing the
//!   per-cherry inclusion-exclusion terms.
//!
//! The brute-force oracle decides which form is correct; see
//! [`DEFAULT_MULTI_CHERRY_VARIANT`].

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::double_factorial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaterpillarVariant {
    Expanded,
    ProofDisplay,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiCherryVariant {
    TheoremStatement,
    ProofDerivation,
}

impl MultiCherryVariant {
    pub const ALL: [MultiCherryVariant; 2] = [
        MultiCherryVariant::TheoremStatement,
        MultiCherryVariant::ProofDerivation,
    ];
}

impl CaterpillarVariant {
    pub const ALL: [CaterpillarVariant; 2] = [CaterpillarVariant::Expanded, CaterpillarVariant::ProofDisplay];
}

/// Variant confirmed by exhaustive enumeration for n = 6..=9.
pub const DEFAULT_MULTI_CHERRY_VARIANT: MultiCherryVariant = MultiCherryVariant::ProofDerivation;

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::from(1u32), |acc, k| acc * k)
}

fn ub(n: i64) -> BigInt {
    // (2n-5)!!
    BigInt::from(double_factorial(2 * n - 5))
}

fn require_n(n: usize) -> Result<()> {
    if n < 6 {
        return Err(Error::InvalidParameter(format!(
            "closed forms apply for n >= 6, got {n}"
        )));
    }
    Ok(())
}

/// Expanded caterpillar form; see the module docs.
pub fn closed_form_caterpillar(n: usize) -> Result<BigInt> {
    closed_form_caterpillar_variant(n, CaterpillarVariant::Expanded)
}

pub fn closed_form_caterpillar_variant(n: usize, variant: CaterpillarVariant) -> Result<BigInt> {
    require_n(n)?;
    let m = n as u64;
    let f2 = factorial(m - 2);
    let f3 = factorial(m - 3);
    let f4 = factorial(m - 4);
    let u1 = ub(n as i64 - 1);
    let u2 = ub(n as i64 - 2);
    Ok(match variant {
        CaterpillarVariant::Expanded => 2 * f2 + 4 * f4 - 8 * f3 + 4 * u1 - 2 * u2,
        CaterpillarVariant::ProofDisplay => 2 * (f2 - 2 * (2 * f3 - f4 + 2 * (2 * u1 - u2))),
    })
}

pub fn closed_form_multi_cherry(n: usize, c: usize, variant: MultiCherryVariant) -> Result<BigInt> {
    require_n(n)?;
    if c < 3 || c > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "cherry count c = {c} outside 3..={} for n = {n}",
            n / 2
        )));
    }
    let m = n as u64;
    let f2 = factorial(m - 2);
    let f4 = factorial(m - 4);
    let c = BigInt::from(c);
    let coeff = match variant {
        MultiCherryVariant::TheoremStatement => 2,
        MultiCherryVariant::ProofDerivation => 1,
    };
    Ok(c.clone() * (f2 - coeff * f4 * (c - 1)))
}

/// `-c^2 (n-4)! + c((n-2)! + (n-4)!)`, the derivation form written as a
/// quadratic in `c`. Defined for any `c`.
pub fn multi_cherry_quadratic(n: usize, c: i64) -> BigInt {
    let m = n as u64;
    let f2 = factorial(m - 2);
    let f4 = factorial(m - 4);
    let c = BigInt::from(c);
    -(c.clone() * c.clone() * f4.clone()) + c * (f2 + f4)
}

/// Closed form for a tree with `cherries` cherries using the validated
/// variants.
pub fn closed_form_for(n: usize, cherries: usize) -> Result<BigInt> {
    if cherries == 2 {
        closed_form_caterpillar(n)
    } else {
        closed_form_multi_cherry(n, cherries, DEFAULT_MULTI_CHERRY_VARIANT)
    }
}
