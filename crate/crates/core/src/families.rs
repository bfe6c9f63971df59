//! Generators for the named tree families: caterpillars, the shifted
//! caterpillar pair that makes the NNI lower bound tight, the rooted-triple
//! counterexample pair `C_3x` / `D_3x`, and the pair realizing the largest
//! possible k-IC value.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::LeafAssociation;
use crate::tree::newick::quote_label;
use crate::tree::{parse_newick, Tree};

/// Newick for a caterpillar whose pendant positions hold `items` in order
/// (`items` are Newick subtrees; at least three).
fn caterpillar_newick(items: &[String]) -> String {
    fn nest(rest: &[String]) -> String {
        if rest.len() == 1 {
            rest[0].clone()
        } else {
            format!("({},{})", rest[0], nest(&rest[1..]))
        }
    }
    format!("({},{},{});", items[0], items[1], nest(&items[2..]))
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Caterpillar with leaves attached in the given order: the first two and
/// the last two labels form the cherries.
pub fn caterpillar<S: AsRef<str>>(labels: &[S]) -> Result<Tree> {
    if labels.len() < 4 {
        return Err(Error::TooFewLeaves {
            min: 4,
            got: labels.len(),
        });
    }
    let items: Vec<String> = labels.iter().map(|l| quote_label(l.as_ref())).collect();
    parse_newick(&caterpillar_newick(&items))
}

/// `T1` is the caterpillar `i1..in`; `T2` is the caterpillar `j1..jn` with
/// `j3` moved `m` pendant positions toward the far cherry. Leaves are paired
/// `i_t <-> j_t`.
pub fn shifted_caterpillar_pair(n: usize, m: usize) -> Result<(Tree, Tree, LeafAssociation)> {
    if n < 6 {
        return Err(Error::InvalidParameter(format!(
            "shifted caterpillar pair needs n >= 6, got {n}"
        )));
    }
    if m < 1 || m > n - 5 {
        return Err(Error::InvalidParameter(format!(
            "shift m = {m} outside 1..={}",
            n - 5
        )));
    }
    let first = numbered("i", n);
    let second = numbered("j", n);
    // Indices 2..n-2 are the pendant positions; move index 2 forward by m.
    let mut order: Vec<usize> = (0..n).collect();
    let moved = order.remove(2);
    order.insert(2 + m, moved);
    let arranged: Vec<&String> = order.iter().map(|&i| &second[i]).collect();
    let t1 = caterpillar(&first)?;
    let t2 = caterpillar(&arranged)?;
    let assoc = LeafAssociation::new(first.into_iter().zip(second).collect())?;
    Ok((t1, t2, assoc))
}

/// `C_3x`: an `x`-taxon caterpillar backbone whose pendant positions carry
/// the rooted triples `((a_i,b_i),c_i)`. `D_3x`: the same backbone with
/// `((a_i,c_i),b_i)`. Both trees share one label set.
pub fn triple_swap_pair(x: usize) -> Result<(Tree, Tree, LeafAssociation)> {
    if x < 3 {
        return Err(Error::InvalidParameter(format!(
            "triple swap pair needs x >= 3, got {x}"
        )));
    }
    let c: Vec<String> = (1..=x).map(|i| format!("((a{i},b{i}),c{i})")).collect();
    let d: Vec<String> = (1..=x).map(|i| format!("((a{i},c{i}),b{i})")).collect();
    let tc = parse_newick(&caterpillar_newick(&c))?;
    let td = parse_newick(&caterpillar_newick(&d))?;
    let assoc = LeafAssociation::identity(&tc);
    Ok((tc, td, assoc))
}

/// `T1` is the caterpillar `t1..tn` (so `t1` and `tn` sit in opposite
/// cherries); `T2` is a caterpillar in which `t1` and `tn` form a cherry.
pub fn max_distance_pair(n: usize) -> Result<(Tree, Tree, LeafAssociation)> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!(
            "max distance pair needs n >= 5, got {n}"
        )));
    }
    let labels = numbered("t", n);
    let mut second = vec![labels[0].clone(), labels[n - 1].clone()];
    second.extend(labels[1..n - 1].iter().cloned());
    let t1 = caterpillar(&labels)?;
    let t2 = caterpillar(&second)?;
    let assoc = LeafAssociation::identity(&t1);
    Ok((t1, t2, assoc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Caterpillar,
    ShiftedPair,
    TripleSwapPair,
    MaxDistancePair,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.replace('-', "_").as_str() {
            "caterpillar" => Ok(Family::Caterpillar),
            "shifted_pair" | "shifted_caterpillar_pair" => Ok(Family::ShiftedPair),
            "triple_swap_pair" | "triple_swap" => Ok(Family::TripleSwapPair),
            "max_distance_pair" | "max_distance" => Ok(Family::MaxDistancePair),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// A family plus its integer parameters (`n`, `m`, `x` as applicable).
#[derive(Clone, Debug, Serialize)]
pub struct FamilySpec {
    pub family: Family,
    pub params: BTreeMap<String, usize>,
    /// Prepended to every generated leaf label.
    pub label_prefix: String,
}

pub enum FamilyOutput {
    Single(Tree),
    Pair(Tree, Tree, LeafAssociation),
}

impl FamilySpec {
    pub fn new(family: Family) -> FamilySpec {
        FamilySpec {
            family,
            params: BTreeMap::new(),
            label_prefix: String::new(),
        }
    }

    pub fn param(mut self, name: &str, value: usize) -> FamilySpec {
        self.params.insert(name.to_string(), value);
        self
    }

    fn get(&self, name: &str) -> Result<usize> {
        self.params.get(name).copied().ok_or_else(|| {
            Error::InvalidParameter(format!("family {:?} needs parameter {name}", self.family))
        })
    }

    pub fn generate(&self) -> Result<FamilyOutput> {
        let out = match self.family {
            Family::Caterpillar => {
                FamilyOutput::Single(caterpillar(&numbered("t", self.get("n")?))?)
            }
            Family::ShiftedPair => {
                let (a, b, c) = shifted_caterpillar_pair(self.get("n")?, self.get("m")?)?;
                FamilyOutput::Pair(a, b, c)
            }
            Family::TripleSwapPair => {
                let (a, b, c) = triple_swap_pair(self.get("x")?)?;
                FamilyOutput::Pair(a, b, c)
            }
            Family::MaxDistancePair => {
                let (a, b, c) = max_distance_pair(self.get("n")?)?;
                FamilyOutput::Pair(a, b, c)
            }
        };
        if self.label_prefix.is_empty() {
            return Ok(out);
        }
        let p = &self.label_prefix;
        let rename = |t: &Tree| t.relabeled(t.labels().iter().map(|l| format!("{p}{l}")).collect());
        Ok(match out {
            FamilyOutput::Single(t) => FamilyOutput::Single(rename(&t)?),
            FamilyOutput::Pair(a, b, assoc) => {
                let pairs = assoc
                    .pairs()
                    .iter()
                    .map(|(x, y)| (format!("{p}{x}"), format!("{p}{y}")))
                    .collect();
                FamilyOutput::Pair(rename(&a)?, rename(&b)?, LeafAssociation::new(pairs)?)
            }
        })
    }
}
