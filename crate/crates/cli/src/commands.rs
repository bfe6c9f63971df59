use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use kic_core::families::{caterpillar, Family, FamilyOutput, FamilySpec};
use kic_core::metrics::{compare as compare_trees, CompareOptions, LeafAssociation};
use kic_core::neighborhood::{
    brute_force_interval_neighborhood_with_cap, closed_form_count, interval_histogram_with_cap,
    rf_zero_split_expected, simulate_kic_distribution, simulate_rf_zero_split, CountMethod,
    NeighborhoodCount,
};
use kic_core::tree::DEFAULT_ENUMERATION_CAP;
use kic_core::verify::{verify as run_verify, VerifyOptions};
use kic_core::{parse_newick, Tree};

use crate::output::{emit, key_values, object_rows, plain, print_json, table};
use crate::{
    CompareArgs, Failure, FamilyArg, Format, GenArgs, Metric, NeighborhoodArgs, SimMode,
    SimulateArgs, VerifyArgs,
};

/// Enumeration cap under `--allow-large`.
const LARGE_CAP: usize = 13;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<Tree, Failure> {
    parse_newick(&read(path)?).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn load_assoc(path: &Path) -> Result<LeafAssociation, Failure> {
    LeafAssociation::from_tsv(&read(path)?)
        .map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::new(5, e.to_string()))
}

fn metric_keys(m: Metric) -> &'static [&'static str] {
    match m {
        Metric::Kic => &["kic", "nni_lower_bound"],
        Metric::Rf => &["rf_raw", "rf_normalized", "shared_splits"],
        Metric::Path => &["path_difference"],
        Metric::Nni => &[
            "nni_lower_bound",
            "nni_exact",
            "nni_search_exhausted",
            "nni_search_lower_bound",
        ],
        Metric::Diameter => &[
            "diameter_1",
            "diameter_2",
            "diameter_gap",
            "endpoint_condition_applies",
            "endpoint_condition_holds",
        ],
    }
}

pub fn compare(a: &CompareArgs, format: Format) -> Result<u8, Failure> {
    let t1 = load_tree(&a.tree1)?;
    let t2 = load_tree(&a.tree2)?;
    let assoc = match &a.assoc {
        Some(p) => load_assoc(p)?,
        None => LeafAssociation::by_shared_labels(&t1, &t2)?,
    };
    let metrics = a.metrics.clone().unwrap_or_else(|| {
        vec![Metric::Kic, Metric::Rf, Metric::Path, Metric::Nni, Metric::Diameter]
    });
    let want_nni = metrics.contains(&Metric::Nni) && t1.n_leaves() >= 4;
    if want_nni && a.nni_budget == 0 {
        return Err(Failure::new(5, "--nni-budget must be at least 1"));
    }
    let report = compare_trees(
        &t1,
        &t2,
        &assoc,
        CompareOptions {
            nni_budget: want_nni.then_some(a.nni_budget),
        },
    )?;
    let full = to_value(&report)?;
    let mut keys = vec!["n_leaves"];
    for m in &metrics {
        for k in metric_keys(*m) {
            if !keys.contains(k) {
                keys.push(k);
            }
        }
    }
    let mut selected = serde_json::Map::new();
    for k in keys {
        selected.insert(k.to_string(), full[k].clone());
    }
    let selected = Value::Object(selected);
    match format {
        Format::Json => print_json(
            "compare",
            json!({
                "tree1": a.tree1.display().to_string(),
                "tree2": a.tree2.display().to_string(),
                "report": selected,
            }),
        )?,
        _ => emit(&key_values(format, &object_rows(&selected)))?,
    }
    if a.require_exact_nni && report.nni_search_exhausted {
        return Err(Failure::new(
            4,
            format!(
                "NNI search exhausted its budget of {}; distance is at least {}",
                a.nni_budget,
                report.nni_search_lower_bound.unwrap_or(report.kic)
            ),
        ));
    }
    Ok(0)
}

fn family_spec(a: &GenArgs) -> FamilySpec {
    let (family, names): (Family, &[&str]) = match a.family {
        FamilyArg::Caterpillar => (Family::Caterpillar, &["n"]),
        FamilyArg::ShiftedPair => (Family::ShiftedPair, &["n", "m"]),
        FamilyArg::TripleSwapPair => (Family::TripleSwapPair, &["x"]),
        FamilyArg::MaxDistancePair => (Family::MaxDistancePair, &["n"]),
    };
    let mut spec = FamilySpec::new(family);
    for &name in names {
        let v = match name {
            "n" => a.n,
            "m" => a.m,
            _ => a.x,
        };
        if let Some(v) = v {
            spec = spec.param(name, v);
        }
    }
    spec.label_prefix = a.label_prefix.clone();
    spec
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes every file or none: contents go to temporary siblings first and
/// are renamed into place only after all writes succeed.
fn write_all_or_nothing(files: &[(PathBuf, String)]) -> Result<(), Failure> {
    let temps: Vec<PathBuf> = files.iter().map(|(p, _)| with_suffix(p, ".kic-tmp")).collect();
    let cleanup = |upto: usize| {
        for t in &temps[..upto] {
            let _ = fs::remove_file(t);
        }
    };
    for (i, ((path, body), tmp)) in files.iter().zip(&temps).enumerate() {
        if let Err(e) = fs::write(tmp, body) {
            cleanup(i + 1);
            return Err(Failure::new(2, format!("cannot write {}: {e}", path.display())));
        }
    }
    for (i, ((path, _), tmp)) in files.iter().zip(&temps).enumerate() {
        if let Err(e) = fs::rename(tmp, path) {
            for (p, _) in &files[..i] {
                let _ = fs::remove_file(p);
            }
            for t in &temps[i..] {
                let _ = fs::remove_file(t);
            }
            return Err(Failure::new(2, format!("cannot write {}: {e}", path.display())));
        }
    }
    Ok(())
}

pub fn gen(a: &GenArgs, format: Format) -> Result<u8, Failure> {
    let spec = family_spec(a);
    let out = spec.generate()?;
    let (files, n_leaves) = match &out {
        FamilyOutput::Single(t) => (
            vec![(with_suffix(&a.out, ".nwk"), format!("{}\n", t.to_newick()))],
            t.n_leaves(),
        ),
        FamilyOutput::Pair(t1, t2, assoc) => (
            vec![
                (with_suffix(&a.out, ".1.nwk"), format!("{}\n", t1.to_newick())),
                (with_suffix(&a.out, ".2.nwk"), format!("{}\n", t2.to_newick())),
                (with_suffix(&a.out, ".assoc.tsv"), assoc.to_tsv()),
            ],
            t1.n_leaves(),
        ),
    };
    write_all_or_nothing(&files)?;
    let paths: Vec<String> = files.iter().map(|(p, _)| p.display().to_string()).collect();
    match format {
        Format::Json => print_json(
            "gen",
            json!({
                "family": to_value(&spec.family)?,
                "params": to_value(&spec.params)?,
                "n_leaves": n_leaves,
                "files": paths,
            }),
        )?,
        _ => emit(&table(&["file"], &paths.iter().map(|p| vec![p.clone()]).collect::<Vec<_>>()))?,
    }
    Ok(0)
}

fn method_name(c: &NeighborhoodCount) -> String {
    plain(&serde_json::to_value(c.method).unwrap_or(Value::Null))
}

pub fn neighborhood(a: &NeighborhoodArgs, format: Format) -> Result<u8, Failure> {
    let t = load_tree(&a.tree)?;
    let n = t.n_leaves();
    let top = n.saturating_sub(3);
    let k = a.k.unwrap_or(top);
    if k > top {
        return Err(Failure::new(5, format!("k = {k} outside 0..={top} for n = {n}")));
    }
    let cap = if a.allow_large { LARGE_CAP } else { DEFAULT_ENUMERATION_CAP };
    let closed_applies = k == top && n >= 6;
    let brute = a.exhaustive || a.histogram || !closed_applies;

    let mut counts = Vec::new();
    let mut histogram = None;
    if brute {
        if n > cap {
            return Err(Failure::new(
                6,
                format!(
                    "{n} leaves exceed the enumeration cap of {cap}{}",
                    if a.allow_large { "" } else { " (use --allow-large to raise it to 13)" }
                ),
            ));
        }
        if a.histogram {
            let h = interval_histogram_with_cap(&t, cap)?;
            counts.push(NeighborhoodCount {
                n,
                reference: h.reference.clone(),
                k,
                count: h.counts.get(k).copied().unwrap_or(0).into(),
                method: CountMethod::BruteForce,
                formula_variant: None,
            });
            histogram = Some(h);
        } else {
            counts.push(brute_force_interval_neighborhood_with_cap(&t, k, false, cap)?.count);
        }
    }
    if closed_applies {
        counts.push(closed_form_count(&t)?);
    }

    match format {
        Format::Json => {
            let mut body = json!({
                "n": n,
                "k": k,
                "reference": t.canonical_form().as_str(),
                "counts": to_value(&counts)?,
            });
            if let Some(h) = &histogram {
                body["histogram"] = to_value(h)?;
            }
            print_json("neighborhood", body)?
        }
        _ => {
            let mut parts = Vec::new();
            if let Some(h) = &histogram {
                let rows: Vec<Vec<String>> = h
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(k, c)| vec![k.to_string(), c.to_string()])
                    .collect();
                parts.push(table(&["k", "count"], &rows));
            }
            let rows: Vec<Vec<String>> = counts
                .iter()
                .map(|c| {
                    vec![
                        method_name(c),
                        c.formula_variant
                            .map(|v| plain(&serde_json::to_value(v).unwrap_or(Value::Null)))
                            .unwrap_or_else(|| "NA".into()),
                        c.k.to_string(),
                        c.count.to_string(),
                    ]
                })
                .collect();
            parts.push(table(&["method", "variant", "k", "count"], &rows));
            emit(&parts.join(if format == Format::Tsv { "\n" } else { "\n\n" }))?
        }
    }
    Ok(0)
}

pub fn verify(a: &VerifyArgs, format: Format) -> Result<u8, Failure> {
    let report = run_verify(&VerifyOptions {
        max_n: a.max_n,
        seed: a.seed,
        samples: a.samples,
    })?;
    match format {
        Format::Json => {
            let mut body = to_value(&report)?;
            if let Value::Object(m) = &mut body {
                m.remove("schema_version");
            }
            print_json("verify", body)?
        }
        _ => {
            let claims: Vec<Vec<String>> = report
                .claims
                .iter()
                .map(|c| {
                    vec![
                        if c.passed { "PASS" } else { "FAIL" }.to_string(),
                        c.id.clone(),
                        c.instances.to_string(),
                        c.sizes.clone(),
                        c.detail.clone(),
                    ]
                })
                .collect();
            let adj: Vec<Vec<String>> = report
                .adjudication
                .rows
                .iter()
                .flat_map(|r| {
                    r.variants.iter().map(move |v| {
                        vec![
                            r.n.to_string(),
                            r.c.to_string(),
                            r.reference.clone(),
                            r.oracle.to_string(),
                            v.variant.clone(),
                            v.value.to_string(),
                            if v.matches { "match" } else { "mismatch" }.to_string(),
                        ]
                    })
                })
                .collect();
            let mut text = table(&["verdict", "claim", "instances", "sizes", "detail"], &claims);
            text.push_str(if format == Format::Tsv { "\n" } else { "\n\n" });
            text.push_str(&table(
                &["n", "c", "reference", "oracle", "variant", "value", "verdict"],
                &adj,
            ));
            if format == Format::Text {
                for c in report.claims.iter().filter(|c| !c.passed) {
                    if let Some(x) = &c.counterexample {
                        text.push_str(&format!(
                            "\n\ncounterexample for {}: {} {}",
                            c.id,
                            x.note,
                            x.trees.join(" ")
                        ));
                    }
                }
            }
            emit(&text)?
        }
    }
    Ok(if report.all_passed { 0 } else { 1 })
}

pub fn simulate(a: &SimulateArgs, format: Format) -> Result<u8, Failure> {
    let seed = match (a.seed, format) {
        (Some(s), _) => s,
        (None, Format::Json) => {
            return Err(Failure::new(7, "--seed is required with --format json"));
        }
        (None, _) => 0,
    };
    let t = match (&a.tree1, a.n) {
        (Some(p), _) => load_tree(p)?,
        (None, Some(n)) => {
            let labels: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
            caterpillar(&labels)?
        }
        (None, None) => return Err(Failure::new(5, "give --n or --tree1")),
    };
    let n = t.n_leaves();
    let body = match a.mode {
        SimMode::RfZeroSplit => {
            let c = t.cherry_count()?;
            let observed = simulate_rf_zero_split(&t, a.samples, seed)?;
            let expected = rf_zero_split_expected(n, c)?;
            json!({
                "mode": "rf-zero-split",
                "n": n,
                "c": c,
                "samples": a.samples,
                "seed": seed,
                "observed": observed,
                "expected": expected,
                "abs_difference": (observed - expected).abs(),
            })
        }
        SimMode::KicDistribution => {
            let h = simulate_kic_distribution(&t, a.samples, seed)?;
            let rows: Vec<Value> = h
                .iter()
                .enumerate()
                .map(|(k, &c)| json!({"k": k, "count": c, "fraction": c as f64 / a.samples as f64}))
                .collect();
            let max_observed = h.iter().rposition(|&c| c > 0).unwrap_or(0);
            json!({
                "mode": "kic-distribution",
                "n": n,
                "samples": a.samples,
                "seed": seed,
                "max_observed": max_observed,
                "distribution": rows,
            })
        }
    };
    match format {
        Format::Json => print_json("simulate", body)?,
        _ => {
            let mut scalars = body.clone();
            let dist = scalars.as_object_mut().and_then(|m| m.remove("distribution"));
            let mut text = key_values(format, &object_rows(&scalars));
            if let Some(Value::Array(rows)) = dist {
                let rows: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| vec![plain(&r["k"]), plain(&r["count"]), plain(&r["fraction"])])
                    .collect();
                text.push_str(if format == Format::Tsv { "\n" } else { "\n\n" });
                text.push_str(&table(&["k", "count", "fraction"], &rows));
            }
            emit(&text)?
        }
    }
    Ok(0)
}
