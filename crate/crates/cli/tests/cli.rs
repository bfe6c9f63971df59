use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kic"))
        .args(args)
        .env_remove("KIC_JOBS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("one JSON document")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn gen(dir: &Path, args: &[&str], prefix: &str) -> PathBuf {
    let out = dir.join(prefix);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", p(&out)]);
    let o = kic(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn suffixed(prefix: &Path, suffix: &str) -> String {
    format!("{}{suffix}", p(prefix))
}

#[test]
fn compare_identical_files() {
    let d = tempfile::tempdir().unwrap();
    let t = write(d.path(), "t.nwk", "((A,B),(C,D),(E,F));\n");
    let r = json(&kic(&["compare", "--tree1", p(&t), "--tree2", p(&t), "--format", "json"]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["report"]["kic"], 0);
    assert_eq!(r["report"]["rf_raw"], 0);
    assert_eq!(r["report"]["nni_exact"], 0);
}

#[test]
fn generated_triple_swap_pair_is_two_ic() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["triple-swap-pair", "--x", "5"], "c15");
    let r = json(&kic(&[
        "compare",
        "--tree1",
        &suffixed(&out, ".1.nwk"),
        "--tree2",
        &suffixed(&out, ".2.nwk"),
        "--assoc",
        &suffixed(&out, ".assoc.tsv"),
        "--metrics",
        "kic,rf",
        "--format",
        "json",
    ]));
    assert_eq!(r["report"]["n_leaves"], 15);
    assert_eq!(r["report"]["kic"], 2);
    assert!(r["report"]["rf_raw"].as_u64().unwrap() >= 10);
    assert!(r["report"].get("path_difference").is_none());
}

#[test]
fn generated_shifted_pair_pipeline() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["shifted-pair", "--n", "7", "--m", "2"], "sh");
    let r = json(&kic(&[
        "compare",
        "--tree1",
        &suffixed(&out, ".1.nwk"),
        "--tree2",
        &suffixed(&out, ".2.nwk"),
        "--assoc",
        &suffixed(&out, ".assoc.tsv"),
        "--format",
        "json",
    ]));
    assert_eq!(r["report"]["kic"], 2);
    assert_eq!(r["report"]["nni_exact"], 2);
}

#[test]
fn caterpillar_is_a_single_file() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["caterpillar", "--n", "8"], "cat");
    let body = fs::read_to_string(suffixed(&out, ".nwk")).unwrap();
    assert_eq!(body.matches(',').count(), 7);
    assert!(!Path::new(&suffixed(&out, ".1.nwk")).exists());
}

#[test]
fn gen_out_of_range_writes_nothing() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("bad");
    let o = kic(&["gen", "shifted-pair", "--n", "7", "--m", "3", "--out", p(&out)]);
    assert_eq!(code(&o), 5);
    let o = kic(&["gen", "triple-swap-pair", "--out", p(&out)]);
    assert_eq!(code(&o), 5);
    assert_eq!(fs::read_dir(d.path()).unwrap().count(), 0);
}

#[test]
fn association_errors_exit_three() {
    let d = tempfile::tempdir().unwrap();
    let t1 = write(d.path(), "a.nwk", "((A,B),(C,D));");
    let t2 = write(d.path(), "b.nwk", "((a,b),(c,d));");
    let bad = write(d.path(), "bad.tsv", "A\ta\nB\ta\nC\tc\nD\td\n");
    let o = kic(&["compare", "--tree1", p(&t1), "--tree2", p(&t2), "--assoc", p(&bad)]);
    assert_eq!(code(&o), 3);
    let o = kic(&["compare", "--tree1", p(&t1), "--tree2", p(&t2)]);
    assert_eq!(code(&o), 3);
    let good = write(d.path(), "good.tsv", "A\ta\nB\tc\nC\tb\nD\td\n");
    let r = json(&kic(&[
        "compare", "--tree1", p(&t1), "--tree2", p(&t2), "--assoc", p(&good), "--format", "json",
    ]));
    assert_eq!(r["report"]["kic"], 1);
}

#[test]
fn parse_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let good = write(d.path(), "a.nwk", "((A,B),(C,D));");
    let bad = write(d.path(), "b.nwk", "((A,B),(C,D);");
    let o = kic(&["compare", "--tree1", p(&good), "--tree2", p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("b.nwk"));
    let missing = d.path().join("nope.nwk");
    assert_eq!(code(&kic(&["compare", "--tree1", p(&good), "--tree2", p(&missing)])), 2);
}

#[test]
fn exhausted_budget_with_required_exactness_exits_four() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["max-distance-pair", "--n", "8"], "far");
    let args = [
        "compare",
        "--tree1",
        &suffixed(&out, ".1.nwk"),
        "--tree2",
        &suffixed(&out, ".2.nwk"),
        "--nni-budget",
        "5",
    ];
    let o = kic(&args);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("nni_search_exhausted: true"));
    let mut strict = args.to_vec();
    strict.push("--require-exact-nni");
    assert_eq!(code(&kic(&strict)), 4);
}

#[test]
fn text_and_json_agree() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["max-distance-pair", "--n", "6"], "m6");
    let base = [
        "compare",
        "--tree1",
        &suffixed(&out, ".1.nwk"),
        "--tree2",
        &suffixed(&out, ".2.nwk"),
    ];
    let mut j = base.to_vec();
    j.extend(["--format", "json"]);
    let r = json(&kic(&j));
    let text = String::from_utf8(kic(&base).stdout).unwrap();
    for line in text.lines() {
        let (k, v) = line.split_once(": ").unwrap();
        let expected = match &r["report"][k] {
            Value::Null => "NA".to_string(),
            other => other.to_string(),
        };
        assert_eq!(v, expected, "{k}");
    }
    assert_eq!(r["report"]["kic"], 3);
}

#[test]
fn neighborhood_histogram_of_six_leaf_caterpillar() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["caterpillar", "--n", "6"], "c6");
    let tree = suffixed(&out, ".nwk");
    let r = json(&kic(&["neighborhood", "--tree", &tree, "--histogram", "--format", "json"]));
    let counts: Vec<u64> = r["histogram"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(counts.iter().sum::<u64>(), 105);
    let methods: Vec<&str> = r["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["brute_force", "closed_form_caterpillar"]);
    assert_eq!(r["counts"][0]["count"], r["counts"][1]["count"]);

    let r = json(&kic(&["neighborhood", "--tree1", &tree, "--k", "0", "--format", "json"]));
    assert_eq!(r["counts"][0]["count"], "1");
    assert_eq!(code(&kic(&["neighborhood", "--tree", &tree, "--k", "4"])), 5);
}

#[test]
fn neighborhood_cap_exits_six() {
    let d = tempfile::tempdir().unwrap();
    let out = gen(d.path(), &["caterpillar", "--n", "12"], "c12");
    let tree = suffixed(&out, ".nwk");
    let o = kic(&["neighborhood", "--tree", &tree, "--histogram"]);
    assert_eq!(code(&o), 6);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap of 11"));
    let r = json(&kic(&["neighborhood", "--tree", &tree, "--format", "json"]));
    assert_eq!(r["counts"][0]["method"], "closed_form_caterpillar");
}

#[test]
fn verify_small_and_capped() {
    let r = json(&kic(&["verify", "--max-n", "6", "--samples", "50", "--format", "json"]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["adjudication"]["winners"]["multi_cherry"], "proof_derivation");
    assert_eq!(r["adjudication"]["winners"]["caterpillar"], "expanded");
    assert_eq!(code(&kic(&["verify", "--max-n", "20"])), 6);
}

#[test]
fn simulate_modes() {
    assert_eq!(
        code(&kic(&["simulate", "--mode", "rf-zero-split", "--n", "20", "--format", "json"])),
        7
    );
    let args = [
        "simulate", "--mode", "rf-zero-split", "--n", "20", "--samples", "20000", "--seed", "9",
        "--format", "json",
    ];
    let a = kic(&args);
    let b = kic(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    let diff = (r["observed"].as_f64().unwrap() - (-0.05f64).exp()).abs();
    assert!(diff < 0.05, "{diff}");

    let r = json(&kic(&[
        "simulate", "--mode", "kic-distribution", "--n", "8", "--samples", "3000", "--seed", "4",
        "--format", "json",
    ]));
    assert!(r["max_observed"].as_u64().unwrap() <= 5);
    let total: u64 = r["distribution"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["count"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 3000);
}

#[test]
fn jobs_from_environment() {
    let run = |jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_kic"))
            .args(["simulate", "--mode", "kic-distribution", "--n", "9", "--samples", "500", "--seed", "2"])
            .env("KIC_JOBS", jobs)
            .output()
            .unwrap()
    };
    let one = run("1");
    let three = run("3");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(code(&run("many")), 5);
}

#[test]
fn every_json_document_matches_the_shipped_schema() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let stale = serde_json::json!({"schema_version": 2, "command": "simulate"});
    assert!(!validator.is_valid(&stale));

    let d = tempfile::tempdir().unwrap();
    let pair = gen(d.path(), &["shifted-pair", "--n", "8", "--m", "2"], "p");
    let cat = gen(d.path(), &["caterpillar", "--n", "7"], "c");
    let (t1, t2, tsv) = (
        suffixed(&pair, ".1.nwk"),
        suffixed(&pair, ".2.nwk"),
        suffixed(&pair, ".assoc.tsv"),
    );
    let cat_file = suffixed(&cat, ".nwk");
    let out = d.path().join("again");
    let runs: Vec<Vec<&str>> = vec![
        vec!["compare", "--tree1", &t1, "--tree2", &t2, "--assoc", &tsv],
        vec!["compare", "--tree1", &t1, "--tree2", &t2, "--assoc", &tsv, "--metrics", "kic,diameter"],
        vec!["gen", "triple-swap-pair", "--x", "3", "--out", p(&out)],
        vec!["neighborhood", "--tree", &cat_file, "--histogram"],
        vec!["neighborhood", "--tree", &cat_file],
        vec!["verify", "--max-n", "6", "--samples", "20"],
        vec!["simulate", "--mode", "kic-distribution", "--n", "7", "--samples", "50", "--seed", "1"],
        vec!["simulate", "--mode", "rf-zero-split", "--n", "12", "--samples", "50", "--seed", "1"],
    ];
    for mut args in runs {
        args.extend(["--format", "json"]);
        let doc = json(&kic(&args));
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}
