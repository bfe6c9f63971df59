use num_bigint::BigInt;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use kic_core::families;
use kic_core::metrics::{self, CompareOptions, LeafAssociation, DEFAULT_NNI_BUDGET};
use kic_core::neighborhood::{self as nb, MultiCherryVariant};
use kic_core::tree::{random_tree_stream, TreeEnumerator, DEFAULT_ENUMERATION_CAP};
use kic_core::verify::{self, VerifyOptions};
use kic_core::{Error, ErrorKind};

fn err(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Cap => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Unrooted binary tree with labeled leaves.
#[pyclass(name = "Tree", module = "kic", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTree {
    inner: kic_core::Tree,
}

impl From<kic_core::Tree> for PyTree {
    fn from(inner: kic_core::Tree) -> Self {
        PyTree { inner }
    }
}

#[pymethods]
impl PyTree {
    #[new]
    fn new(newick: &str) -> PyResult<Self> {
        kic_core::parse_newick(newick).map(PyTree::from).map_err(err)
    }

    #[getter]
    fn n_leaves(&self) -> usize {
        self.inner.n_leaves()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn to_newick(&self) -> String {
        self.inner.to_newick()
    }

    fn canonical_form(&self) -> String {
        self.inner.canonical_form().as_str().to_string()
    }

    fn cherry_count(&self) -> PyResult<usize> {
        self.inner.cherry_count().map_err(err)
    }

    fn is_caterpillar(&self) -> PyResult<bool> {
        self.inner.is_caterpillar().map_err(err)
    }

    fn diameter(&self) -> usize {
        self.inner.diameter()
    }

    /// Each split as the sorted block not containing the smallest label.
    fn splits(&self) -> PyResult<Vec<Vec<String>>> {
        Ok(self
            .inner
            .splits()
            .map_err(err)?
            .into_iter()
            .map(|s| s.block)
            .collect())
    }

    fn nni_neighbors(&self) -> PyResult<Vec<PyTree>> {
        Ok(self
            .inner
            .nni_neighbors()
            .map_err(err)?
            .into_iter()
            .map(PyTree::from)
            .collect())
    }

    /// Leaf-to-leaf edge counts, rows and columns in `labels` order.
    fn path_length_matrix(&self) -> Vec<Vec<u32>> {
        let m = self.inner.path_length_matrix();
        (0..m.n()).map(|i| m.row(i).to_vec()).collect()
    }

    fn unlabeled_shape(&self) -> String {
        self.inner.unlabeled_shape()
    }

    fn __eq__(&self, other: &PyTree) -> bool {
        self.inner.same_topology(&other.inner)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.canonical_form().hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.inner.to_newick()
    }

    fn __repr__(&self) -> String {
        format!("Tree({:?})", self.inner.to_newick())
    }
}

fn association(t1: &PyTree, t2: &PyTree, pairs: Option<Vec<(String, String)>>) -> PyResult<LeafAssociation> {
    match pairs {
        Some(p) => LeafAssociation::new(p).map_err(err),
        None => LeafAssociation::by_shared_labels(&t1.inner, &t2.inner).map_err(err),
    }
}

type TreePair = (PyTree, PyTree, Vec<(String, String)>);

fn pair_out(
    (a, b, assoc): (kic_core::Tree, kic_core::Tree, LeafAssociation),
) -> TreePair {
    (a.into(), b.into(), assoc.pairs().to_vec())
}

/// Precise k-IC distance. `assoc` pairs labels of `t1` with labels of `t2`;
/// shared labels are paired when it is omitted.
#[pyfunction]
#[pyo3(signature = (t1, t2, assoc=None))]
fn precise_kic(t1: &PyTree, t2: &PyTree, assoc: Option<Vec<(String, String)>>) -> PyResult<u32> {
    let a = association(t1, t2, assoc)?;
    metrics::precise_kic(&t1.inner, &t2.inner, &a).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (t1, t2, assoc=None))]
fn path_difference(t1: &PyTree, t2: &PyTree, assoc: Option<Vec<(String, String)>>) -> PyResult<f64> {
    let a = association(t1, t2, assoc)?;
    metrics::path_difference(&t1.inner, &t2.inner, &a).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (t1, t2, assoc=None))]
fn rf_distance<'py>(
    py: Python<'py>,
    t1: &PyTree,
    t2: &PyTree,
    assoc: Option<Vec<(String, String)>>,
) -> PyResult<Bound<'py, PyAny>> {
    let a = association(t1, t2, assoc)?;
    to_py(py, &metrics::rf_distance(&t1.inner, &t2.inner, &a).map_err(err)?)
}

/// Exact NNI distance, or `None` when the search exhausts `budget`.
#[pyfunction]
#[pyo3(signature = (t1, t2, assoc=None, budget=DEFAULT_NNI_BUDGET))]
fn nni_exact(
    t1: &PyTree,
    t2: &PyTree,
    assoc: Option<Vec<(String, String)>>,
    budget: usize,
) -> PyResult<Option<u32>> {
    let a = association(t1, t2, assoc)?;
    Ok(metrics::nni_exact(&t1.inner, &t2.inner, &a, budget)
        .map_err(err)?
        .exact())
}

#[pyfunction]
#[pyo3(signature = (t1, t2, assoc=None))]
fn diameter_gap_check<'py>(
    py: Python<'py>,
    t1: &PyTree,
    t2: &PyTree,
    assoc: Option<Vec<(String, String)>>,
) -> PyResult<Bound<'py, PyAny>> {
    let a = association(t1, t2, assoc)?;
    to_py(py, &metrics::diameter_gap_check(&t1.inner, &t2.inner, &a).map_err(err)?)
}

/// Every distance as a dict; `nni_budget=None` skips the NNI search.
#[pyfunction]
#[pyo3(signature = (t1, t2, assoc=None, nni_budget=Some(DEFAULT_NNI_BUDGET)))]
fn compare<'py>(
    py: Python<'py>,
    t1: &PyTree,
    t2: &PyTree,
    assoc: Option<Vec<(String, String)>>,
    nni_budget: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let a = association(t1, t2, assoc)?;
    let r = py
        .detach(|| metrics::compare(&t1.inner, &t2.inner, &a, CompareOptions { nni_budget }))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn count_trees(n: usize) -> PyResult<BigInt> {
    kic_core::count_trees(n).map(BigInt::from).map_err(err)
}

/// Every topology on `labels` (at most 11 leaves).
#[pyfunction]
fn enumerate_trees(py: Python<'_>, labels: Vec<String>) -> PyResult<Vec<PyTree>> {
    let e = TreeEnumerator::with_cap(&labels, DEFAULT_ENUMERATION_CAP).map_err(err)?;
    Ok(py.detach(|| e.iter().map(PyTree::from).collect()))
}

#[pyfunction]
#[pyo3(signature = (labels, seed, stream=0))]
fn random_tree(labels: Vec<String>, seed: u64, stream: u64) -> PyResult<PyTree> {
    random_tree_stream(&labels, seed, stream)
        .map(PyTree::from)
        .map_err(err)
}

#[pyfunction]
fn caterpillar(labels: Vec<String>) -> PyResult<PyTree> {
    families::caterpillar(&labels).map(PyTree::from).map_err(err)
}

#[pyfunction]
fn shifted_caterpillar_pair(n: usize, m: usize) -> PyResult<TreePair> {
    families::shifted_caterpillar_pair(n, m).map(pair_out).map_err(err)
}

#[pyfunction]
fn triple_swap_pair(x: usize) -> PyResult<TreePair> {
    families::triple_swap_pair(x).map(pair_out).map_err(err)
}

#[pyfunction]
fn max_distance_pair(n: usize) -> PyResult<TreePair> {
    families::max_distance_pair(n).map(pair_out).map_err(err)
}

/// `(count, members)`; `members` is `None` unless `emit_members` is set.
#[pyfunction]
#[pyo3(signature = (t, k, emit_members=false))]
fn brute_force_interval_neighborhood(
    py: Python<'_>,
    t: &PyTree,
    k: usize,
    emit_members: bool,
) -> PyResult<(BigInt, Option<Vec<PyTree>>)> {
    let s = py
        .detach(|| nb::brute_force_interval_neighborhood(&t.inner, k, emit_members))
        .map_err(err)?;
    Ok((
        s.count.count,
        s.members.map(|m| m.into_iter().map(PyTree::from).collect()),
    ))
}

/// Entry `k` counts trees at precise k-IC distance `k` from `t`.
#[pyfunction]
fn interval_histogram(py: Python<'_>, t: &PyTree) -> PyResult<Vec<u64>> {
    Ok(py
        .detach(|| nb::interval_histogram(&t.inner))
        .map_err(err)?
        .counts)
}

#[pyfunction]
fn closed_form_caterpillar(n: usize) -> PyResult<BigInt> {
    nb::closed_form_caterpillar(n).map_err(err)
}

/// `variant` is `"proof_derivation"` (default) or `"theorem_statement"`.
#[pyfunction]
#[pyo3(signature = (n, c, variant="proof_derivation"))]
fn closed_form_multi_cherry(n: usize, c: usize, variant: &str) -> PyResult<BigInt> {
    let v = match variant {
        "proof_derivation" => MultiCherryVariant::ProofDerivation,
        "theorem_statement" => MultiCherryVariant::TheoremStatement,
        other => return Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    };
    nb::closed_form_multi_cherry(n, c, v).map_err(err)
}

/// `(numerator, denominator)` of `(n^2 - 5n + 7) / 2`.
#[pyfunction]
fn vertex_cherry_count(n: usize) -> (i64, i64) {
    let v = nb::vertex_cherry_count(n);
    (*v.numer(), *v.denom())
}

#[pyfunction]
fn growth_table<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &nb::growth_table(n).map_err(err)?)
}

#[pyfunction]
fn rf_zero_split_expected(n: usize, c: usize) -> PyResult<f64> {
    nb::rf_zero_split_expected(n, c).map_err(err)
}

#[pyfunction]
fn simulate_rf_zero_split(py: Python<'_>, t: &PyTree, samples: u64, seed: u64) -> PyResult<f64> {
    py.detach(|| nb::simulate_rf_zero_split(&t.inner, samples, seed))
        .map_err(err)
}

/// Claim-suite report as a dict.
#[pyfunction]
#[pyo3(signature = (max_n=6, seed=1, samples=200))]
fn run_verify<'py>(py: Python<'py>, max_n: usize, seed: u64, samples: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| verify::verify(&VerifyOptions { max_n, seed, samples }))
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn kic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(precise_kic, m)?)?;
    m.add_function(wrap_pyfunction!(path_difference, m)?)?;
    m.add_function(wrap_pyfunction!(rf_distance, m)?)?;
    m.add_function(wrap_pyfunction!(nni_exact, m)?)?;
    m.add_function(wrap_pyfunction!(diameter_gap_check, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(count_trees, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_trees, m)?)?;
    m.add_function(wrap_pyfunction!(random_tree, m)?)?;
    m.add_function(wrap_pyfunction!(caterpillar, m)?)?;
    m.add_function(wrap_pyfunction!(shifted_caterpillar_pair, m)?)?;
    m.add_function(wrap_pyfunction!(triple_swap_pair, m)?)?;
    m.add_function(wrap_pyfunction!(max_distance_pair, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_interval_neighborhood, m)?)?;
    m.add_function(wrap_pyfunction!(interval_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_caterpillar, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_multi_cherry, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_cherry_count, m)?)?;
    m.add_function(wrap_pyfunction!(growth_table, m)?)?;
    m.add_function(wrap_pyfunction!(rf_zero_split_expected, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_rf_zero_split, m)?)?;
    m.add("verify", wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
