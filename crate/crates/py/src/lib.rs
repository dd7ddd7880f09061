//! Python bindings: thin wrappers over the construction, density,
//! planning, counting, and experiment entry points. Structured results
//! cross the boundary as JSON strings; graphs as a small wrapper class.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use kttree::complexes::{clique_complex, TComplex};
use kttree::constructions::{canonical_witness, power_members, ConstructionId};
use kttree::counting::{
    count_cliques, count_witness_copies, find_power_member, rooted_copies_by_root, star_prune,
    DEFAULT_COUNT_CAP,
};
use kttree::density::{is_balanced, rooted_density, Balance, DEFAULT_BALANCE_CAP};
use kttree::experiment::{gnp, run_experiment, ExperimentConfig};
use kttree::planner::{plan_family, plan_star_family};
use kttree::{Q, RootedGraph};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_q(s: &str) -> PyResult<Q> {
    let parse_i = |x: &str| x.trim().parse::<i64>().map_err(err);
    match s.split_once('/') {
        Some((n, d)) => Ok(Q::new(parse_i(n)?, parse_i(d)?)),
        None => Ok(Q::from_integer(parse_i(s)?)),
    }
}

/// A rooted graph: vertices 0..n, undirected edges, a designated root set.
#[pyclass(name = "RootedGraph", skip_from_py_object)]
#[derive(Clone)]
struct PyRootedGraph {
    inner: RootedGraph,
}

#[pymethods]
impl PyRootedGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRootedGraph { inner: RootedGraph::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dot(&self) -> String {
        self.inner.to_dot()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.graph.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.graph.edges().collect()
    }

    #[getter]
    fn roots(&self) -> Vec<usize> {
        self.inner.roots.iter().copied().collect()
    }

    /// Rooted density as a (numerator, denominator) pair.
    fn density(&self) -> PyResult<(i64, i64)> {
        let d = rooted_density(&self.inner).map_err(err)?;
        Ok((*d.numer(), *d.denom()))
    }

    /// None if balanced, otherwise a minimizing unrooted vertex set.
    #[pyo3(signature = (cap = DEFAULT_BALANCE_CAP))]
    fn balance_counterexample(&self, cap: usize) -> PyResult<Option<Vec<usize>>> {
        match is_balanced(&self.inner, cap).map_err(err)? {
            Balance::Balanced => Ok(None),
            Balance::Counterexample(s) => Ok(Some(s.into_iter().collect())),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "RootedGraph(n={}, edges={}, roots={:?})",
            self.inner.graph.n(),
            self.inner.graph.edge_count(),
            self.roots()
        )
    }
}

/// Build a construction from its JSON id, e.g.
/// '{"kind":"T2","params":{"a":1,"b":2}}'.
#[pyfunction]
fn construct(id_json: &str) -> PyResult<PyRootedGraph> {
    let id = ConstructionId::from_json(id_json).map_err(err)?;
    Ok(PyRootedGraph { inner: id.build().map_err(err)? })
}

/// Canonical clique-gluing witness of a construction, as JSON.
#[pyfunction]
fn witness(id_json: &str) -> PyResult<String> {
    let id = ConstructionId::from_json(id_json).map_err(err)?;
    let w = canonical_witness(&id).map_err(err)?;
    Ok(serde_json::to_string(&w).unwrap())
}

/// Family plan for counting K_t copies at exponent r (e.g. "7/3"), as JSON.
#[pyfunction]
fn plan(t: i64, exponent: &str) -> PyResult<String> {
    Ok(plan_family(t, parse_q(exponent)?).map_err(err)?.to_json())
}

/// Star-family plan for exponent r in [t, t+1), as JSON.
#[pyfunction]
fn plan_stars(t: i64, exponent: &str) -> PyResult<String> {
    Ok(plan_star_family(t, parse_q(exponent)?).map_err(err)?.to_json())
}

/// Members of the ell-th power of a rooted graph, each as an edge list.
#[pyfunction]
#[pyo3(signature = (f, ell, cap = 14))]
fn power(f: &PyRootedGraph, ell: usize, cap: usize) -> PyResult<Vec<Vec<(usize, usize)>>> {
    let members = power_members(&f.inner, ell, cap).map_err(err)?;
    Ok(members.iter().map(|g| g.edges().collect()).collect())
}

/// G(n, p) sample with a fixed seed.
#[pyfunction]
fn sample_gnp(n: usize, p: f64, seed: u64) -> PyRootedGraph {
    PyRootedGraph {
        inner: RootedGraph { graph: gnp(n, p, seed), roots: Default::default() },
    }
}

/// Number of i-cliques.
#[pyfunction]
#[pyo3(signature = (g, i, cap = DEFAULT_COUNT_CAP))]
fn cliques(g: &PyRootedGraph, i: usize, cap: u64) -> PyResult<u64> {
    count_cliques(&g.inner.graph, i, cap).map_err(err)
}

/// Copies of a construction's witness in the clique complex of g.
#[pyfunction]
#[pyo3(signature = (g, id_json, cap = DEFAULT_COUNT_CAP))]
fn witness_copies(g: &PyRootedGraph, id_json: &str, cap: u64) -> PyResult<u64> {
    let id = ConstructionId::from_json(id_json).map_err(err)?;
    let w = canonical_witness(&id).map_err(err)?;
    let c = clique_complex(&g.inner.graph, w.t);
    count_witness_copies(&c, &w, cap).map_err(err)
}

/// Per-root-image copy counts of a rooted pattern inside g.
#[pyfunction]
#[pyo3(signature = (g, f, cap = DEFAULT_COUNT_CAP))]
fn rooted_copies(g: &PyRootedGraph, f: &PyRootedGraph, cap: u64) -> PyResult<Vec<(Vec<usize>, u64)>> {
    let m = rooted_copies_by_root(&g.inner.graph, &f.inner, cap).map_err(err)?;
    Ok(m.into_iter().collect())
}

/// Pigeonhole power detector; returns a JSON certificate or None.
#[pyfunction]
#[pyo3(signature = (g, f, ell, cap = DEFAULT_COUNT_CAP))]
fn power_member(g: &PyRootedGraph, f: &PyRootedGraph, ell: usize, cap: u64) -> PyResult<Option<String>> {
    let cert = find_power_member(&g.inner.graph, &f.inner, ell, cap).map_err(err)?;
    Ok(cert.map(|c| serde_json::to_string(&c).unwrap()))
}

/// Star-peeling fixed point; returns (surviving stars, centers, leaves,
/// initial count, removed count).
#[pyfunction]
#[pyo3(signature = (g, t, threshold, cap = DEFAULT_COUNT_CAP))]
fn prune_stars(
    g: &PyRootedGraph,
    t: usize,
    threshold: u64,
    cap: u64,
) -> PyResult<(Vec<(usize, Vec<usize>)>, Vec<usize>, Vec<usize>, u64, u64)> {
    let out = star_prune(&g.inner.graph, t, threshold, cap).map_err(err)?;
    Ok((
        out.stars
            .into_iter()
            .map(|(c, ls)| (c, ls.into_iter().collect()))
            .collect(),
        out.centers.into_iter().collect(),
        out.leaves.into_iter().collect(),
        out.initial,
        out.removed,
    ))
}

/// Prune a complex (JSON) to thresholds, one per set size 1..=t-1
/// (size-t sets are the tops and are not thresholded); returns JSON.
#[pyfunction]
fn prune_complex(complex_json: &str, thresholds: Vec<u64>) -> PyResult<String> {
    let c = TComplex::from_json(complex_json).map_err(err)?;
    if thresholds.len() + 1 != c.t {
        return Err(PyValueError::new_err(format!("need {} thresholds", c.t - 1)));
    }
    Ok(c.prune(|k| thresholds[k - 1]).to_json())
}

/// Run an experiment from its JSON config; returns the CSV text.
#[pyfunction]
fn experiment(config_json: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(err)?;
    run_experiment(&cfg).map_err(err)
}

#[pymodule]
fn kttree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRootedGraph>()?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(plan_stars, m)?)?;
    m.add_function(wrap_pyfunction!(power, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gnp, m)?)?;
    m.add_function(wrap_pyfunction!(cliques, m)?)?;
    m.add_function(wrap_pyfunction!(witness_copies, m)?)?;
    m.add_function(wrap_pyfunction!(rooted_copies, m)?)?;
    m.add_function(wrap_pyfunction!(power_member, m)?)?;
    m.add_function(wrap_pyfunction!(prune_stars, m)?)?;
    m.add_function(wrap_pyfunction!(prune_complex, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    Ok(())
}
