//! Python bindings for the `netcover` crate.

use std::path::PathBuf;

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netcover::analysis::{self, PcaResult};
use netcover::coverage::{self, DEFAULT_WINDOW};
use netcover::harness::{self, ExperimentConfig};
use netcover::netgen::{self, GeneratorSpec, Model, ModelParams};
use netcover::walks::{self, DynamicsKind, WalkDynamics, WalkState};
use netcover::Error;

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Usage(_) | Error::Parse { .. } => PyValueError::new_err(msg),
        Error::Io { .. } => PyOSError::new_err(msg),
        Error::Generation(_) => PyRuntimeError::new_err(msg),
        Error::Numeric(_) | Error::DeadEnd(_) => PyArithmeticError::new_err(msg),
    }
}

fn dynamics(name: &str, lambda: Option<f64>) -> Result<WalkDynamics, Error> {
    let kind: DynamicsKind = name.parse()?;
    match (kind, lambda) {
        (DynamicsKind::Tsaw, Some(l)) => WalkDynamics::tsaw_with_lambda(l),
        (_, Some(_)) => Err(Error::Usage("lambda only applies to TSAW".into())),
        (k, None) => Ok(WalkDynamics::new(k)),
    }
}

/// Undirected simple graph.
#[pyclass(name = "Graph", module = "netcover", frozen)]
struct PyGraph {
    inner: netcover::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(node_count: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = netcover::Graph::from_edges(node_count, edges).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    /// Parses a whitespace-separated edge list.
    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        let loaded = netcover::Graph::from_edge_list(text).map_err(to_py)?;
        Ok(PyGraph { inner: loaded.graph })
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn neighbors(&self, node: usize) -> PyResult<Vec<usize>> {
        self.inner.degree(node).map_err(to_py)?;
        Ok(self.inner.neighbors(node).to_vec())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn average_degree(&self) -> f64 {
        self.inner.average_degree()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn giant_component(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.giant_component().graph,
        }
    }

    fn coords(&self) -> Option<Vec<(f64, f64)>> {
        self.inner.coords().map(|c| c.iter().map(|p| (p[0], p[1])).collect())
    }

    fn communities(&self) -> Option<Vec<usize>> {
        self.inner.communities().map(<[usize]>::to_vec)
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// Generates an ER, BA, WAX or LFR network.
#[pyfunction]
#[pyo3(signature = (model, n, k, seed = 0, beta = None))]
fn generate(py: Python<'_>, model: &str, n: usize, k: f64, seed: u64, beta: Option<f64>) -> PyResult<PyGraph> {
    let model: Model = model.parse().map_err(to_py)?;
    let mut spec = GeneratorSpec::new(model, n, k);
    if let Some(b) = beta {
        if model != Model::Wax {
            return Err(PyValueError::new_err("beta only applies to WAX"));
        }
        spec.params = ModelParams::Waxman { beta: b };
    }
    let g = py
        .detach(|| netgen::generate(&spec, &mut ChaCha8Rng::seed_from_u64(seed)))
        .map_err(to_py)?;
    Ok(PyGraph { inner: g })
}

/// Next-step probabilities from `node`, aligned with `graph.neighbors(node)`.
#[pyfunction]
#[pyo3(signature = (graph, node, dynamics, lambda_ = None, edge_visits = None))]
fn transition_distribution(
    graph: &PyGraph,
    node: usize,
    dynamics: &str,
    lambda_: Option<f64>,
    edge_visits: Option<Vec<(usize, usize, u32)>>,
) -> PyResult<Vec<f64>> {
    let d = self::dynamics(dynamics, lambda_).map_err(to_py)?;
    let g = &graph.inner;
    let state = match edge_visits {
        Some(v) => WalkState::with_edge_visits(g, node, &v),
        None => WalkState::new(g, node),
    }
    .map_err(to_py)?;
    walks::transition_distribution(g, &state, &d).map_err(to_py)
}

/// Visited nodes of one walk, `steps + 1` entries starting at `start`.
#[pyfunction]
#[pyo3(signature = (graph, dynamics, start, steps, seed = 0, lambda_ = None))]
fn run_walk(
    py: Python<'_>,
    graph: &PyGraph,
    dynamics: &str,
    start: usize,
    steps: usize,
    seed: u64,
    lambda_: Option<f64>,
) -> PyResult<Vec<usize>> {
    let d = self::dynamics(dynamics, lambda_).map_err(to_py)?;
    let g = &graph.inner;
    py.detach(|| walks::run_walk(g, &d, start, steps, &mut ChaCha8Rng::seed_from_u64(seed)))
        .map(|s| s.nodes)
        .map_err(to_py)
}

#[pyfunction]
fn learning_curve(nodes: Vec<usize>, n_effective: usize) -> PyResult<Vec<f64>> {
    let seq = walks::VisitSequence { nodes };
    coverage::learning_curve(&seq, n_effective)
        .map(|c| c.values)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (curve, window = DEFAULT_WINDOW))]
fn rate_features(curve: Vec<f64>, window: usize) -> PyResult<Vec<f64>> {
    coverage::rate_samples(&curve, window).map_err(to_py)
}

#[pyfunction]
fn normalize_curve(curve: Vec<f64>) -> PyResult<Vec<f64>> {
    analysis::normalize_curve(&curve).map_err(to_py)
}

/// A fitted PCA.
#[pyclass(name = "Pca", module = "netcover", frozen)]
struct PyPca {
    inner: PcaResult,
}

#[pymethods]
impl PyPca {
    #[getter]
    fn mean_vector(&self) -> Vec<f64> {
        self.inner.mean_vector.clone()
    }

    #[getter]
    fn components(&self) -> Vec<Vec<f64>> {
        self.inner.components.clone()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn explained_variance_ratio(&self) -> Vec<f64> {
        self.inner.explained_variance_ratio.clone()
    }

    #[getter]
    fn projections(&self) -> Vec<(f64, f64)> {
        self.inner.projections.iter().map(|p| (p[0], p[1])).collect()
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.degenerate
    }

    fn project(&self, vector: Vec<f64>) -> PyResult<(f64, f64)> {
        analysis::project(&self.inner, &vector).map_err(to_py)
    }

    /// `(epoch, loading)` pairs for axis 1 or 2.
    fn axis_profile(&self, axis: usize) -> PyResult<Vec<(usize, f64)>> {
        analysis::axis_profile(&self.inner, axis).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let r = &self.inner.explained_variance_ratio;
        format!(
            "Pca(dim={}, ratio[0]={:.4})",
            self.inner.dim(),
            r.first().copied().unwrap_or(0.0)
        )
    }
}

#[pyfunction]
fn pca_fit(rows: Vec<Vec<f64>>) -> PyResult<PyPca> {
    analysis::pca_fit(&rows).map(|inner| PyPca { inner }).map_err(to_py)
}

/// Exact expected coverage per step (graphs of at most 12 nodes).
#[pyfunction]
fn oracle_expected_coverage(graph: &PyGraph, dynamics: &str, start: usize, steps: usize) -> PyResult<Vec<f64>> {
    let kind: DynamicsKind = dynamics.parse().map_err(to_py)?;
    harness::oracle_expected_coverage(&graph.inner, kind, start, steps).map_err(to_py)
}

#[pyfunction]
fn derive_seed(master_seed: u64, cell: u64, network: u64, walk: u64) -> u64 {
    harness::derive_seed(master_seed, cell, network, walk)
}

/// Runs an experiment described by config text and writes the result
/// bundle. Returns the written file paths.
#[pyfunction]
#[pyo3(signature = (config, workers = 1, out = None))]
fn run_experiment(py: Python<'_>, config: &str, workers: usize, out: Option<PathBuf>) -> PyResult<Vec<PathBuf>> {
    let mut cfg = ExperimentConfig::parse(config).map_err(to_py)?;
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    let (results, bundle) = py
        .detach(|| harness::run_experiment(&cfg, workers, None))
        .map_err(to_py)?;
    if let Some(f) = results.failures.first() {
        return Err(PyRuntimeError::new_err(f.clone()));
    }
    Ok(bundle.files)
}

#[pymodule]
#[pyo3(name = "netcover")]
fn netcover_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPca>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(transition_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(run_walk, m)?)?;
    m.add_function(wrap_pyfunction!(learning_curve, m)?)?;
    m.add_function(wrap_pyfunction!(rate_features, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_curve, m)?)?;
    m.add_function(wrap_pyfunction!(pca_fit, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_expected_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("DEFAULT_LAMBDA", walks::DEFAULT_LAMBDA)?;
    Ok(())
}
