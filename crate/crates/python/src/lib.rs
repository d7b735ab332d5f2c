//! Python bindings for `dirlp`, importable as `dirlp_py`.

use std::path::PathBuf;

use dirlp::cli::{self, ExperimentConfig};
use dirlp::datasets;
use dirlp::digraph::{DirectedGraph, Edge};
use dirlp::error::Error;
use dirlp::eval::{self, EvalProtocol, TiePolicy};
use dirlp::featurize::{self, LabelMode};
use dirlp::heuristics::{self, Family, HeuristicSpec, Heuristics};
use dirlp::sampling::{self, SplitRatios};
use dirlp::verify;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::de::DeserializeOwned;
use serde::Serialize;

pyo3::create_exception!(dirlp_py, DirlpError, PyValueError, "Error raised by the dirlp core.");

fn err(e: Error) -> PyErr {
    DirlpError::new_err(e.to_string())
}

/// Serializes through JSON into native Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| DirlpError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Parses a lowercase enum name such as `"mid"` or `"ra"`.
fn parse_name<T: DeserializeOwned>(what: &str, s: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| DirlpError::new_err(format!("unknown {what} {s:?}")))
}

/// Accepts a JSON string or a dict.
fn config_from(obj: &Bound<'_, PyAny>) -> PyResult<ExperimentConfig> {
    let text: String = if obj.is_instance_of::<PyString>() {
        obj.extract()?
    } else {
        obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?
    };
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| DirlpError::new_err(e.to_string()))?;
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// A directed graph on nodes `0..num_nodes`. Self-loops are dropped and
/// duplicate edges collapsed.
#[pyclass(name = "DiGraph", frozen)]
struct PyDiGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyDiGraph {
    #[new]
    fn new(num_nodes: usize, edges: Vec<Edge>) -> PyResult<Self> {
        let (inner, _) = DirectedGraph::from_edges(num_nodes, edges).map_err(err)?;
        Ok(PyDiGraph { inner })
    }

    /// Reads a whitespace-separated `src dst` edge list.
    #[staticmethod]
    #[pyo3(signature = (path, num_nodes=None))]
    fn from_edge_list(path: PathBuf, num_nodes: Option<usize>) -> PyResult<Self> {
        let file = std::fs::File::open(&path).map_err(|e| DirlpError::new_err(format!("{}: {e}", path.display())))?;
        let (inner, _) = DirectedGraph::load_edge_list(std::io::BufReader::new(file), num_nodes).map_err(err)?;
        Ok(PyDiGraph { inner })
    }

    #[staticmethod]
    fn ring_lattice(n: usize, k: usize) -> PyResult<Self> {
        Ok(PyDiGraph {
            inner: datasets::ring_lattice(n, k).map_err(err)?,
        })
    }

    #[staticmethod]
    fn directed_ring(n: usize) -> PyResult<Self> {
        Ok(PyDiGraph {
            inner: datasets::directed_ring(n).map_err(err)?,
        })
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn edges(&self) -> Vec<Edge> {
        self.inner.edges().to_vec()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.inner.num_nodes() && v < self.inner.num_nodes() && self.inner.has_edge(u, v)
    }

    fn out_neighbors(&self, u: usize) -> PyResult<Vec<usize>> {
        Ok(self.inner.neighbors(u, dirlp::digraph::Direction::Out).map_err(err)?.to_vec())
    }

    fn in_neighbors(&self, u: usize) -> PyResult<Vec<usize>> {
        Ok(self.inner.neighbors(u, dirlp::digraph::Direction::In).map_err(err)?.to_vec())
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    fn symmetrize(&self) -> Self {
        PyDiGraph {
            inner: self.inner.symmetrize(),
        }
    }

    /// Unordered pairs with edges both ways, divided by the edge count.
    fn bidirectional_ratio(&self) -> f64 {
        datasets::bidirectional_ratio(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("DiGraph(num_nodes={}, num_edges={})", self.inner.num_nodes(), self.inner.num_edges())
    }
}

/// Scores `pairs` with a heuristic such as `"lp-asym"`, `"ra-sym"` or `"aa-out-in"`.
#[pyfunction]
fn heuristic_scores(graph: &PyDiGraph, method: &str, pairs: Vec<Edge>) -> PyResult<Vec<f64>> {
    let spec: HeuristicSpec = method.parse().map_err(err)?;
    Heuristics::new(&graph.inner).score_pairs(&spec, &pairs).map_err(err)
}

/// Directional RA or AA variant with the best validation MRR, e.g. `"ra-in-out"`.
#[pyfunction]
#[pyo3(signature = (graph, family, validation, full_graph, candidates=100, seed=0))]
fn best_directional_variant(
    graph: &PyDiGraph,
    family: &str,
    validation: Vec<Edge>,
    full_graph: &PyDiGraph,
    candidates: usize,
    seed: u64,
) -> PyResult<String> {
    let family: Family = parse_name("heuristic family", family)?;
    let protocol = EvalProtocol {
        candidates,
        seed,
        ..EvalProtocol::default()
    };
    let h = Heuristics::new(&graph.inner);
    let variant = heuristics::best_directional_variant(&h, family, &validation, &full_graph.inner, &protocol).map_err(err)?;
    Ok(HeuristicSpec::new(family, variant).map_err(err)?.to_string())
}

/// `(z_dir, z_undir)` structural features of the pair `(u, v)`, as raw counts.
#[pyfunction]
#[pyo3(signature = (graph, u, v, radius=2))]
fn edge_features(graph: &PyDiGraph, u: usize, v: usize, radius: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let f = featurize::edge_features(&graph.inner, u, v, radius).map_err(err)?;
    Ok((f.z_dir, f.z_undir))
}

/// Column names of `z_dir + z_undir`.
#[pyfunction]
#[pyo3(signature = (radius=2))]
fn feature_names(radius: usize) -> Vec<String> {
    featurize::feature_column_names(radius)
}

/// Distance labels of every node relative to degree-chosen landmarks;
/// `mode` is `"deK"` (e.g. `"de15"`) or `"delog"`.
#[pyfunction]
#[pyo3(signature = (graph, landmarks=2, mode="de15", directed=true))]
fn distance_labels(graph: &PyDiGraph, landmarks: usize, mode: &str, directed: bool) -> PyResult<Vec<Vec<f64>>> {
    let mode: LabelMode = mode.parse().map_err(err)?;
    let chosen = featurize::select_landmarks(&graph.inner, landmarks).map_err(err)?;
    let m = featurize::distance_encoding_labels(&graph.inner, &chosen, mode, directed).map_err(err)?;
    Ok((0..m.num_nodes).map(|u| m.row(u).to_vec()).collect())
}

#[pyfunction]
fn mrr(ranks: Vec<f64>) -> PyResult<f64> {
    eval::mrr(&ranks).map_err(err)
}

#[pyfunction]
fn hits_at_k(ranks: Vec<f64>, k: usize) -> PyResult<f64> {
    eval::hits_at_k(&ranks, k).map_err(err)
}

/// Rank of a positive score among negatives; `tie` is `"optimistic"`,
/// `"mid"` or `"pessimistic"`.
#[pyfunction]
#[pyo3(signature = (positive, negatives, tie="mid"))]
fn rank_of_positive(positive: f64, negatives: Vec<f64>, tie: &str) -> PyResult<f64> {
    let tie: TiePolicy = parse_name("tie policy", tie)?;
    eval::rank_of_positive(positive, &negatives, tie).map_err(err)
}

/// Train/validation/test edge splits, one dict per fold.
#[pyfunction]
#[pyo3(signature = (graph, seed=0, folds=1, train=0.7, valid=0.1, test=0.2))]
fn make_splits<'py>(
    py: Python<'py>,
    graph: &PyDiGraph,
    seed: u64,
    folds: usize,
    train: f64,
    valid: f64,
    test: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let ratios = SplitRatios::new(train, valid, test).map_err(err)?;
    let splits = sampling::make_splits(&graph.inner, ratios, seed, folds).map_err(err)?;
    to_py(py, &splits)
}

#[pyfunction]
fn expressivity_check_k4(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &eval::expressivity_check_k4().map_err(err)?)
}

/// Relabels a raw edge list to dense ids under `out`; returns the dataset statistics.
#[pyfunction]
#[pyo3(signature = (edges, out, features=None, id_map=None))]
fn ingest(
    py: Python<'_>,
    edges: PathBuf,
    out: PathBuf,
    features: Option<PathBuf>,
    id_map: Option<PathBuf>,
) -> PyResult<Bound<'_, PyAny>> {
    let stats = cli::cmd_ingest(&edges, features.as_deref(), id_map.as_deref(), &out).map_err(err)?;
    to_py(py, &stats)
}

/// Runs the configured heuristics on every fold; `config` is a JSON string or dict.
#[pyfunction]
fn heuristic<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config_from(config)?;
    let rows = py.detach(|| cli::cmd_heuristic(&cfg)).map_err(err)?;
    to_py(py, &rows)
}

/// Trains the configured model on every fold and writes the results under
/// the config's `out`; returns one row per fold.
#[pyfunction]
#[pyo3(signature = (config, search_trials=None))]
fn train<'py>(py: Python<'py>, config: &Bound<'py, PyAny>, search_trials: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config_from(config)?;
    let rows = py.detach(|| cli::cmd_train(&cfg, search_trials)).map_err(err)?;
    to_py(py, &rows)
}

/// Default experiment configuration as a dict.
#[pyfunction]
fn default_config(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &ExperimentConfig::default())
}

/// Runs the oracle suite; returns `(passed, lines)`.
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn verify_all(py: Python<'_>, seed: u64) -> PyResult<(bool, Vec<String>)> {
    let report = py.detach(|| verify::run_all(seed)).map_err(err)?;
    Ok((report.passed(), report.checks.iter().map(ToString::to_string).collect()))
}

#[pyfunction]
fn build_id() -> &'static str {
    cli::build_id()
}

#[pymodule]
fn dirlp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DirlpError", m.py().get_type::<DirlpError>())?;
    m.add_class::<PyDiGraph>()?;
    m.add_function(wrap_pyfunction!(heuristic_scores, m)?)?;
    m.add_function(wrap_pyfunction!(best_directional_variant, m)?)?;
    m.add_function(wrap_pyfunction!(edge_features, m)?)?;
    m.add_function(wrap_pyfunction!(feature_names, m)?)?;
    m.add_function(wrap_pyfunction!(distance_labels, m)?)?;
    m.add_function(wrap_pyfunction!(mrr, m)?)?;
    m.add_function(wrap_pyfunction!(hits_at_k, m)?)?;
    m.add_function(wrap_pyfunction!(rank_of_positive, m)?)?;
    m.add_function(wrap_pyfunction!(make_splits, m)?)?;
    m.add_function(wrap_pyfunction!(expressivity_check_k4, m)?)?;
    m.add_function(wrap_pyfunction!(ingest, m)?)?;
    m.add_function(wrap_pyfunction!(heuristic, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add_function(wrap_pyfunction!(build_id, m)?)?;
    Ok(())
}
