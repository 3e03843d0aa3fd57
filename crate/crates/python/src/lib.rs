//! Python bindings: graphs, spectra and evolution runs.
//!
//! Graphs and run configs cross the boundary as the same JSON documents the
//! command-line tool reads and writes.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use qgraph::evolution::{experiments, run, RunConfig, RunLog, RunStatus};
use qgraph::io::{graph_from_json, graph_to_json_pretty};
use qgraph::secular::SecularEvaluator;
use qgraph::spectrum::{compute_spectrum, spectrum_for_count, ModeChoice, RootSearchOptions};
use qgraph::{Error, ParameterBinding};

fn err(e: Error) -> PyErr {
    match e {
        Error::RefinementFailure { .. }
        | Error::DegenerateLeadingCoefficient { .. }
        | Error::NoConvergence(_)
        | Error::AllCandidatesFailed(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A metric graph. Edge lengths may be numbers or named parameters.
#[pyclass(name = "MetricGraph", module = "qgraph")]
#[derive(Clone)]
pub struct PyGraph {
    inner: qgraph::MetricGraph,
}

#[pymethods]
impl PyGraph {
    /// Graph on `vertices` vertices from `(u, v, length)` triples.
    #[new]
    fn new(vertices: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        PyGraph { inner: qgraph::MetricGraph::from_lengths(vertices, &edges) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: graph_from_json(text).map_err(err)? })
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        qgraph::fixtures::by_name(name)
            .map(|inner| PyGraph { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown fixture {name:?}")))
    }

    fn to_json(&self) -> String {
        graph_to_json_pretty(&self.inner)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn parameters(&self) -> Vec<String> {
        self.inner.parameters().into_iter().map(|p| p.to_string()).collect()
    }

    /// Substitutes parameters, e.g. `g.bind("c1=3.14,c2=0.5")`.
    fn bind(&self, binding: &str) -> PyResult<Self> {
        let b = ParameterBinding::parse(binding).map_err(err)?;
        Ok(PyGraph { inner: self.inner.bind(&b).map_err(err)? })
    }

    fn total_length(&self) -> PyResult<f64> {
        self.inner.total_length().map_err(err)
    }

    /// Rescaled to total length one.
    fn normalized(&self) -> PyResult<Self> {
        Ok(PyGraph { inner: self.inner.normalized().map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("MetricGraph(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

fn evaluator(g: &PyGraph) -> PyResult<SecularEvaluator> {
    let g = g.inner.normalized().map_err(err)?;
    g.ensure_valid().map_err(err)?;
    SecularEvaluator::new(&g).map_err(err)
}

/// Smallest singular value of the secular matrix at `k`, after normalizing.
#[pyfunction]
fn sigma_min(graph: &PyGraph, k: f64) -> PyResult<f64> {
    Ok(evaluator(graph)?.sigma_min(k))
}

/// Secular determinant at real `k`, after normalizing.
#[pyfunction]
fn det(graph: &PyGraph, k: f64) -> PyResult<(f64, f64)> {
    let d = evaluator(graph)?.det_real(k);
    Ok((d.re, d.im))
}

/// Roots `(k, multiplicity)` of the normalized graph, starting with
/// `(0.0, 1)`. Give `k_max` or `count` (eigenvalues with multiplicity).
#[pyfunction]
#[pyo3(signature = (graph, k_max=None, count=None, mode="auto"))]
fn spectrum(graph: &PyGraph, k_max: Option<f64>, count: Option<usize>, mode: &str) -> PyResult<Vec<(f64, usize)>> {
    let mode: ModeChoice = serde_json::from_value(serde_json::Value::from(mode))
        .map_err(|_| PyValueError::new_err(format!("unknown mode {mode:?}; use auto, scan or rational")))?;
    let g = graph.inner.normalized().map_err(err)?;
    g.ensure_valid().map_err(err)?;
    let opts = RootSearchOptions::default();
    let spec = match (k_max, count) {
        (Some(k), _) => compute_spectrum(&g, mode, &opts.with_k_max(k)),
        (None, Some(n)) => spectrum_for_count(&g, n, mode, &opts),
        (None, None) => compute_spectrum(&g, mode, &opts),
    }
    .map_err(err)?;
    Ok(spec.roots().iter().map(|r| (r.k, r.multiplicity)).collect())
}

/// Eigenvalues `0 = λ₀ ≤ λ₁ ≤ …`, the first `count` with multiplicity.
#[pyfunction]
fn eigenvalues(graph: &PyGraph, count: usize) -> PyResult<Vec<f64>> {
    let g = graph.inner.normalized().map_err(err)?;
    g.ensure_valid().map_err(err)?;
    let spec = spectrum_for_count(&g, count, ModeChoice::Auto, &RootSearchOptions::default()).map_err(err)?;
    spec.eigenvalues(count).map_err(err)
}

/// Outcome of an evolution run.
#[pyclass(name = "RunResult", module = "qgraph")]
pub struct PyRun {
    log: RunLog,
}

#[pymethods]
impl PyRun {
    /// `"done"`, or `"aborted: <reason>"`.
    #[getter]
    fn status(&self) -> String {
        match &self.log.status {
            RunStatus::Running => "running".into(),
            RunStatus::Done => "done".into(),
            RunStatus::Aborted(r) => format!("aborted: {r}"),
        }
    }

    #[getter]
    fn steps(&self) -> usize {
        self.log.steps.len()
    }

    fn scores(&self) -> Vec<f64> {
        self.log.steps.iter().map(|s| s.score).collect()
    }

    fn graphs(&self) -> Vec<PyGraph> {
        self.log.chosen_graphs().into_iter().map(|g| PyGraph { inner: g.clone() }).collect()
    }

    fn final_graph(&self) -> PyGraph {
        PyGraph { inner: self.log.final_graph().clone() }
    }

    fn phase_starts(&self) -> Vec<usize> {
        self.log.phase_starts()
    }

    /// One JSON object per step.
    fn to_jsonl(&self) -> String {
        self.log.to_jsonl()
    }

    fn k_trajectory_csv(&self) -> String {
        self.log.k_trajectory_csv()
    }
}

/// Runs an evolution config given as JSON.
#[pyfunction]
fn evolve(py: Python<'_>, config: &str) -> PyResult<PyRun> {
    let cfg = RunConfig::from_json(config).map_err(err)?;
    let log = py.allow_threads(|| run(cfg)).map_err(err)?;
    Ok(PyRun { log })
}

/// JSON config of a built-in experiment.
#[pyfunction]
fn experiment_config(name: &str) -> PyResult<String> {
    experiments::by_name(name)
        .map(|c| c.to_json_pretty())
        .ok_or_else(|| PyValueError::new_err(format!("unknown experiment {name:?}")))
}

#[pymodule]
#[pyo3(name = "qgraph")]
fn qgraph_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(sigma_min, m)?)?;
    m.add_function(wrap_pyfunction!(det, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_config, m)?)?;
    m.add("EXPERIMENTS", experiments::NAMES.to_vec())?;
    Ok(())
}
