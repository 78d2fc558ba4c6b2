//! Python bindings: graphs, samplers, probing strategies, estimators and the
//! CCDF/AUC helpers.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::sync::Arc;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use maxoutprobe::graph::{count_triangles_wedges, global_clustering, load_edge_list, local_clustering};
use maxoutprobe::harness::{self, apply_strategy, KnownSample, StrategyConfig, TrialConfig};
use maxoutprobe::{
    estimators, generators, Adjacency, CompleteGraph, EstimateReport, ObservedGraph, Phase, SamplerKind, SamplerSpec,
    StrategyKind,
};

fn py_err(e: maxoutprobe::Error) -> PyErr {
    use maxoutprobe::Error as E;
    match e {
        E::Io(io) => PyOSError::new_err(io.to_string()),
        E::InvalidArgument(_)
        | E::UnknownNode(_)
        | E::NotObserved(_)
        | E::AlreadyExplored(_)
        | E::NotAnEdge(..)
        | E::Parse { .. }
        | E::EmptyGraph => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn sampler(name: &str) -> PyResult<SamplerKind> {
    name.parse().map_err(py_err)
}

fn strategy(name: &str) -> PyResult<StrategyKind> {
    name.parse().map_err(py_err)
}

fn estimate_dict<'py>(py: Python<'py>, r: &EstimateReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("method", r.method)?;
    d.set_item("m_hat", r.m_hat)?;
    d.set_item("c_hat", r.c_hat)?;
    d.set_item("probes_used", r.probes_used)?;
    d.set_item("m_hat_clamped", r.clamped_flags.m_hat)?;
    d.set_item("c_hat_clamped", r.clamped_flags.c_hat)?;
    Ok(d)
}

/// Immutable complete graph with string node labels.
#[pyclass(module = "pymaxoutprobe", frozen)]
struct Graph {
    inner: Arc<CompleteGraph>,
}

impl Graph {
    fn wrap(g: CompleteGraph) -> Self {
        Graph { inner: Arc::new(g) }
    }
}

#[pymethods]
impl Graph {
    /// Build from `(label, label)` pairs; self-loops and repeats are dropped.
    #[staticmethod]
    fn from_edges(edges: Vec<(String, String)>) -> PyResult<Self> {
        let (g, _) = CompleteGraph::from_labeled_edges(edges).map_err(py_err)?;
        Ok(Graph::wrap(g))
    }

    /// Load a whitespace-separated edge list.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        let (g, _) = load_edge_list(BufReader::new(file)).map_err(py_err)?;
        Ok(Graph::wrap(g))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = File::create(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        let mut w = BufWriter::new(file);
        self.inner.write_edge_list(&mut w).map_err(py_err)?;
        w.flush().map_err(|e| PyOSError::new_err(e.to_string()))
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn degree(&self, label: &str) -> PyResult<usize> {
        let u = self.inner.node(label).map_err(py_err)?;
        Ok(self.inner.neighbors(u).len())
    }

    fn neighbors(&self, label: &str) -> PyResult<Vec<String>> {
        let u = self.inner.node(label).map_err(py_err)?;
        Ok(self.inner.neighbors(u).iter().map(|&v| self.inner.label(v).to_string()).collect())
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner
            .edges()
            .into_iter()
            .map(|(u, v)| (self.inner.label(u).to_string(), self.inner.label(v).to_string()))
            .collect()
    }

    /// `(triangles, wedges)`.
    fn triangles_wedges(&self) -> (u64, u64) {
        let c = count_triangles_wedges(&*self.inner);
        (c.triangles, c.wedges)
    }

    fn global_clustering(&self) -> f64 {
        global_clustering(&*self.inner)
    }

    fn local_clustering(&self, label: &str) -> PyResult<f64> {
        let u = self.inner.node(label).map_err(py_err)?;
        local_clustering(&*self.inner, u).map_err(py_err)
    }

    /// Draw an observation with one of randnode, randedge, rw, rwj, nodefrac.
    #[pyo3(signature = (sampler_name, fraction=0.1, seed=0, jump=0.15))]
    fn sample(&self, sampler_name: &str, fraction: f64, seed: u64, jump: f64) -> PyResult<Observation> {
        let spec = SamplerSpec { kind: sampler(sampler_name)?, jump_prob: jump };
        let (obs, fractions) = spec.sample(&self.inner, fraction, seed).map_err(py_err)?;
        Ok(Observation { graph: Arc::clone(&self.inner), obs, node_fraction: fractions.node_fraction })
    }

    /// Parse an observation in the text format produced by `Observation.to_text`.
    fn observation_from_text(&self, text: &str) -> PyResult<Observation> {
        let obs = ObservedGraph::read_from(text.as_bytes(), &self.inner).map_err(py_err)?;
        Ok(Observation { graph: Arc::clone(&self.inner), obs, node_fraction: None })
    }

    /// Sample then probe once; returns the trial summary as a dict.
    #[pyo3(signature = (sampler_name, strategy_name, budget_fraction, sampler_seed=0, strategy_seed=0, edge_fraction=0.1, jump=0.15))]
    #[allow(clippy::too_many_arguments)]
    fn run_trial<'py>(
        &self,
        py: Python<'py>,
        sampler_name: &str,
        strategy_name: &str,
        budget_fraction: f64,
        sampler_seed: u64,
        strategy_seed: u64,
        edge_fraction: f64,
        jump: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let spec = SamplerSpec { kind: sampler(sampler_name)?, jump_prob: jump };
        let mut config = TrialConfig::new(spec, StrategyConfig::new(strategy(strategy_name)?), budget_fraction);
        config.edge_fraction = edge_fraction;
        let g = Arc::clone(&self.inner);
        let r = py.detach(move || harness::run_trial(&g, &config, sampler_seed, strategy_seed)).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("nodes_before", r.nodes_before)?;
        d.set_item("nodes_after", r.nodes_after)?;
        d.set_item("edges_after", r.edges_after)?;
        d.set_item("probes_spent", r.probes_spent)?;
        d.set_item("budget", r.budget)?;
        match &r.estimate {
            Some(e) => d.set_item("estimate", estimate_dict(py, e)?)?,
            None => d.set_item("estimate", py.None())?,
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

/// An incomplete observation of a `Graph` that can be probed in place.
#[pyclass(module = "pymaxoutprobe")]
struct Observation {
    graph: Arc<CompleteGraph>,
    obs: ObservedGraph,
    node_fraction: Option<f64>,
}

#[pymethods]
impl Observation {
    fn node_count(&self) -> usize {
        self.obs.node_count()
    }

    fn edge_count(&self) -> usize {
        self.obs.edge_count()
    }

    fn explored_count(&self) -> usize {
        self.obs.explored_count()
    }

    fn candidates(&self) -> Vec<String> {
        self.obs.candidates().into_iter().map(|u| self.obs.label(u).to_string()).collect()
    }

    /// Fraction of nodes the sampler selected, for node samplers.
    #[getter]
    fn node_fraction(&self) -> Option<f64> {
        self.node_fraction
    }

    fn copy(&self) -> Self {
        Observation { graph: Arc::clone(&self.graph), obs: self.obs.clone(), node_fraction: self.node_fraction }
    }

    fn to_text(&self) -> String {
        self.obs.to_text()
    }

    /// Probe one candidate against the complete graph; returns the labels
    /// of the nodes it revealed.
    fn probe(&mut self, label: &str) -> PyResult<Vec<String>> {
        let u = self.obs.node(label).map_err(py_err)?;
        let mut ledger = maxoutprobe::ProbeLedger::new(1);
        let r =
            maxoutprobe::probe::probe(&self.graph, &mut self.obs, &mut ledger, u, Phase::Selection).map_err(py_err)?;
        Ok(r.new_nodes.iter().map(|&v| self.graph.label(v).to_string()).collect())
    }

    /// Spend `budget` probes with a strategy. `known` may be `("node", f_n)`
    /// or `("edge", f_e)` to use closed-form estimators.
    #[pyo3(signature = (strategy_name, budget, seed=0, est_probes=100, charge_estimation=true, known=None))]
    #[allow(clippy::too_many_arguments)]
    fn apply<'py>(
        &mut self,
        py: Python<'py>,
        strategy_name: &str,
        budget: usize,
        seed: u64,
        est_probes: usize,
        charge_estimation: bool,
        known: Option<(String, f64)>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let known = match known {
            None => None,
            Some((kind, f)) if kind == "node" => Some(KnownSample::Node(f)),
            Some((kind, f)) if kind == "edge" => Some(KnownSample::Edge(f)),
            Some((kind, _)) => {
                return Err(PyValueError::new_err(format!("known design must be node or edge, got {kind}")))
            }
        };
        if budget == 0 {
            return Err(PyValueError::new_err("budget must be at least 1"));
        }
        let mut config = StrategyConfig::new(strategy(strategy_name)?);
        config.estimation_probes = est_probes;
        config.charge_estimation = charge_estimation;
        let before = self.obs.node_count();
        let run = apply_strategy(&self.graph, &mut self.obs, budget, &config, known, seed).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("nodes_before", before)?;
        d.set_item("nodes_after", self.obs.node_count())?;
        d.set_item("probes_spent", run.ledger.spent())?;
        d.set_item("estimation_probes", run.ledger.spent_in(Phase::Estimation))?;
        let probed: Vec<&str> = run.ledger.log().iter().map(|e| self.graph.label(e.node)).collect();
        d.set_item("probed", probed)?;
        match run.estimate {
            Some(e) => d.set_item("estimate", estimate_dict(py, &e.report())?)?,
            None => d.set_item("estimate", py.None())?,
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Observation(nodes={}, edges={}, explored={})",
            self.obs.node_count(),
            self.obs.edge_count(),
            self.obs.explored_count()
        )
    }
}

#[pyfunction]
fn erdos_renyi(n: usize, p: f64, seed: u64) -> PyResult<Graph> {
    generators::erdos_renyi(n, p, seed).map(Graph::wrap).map_err(py_err)
}

#[pyfunction]
fn planted_partition(blocks: usize, block_size: usize, p_in: f64, p_out: f64, seed: u64) -> PyResult<Graph> {
    generators::planted_partition(blocks, block_size, p_in, p_out, seed).map(Graph::wrap).map_err(py_err)
}

#[pyfunction]
fn powerlaw_cluster(n: usize, m: usize, p_triangle: f64, seed: u64) -> PyResult<Graph> {
    generators::powerlaw_cluster(n, m, p_triangle, seed).map(Graph::wrap).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (nodes, seed, mean_memberships=2.0, min_group=3, max_group=40, size_exponent=2.0, activity_exponent=0.5, p_keep=0.8))]
#[allow(clippy::too_many_arguments)]
fn affiliation(
    nodes: usize,
    seed: u64,
    mean_memberships: f64,
    min_group: usize,
    max_group: usize,
    size_exponent: f64,
    activity_exponent: f64,
    p_keep: f64,
) -> PyResult<Graph> {
    let params = generators::AffiliationParams {
        nodes,
        mean_memberships,
        min_group,
        max_group,
        size_exponent,
        activity_exponent,
        p_keep,
    };
    generators::affiliation(&params, seed).map(Graph::wrap).map_err(py_err)
}

#[pyfunction]
fn random_bipartite(n_left: usize, n_right: usize, p: f64, seed: u64) -> PyResult<Graph> {
    generators::random_bipartite(n_left, n_right, p, seed).map(Graph::wrap).map_err(py_err)
}

#[pyfunction]
fn unbiased_degree_node_sampling(d_known: usize, f_n: f64) -> PyResult<f64> {
    estimators::unbiased_degree_node_sampling(d_known, f_n).map_err(py_err)
}

#[pyfunction]
fn unbiased_degree_edge_sampling(d_known: usize, f_e: f64) -> PyResult<f64> {
    estimators::unbiased_degree_edge_sampling(d_known, f_e).map_err(py_err)
}

#[pyfunction]
fn unbiased_clustering_node_sampling(c_obs: f64, f_n: f64) -> PyResult<f64> {
    estimators::unbiased_clustering_node_sampling(c_obs, f_n).map(|c| c.value).map_err(py_err)
}

#[pyfunction]
fn unbiased_clustering_edge_sampling(c_obs: f64, f_e: f64) -> PyResult<f64> {
    estimators::unbiased_clustering_edge_sampling(c_obs, f_e).map(|c| c.value).map_err(py_err)
}

#[pyfunction]
fn triangle_survival_prob(f_n: f64) -> f64 {
    estimators::triangle_survival_prob(f_n)
}

#[pyfunction]
fn wedge_survival_prob(f_n: f64) -> f64 {
    estimators::wedge_survival_prob(f_n)
}

/// Empirical CCDF as `(x, P[X >= x])` pairs.
#[pyfunction]
fn ccdf(values: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    Ok(harness::ccdf(&values).map_err(py_err)?.into_iter().map(|p| (p.x, p.y)).collect())
}

/// Trapezoidal area under `(x, y)` points.
#[pyfunction]
fn auc(points: Vec<(f64, f64)>) -> f64 {
    let pts: Vec<harness::CurvePoint> = points.into_iter().map(|(x, y)| harness::CurvePoint { x, y }).collect();
    harness::auc(&pts)
}

#[pyfunction]
fn strategies() -> Vec<&'static str> {
    StrategyKind::ALL.iter().map(|k| k.name()).collect()
}

#[pyfunction]
fn samplers() -> Vec<&'static str> {
    let mut names: Vec<&str> = SamplerKind::ALL.iter().map(|k| k.name()).collect();
    names.push(SamplerKind::NodeFraction.name());
    names
}

#[pymodule]
fn pymaxoutprobe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Observation>()?;
    m.add_function(wrap_pyfunction!(erdos_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(planted_partition, m)?)?;
    m.add_function(wrap_pyfunction!(powerlaw_cluster, m)?)?;
    m.add_function(wrap_pyfunction!(affiliation, m)?)?;
    m.add_function(wrap_pyfunction!(random_bipartite, m)?)?;
    m.add_function(wrap_pyfunction!(unbiased_degree_node_sampling, m)?)?;
    m.add_function(wrap_pyfunction!(unbiased_degree_edge_sampling, m)?)?;
    m.add_function(wrap_pyfunction!(unbiased_clustering_node_sampling, m)?)?;
    m.add_function(wrap_pyfunction!(unbiased_clustering_edge_sampling, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_survival_prob, m)?)?;
    m.add_function(wrap_pyfunction!(wedge_survival_prob, m)?)?;
    m.add_function(wrap_pyfunction!(ccdf, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(strategies, m)?)?;
    m.add_function(wrap_pyfunction!(samplers, m)?)?;
    Ok(())
}
