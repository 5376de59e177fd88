//! Python bindings: topologies, GBSTs, schedules, the experiment harness and
//! the erasure codes.

use ::noisy_radio as nr;
use nr::algos;
use nr::coding::{self, RsPacket};
use nr::gbst;
use nr::graph::{Graph, NodeId};
use nr::harness;
use nr::sim::{self, FaultKind, FaultModel, RoundAction, RoundOutcome};
use nr::topo::{self, TopologySpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn err(e: nr::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn fault(kind: &str, p: f64) -> PyResult<FaultModel> {
    let kind = match kind {
        "faultless" => FaultKind::Faultless,
        "sender" => FaultKind::Sender,
        "receiver" => FaultKind::Receiver,
        other => return Err(PyValueError::new_err(format!("unknown fault kind {other}"))),
    };
    FaultModel::new(kind, p).map_err(err)
}

fn params(text: Option<&str>) -> PyResult<serde_json::Value> {
    text.map_or(Ok(serde_json::Value::Null), |t| serde_json::from_str(t).map_err(json_err))
}

/// A connected graph with a distinguished source.
#[pyclass(name = "Topology", frozen)]
struct PyTopology {
    inner: nr::graph::Topology,
    clusters: Option<Vec<Vec<NodeId>>>,
}

#[pymethods]
impl PyTopology {
    #[new]
    #[pyo3(signature = (n, edges, source = 0))]
    fn new(n: usize, edges: Vec<(NodeId, NodeId)>, source: NodeId) -> PyResult<Self> {
        let g = Graph::from_edges(n, &edges).map_err(err)?;
        Ok(Self { inner: nr::graph::Topology::new(g, source).map_err(err)?, clusters: None })
    }

    /// Builds a topology from a JSON generator spec such as `{"family": "path", "d": 8}`.
    #[staticmethod]
    fn generate(spec: &str) -> PyResult<Self> {
        let spec: TopologySpec = serde_json::from_str(spec).map_err(json_err)?;
        let g = topo::generate(&spec).map_err(err)?;
        Ok(Self { inner: g.topology, clusters: g.clusters })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(Self { inner: nr::graph::Topology::from_edge_list(text).map_err(err)?, clusters: None })
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn source(&self) -> NodeId {
        self.inner.source()
    }

    #[getter]
    fn diameter(&self) -> u32 {
        self.inner.eccentricity()
    }

    #[getter]
    fn clusters(&self) -> Option<Vec<Vec<NodeId>>> {
        self.clusters.clone()
    }

    fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.inner.graph().edges()
    }

    fn neighbors(&self, u: NodeId) -> PyResult<Vec<NodeId>> {
        if u >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {u} out of range")));
        }
        Ok(self.inner.graph().neighbors(u).to_vec())
    }

    fn levels(&self) -> Vec<u32> {
        self.inner.levels().to_vec()
    }

    /// One channel round: `broadcasting` nodes send their own id.
    /// Returns, per node, the sender heard or `None`.
    #[pyo3(signature = (broadcasting, kind = "faultless", p = 0.0, seed = 0, round = 1))]
    fn step(&self, broadcasting: Vec<NodeId>, kind: &str, p: f64, seed: u64, round: u64) -> PyResult<Vec<Option<NodeId>>> {
        let n = self.inner.node_count();
        let mut actions = vec![RoundAction::Silent; n];
        for &u in &broadcasting {
            if u >= n {
                return Err(PyValueError::new_err(format!("node {u} out of range")));
            }
            actions[u] = RoundAction::Broadcast(sim::Packet::message(u as u32, n));
        }
        let coins = nr::rng::Coins::new(seed);
        let out = sim::step(self.inner.graph(), &actions, &fault(kind, p)?, &coins, round).map_err(err)?;
        Ok(out
            .outcomes
            .into_iter()
            .map(|o| match o {
                Some(RoundOutcome::Received { from, .. }) => Some(from),
                _ => None,
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Topology(n={}, diameter={})", self.inner.node_count(), self.inner.eccentricity())
    }
}

/// Ranked BFS tree whose fast edges never collide (GBST).
#[pyclass(name = "Gbst", frozen)]
struct PyGbst {
    inner: gbst::Gbst,
}

#[pymethods]
impl PyGbst {
    #[new]
    fn new(topology: &PyTopology) -> Self {
        Self { inner: gbst::build_gbst(&topology.inner) }
    }

    #[getter]
    fn r_max(&self) -> u32 {
        self.inner.r_max()
    }

    fn parent(&self, u: NodeId) -> Option<NodeId> {
        self.inner.tree().parent(u)
    }

    fn level(&self, u: NodeId) -> u32 {
        self.inner.level(u)
    }

    fn rank(&self, u: NodeId) -> u32 {
        self.inner.rank(u)
    }

    fn is_fast(&self, u: NodeId) -> bool {
        self.inner.is_fast(u)
    }

    fn fast_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.inner.fast_edges()
    }

    /// Pairs of nodes breaking the GBST property; empty when valid.
    fn verify(&self) -> Vec<(NodeId, NodeId)> {
        gbst::verify_gbst(&self.inner)
    }

    /// `(rank, start_level, length)` of every fast stretch.
    fn stretches(&self) -> Vec<(u32, u32, u32)> {
        gbst::fast_stretches(&self.inner).iter().map(|s| (s.rank, s.start_level, s.length)).collect()
    }

    fn dump(&self) -> String {
        self.inner.dump()
    }
}

#[pyfunction]
fn policies() -> Vec<&'static str> {
    algos::NAMES.to_vec()
}

/// Runs one trial of a named schedule and returns its trace summary.
#[pyfunction]
#[pyo3(signature = (topology, policy, k = 1, kind = "faultless", p = 0.0, seed = 0, max_rounds = 1 << 24, params = None))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    topology: &PyTopology,
    policy: &str,
    k: usize,
    kind: &str,
    p: f64,
    seed: u64,
    max_rounds: u64,
    params: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let f = fault(kind, p)?;
    let t = &topology.inner;
    let mut b = algos::build(policy, &self::params(params)?, t, k, &f).map_err(err)?;
    let tr = sim::run_schedule(t, b.schedule.as_mut(), b.k, &f, seed, max_rounds).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("k_effective", b.k)?;
    d.set_item("params", loads(py, &b.params.to_string())?)?;
    d.set_item("rounds", tr.rounds)?;
    d.set_item("completion", tr.completion)?;
    d.set_item("complete_at", tr.complete_at.clone())?;
    d.set_item("first_informed", tr.first_informed.clone())?;
    d.set_item("broadcasts", tr.broadcasts)?;
    d.set_item("interference_events", tr.interference_events)?;
    d.set_item("max_packet_bits", tr.max_packet_bits)?;
    d.set_item("decode_errors", tr.decode_errors)?;
    Ok(d)
}

/// Runs an experiment config (JSON) and returns the result as a dict.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = harness::ExperimentConfig::from_json(config).map_err(err)?;
    let r = py.detach(|| harness::run_experiment(&cfg)).map_err(err)?;
    loads(py, &r.to_json())
}

/// Re-runs a result JSON from its embedded config.
#[pyfunction]
fn rerun<'py>(py: Python<'py>, result: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| harness::rerun(result)).map_err(err)?;
    loads(py, &r.to_json())
}

/// Sweeps one axis (`n`, `D`, `k` or `p`) and returns the CSV table.
#[pyfunction]
fn sweep(py: Python<'_>, config: &str, axis: &str, values: Vec<f64>) -> PyResult<String> {
    let cfg = harness::ExperimentConfig::from_json(config).map_err(err)?;
    let axis: harness::Axis = axis.parse().map_err(err)?;
    let rows = py.detach(|| harness::sweep(&cfg, axis, &values)).map_err(err)?;
    Ok(harness::sweep_csv(axis, &rows))
}

/// Routing-vs-coding throughput comparison from a gap config (JSON).
#[pyfunction]
fn gap<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg: harness::GapConfig = serde_json::from_str(config).map_err(json_err)?;
    let r = py.detach(|| harness::gap_report(&cfg)).map_err(err)?;
    loads(py, &serde_json::to_string(&r).map_err(json_err)?)
}

/// `(budget, failure bound)` for `count` geometric trials.
#[pyfunction]
#[pyo3(signature = (count, delta, p = 0.5))]
fn chernoff_budget(count: u64, delta: f64, p: f64) -> PyResult<(f64, f64)> {
    let b = harness::geometric_chernoff_budget(count, delta, p).map_err(err)?;
    Ok((b.budget, b.bound))
}

/// Reed-Solomon encodes equal-length messages into `m` `(index, symbols)` packets.
#[pyfunction]
fn rs_encode(messages: Vec<Vec<u8>>, m: usize) -> PyResult<Vec<(u32, Vec<u16>)>> {
    Ok(coding::rs_encode(&messages, m).map_err(err)?.into_iter().map(|p| (p.index, p.symbols)).collect())
}

#[pyfunction]
fn rs_decode<'py>(py: Python<'py>, packets: Vec<(u32, Vec<u16>)>, k: usize, msg_len: usize) -> PyResult<Vec<Bound<'py, PyBytes>>> {
    let packets: Vec<RsPacket> = packets.into_iter().map(|(index, symbols)| RsPacket { index, symbols }).collect();
    let out = coding::rs_decode(&packets, k, msg_len).map_err(err)?;
    Ok(out.iter().map(|m| PyBytes::new(py, m)).collect())
}

/// Receives `received` random combinations of the messages; returns the
/// decoded messages or `None` if the rank stayed short.
#[pyfunction]
#[pyo3(signature = (messages, received, seed = 0))]
fn rlnc_roundtrip<'py>(py: Python<'py>, messages: Vec<Vec<u8>>, received: usize, seed: u64) -> PyResult<Option<Vec<Bound<'py, PyBytes>>>> {
    if messages.is_empty() || messages.iter().any(|m| m.len() != messages[0].len()) {
        return Err(PyValueError::new_err("need equal-length messages"));
    }
    let full = coding::RlncState::with_sources(&messages);
    let mut rng = nr::rng::Coins::new(seed).stream(0, nr::rng::Purpose::Encode);
    let mut rx = coding::RlncState::new(messages.len(), messages[0].len());
    for _ in 0..received {
        if let Some(p) = coding::rlnc_encode(&full, &mut rng) {
            rx.absorb(&p).map_err(err)?;
        }
    }
    if !rx.is_full() {
        return Ok(None);
    }
    Ok(Some(rx.decode().map_err(err)?.iter().map(|m| PyBytes::new(py, m)).collect()))
}

#[pymodule(name = "noisy_radio")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", harness::VERSION)?;
    m.add_class::<PyTopology>()?;
    m.add_class::<PyGbst>()?;
    m.add_function(wrap_pyfunction!(policies, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(rerun, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_budget, m)?)?;
    m.add_function(wrap_pyfunction!(rs_encode, m)?)?;
    m.add_function(wrap_pyfunction!(rs_decode, m)?)?;
    m.add_function(wrap_pyfunction!(rlnc_roundtrip, m)?)?;
    Ok(())
}
