//! Schedules by name with JSON parameters.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::bipartite::{default_sub_len, BipartiteRepeatDecay, LayeredRouting, Pipelined};
use super::decay::{default_phase, Decay};
use super::fastbc::{Fastbc, Repeat, RobustFastbc};
use super::star::{Budget, Repetition, Retransmit, RsBroadcast, Shape};
use super::transform::{FaultCodingTransform, SenderFaultRoutingTransform};
use crate::error::{Error, Result};
use crate::gbst::{block_partition, build_gbst, default_block_size, DEFAULT_C};
use crate::graph::Topology;
use crate::sim::{FaultModel, Oblivious, Schedule};

pub const NAMES: &[&str] = &[
    "decay",
    "fastbc",
    "robust-fastbc",
    "star-adaptive",
    "single-link-adaptive",
    "single-link-repetition",
    "rs-star",
    "rs-single-link",
    "bipartite",
    "pipeline",
    "layered-routing",
    "xform-routing",
    "xform-coding",
    "rlnc-decay",
    "rlnc-fastbc",
    "rlnc-robust-fastbc",
];

/// A schedule ready to run, the message count to run it with, and every
/// constant it resolved.
pub struct Built {
    pub schedule: Box<dyn Schedule>,
    pub k: usize,
    pub params: Value,
}

impl std::fmt::Debug for Built {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Built").field("k", &self.k).field("params", &self.params).finish()
    }
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
struct Waves {
    phase: Option<u32>,
    repeat: Option<u32>,
    s: Option<u32>,
    c: Option<u32>,
    width: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Layers {
    phase: Option<u32>,
    sub_len: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Source {
    rounds: Option<u64>,
    reps: Option<u64>,
    packets: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Xform {
    base: String,
    base_params: Value,
    x: usize,
    eta: f64,
    slack: Option<u64>,
    packets: Option<usize>,
}

impl Default for Xform {
    fn default() -> Self {
        Self { base: "fastbc".into(), base_params: Value::Null, x: 1, eta: 0.25, slack: None, packets: None }
    }
}

fn parse<T: DeserializeOwned + Default>(name: &str, params: &Value) -> Result<T> {
    if params.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(params.clone()).map_err(|e| Error::Config(format!("{name}: {e}")))
}

fn wave_policy(name: &str, w: &Waves, t: &Topology, robust: bool) -> Result<(Box<dyn crate::sim::NodePolicy>, Value)> {
    let n = t.node_count();
    let phase = w.phase.unwrap_or_else(|| default_phase(n));
    let repeat = w.repeat.unwrap_or(1);
    if phase == 0 || repeat == 0 {
        return Err(Error::Config(format!("{name}: phase and repeat must be positive")));
    }
    let g = build_gbst(t);
    if !robust {
        let p = Repeat { base: Fastbc::new(&g, phase), factor: repeat };
        return Ok((Box::new(p), json!({ "phase": phase, "repeat": repeat, "r_max": g.r_max() })));
    }
    let s = w.s.unwrap_or_else(|| default_block_size(n));
    let c = w.c.unwrap_or(DEFAULT_C);
    let plan = block_partition(&g, s)?.with_c(c)?;
    let p = Repeat { base: RobustFastbc::new(&g, &plan, phase), factor: repeat };
    Ok((Box::new(p), json!({ "phase": phase, "repeat": repeat, "s": s, "c": c, "r_max": g.r_max() })))
}

fn shape_of(t: &Topology) -> Result<Shape> {
    if t.is_single_link() {
        Ok(Shape::SingleLink)
    } else if t.is_star() {
        Ok(Shape::Star)
    } else {
        Err(Error::TopologyMismatch("coding transform needs a star or a single link".into()))
    }
}

/// Builds schedule `name` for `k` messages on `topology` under `fault`.
pub fn build(name: &str, params: &Value, topology: &Topology, k: usize, fault: &FaultModel) -> Result<Built> {
    let n = topology.node_count();
    let built = |schedule: Box<dyn Schedule>, params: Value| Ok(Built { schedule, k, params });
    match name {
        "decay" | "rlnc-decay" => {
            let w: Waves = parse(name, params)?;
            let phase = w.phase.unwrap_or_else(|| default_phase(n));
            if phase == 0 {
                return Err(Error::Config("decay: phase must be positive".into()));
            }
            if name == "decay" {
                built(Box::new(Oblivious::routing(Decay::new(phase))), json!({ "phase": phase }))
            } else {
                let width = w.width.unwrap_or(1);
                built(Box::new(Oblivious::rlnc(Decay::new(phase), width)), json!({ "phase": phase, "width": width }))
            }
        }
        "fastbc" | "robust-fastbc" | "rlnc-fastbc" | "rlnc-robust-fastbc" => {
            let w: Waves = parse(name, params)?;
            let (policy, mut resolved) = wave_policy(name, &w, topology, name.ends_with("robust-fastbc"))?;
            if name.starts_with("rlnc") {
                let width = w.width.unwrap_or(1);
                resolved["width"] = json!(width);
                built(Box::new(Oblivious::rlnc(policy, width)), resolved)
            } else {
                built(Box::new(Oblivious::routing(policy)), resolved)
            }
        }
        "star-adaptive" | "single-link-adaptive" => {
            let s: Source = parse(name, params)?;
            let mut r = if name == "star-adaptive" { Retransmit::star() } else { Retransmit::single_link(fault.loss()) };
            if let Some(rounds) = s.rounds {
                r = r.with_budget(Budget::Rounds(rounds));
            }
            built(Box::new(r), json!({ "rounds": s.rounds }))
        }
        "single-link-repetition" => {
            let s: Source = parse(name, params)?;
            let reps = s.reps.unwrap_or_else(|| Repetition::reps_for(k));
            built(Box::new(Repetition::new(Some(reps))), json!({ "reps": reps }))
        }
        "rs-star" | "rs-single-link" => {
            let s: Source = parse(name, params)?;
            let shape = if name == "rs-star" { Shape::Star } else { Shape::SingleLink };
            let m = s.packets.unwrap_or_else(|| RsBroadcast::packets_for(shape, k, topology));
            let r = if shape == Shape::Star { RsBroadcast::star() } else { RsBroadcast::single_link() };
            built(Box::new(r.with_packets(m)), json!({ "packets": m }))
        }
        "bipartite" | "pipeline" | "layered-routing" => {
            let l: Layers = parse(name, params)?;
            let phase = l.phase.unwrap_or_else(|| default_phase(n));
            let sub_len = l.sub_len.unwrap_or_else(|| default_sub_len(n, phase));
            let resolved = json!({ "phase": phase, "sub_len": sub_len });
            let (p, s) = (Some(phase), Some(sub_len));
            match name {
                "bipartite" => built(Box::new(BipartiteRepeatDecay::new(p, s)), resolved),
                "pipeline" => built(Box::new(Pipelined::new(p, s)), resolved),
                _ => built(Box::new(LayeredRouting::new(p, s)), resolved),
            }
        }
        "xform-routing" => {
            let x: Xform = parse(name, params)?;
            if x.base.starts_with("xform") || x.base.starts_with("rlnc") || x.base.starts_with("rs") {
                return Err(Error::Config(format!("xform-routing: unsupported base {}", x.base)));
            }
            let base = build(&x.base, &x.base_params, topology, 1, &FaultModel::faultless())?;
            let mut t = SenderFaultRoutingTransform::new(base.schedule, x.x, x.eta, fault)?;
            if let Some(s) = x.slack {
                t = t.with_slack(s);
            }
            let resolved = json!({
                "base": x.base, "base_params": base.params, "x": x.x, "eta": x.eta,
                "slack": x.slack, "meta_len": t.meta_len(),
            });
            Ok(Built { schedule: Box::new(t), k: k * x.x, params: resolved })
        }
        "xform-coding" => {
            let x: Xform = parse(name, params)?;
            let mut t = FaultCodingTransform::new(shape_of(topology)?, x.x, x.eta, fault)?;
            if let Some(m) = x.packets {
                t = t.with_base_packets(m);
            }
            let resolved = json!({ "x": x.x, "eta": x.eta, "packets": x.packets, "meta_len": t.meta_len() });
            Ok(Built { schedule: Box::new(t), k: k * x.x, params: resolved })
        }
        _ => Err(Error::Config(format!("unknown schedule {name:?}; known: {}", NAMES.join(", ")))),
    }
}
