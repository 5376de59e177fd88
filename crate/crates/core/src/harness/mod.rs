//! Trials, sweeps and gap ratios.

pub mod stats;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algos;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::sim::{run_schedule, FaultModel};
use crate::topo::{generate, TopologySpec};

pub use stats::{fit_scaling, geometric_chernoff_budget, mean, quantile, ChernoffBudget, Fit, FitModel};

/// Written into every result.
pub const VERSION: &str = concat!("noisy-radio ", env!("CARGO_PKG_VERSION"));

fn default_trials() -> u64 {
    200
}

fn default_max_rounds() -> u64 {
    1 << 24
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub policy: String,
    #[serde(default)]
    pub params: Value,
    pub fault: FaultModel,
    pub k: usize,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
    /// Target failure probability; `None` for `1/k`.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn new(topology: TopologySpec, policy: &str, fault: FaultModel, k: usize) -> Self {
        Self {
            topology,
            policy: policy.into(),
            params: Value::Null,
            fault,
            k,
            trials: default_trials(),
            seed: 0,
            max_rounds: default_max_rounds(),
            delta: None,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.k < 1 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.max_rounds < 1 {
            return Err(Error::Config("max_rounds must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::Config(format!("delta must be in (0, 1), got {d}")));
            }
        }
        self.fault.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub seed: u64,
    /// Completion round, or rounds executed when censored.
    pub rounds: u64,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub version: String,
    pub config: ExperimentConfig,
    /// Constants the schedule resolved.
    pub params: Value,
    pub n: usize,
    pub diameter: u32,
    /// Messages actually broadcast (`k` times the copy factor for transforms).
    pub k_effective: usize,
    pub trials: Vec<Trial>,
    pub success_rate: f64,
    /// Level of the quantile behind `throughput`.
    pub quantile_level: f64,
    /// Censored trials counted as `max_rounds`.
    pub quantile_rounds: u64,
    pub median_rounds: u64,
    /// Over completed trials.
    pub mean_rounds: Option<f64>,
    pub throughput: Option<f64>,
    pub max_packet_bits: u64,
    pub decode_errors: u64,
    pub interference_events: u64,
}

impl ExperimentResult {
    pub fn completed_rounds(&self) -> Vec<u64> {
        self.trials.iter().filter(|t| t.completed).map(|t| t.rounds).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

pub fn build_topology(spec: &TopologySpec) -> Result<Topology> {
    Ok(generate(spec)?.topology)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let topology = build_topology(&cfg.topology)?;
    run_on(cfg, &topology)
}

/// [`run_experiment`] on an already generated topology.
pub fn run_on(cfg: &ExperimentConfig, topology: &Topology) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut trials = Vec::with_capacity(cfg.trials as usize);
    let (mut bits, mut errors, mut interference) = (0, 0, 0);
    let mut resolved = (Value::Null, cfg.k);
    for t in 0..cfg.trials {
        let seed = cfg.seed.wrapping_add(t);
        let mut b = algos::build(&cfg.policy, &cfg.params, topology, cfg.k, &cfg.fault)?;
        let tr = run_schedule(topology, b.schedule.as_mut(), b.k, &cfg.fault, seed, cfg.max_rounds)?;
        bits = bits.max(tr.max_packet_bits);
        errors += tr.decode_errors;
        interference += tr.interference_events;
        trials.push(Trial { seed, rounds: tr.completion.unwrap_or(tr.rounds), completed: tr.completed() });
        resolved = (b.params, b.k);
    }
    let (params, k_eff) = resolved;
    let censored: Vec<u64> = trials.iter().map(|t| if t.completed { t.rounds } else { cfg.max_rounds }).collect();
    let delta = cfg.delta.unwrap_or(1.0 / k_eff as f64).min(0.5);
    let level = 1.0 - delta;
    let q = quantile(&censored, level).expect("at least one trial");
    let median = quantile(&censored, 0.5).expect("at least one trial");
    let done: Vec<u64> = trials.iter().filter(|t| t.completed).map(|t| t.rounds).collect();
    let throughput = (!done.is_empty()).then(|| k_eff as f64 / q.max(1) as f64);
    Ok(ExperimentResult {
        version: VERSION.into(),
        config: cfg.clone(),
        params,
        n: topology.node_count(),
        diameter: topology.eccentricity(),
        k_effective: k_eff,
        success_rate: done.len() as f64 / trials.len() as f64,
        trials,
        quantile_level: level,
        quantile_rounds: q,
        median_rounds: median,
        mean_rounds: mean(&done),
        throughput,
        max_packet_bits: bits,
        decode_errors: errors,
        interference_events: interference,
    })
}

/// Re-runs the config embedded in a result file.
pub fn rerun(result_json: &str) -> Result<ExperimentResult> {
    let v: Value = serde_json::from_str(result_json)?;
    let cfg: ExperimentConfig = serde_json::from_value(v.get("config").cloned().unwrap_or(Value::Null))?;
    run_experiment(&cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    N,
    D,
    K,
    P,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Axis::N),
            "D" | "d" => Ok(Axis::D),
            "k" => Ok(Axis::K),
            "p" => Ok(Axis::P),
            _ => Err(Error::Config(format!("unknown sweep axis {s:?}; use n, D, k or p"))),
        }
    }
}

fn as_count(axis: Axis, v: f64) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(Error::Config(format!("{axis:?} value {v} is not a count")));
    }
    Ok(v as usize)
}

/// `cfg` with `axis` set to `value`.
pub fn apply_axis(cfg: &ExperimentConfig, axis: Axis, value: f64) -> Result<ExperimentConfig> {
    let mut c = cfg.clone();
    match axis {
        Axis::K => c.k = as_count(axis, value)?,
        Axis::P => c.fault.p = value,
        Axis::D => {
            let v = as_count(axis, value)?;
            match &mut c.topology {
                TopologySpec::Path { d } | TopologySpec::Layered { d, .. } => *d = v,
                TopologySpec::RankedPath { d, pad, .. } => {
                    // Padding absorbs the change so n stays fixed.
                    let total = *d + *pad;
                    if v > total {
                        return Err(Error::Config(format!("D={v} does not fit in the padded ranked path")));
                    }
                    *pad = total - v;
                    *d = v;
                }
                TopologySpec::BinaryTree { depth } => *depth = v,
                other => return Err(Error::Config(format!("axis D does not apply to {other:?}"))),
            }
        }
        Axis::N => {
            let v = as_count(axis, value)?;
            match &mut c.topology {
                TopologySpec::Star { n } | TopologySpec::RandomConnected { n, .. } => *n = v,
                TopologySpec::Path { d } => *d = v.saturating_sub(1),
                TopologySpec::Wct { seed, .. } => c.topology = TopologySpec::wct_for(v, *seed),
                other => return Err(Error::Config(format!("axis n does not apply to {other:?}"))),
            }
        }
    }
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: ExperimentResult,
}

pub fn sweep(cfg: &ExperimentConfig, axis: Axis, values: &[f64]) -> Result<Vec<SweepRow>> {
    let cfgs: Vec<_> = values.iter().map(|&v| apply_axis(cfg, axis, v)).collect::<Result<_>>()?;
    cfgs.iter()
        .zip(values)
        .map(|(c, &value)| Ok(SweepRow { value, result: run_experiment(c)? }))
        .collect()
}

pub const SWEEP_HEADER: &str =
    "axis,value,n,diameter,k,k_effective,trials,success_rate,median_rounds,mean_rounds,quantile_level,quantile_rounds,throughput,max_packet_bits";

pub fn sweep_csv(axis: Axis, rows: &[SweepRow]) -> String {
    let axis = match axis {
        Axis::N => "n",
        Axis::D => "D",
        Axis::K => "k",
        Axis::P => "p",
    };
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    for r in rows {
        let x = &r.result;
        out.push_str(&format!(
            "{axis},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.value,
            x.n,
            x.diameter,
            x.config.k,
            x.k_effective,
            x.trials.len(),
            x.success_rate,
            x.median_rounds,
            opt(x.mean_rounds),
            x.quantile_level,
            x.quantile_rounds,
            opt(x.throughput),
            x.max_packet_bits
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub policy: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    pub topology: TopologySpec,
    pub fault: FaultModel,
    pub k: usize,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
    #[serde(default)]
    pub delta: Option<f64>,
    pub routing: Side,
    pub coding: Side,
}

impl GapConfig {
    pub fn side(&self, s: &Side) -> ExperimentConfig {
        ExperimentConfig {
            topology: self.topology.clone(),
            policy: s.policy.clone(),
            params: s.params.clone(),
            fault: self.fault,
            k: self.k,
            trials: self.trials,
            seed: self.seed,
            max_rounds: self.max_rounds,
            delta: self.delta,
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub version: String,
    pub routing_throughput: f64,
    pub coding_throughput: f64,
    /// Coding over routing throughput.
    pub ratio: f64,
    pub routing: ExperimentResult,
    pub coding: ExperimentResult,
}

pub fn gap_report(cfg: &GapConfig) -> Result<GapReport> {
    let topology = build_topology(&cfg.topology)?;
    let routing = run_on(&cfg.side(&cfg.routing), &topology)?;
    let coding = run_on(&cfg.side(&cfg.coding), &topology)?;
    let (Some(r), Some(c)) = (routing.throughput, coding.throughput) else {
        return Err(Error::UndefinedGap(format!(
            "success rates: routing {}, coding {}",
            routing.success_rate, coding.success_rate
        )));
    };
    Ok(GapReport { version: VERSION.into(), routing_throughput: r, coding_throughput: c, ratio: c / r, routing, coding })
}
