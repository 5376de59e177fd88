//! Layer-to-layer adaptive routing: repeated Decay sub-schedules, pipelined or sequential.

use super::decay::{decay_coin, default_phase};
use crate::error::{Error, Result};
use crate::graph::{NodeId, Topology};
use crate::sim::{Directive, Memory, Planned, RoundReport, RoutingMemory, Schedule, Setup, View};

/// Decay sub-schedule length `phase * ceil(log2 n)`.
pub fn default_sub_len(n: usize, phase: u32) -> u64 {
    phase as u64 * ((n.max(2) as f64).log2().ceil() as u64)
}

/// Sub-schedule cap `ceil(2k / (1 - 1/n))`.
pub fn default_cap(k: usize, n: usize) -> u64 {
    (2.0 * k as f64 / (1.0 - 1.0 / n.max(2) as f64)).ceil() as u64
}

/// Runs one message at a time from `senders` to `receivers`, repeating each
/// Decay sub-schedule until every receiver has the message.
#[derive(Debug, Clone)]
pub struct BipartiteRunner {
    senders: Vec<NodeId>,
    receivers: Vec<NodeId>,
    messages: Vec<u32>,
    cursor: usize,
    phase: u32,
    sub_len: u64,
    cap: u64,
    runs: u64,
    sub_round: u64,
    missing: usize,
    primed: bool,
}

impl BipartiteRunner {
    pub fn new(senders: Vec<NodeId>, receivers: Vec<NodeId>, messages: Vec<u32>, phase: u32, sub_len: u64, cap: u64) -> Self {
        Self {
            senders,
            receivers,
            messages,
            cursor: 0,
            phase: phase.max(1),
            sub_len: sub_len.max(1),
            cap,
            runs: 0,
            sub_round: 0,
            missing: 0,
            primed: false,
        }
    }

    pub fn done(&self) -> bool {
        self.cursor >= self.messages.len() || (self.runs >= self.cap && self.sub_round == 0)
    }

    /// Sub-schedules started so far.
    pub fn runs(&self) -> u64 {
        self.runs
    }

    fn count_missing(&self, view: &View<'_>, msg: u32) -> usize {
        self.receivers.iter().filter(|&&v| !view.knowledge.knows(v, msg)).count()
    }

    /// Skips messages every receiver already has.
    fn prime(&mut self, view: &View<'_>) {
        while self.cursor < self.messages.len() {
            self.missing = self.count_missing(view, self.messages[self.cursor]);
            if self.missing > 0 {
                break;
            }
            self.cursor += 1;
        }
        self.primed = true;
    }

    pub fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        if !self.primed {
            self.prime(view);
        }
        if self.done() {
            return;
        }
        let msg = self.messages[self.cursor];
        let i = (self.sub_round % self.phase as u64) as u32 + 1;
        for &s in &self.senders {
            if decay_coin(i, round, s, view.coins) {
                out.push(Planned { node: s, directive: Directive::Message(msg), wave: false });
            }
        }
    }

    pub fn after_round(&mut self, report: &RoundReport<'_>, view: &View<'_>) {
        if self.done() {
            return;
        }
        let msg = self.messages[self.cursor];
        if self.sub_round == 0 {
            self.runs += 1;
        }
        self.sub_round += 1;
        if !report.deliveries.is_empty() {
            self.missing = self.count_missing(view, msg);
        }
        if self.missing == 0 {
            self.cursor += 1;
            self.sub_round = 0;
            self.prime(view);
        } else if self.sub_round == self.sub_len {
            self.sub_round = 0;
        }
    }
}

/// Standalone two-layer schedule: source layer to the layer below it.
#[derive(Debug, Clone, Default)]
pub struct BipartiteRepeatDecay {
    pub phase: Option<u32>,
    pub sub_len: Option<u64>,
    pub senders: Option<Vec<NodeId>>,
    pub receivers: Option<Vec<NodeId>>,
    runner: Option<BipartiteRunner>,
}

impl BipartiteRepeatDecay {
    pub fn new(phase: Option<u32>, sub_len: Option<u64>) -> Self {
        Self { phase, sub_len, ..Default::default() }
    }

    pub fn runner(&self) -> Option<&BipartiteRunner> {
        self.runner.as_ref()
    }
}

impl Schedule for BipartiteRepeatDecay {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        let t = setup.topology;
        let n = t.node_count();
        let layers = t.bfs_layers();
        let senders = self.senders.clone().unwrap_or_else(|| layers[0].clone());
        let receivers = self.receivers.clone().unwrap_or_else(|| layers.get(1).cloned().unwrap_or_default());
        if let Some(&u) = senders.iter().find(|&&u| u != t.source()) {
            return Err(Error::Precondition(format!("sender {u} does not hold all messages")));
        }
        let phase = self.phase.unwrap_or_else(|| default_phase(n));
        let sub_len = self.sub_len.unwrap_or_else(|| default_sub_len(n, phase));
        let msgs = (0..setup.k as u32).collect();
        self.runner = Some(BipartiteRunner::new(senders, receivers, msgs, phase, sub_len, default_cap(setup.k, n)));
        Ok(Box::new(RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        if let Some(r) = self.runner.as_mut() {
            r.plan(round, view, out);
        }
    }

    fn on_round_end(&mut self, report: &RoundReport<'_>, view: &View<'_>) {
        if let Some(r) = self.runner.as_mut() {
            r.after_round(report, view);
        }
    }

    fn halted(&self) -> bool {
        self.runner.as_ref().is_some_and(|r| r.done())
    }
}

/// Active `(sender layer, batch)` pairs per meta-round (both 0-based) for a
/// `d`-layer pipeline: layer `l` runs batch `j` in meta-round `3j + l`.
pub fn pipeline_activity(d: usize) -> Vec<Vec<(usize, usize)>> {
    let metas = if d == 0 { 0 } else { 4 * d - 3 };
    (0..metas)
        .map(|m| {
            (0..d)
                .filter(|&l| m >= l && (m - l) % 3 == 0 && (m - l) / 3 < d)
                .map(|l| (l, (m - l) / 3))
                .collect()
        })
        .collect()
}

/// Pairs of active layers within distance 2 of each other in the same meta-round.
pub fn activity_violations(activity: &[Vec<(usize, usize)>]) -> usize {
    activity
        .iter()
        .map(|act| {
            let mut bad = 0;
            for (i, a) in act.iter().enumerate() {
                for b in &act[i + 1..] {
                    if a.0.abs_diff(b.0) <= 2 && a.1 != b.1 {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum()
}

/// Batches pipelined down the BFS layering, one bipartite runner per active layer.
#[derive(Debug, Clone, Default)]
pub struct Pipelined {
    pub phase: Option<u32>,
    pub sub_len: Option<u64>,
    layers: Vec<Vec<NodeId>>,
    batches: Vec<Vec<u32>>,
    activity: Vec<Vec<(usize, usize)>>,
    phase_used: u32,
    sub_used: u64,
    cap: u64,
    meta_len: u64,
    runners: Vec<BipartiteRunner>,
}

impl Pipelined {
    pub fn new(phase: Option<u32>, sub_len: Option<u64>) -> Self {
        Self { phase, sub_len, ..Default::default() }
    }

    pub fn meta_len(&self) -> u64 {
        self.meta_len
    }

    pub fn meta_rounds(&self) -> u64 {
        self.activity.len() as u64
    }
}

impl Schedule for Pipelined {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        let t: &Topology = setup.topology;
        let n = t.node_count();
        let d = t.eccentricity() as usize;
        if d == 0 {
            return Err(Error::TopologyMismatch("pipeline needs at least two layers".into()));
        }
        self.layers = t.bfs_layers();
        let kp = setup.k.div_ceil(d);
        self.batches = (0..d)
            .map(|j| ((j * kp).min(setup.k)..((j + 1) * kp).min(setup.k)).map(|i| i as u32).collect())
            .collect();
        self.activity = pipeline_activity(d);
        self.phase_used = self.phase.unwrap_or_else(|| default_phase(n));
        self.sub_used = self.sub_len.unwrap_or_else(|| default_sub_len(n, self.phase_used));
        self.cap = default_cap(kp, n);
        self.meta_len = self.cap * self.sub_used;
        self.runners.clear();
        Ok(Box::new(RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        let meta = ((round - 1) / self.meta_len) as usize;
        if (round - 1) % self.meta_len == 0 {
            self.runners = self.activity[meta]
                .iter()
                .filter(|&&(_, j)| !self.batches[j].is_empty())
                .map(|&(l, j)| {
                    BipartiteRunner::new(
                        self.layers[l].clone(),
                        self.layers[l + 1].clone(),
                        self.batches[j].clone(),
                        self.phase_used,
                        self.sub_used,
                        self.cap,
                    )
                })
                .collect();
        }
        for r in &mut self.runners {
            r.plan(round, view, out);
        }
    }

    fn on_round_end(&mut self, report: &RoundReport<'_>, view: &View<'_>) {
        for r in &mut self.runners {
            r.after_round(report, view);
        }
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.meta_len * self.activity.len() as u64)
    }
}

/// One layer at a time: all messages from layer `l` to `l + 1`, then move on.
#[derive(Debug, Clone, Default)]
pub struct LayeredRouting {
    pub phase: Option<u32>,
    pub sub_len: Option<u64>,
    layers: Vec<Vec<NodeId>>,
    current: usize,
    runner: Option<BipartiteRunner>,
    params: (u32, u64, u64),
    k: usize,
}

impl LayeredRouting {
    pub fn new(phase: Option<u32>, sub_len: Option<u64>) -> Self {
        Self { phase, sub_len, ..Default::default() }
    }

    fn start(&mut self, l: usize) {
        let (phase, sub, cap) = self.params;
        self.current = l;
        self.runner = (l + 1 < self.layers.len()).then(|| {
            BipartiteRunner::new(self.layers[l].clone(), self.layers[l + 1].clone(), (0..self.k as u32).collect(), phase, sub, cap)
        });
    }
}

impl Schedule for LayeredRouting {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        let n = setup.topology.node_count();
        self.layers = setup.topology.bfs_layers();
        self.k = setup.k;
        let phase = self.phase.unwrap_or_else(|| default_phase(n));
        let sub = self.sub_len.unwrap_or_else(|| default_sub_len(n, phase));
        self.params = (phase, sub, default_cap(setup.k, n));
        self.start(0);
        Ok(Box::new(RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        while self.runner.as_ref().is_some_and(|r| r.done()) {
            self.start(self.current + 1);
        }
        if let Some(r) = self.runner.as_mut() {
            r.plan(round, view, out);
        }
    }

    fn on_round_end(&mut self, report: &RoundReport<'_>, view: &View<'_>) {
        if let Some(r) = self.runner.as_mut() {
            r.after_round(report, view);
        }
    }

    fn halted(&self) -> bool {
        self.runner.is_none()
    }
}
