//! Meta-round transformations of faultless schedules into fault-tolerant ones.

use std::collections::HashSet;

use super::star::Shape;
use crate::coding::rs::MAX_PACKETS;
use crate::coding::{rs_decode_symbols, Interpolant, RsPacket};
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::sim::{
    run_schedule_with, Directive, FaultKind, FaultModel, Knowledge, Memory, Packet, Payload, Planned, RoundReport,
    RunOptions, Schedule, Setup, SimTrace, View,
};

fn ceil_tol(v: f64) -> u64 {
    (v - 1e-9).ceil().max(1.0) as u64
}

/// Meta-round length `ceil(x (1 + eta) / (1 - p))` of the routing transform.
pub fn routing_meta_len(x: usize, eta: f64, p: f64) -> u64 {
    ceil_tol(x as f64 * (1.0 + eta) / (1.0 - p))
}

/// Outer packet count `ceil(x / ((1 - p)(1 - eta)))` of the coding transform.
pub fn coding_meta_len(x: usize, eta: f64, p: f64) -> u64 {
    ceil_tol(x as f64 / ((1.0 - p) * (1.0 - eta)))
}

fn check_params(x: usize, eta: f64, fault: &FaultModel) -> Result<()> {
    fault.validate()?;
    if x == 0 {
        return Err(Error::Parameter("x must be at least 1".into()));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("eta must be non-negative, got {eta}")));
    }
    Ok(())
}

/// Replays a faultless routing schedule with every message split into `x`
/// copies; each base broadcaster sends its copies until its own transmission
/// goes through.
pub struct SenderFaultRoutingTransform {
    base: Box<dyn Schedule>,
    x: usize,
    eta: f64,
    meta_len: u64,
    base_max_rounds: u64,
    slack: Option<u64>,
    base_trace: Option<SimTrace>,
    replay: Vec<Vec<(NodeId, u32)>>,
    /// Per node: `(message, next copy)` for the current meta-round.
    cursor: Vec<Option<(u32, usize)>>,
    active: Vec<NodeId>,
}

impl SenderFaultRoutingTransform {
    pub fn new(base: Box<dyn Schedule>, x: usize, eta: f64, fault: &FaultModel) -> Result<Self> {
        check_params(x, eta, fault)?;
        if fault.kind == FaultKind::Receiver {
            return Err(Error::ModelMismatch("the routing transform handles sender faults only".into()));
        }
        Ok(Self {
            base,
            x,
            eta,
            meta_len: routing_meta_len(x, eta, fault.loss()),
            base_max_rounds: 1 << 22,
            slack: None,
            base_trace: None,
            replay: Vec::new(),
            cursor: Vec::new(),
            active: Vec::new(),
        })
    }

    pub fn with_base_max_rounds(mut self, rounds: u64) -> Self {
        self.base_max_rounds = rounds;
        self
    }

    /// Base rounds replayed past the base completion round (default `4 L_phase`).
    pub fn with_slack(mut self, rounds: u64) -> Self {
        self.slack = Some(rounds);
        self
    }

    pub fn meta_len(&self) -> u64 {
        self.meta_len
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Length of the replayed base schedule of the faultless base run.
    pub fn base_rounds(&self) -> u64 {
        self.replay.len() as u64
    }

    pub fn base_trace(&self) -> Option<&SimTrace> {
        self.base_trace.as_ref()
    }
}

impl Schedule for SenderFaultRoutingTransform {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        if setup.k % self.x != 0 {
            return Err(Error::Contract(format!("k={} is not a multiple of x={}", setup.k, self.x)));
        }
        let k_base = setup.k / self.x;
        let seed = setup.coins.derive(0xba5e).seed();
        let trace = run_schedule_with(
            setup.topology,
            self.base.as_mut(),
            k_base,
            &FaultModel::faultless(),
            seed,
            self.base_max_rounds,
            RunOptions::full(),
        )?;
        let Some(done) = trace.completion else {
            return Err(Error::Precondition(format!("base schedule did not complete within {} rounds", self.base_max_rounds)));
        };
        let slack = self.slack.unwrap_or_else(|| 4 * super::default_phase(setup.topology.node_count()) as u64);
        let trace = if slack == 0 {
            trace
        } else {
            let opts = RunOptions { stop_on_completion: false, ..RunOptions::full() };
            run_schedule_with(setup.topology, self.base.as_mut(), k_base, &FaultModel::faultless(), seed, done + slack, opts)?
        };
        let len = (done + slack).min(trace.rounds) as usize;
        let log = trace.log.as_ref().expect("full log requested");
        self.replay = log
            .iter()
            .take(len)
            .map(|r| {
                r.broadcasts
                    .iter()
                    .filter_map(|(u, p, _)| match p.payload {
                        Payload::Message(i) => Some((*u, i)),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        if self.replay.iter().flatten().count() != log.iter().take(len).map(|r| r.broadcasts.len()).sum::<usize>() {
            return Err(Error::Precondition("base schedule must be a routing schedule".into()));
        }
        self.base_trace = Some(trace);
        self.cursor = vec![None; setup.topology.node_count()];
        Ok(Box::new(crate::sim::RoutingMemory::new(setup.k)))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        let b = ((round - 1) / self.meta_len) as usize;
        if b >= self.replay.len() {
            return;
        }
        if (round - 1) % self.meta_len == 0 {
            for &u in &self.active {
                self.cursor[u] = None;
            }
            self.active.clear();
            for &(u, i) in &self.replay[b] {
                self.cursor[u] = Some((i, 0));
                self.active.push(u);
            }
        }
        let x = self.x;
        for &u in &self.active {
            let Some((i, c)) = self.cursor[u].as_mut() else { continue };
            while *c < x && !view.knowledge.knows(u, *i * x as u32 + *c as u32) {
                *c += 1;
            }
            if *c < x {
                out.push(Planned { node: u, directive: Directive::Message(*i * x as u32 + *c as u32), wave: false });
            }
        }
    }

    fn on_round_end(&mut self, report: &RoundReport<'_>, _view: &View<'_>) {
        for &(u, ok) in report.broadcasts {
            if let (true, Some((_, c))) = (ok, self.cursor[u].as_mut()) {
                *c += 1;
            }
        }
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.replay.len() as u64 * self.meta_len)
    }
}

/// Source-only RS broadcast with each base packet replaced by an outer RS
/// code over the `x` copy symbols it carries.
#[derive(Debug, Clone)]
pub struct FaultCodingTransform {
    shape: Shape,
    x: usize,
    eta: f64,
    meta_len: u64,
    base_packets: Option<usize>,
    used: usize,
}

impl FaultCodingTransform {
    pub fn new(shape: Shape, x: usize, eta: f64, fault: &FaultModel) -> Result<Self> {
        check_params(x, eta, fault)?;
        if eta >= 1.0 {
            return Err(Error::Parameter(format!("eta must be below 1, got {eta}")));
        }
        let meta_len = coding_meta_len(x, eta, fault.loss());
        if meta_len as usize > MAX_PACKETS {
            return Err(Error::Parameter(format!("{meta_len} outer packets exceed the field size")));
        }
        Ok(Self { shape, x, eta, meta_len, base_packets: None, used: 0 })
    }

    pub fn with_base_packets(mut self, m: usize) -> Self {
        self.base_packets = Some(m);
        self
    }

    pub fn meta_len(&self) -> u64 {
        self.meta_len
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Schedule for FaultCodingTransform {
    fn prepare(&mut self, setup: &Setup) -> Result<Box<dyn Memory>> {
        if setup.k % self.x != 0 {
            return Err(Error::Contract(format!("k={} is not a multiple of x={}", setup.k, self.x)));
        }
        let k_base = setup.k / self.x;
        self.used = self
            .base_packets
            .unwrap_or_else(|| super::star::RsBroadcast::packets_for(self.shape, k_base, setup.topology));
        crate::coding::RsCode::new(k_base, self.used)?;
        Ok(Box::new(CodedMetaMemory::new(setup, self.shape, self.x, self.meta_len as usize)?))
    }

    fn plan(&mut self, round: u64, view: &View<'_>, out: &mut Vec<Planned>) {
        if round <= self.used as u64 * self.meta_len {
            out.push(Planned { node: view.topology.source(), directive: Directive::Coded(round as u32 - 1), wave: false });
        }
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.used as u64 * self.meta_len)
    }
}

/// Memory for [`FaultCodingTransform`]: outer groups per base packet, inner
/// decode once `k` groups are recovered.
pub struct CodedMetaMemory {
    x: usize,
    k_base: usize,
    meta_len: usize,
    source: NodeId,
    /// Block `i` holds the `x` copy symbols of base message `i`.
    blocks: Vec<Vec<u16>>,
    inner: Interpolant,
    outer: Interpolant,
    /// Per node: outer symbols of the group being collected, by group.
    partial: Vec<std::collections::HashMap<u32, Vec<RsPacket>>>,
    groups: Vec<Vec<RsPacket>>,
    done_groups: Vec<HashSet<u32>>,
    errors: u64,
    /// Per node: groups recovered, in order.
    pub recovered: Vec<Vec<(u64, u32)>>,
}

impl CodedMetaMemory {
    pub fn new(setup: &Setup, shape: Shape, x: usize, meta_len: usize) -> Result<Self> {
        shape_check(shape, setup)?;
        let n = setup.topology.node_count();
        let k_base = setup.k / x;
        let blocks = (0..k_base).map(|i| (0..x).map(|c| setup.message_symbol(i * x + c)).collect()).collect();
        Ok(Self {
            x,
            k_base,
            meta_len,
            source: setup.topology.source(),
            blocks,
            inner: Interpolant::new((0..k_base as u16).collect()),
            outer: Interpolant::new((0..x as u16).collect()),
            partial: vec![Default::default(); n],
            groups: vec![Vec::new(); n],
            done_groups: vec![HashSet::new(); n],
            errors: 0,
            recovered: vec![Vec::new(); n],
        })
    }

    /// The `x` inner symbols carried by base packet `b`.
    pub fn group(&self, b: u32) -> Vec<u16> {
        if (b as usize) < self.k_base {
            return self.blocks[b as usize].clone();
        }
        let ys: Vec<&[u16]> = self.blocks.iter().map(|s| s.as_slice()).collect();
        self.inner.eval_blocks(b as u16, &ys)
    }

    fn outer_symbol(&self, f: &[u16], q: u32) -> u16 {
        if (q as usize) < self.x {
            return f[q as usize];
        }
        let ys: Vec<&[u16]> = f.chunks(1).collect();
        self.outer.eval_blocks(q as u16, &ys)[0]
    }
}

fn shape_check(shape: Shape, setup: &Setup) -> Result<()> {
    let t = setup.topology;
    let ok = match shape {
        Shape::Star => t.is_star(),
        Shape::SingleLink => t.is_single_link(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::TopologyMismatch(format!("coding transform needs a {shape:?} topology")))
    }
}

impl Memory for CodedMetaMemory {
    fn informed(&self, u: NodeId, _kn: &Knowledge) -> bool {
        u == self.source
    }

    fn payload(&mut self, u: NodeId, directive: &Directive, _round: u64, _kn: &Knowledge) -> Option<Packet> {
        let Directive::Coded(j) = *directive else { return None };
        if u != self.source {
            return None;
        }
        let (b, q) = (j / self.meta_len as u32, j % self.meta_len as u32);
        if b as usize >= MAX_PACKETS {
            return None;
        }
        let f = self.group(b);
        Some(Packet::rs(b, q, vec![self.outer_symbol(&f, q)]))
    }

    fn receive(&mut self, u: NodeId, packet: &Packet, round: u64, kn: &Knowledge, learned: &mut Vec<u32>) {
        let Payload::Rs { group, index, symbols } = &packet.payload else { return };
        if kn.is_complete(u) || self.done_groups[u].contains(group) {
            return;
        }
        let slot = self.partial[u].entry(*group).or_default();
        if slot.iter().any(|p| p.index == *index) {
            return;
        }
        slot.push(RsPacket { index: *index, symbols: symbols.clone() });
        if slot.len() < self.x {
            return;
        }
        let slot = self.partial[u].remove(group).unwrap_or_default();
        self.done_groups[u].insert(*group);
        self.recovered[u].push((round, *group));
        let f: Vec<u16> = match rs_decode_symbols(&slot, self.x) {
            Ok(v) => v.into_iter().map(|s| s[0]).collect(),
            Err(_) => {
                self.errors += 1;
                return;
            }
        };
        self.groups[u].push(RsPacket { index: *group, symbols: f });
        if self.groups[u].len() == self.k_base {
            if rs_decode_symbols(&self.groups[u], self.k_base).ok().as_ref() != Some(&self.blocks) {
                self.errors += 1;
            }
            learned.extend(0..(self.k_base * self.x) as u32);
        }
    }

    fn decode_errors(&self) -> u64 {
        self.errors
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::{default_phase, Fastbc, RsBroadcast};
    use crate::gbst::build_gbst;
    use crate::graph::{Graph, Topology};
    use crate::sim::{run_schedule, Oblivious};

    fn path(n: usize) -> Topology {
        let e: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Topology::new(Graph::from_edges(n, &e).unwrap(), 0).unwrap()
    }

    fn star(leaves: usize) -> Topology {
        let e: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Topology::new(Graph::from_edges(leaves + 1, &e).unwrap(), 0).unwrap()
    }

    fn fastbc(t: &Topology) -> Box<dyn Schedule> {
        let g = build_gbst(t);
        Box::new(Oblivious::routing(Fastbc::new(&g, default_phase(t.node_count()))))
    }

    #[test]
    fn meta_lengths() {
        assert_eq!(routing_meta_len(1, 0.0, 0.0), 1);
        assert_eq!(routing_meta_len(8, 0.25, 0.5), 20);
        assert_eq!(coding_meta_len(32, 0.25, 0.5), 86);
        assert_eq!(coding_meta_len(4, 0.0, 0.0), 4);
    }

    #[test]
    fn receiver_faults_are_rejected() {
        let t = path(4);
        let err = SenderFaultRoutingTransform::new(fastbc(&t), 2, 0.25, &FaultModel::receiver(0.5)).err().unwrap();
        assert!(matches!(err, Error::ModelMismatch(_)));
        assert!(SenderFaultRoutingTransform::new(fastbc(&t), 0, 0.25, &FaultModel::sender(0.5)).is_err());
        assert!(FaultCodingTransform::new(Shape::Star, 4, 1.0, &FaultModel::sender(0.5)).is_err());
    }

    #[test]
    fn identity_at_p0_matches_base_log() {
        let t = path(12);
        let f = FaultModel::sender(0.0);
        let mut s = SenderFaultRoutingTransform::new(fastbc(&t), 1, 0.0, &f).unwrap().with_slack(0);
        let tr = run_schedule_with(&t, &mut s, 1, &f, 4, 1 << 20, RunOptions::full()).unwrap();
        let base = s.base_trace().unwrap();
        assert_eq!(tr.completion, base.completion);
        assert_eq!(tr.rounds, s.base_rounds());
        let a = tr.log.unwrap();
        let b = base.log.as_ref().unwrap();
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.deliveries, y.deliveries);
        }
    }

    #[test]
    fn copies_deliver_per_meta_round_at_p0() {
        let t = path(10);
        let f = FaultModel::faultless();
        let mut s = SenderFaultRoutingTransform::new(fastbc(&t), 3, 0.5, &f).unwrap().with_slack(0);
        assert_eq!(s.meta_len(), 5);
        let tr = run_schedule_with(&t, &mut s, 3, &f, 4, 1 << 20, RunOptions::full()).unwrap();
        let base = s.base_trace().unwrap().log.clone().unwrap();
        let log = tr.log.unwrap();
        for (b, r) in base.iter().take(s.base_rounds() as usize).enumerate() {
            let mut got: Vec<_> = log[b * 5..(b * 5 + 5).min(log.len())].iter().flat_map(|l| l.deliveries.clone()).collect();
            got.sort();
            got.dedup();
            assert_eq!(got, r.deliveries, "base round {}", b + 1);
        }
        assert!(tr.completion.unwrap() <= s.base_rounds() * 5);
    }

    #[test]
    fn routing_transform_survives_sender_faults() {
        let t = path(16);
        let f = FaultModel::sender(0.5);
        let x = 24;
        let mut ok = 0;
        for seed in 0..20 {
            let mut s = SenderFaultRoutingTransform::new(fastbc(&t), x, 0.25, &f).unwrap();
            let tr = run_schedule(&t, &mut s, x, &f, seed, 1 << 22).unwrap();
            ok += tr.completed() as u32;
        }
        assert!(ok >= 19, "{ok}");
    }

    #[test]
    fn coding_transform_matches_base_at_p0() {
        let t = star(6);
        let k = 5;
        let base = run_schedule(&t, &mut RsBroadcast::star(), k, &FaultModel::faultless(), 1, 1 << 20).unwrap();
        let x = 4;
        let f = FaultModel::faultless();
        let mut s = FaultCodingTransform::new(Shape::Star, x, 0.0, &f).unwrap();
        let tr = run_schedule(&t, &mut s, k * x, &f, 1, 1 << 20).unwrap();
        assert_eq!(tr.decode_errors, 0);
        assert_eq!(tr.completion.unwrap(), base.completion.unwrap() * s.meta_len());
        for v in 1..=6 {
            assert_eq!(tr.complete_at[v].unwrap(), base.complete_at[v].unwrap() * s.meta_len());
        }
    }

    #[test]
    fn coding_transform_under_faults() {
        for fault in [FaultModel::sender(0.5), FaultModel::receiver(0.5)] {
            let t = star(8);
            let mut s = FaultCodingTransform::new(Shape::Star, 16, 0.25, &fault).unwrap();
            let tr = run_schedule(&t, &mut s, 4 * 16, &fault, 7, 1 << 20).unwrap();
            assert!(tr.completed());
            assert_eq!(tr.decode_errors, 0);
        }
    }
}
