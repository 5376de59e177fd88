//! The round loop.

use std::fmt::Write as _;

use super::channel::{Channel, Seeded};
use super::memory::Setup;
use super::schedule::{Directive, Planned, RoundReport, Schedule, View};
use super::{FaultModel, Knowledge, KnowledgeEvent, Packet};
use crate::error::{Error, Result};
use crate::graph::{NodeId, Topology};
use crate::rng::Coins;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Only offer nodes that can still affect anyone's knowledge to the schedule.
    pub prune: bool,
    /// Keep a per-round log of broadcasts and deliveries.
    pub full_log: bool,
    pub stop_on_completion: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { prune: true, full_log: false, stop_on_completion: true }
    }
}

impl RunOptions {
    pub fn full() -> Self {
        Self { prune: false, full_log: true, stop_on_completion: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundLog {
    pub round: u64,
    /// `(node, packet, transmission clean)`, by node id.
    pub broadcasts: Vec<(NodeId, Packet, bool)>,
    /// `(listener, sender)`, by listener id.
    pub deliveries: Vec<(NodeId, NodeId)>,
    /// Nodes told to send something they did not have.
    pub suppressed: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pub n: usize,
    pub k: usize,
    pub source: NodeId,
    /// Rounds executed.
    pub rounds: u64,
    /// First round after which every node knew every message.
    pub completion: Option<u64>,
    pub events: Vec<KnowledgeEvent>,
    /// Round in which each node first learned anything (0 for the source).
    pub first_informed: Vec<Option<u64>>,
    pub complete_at: Vec<Option<u64>>,
    pub broadcasts: u64,
    pub suppressed: u64,
    /// Listeners that heard two or more fast-wave transmissions in one round.
    pub interference_events: u64,
    pub max_packet_bits: u64,
    pub decode_errors: u64,
    pub log: Option<Vec<RoundLog>>,
}

impl SimTrace {
    /// Knowledge as it stood at the end of `round` (round 0: only the source).
    pub fn knowledge_at(&self, round: u64) -> Knowledge {
        let mut kn = Knowledge::with_source(self.n, self.k, self.source);
        for e in self.events.iter().take_while(|e| e.round <= round) {
            kn.learn(e.node, e.message);
        }
        kn
    }

    pub fn completed(&self) -> bool {
        self.completion.is_some()
    }
}

struct Relevance {
    incomplete_nbrs: Vec<u32>,
    pos: Vec<usize>,
    set: Vec<NodeId>,
}

const ABSENT: usize = usize::MAX;

impl Relevance {
    fn refresh(&mut self, u: NodeId, relevant: bool) {
        match (relevant, self.pos[u] != ABSENT) {
            (true, false) => {
                self.pos[u] = self.set.len();
                self.set.push(u);
            }
            (false, true) => {
                let i = self.pos[u];
                self.set.swap_remove(i);
                if i < self.set.len() {
                    self.pos[self.set[i]] = i;
                }
                self.pos[u] = ABSENT;
            }
            _ => {}
        }
    }
}

pub fn run_schedule(
    topology: &Topology,
    schedule: &mut dyn Schedule,
    k: usize,
    fault: &FaultModel,
    seed: u64,
    max_rounds: u64,
) -> Result<SimTrace> {
    run_schedule_with(topology, schedule, k, fault, seed, max_rounds, RunOptions::default())
}

pub fn run_schedule_with(
    topology: &Topology,
    schedule: &mut dyn Schedule,
    k: usize,
    fault: &FaultModel,
    seed: u64,
    max_rounds: u64,
    opts: RunOptions,
) -> Result<SimTrace> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    fault.validate()?;
    let g = topology.graph();
    let n = g.node_count();
    let source = topology.source();
    let coins = Coins::new(seed);
    let setup = Setup { topology, k, coins };
    let mut memory = schedule.prepare(&setup)?;
    let mut kn = Knowledge::with_source(n, k, source);

    let mut first_informed = vec![None; n];
    let mut complete_at = vec![None; n];
    first_informed[source] = Some(0);
    complete_at[source] = Some(0);

    let mut rel = Relevance {
        incomplete_nbrs: (0..n).map(|u| g.neighbors(u).iter().filter(|&&v| !kn.is_complete(v)).count() as u32).collect(),
        pos: vec![ABSENT; n],
        set: Vec::new(),
    };
    let relevant = |u: NodeId, kn: &Knowledge, mem: &dyn super::Memory, rel: &Relevance| {
        mem.informed(u, kn) && (!kn.is_complete(u) || rel.incomplete_nbrs[u] > 0)
    };
    for u in 0..n {
        let r = relevant(u, &kn, memory.as_ref(), &rel);
        rel.refresh(u, r);
    }
    let all_nodes: Vec<NodeId> = (0..n).collect();

    let mut trace = SimTrace {
        n,
        k,
        source,
        rounds: 0,
        completion: kn.all_complete().then_some(0),
        events: Vec::new(),
        first_informed: Vec::new(),
        complete_at: Vec::new(),
        broadcasts: 0,
        suppressed: 0,
        interference_events: 0,
        max_packet_bits: 0,
        decode_errors: 0,
        log: opts.full_log.then(Vec::new),
    };

    let mut channel = Channel::new(n);
    let oracle = Seeded { coins: &coins, model: *fault };
    let mut planned: Vec<Planned> = Vec::new();
    let mut bcast: Vec<(NodeId, bool)> = Vec::new();
    let mut packets: Vec<Packet> = Vec::new();
    let mut slot = vec![0usize; n];
    let mut sender_ok = Vec::new();
    let mut deliveries = Vec::new();
    let mut report_bcast = Vec::new();
    let mut suppressed = Vec::new();
    let mut learned = Vec::new();

    let mut round = 0;
    while trace.completion.is_none() || !opts.stop_on_completion {
        if round >= max_rounds || schedule.horizon().is_some_and(|h| round >= h) || schedule.halted() {
            break;
        }
        round += 1;

        planned.clear();
        {
            let view = View {
                topology,
                knowledge: &kn,
                candidates: if opts.prune { &rel.set } else { &all_nodes },
                coins: &coins,
                memory: memory.as_ref(),
            };
            schedule.plan(round, &view, &mut planned);
        }
        planned.sort_by_key(|p| p.node);

        bcast.clear();
        packets.clear();
        suppressed.clear();
        for p in &planned {
            if p.directive == Directive::Silent {
                continue;
            }
            match memory.payload(p.node, &p.directive, round, &kn) {
                Some(pkt) => {
                    trace.max_packet_bits = trace.max_packet_bits.max(pkt.bits);
                    slot[p.node] = bcast.len();
                    bcast.push((p.node, p.wave));
                    packets.push(pkt);
                }
                None => suppressed.push(p.node),
            }
        }
        trace.broadcasts += bcast.len() as u64;
        trace.suppressed += suppressed.len() as u64;
        trace.interference_events +=
            channel.resolve(g, &bcast, fault, &oracle, round, &mut sender_ok, &mut deliveries)?;

        for &(v, b) in &deliveries {
            learned.clear();
            memory.receive(v, &packets[slot[b]], round, &kn, &mut learned);
            for &i in &learned {
                if !kn.learn(v, i) {
                    continue;
                }
                trace.events.push(KnowledgeEvent { round, node: v, message: i });
                first_informed[v].get_or_insert(round);
                if kn.is_complete(v) {
                    complete_at[v] = Some(round);
                    for &w in g.neighbors(v) {
                        rel.incomplete_nbrs[w] -= 1;
                        let r = relevant(w, &kn, memory.as_ref(), &rel);
                        rel.refresh(w, r);
                    }
                }
            }
            let r = relevant(v, &kn, memory.as_ref(), &rel);
            rel.refresh(v, r);
        }

        report_bcast.clear();
        report_bcast.extend(bcast.iter().zip(&sender_ok).map(|(&(b, _), &ok)| (b, ok)));
        {
            let view = View {
                topology,
                knowledge: &kn,
                candidates: if opts.prune { &rel.set } else { &all_nodes },
                coins: &coins,
                memory: memory.as_ref(),
            };
            let report = RoundReport { round, broadcasts: &report_bcast, deliveries: &deliveries };
            schedule.on_round_end(&report, &view);
        }
        if let Some(log) = trace.log.as_mut() {
            log.push(RoundLog {
                round,
                broadcasts: bcast.iter().zip(&packets).zip(&sender_ok).map(|((&(b, _), p), &ok)| (b, p.clone(), ok)).collect(),
                deliveries: deliveries.clone(),
                suppressed: suppressed.clone(),
            });
        }
        if trace.completion.is_none() && kn.all_complete() {
            trace.completion = Some(round);
        }
    }
    trace.rounds = round;
    trace.first_informed = first_informed;
    trace.complete_at = complete_at;
    trace.decode_errors = memory.decode_errors();
    Ok(trace)
}

/// `round,node,action,outcome` lines for every node of every logged round.
pub fn trace_csv(trace: &SimTrace) -> Result<String> {
    let log = trace.log.as_ref().ok_or_else(|| Error::Precondition("trace was recorded without a log".into()))?;
    let mut s = String::from("round,node,action,outcome\n");
    let mut action = vec![String::new(); trace.n];
    let mut outcome = vec![String::new(); trace.n];
    for r in log {
        action.iter_mut().for_each(|a| *a = "silent".into());
        outcome.iter_mut().for_each(|o| *o = "noise".into());
        for (b, p, _) in &r.broadcasts {
            action[*b] = format!("bcast:{}", p.describe());
            outcome[*b] = "-".into();
        }
        for &(v, b) in &r.deliveries {
            let p = &r.broadcasts.iter().find(|x| x.0 == b).unwrap().1;
            outcome[v] = format!("recv:{}@{b}", p.describe());
        }
        for u in 0..trace.n {
            writeln!(s, "{},{u},{},{}", r.round, action[u], outcome[u]).unwrap();
        }
    }
    Ok(s)
}
