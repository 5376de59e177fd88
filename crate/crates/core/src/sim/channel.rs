//! The reception rule, shared by `step` and the engine.

use super::{FaultModel, RoundAction, RoundOutcome};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{Coins, Purpose};

/// Source of fault coins. Only consulted when the model's kind calls for it.
pub trait FaultOracle {
    fn sender_fault(&self, round: u64, node: NodeId) -> bool;
    fn receiver_fault(&self, round: u64, node: NodeId) -> bool;
}

/// Coins drawn from the keyed generator with probability `p`.
pub struct Seeded<'a> {
    pub coins: &'a Coins,
    pub model: FaultModel,
}

impl FaultOracle for Seeded<'_> {
    fn sender_fault(&self, round: u64, node: NodeId) -> bool {
        self.coins.bernoulli(self.model.sender_p(), round, node as u64, Purpose::SenderFault, 0)
    }

    fn receiver_fault(&self, round: u64, node: NodeId) -> bool {
        self.coins.bernoulli(self.model.receiver_p(), round, node as u64, Purpose::ReceiverFault, 0)
    }
}

/// Every consulted coin lands the same way.
pub struct Forced(pub bool);

impl FaultOracle for Forced {
    fn sender_fault(&self, _: u64, _: NodeId) -> bool {
        self.0
    }

    fn receiver_fault(&self, _: u64, _: NodeId) -> bool {
        self.0
    }
}

/// Reusable scratch space for resolving rounds on one graph.
#[derive(Debug, Default)]
pub struct Channel {
    hits: Vec<u32>,
    wave_hits: Vec<u32>,
    last: Vec<NodeId>,
    transmitting: Vec<bool>,
    ok: Vec<bool>,
    touched: Vec<NodeId>,
}

impl Channel {
    pub fn new(n: usize) -> Self {
        Self {
            hits: vec![0; n],
            wave_hits: vec![0; n],
            last: vec![0; n],
            transmitting: vec![false; n],
            ok: vec![false; n],
            touched: Vec::new(),
        }
    }

    /// Resolves one round. `broadcasters` holds `(node, wave)` pairs.
    ///
    /// Fills `sender_ok` (aligned with `broadcasters`) and `deliveries`
    /// (`(listener, sender)`, sorted by listener) and returns the number of
    /// listeners hearing two or more wave-tagged transmissions.
    pub fn resolve(
        &mut self,
        graph: &Graph,
        broadcasters: &[(NodeId, bool)],
        model: &FaultModel,
        oracle: &dyn FaultOracle,
        round: u64,
        sender_ok: &mut Vec<bool>,
        deliveries: &mut Vec<(NodeId, NodeId)>,
    ) -> Result<u64> {
        sender_ok.clear();
        deliveries.clear();
        let check_sender = model.sender_p() > 0.0;
        let check_receiver = model.receiver_p() > 0.0;
        let mut dup = None;
        for &(b, wave) in broadcasters {
            if self.transmitting[b] {
                dup = Some(b);
            }
            self.transmitting[b] = true;
            let ok = !(check_sender && oracle.sender_fault(round, b));
            self.ok[b] = ok;
            sender_ok.push(ok);
            for &v in graph.neighbors(b) {
                if self.hits[v] == 0 && self.wave_hits[v] == 0 {
                    self.touched.push(v);
                }
                self.hits[v] += 1;
                self.last[v] = b;
                if wave {
                    self.wave_hits[v] += 1;
                }
            }
        }
        let mut interference = 0;
        if dup.is_none() {
            self.touched.sort_unstable();
            for &v in &self.touched {
                if self.transmitting[v] {
                    continue;
                }
                if self.wave_hits[v] >= 2 {
                    interference += 1;
                }
                if self.hits[v] != 1 {
                    continue;
                }
                let b = self.last[v];
                if !self.ok[b] || (check_receiver && oracle.receiver_fault(round, v)) {
                    continue;
                }
                deliveries.push((v, b));
            }
        }
        for &v in &self.touched {
            self.hits[v] = 0;
            self.wave_hits[v] = 0;
        }
        self.touched.clear();
        for &(b, _) in broadcasters {
            self.transmitting[b] = false;
        }
        match dup {
            Some(b) => Err(Error::Contract(format!("node {b} scheduled twice in round {round}"))),
            None => Ok(interference),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    /// `None` for nodes that broadcast.
    pub outcomes: Vec<Option<RoundOutcome>>,
    /// Whether each broadcaster's own transmission went out clean.
    pub sender_ok: Vec<Option<bool>>,
    pub interference: u64,
}

/// One round with one action per node, fault coins from the keyed generator.
pub fn step(graph: &Graph, actions: &[RoundAction], model: &FaultModel, coins: &Coins, round: u64) -> Result<StepOutcome> {
    step_with_oracle(graph, actions, model, &Seeded { coins, model: *model }, round)
}

pub fn step_with_oracle(
    graph: &Graph,
    actions: &[RoundAction],
    model: &FaultModel,
    oracle: &dyn FaultOracle,
    round: u64,
) -> Result<StepOutcome> {
    let n = graph.node_count();
    if actions.len() != n {
        return Err(Error::Contract(format!("expected {n} actions, got {}", actions.len())));
    }
    model.validate()?;
    let broadcasters: Vec<(NodeId, bool)> = actions
        .iter()
        .enumerate()
        .filter(|(_, a)| matches!(a, RoundAction::Broadcast(_)))
        .map(|(u, _)| (u, false))
        .collect();
    let mut ch = Channel::new(n);
    let (mut ok, mut del) = (Vec::new(), Vec::new());
    let interference = ch.resolve(graph, &broadcasters, model, oracle, round, &mut ok, &mut del)?;
    let mut outcomes: Vec<Option<RoundOutcome>> = actions
        .iter()
        .map(|a| match a {
            RoundAction::Silent => Some(RoundOutcome::Noise),
            RoundAction::Broadcast(_) => None,
        })
        .collect();
    for (v, b) in del {
        let RoundAction::Broadcast(p) = &actions[b] else { unreachable!() };
        outcomes[v] = Some(RoundOutcome::Received { packet: p.clone(), from: b });
    }
    let mut sender_ok = vec![None; n];
    for (&(b, _), o) in broadcasters.iter().zip(ok) {
        sender_ok[b] = Some(o);
    }
    Ok(StepOutcome { outcomes, sender_ok, interference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{FaultKind, Packet};

    fn bc(i: u32) -> RoundAction {
        RoundAction::Broadcast(Packet::message(i, 1))
    }

    #[test]
    fn single_link_delivery() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let out = step(&g, &[bc(0), RoundAction::Silent], &FaultModel::faultless(), &Coins::new(0), 1).unwrap();
        assert_eq!(out.outcomes[1], Some(RoundOutcome::Received { packet: Packet::message(0, 1), from: 0 }));
        assert_eq!(out.outcomes[0], None);
    }

    #[test]
    fn triangle_collision() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let out = step(&g, &[bc(0), bc(0), RoundAction::Silent], &FaultModel::faultless(), &Coins::new(0), 1).unwrap();
        assert_eq!(out.outcomes[2], Some(RoundOutcome::Noise));
    }

    #[test]
    fn wrong_action_count() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            step(&g, &[bc(0)], &FaultModel::faultless(), &Coins::new(0), 1),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn forced_coins() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let acts = [bc(0), RoundAction::Silent];
        for kind in [FaultKind::Sender, FaultKind::Receiver] {
            let m = FaultModel { kind, p: 0.5 };
            let hit = step_with_oracle(&g, &acts, &m, &Forced(true), 1).unwrap();
            assert_eq!(hit.outcomes[1], Some(RoundOutcome::Noise));
            assert_eq!(hit.sender_ok[0], Some(kind != FaultKind::Sender));
            let miss = step_with_oracle(&g, &acts, &m, &Forced(false), 1).unwrap();
            assert!(matches!(miss.outcomes[1], Some(RoundOutcome::Received { .. })));
        }
        // Faultless ignores forced coins.
        let clean = step_with_oracle(&g, &acts, &FaultModel::faultless(), &Forced(true), 1).unwrap();
        assert!(matches!(clean.outcomes[1], Some(RoundOutcome::Received { .. })));
    }

    #[test]
    fn receiver_faults_on_star() {
        let n = 1001;
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let mut acts = vec![RoundAction::Silent; n];
        acts[0] = bc(0);
        let mut total = 0.0;
        for seed in 0..20 {
            let out = step(&g, &acts, &FaultModel::receiver(0.5), &Coins::new(seed), 1).unwrap();
            let got = out.outcomes.iter().filter(|o| matches!(o, Some(RoundOutcome::Received { .. }))).count();
            let f = got as f64 / 1000.0;
            assert!((f - 0.5).abs() < 0.06, "{f}");
            total += f;
        }
        assert!((total / 20.0 - 0.5).abs() < 0.05);
    }
}
