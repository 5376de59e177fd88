//! Round-by-round execution of schedules on the noisy radio channel.

mod channel;
mod engine;
mod knowledge;
mod memory;
mod schedule;

pub use channel::{step, step_with_oracle, Channel, FaultOracle, Forced, Seeded, StepOutcome};
pub use engine::{run_schedule, run_schedule_with, trace_csv, RoundLog, RunOptions, SimTrace};
pub use knowledge::{Knowledge, KnowledgeEvent};
pub use memory::{Memory, RlncMemory, RoutingMemory, RsMemory, Setup};
pub use schedule::{Carrier, Directive, Intent, NodePolicy, Oblivious, Planned, RoundReport, Schedule, View};

use serde::{Deserialize, Serialize};

use crate::coding::RlncPacket;
use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultKind {
    Faultless,
    Sender,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultModel {
    pub kind: FaultKind,
    pub p: f64,
}

impl FaultModel {
    pub fn new(kind: FaultKind, p: f64) -> Result<Self> {
        let m = Self { kind, p };
        m.validate()?;
        Ok(m)
    }

    pub fn faultless() -> Self {
        Self { kind: FaultKind::Faultless, p: 0.0 }
    }

    pub fn sender(p: f64) -> Self {
        Self { kind: FaultKind::Sender, p }
    }

    pub fn receiver(p: f64) -> Self {
        Self { kind: FaultKind::Receiver, p }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p) {
            return Err(Error::Parameter(format!("fault probability {} not in [0, 1)", self.p)));
        }
        Ok(())
    }

    /// Probability that a lone transmission is lost.
    pub fn loss(&self) -> f64 {
        match self.kind {
            FaultKind::Faultless => 0.0,
            _ => self.p,
        }
    }

    pub(crate) fn sender_p(&self) -> f64 {
        if self.kind == FaultKind::Sender { self.p } else { 0.0 }
    }

    pub(crate) fn receiver_p(&self) -> f64 {
        if self.kind == FaultKind::Receiver { self.p } else { 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Message(u32),
    /// Reed-Solomon symbols; `group` separates independent codes (0 when unused).
    Rs { group: u32, index: u32, symbols: Vec<u16> },
    Rlnc(RlncPacket),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub payload: Payload,
    pub bits: u64,
}

impl Packet {
    pub fn message(i: u32, k: usize) -> Self {
        let bits = (usize::BITS - k.max(2).saturating_sub(1).leading_zeros()) as u64;
        Self { payload: Payload::Message(i), bits }
    }

    pub fn rs(group: u32, index: u32, symbols: Vec<u16>) -> Self {
        let bits = 64 + 16 * symbols.len() as u64;
        Self { payload: Payload::Rs { group, index, symbols }, bits }
    }

    pub fn rlnc(p: RlncPacket) -> Self {
        let bits = p.bits();
        Self { payload: Payload::Rlnc(p), bits }
    }

    /// Serialized tag byte: 0 plain, 1 RS, 2 RLNC.
    pub fn tag(&self) -> u8 {
        match self.payload {
            Payload::Message(_) => 0,
            Payload::Rs { .. } => 1,
            Payload::Rlnc(_) => 2,
        }
    }

    pub fn describe(&self) -> String {
        match &self.payload {
            Payload::Message(i) => format!("m{i}"),
            Payload::Rs { group, index, .. } => format!("rs{group}.{index}"),
            Payload::Rlnc(p) => {
                let h: String = p.coeffs.iter().map(|c| format!("{c:02x}")).collect();
                format!("rlnc{h}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundAction {
    Silent,
    Broadcast(Packet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundOutcome {
    Received { packet: Packet, from: NodeId },
    /// Silence, collision and faults look the same to a listener.
    Noise,
}
