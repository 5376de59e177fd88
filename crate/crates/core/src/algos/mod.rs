//! Broadcast schedules.

pub mod bipartite;
pub mod decay;
pub mod fastbc;
pub mod registry;
pub mod star;
pub mod transform;

pub use bipartite::{activity_violations, pipeline_activity, BipartiteRepeatDecay, BipartiteRunner, LayeredRouting, Pipelined};
pub use decay::{default_phase, Decay};
pub use fastbc::{Fastbc, Repeat, RobustFastbc};
pub use star::{Budget, Repetition, Retransmit, RsBroadcast, Shape};
pub use transform::{FaultCodingTransform, SenderFaultRoutingTransform};
pub use registry::{build, Built, NAMES};
