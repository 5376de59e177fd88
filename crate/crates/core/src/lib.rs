//! Simulator and protocol library for noisy radio networks.

pub mod algos;
pub mod coding;
pub mod error;
pub mod gbst;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod sim;
pub mod topo;

pub use error::{Error, Result};
