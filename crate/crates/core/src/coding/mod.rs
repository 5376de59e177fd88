//! Finite fields, Reed-Solomon erasure codes and random linear network coding.

pub mod gf256;
pub mod gf65536;
pub mod rlnc;
pub mod rs;

pub use rlnc::{rlnc_encode, RlncPacket, RlncState};
pub use rs::{rs_decode, rs_decode_symbols, rs_encode, Interpolant, RsCode, RsPacket};
