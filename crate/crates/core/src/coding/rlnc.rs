//! Random linear network coding over GF(2^8).

use super::gf256 as gf;
use crate::error::{Error, Result};
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlncPacket {
    pub coeffs: Vec<u8>,
    pub payload: Vec<u8>,
}

impl RlncPacket {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Header plus payload size in bits.
    pub fn bits(&self) -> u64 {
        8 * (self.coeffs.len() + self.payload.len()) as u64
    }
}

/// Received span kept in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlncState {
    k: usize,
    width: usize,
    rows: Vec<RlncPacket>,
    pivots: Vec<usize>,
}

impl RlncState {
    pub fn new(k: usize, width: usize) -> Self {
        Self { k, width, rows: Vec::new(), pivots: Vec::new() }
    }

    /// State of a node holding every source message.
    pub fn with_sources(messages: &[Vec<u8>]) -> Self {
        let k = messages.len();
        let width = messages.first().map_or(0, |m| m.len());
        let mut s = Self::new(k, width);
        for (i, m) in messages.iter().enumerate() {
            let mut coeffs = vec![0u8; k];
            coeffs[i] = 1;
            s.rows.push(RlncPacket { coeffs, payload: m.clone() });
            s.pivots.push(i);
        }
        s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.k
    }

    /// Adds a packet; returns whether the rank grew.
    pub fn absorb(&mut self, packet: &RlncPacket) -> Result<bool> {
        if packet.coeffs.len() != self.k || packet.payload.len() != self.width {
            return Err(Error::Parameter(format!(
                "packet shape ({}, {}) does not match ({}, {})",
                packet.coeffs.len(),
                packet.payload.len(),
                self.k,
                self.width
            )));
        }
        if self.is_full() {
            return Ok(false);
        }
        let mut v = packet.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v.coeffs[p];
            if c != 0 {
                gf::axpy(&mut v.coeffs, c, &row.coeffs);
                gf::axpy(&mut v.payload, c, &row.payload);
            }
        }
        let Some(p) = v.coeffs.iter().position(|&c| c != 0) else {
            return Ok(false);
        };
        let inv = gf::inv(v.coeffs[p]);
        gf::scale(&mut v.coeffs, inv);
        gf::scale(&mut v.payload, inv);
        for row in &mut self.rows {
            let c = row.coeffs[p];
            if c != 0 {
                gf::axpy(&mut row.coeffs, c, &v.coeffs);
                gf::axpy(&mut row.payload, c, &v.payload);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        Ok(true)
    }

    /// Source messages, available once the rank reaches `k`.
    pub fn decode(&self) -> Result<Vec<Vec<u8>>> {
        if !self.is_full() {
            return Err(Error::InsufficientData(format!("rank {} < k = {}", self.rank(), self.k)));
        }
        Ok(self.rows.iter().map(|r| r.payload.clone()).collect())
    }

    /// Whether a coefficient vector lies in the current span.
    pub fn contains(&self, coeffs: &[u8]) -> bool {
        let mut v = coeffs.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            gf::axpy(&mut v, c, &row.coeffs);
        }
        v.iter().all(|&c| c == 0)
    }
}

/// Uniformly random element of the known span; `None` when nothing is known.
pub fn rlnc_encode(state: &RlncState, rng: &mut Stream) -> Option<RlncPacket> {
    if state.rank() == 0 {
        return None;
    }
    let mut out = RlncPacket { coeffs: vec![0; state.k], payload: vec![0; state.width] };
    for row in &state.rows {
        let r = rng.next_u8();
        gf::axpy(&mut out.coeffs, r, &row.coeffs);
        gf::axpy(&mut out.payload, r, &row.payload);
    }
    Some(out)
}
