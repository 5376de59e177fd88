//! Systematic Reed-Solomon erasure code over GF(2^16).
//!
//! Message `i` is the value at point `i` of the unique polynomial of degree
//! `< k` through the sources; coded packet `j` is its value at point `j`.

use super::gf65536 as gf;
use crate::error::{Error, Result};

/// Largest supported packet count (one evaluation point per field element).
pub const MAX_PACKETS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsPacket {
    pub index: u32,
    pub symbols: Vec<u16>,
}

/// Barycentric Lagrange interpolation through fixed distinct points.
#[derive(Debug, Clone)]
pub struct Interpolant {
    xs: Vec<u16>,
    /// Discrete logs of the barycentric weights.
    log_w: Vec<u32>,
}

impl Interpolant {
    pub fn new(xs: Vec<u16>) -> Self {
        let q = gf::GROUP_ORDER;
        let log_w = xs
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                let mut sum = 0u64;
                for (j, &xj) in xs.iter().enumerate() {
                    if i != j {
                        sum += gf::log(xi ^ xj) as u64;
                    }
                }
                (q - (sum % q as u64) as u32) % q
            })
            .collect();
        Self { xs, log_w }
    }

    /// Coefficients `c` with `P(x) = sum c_i y_i`.
    pub fn coefficients(&self, x: u16) -> Vec<u16> {
        if let Some(pos) = self.xs.iter().position(|&xi| xi == x) {
            let mut c = vec![0; self.xs.len()];
            c[pos] = 1;
            return c;
        }
        let q = gf::GROUP_ORDER;
        let l = (self.xs.iter().map(|&xj| gf::log(x ^ xj) as u64).sum::<u64>() % q as u64) as u32;
        self.xs
            .iter()
            .zip(&self.log_w)
            .map(|(&xi, &wi)| gf::exp(((l + wi) % q + q - gf::log(x ^ xi)) % q))
            .collect()
    }

    /// Evaluates the interpolant of block values `ys` at `x`.
    pub fn eval_blocks(&self, x: u16, ys: &[&[u16]]) -> Vec<u16> {
        let width = ys.first().map_or(0, |y| y.len());
        let mut out = vec![0u16; width];
        for (c, y) in self.coefficients(x).into_iter().zip(ys) {
            if c == 0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(y.iter()) {
                *o ^= gf::mul(c, v);
            }
        }
        out
    }
}

/// An `(m, k)` code: `k` sources, `m` coded packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsCode {
    pub k: usize,
    pub m: usize,
}

impl RsCode {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::Parameter(format!("need 1 <= k <= m, got k={k}, m={m}")));
        }
        if m > MAX_PACKETS {
            return Err(Error::Parameter(format!("m={m} exceeds field size {MAX_PACKETS}")));
        }
        Ok(Self { k, m })
    }

    /// Encoder for a fixed set of source blocks; packets are produced on demand.
    pub fn encoder<'a>(&self, sources: &'a [Vec<u16>]) -> Result<Encoder<'a>> {
        if sources.len() != self.k {
            return Err(Error::Parameter(format!("expected {} sources, got {}", self.k, sources.len())));
        }
        let width = sources[0].len();
        if sources.iter().any(|s| s.len() != width) {
            return Err(Error::Parameter("source blocks differ in length".into()));
        }
        Ok(Encoder { code: *self, sources, interp: Interpolant::new((0..self.k as u16).collect()) })
    }

    pub fn encode(&self, sources: &[Vec<u16>]) -> Result<Vec<RsPacket>> {
        let enc = self.encoder(sources)?;
        Ok((0..self.m as u32).map(|j| enc.packet(j)).collect())
    }

    /// Reconstructs the sources from packets with distinct indices.
    pub fn decode(&self, packets: &[RsPacket]) -> Result<Vec<Vec<u16>>> {
        rs_decode_symbols(packets, self.k)
    }
}

pub struct Encoder<'a> {
    code: RsCode,
    sources: &'a [Vec<u16>],
    interp: Interpolant,
}

impl Encoder<'_> {
    pub fn packet(&self, index: u32) -> RsPacket {
        assert!((index as usize) < self.code.m, "packet index out of range");
        let symbols = if (index as usize) < self.code.k {
            self.sources[index as usize].clone()
        } else {
            let ys: Vec<&[u16]> = self.sources.iter().map(|s| s.as_slice()).collect();
            self.interp.eval_blocks(index as u16, &ys)
        };
        RsPacket { index, symbols }
    }
}

/// Decodes symbol blocks. Uses the first `k` packets; all indices must be distinct.
pub fn rs_decode_symbols(packets: &[RsPacket], k: usize) -> Result<Vec<Vec<u16>>> {
    if packets.len() < k {
        return Err(Error::InsufficientData(format!("need {k} packets, got {}", packets.len())));
    }
    let mut seen = std::collections::HashSet::new();
    for p in packets {
        if p.index as usize >= MAX_PACKETS || !seen.insert(p.index) {
            return Err(Error::InsufficientData(format!("duplicate or invalid index {}", p.index)));
        }
    }
    let used = &packets[..k];
    let mut out = vec![Vec::new(); k];
    let mut have = vec![false; k];
    for p in used.iter().filter(|p| (p.index as usize) < k) {
        out[p.index as usize] = p.symbols.clone();
        have[p.index as usize] = true;
    }
    if have.iter().all(|&h| h) {
        return Ok(out);
    }
    let interp = Interpolant::new(used.iter().map(|p| p.index as u16).collect());
    let ys: Vec<&[u16]> = used.iter().map(|p| p.symbols.as_slice()).collect();
    for x in (0..k).filter(|&x| !have[x]) {
        out[x] = interp.eval_blocks(x as u16, &ys);
    }
    Ok(out)
}

fn bytes_to_symbols(b: &[u8]) -> Vec<u16> {
    b.chunks(2).map(|c| u16::from_be_bytes([c[0], *c.get(1).unwrap_or(&0)])).collect()
}

fn symbols_to_bytes(s: &[u16], len: usize) -> Vec<u8> {
    let mut out: Vec<u8> = s.iter().flat_map(|v| v.to_be_bytes()).collect();
    out.truncate(len);
    out
}

/// Encodes equal-length byte messages into `m` packets.
pub fn rs_encode(messages: &[Vec<u8>], m: usize) -> Result<Vec<RsPacket>> {
    let code = RsCode::new(messages.len(), m)?;
    let sources: Vec<Vec<u16>> = messages.iter().map(|b| bytes_to_symbols(b)).collect();
    code.encode(&sources)
}

/// Decodes byte messages of length `msg_len` from at least `k` packets.
pub fn rs_decode(packets: &[RsPacket], k: usize, msg_len: usize) -> Result<Vec<Vec<u8>>> {
    Ok(rs_decode_symbols(packets, k)?.iter().map(|s| symbols_to_bytes(s, msg_len)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msgs(k: usize, len: usize, salt: u8) -> Vec<Vec<u8>> {
        (0..k).map(|i| (0..len).map(|j| (i * 31 + j * 7) as u8 ^ salt).collect()).collect()
    }

    #[test]
    fn k1_is_repetition() {
        let m = msgs(1, 6, 9);
        let p = rs_encode(&m, 5).unwrap();
        assert!(p.iter().all(|q| q.symbols == p[0].symbols));
        assert_eq!(rs_decode(&p[3..4], 1, 6).unwrap(), m);
    }

    #[test]
    fn systematic_prefix() {
        let m = msgs(4, 8, 1);
        let p = rs_encode(&m, 10).unwrap();
        assert_eq!(rs_decode(&p[..4], 4, 8).unwrap(), m);
        for i in 0..4 {
            assert_eq!(symbols_to_bytes(&p[i].symbols, 8), m[i]);
        }
    }

    #[test]
    fn k2_all_pairs() {
        let m = msgs(2, 5, 3);
        let p = rs_encode(&m, 4).unwrap();
        for a in 0..4 {
            for b in a + 1..4 {
                assert_eq!(rs_decode(&[p[a].clone(), p[b].clone()], 2, 5).unwrap(), m);
            }
        }
    }

    #[test]
    fn k2_from_points_two_and_three() {
        // P(x) = a + (a^b) x over GF(2^16): P(2) = a ^ 2(a^b), P(3) = a ^ 3(a^b).
        let (a, b) = (0x1234u16, 0xbeefu16);
        let d = a ^ b;
        let p2 = RsPacket { index: 2, symbols: vec![a ^ gf::mul(2, d)] };
        let p3 = RsPacket { index: 3, symbols: vec![a ^ gf::mul(3, d)] };
        let code = RsCode::new(2, 4).unwrap();
        assert_eq!(code.encode(&[vec![a], vec![b]]).unwrap()[2..], [p2.clone(), p3.clone()]);
        assert_eq!(code.decode(&[p2, p3]).unwrap(), vec![vec![a], vec![b]]);
    }

    #[test]
    fn errors() {
        let m = msgs(3, 4, 0);
        let p = rs_encode(&m, 6).unwrap();
        assert!(matches!(rs_decode(&[p[1].clone(), p[1].clone(), p[2].clone()], 3, 4), Err(Error::InsufficientData(_))));
        assert!(matches!(rs_decode(&p[..2], 3, 4), Err(Error::InsufficientData(_))));
        assert!(matches!(RsCode::new(2, MAX_PACKETS + 1), Err(Error::Parameter(_))));
        assert!(RsCode::new(2, MAX_PACKETS).is_ok());
    }
}
