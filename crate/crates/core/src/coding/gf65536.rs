//! GF(2^16) with primitive polynomial x^16 + x^12 + x^3 + x + 1.

use std::sync::OnceLock;

const POLY: u32 = 0x1100b;
const ORDER: usize = 65535;

struct Tables {
    exp: Vec<u16>,
    log: Vec<u16>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut exp = vec![0u16; 2 * ORDER];
        let mut log = vec![0u16; ORDER + 1];
        let mut x: u32 = 1;
        for i in 0..ORDER {
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & 0x10000 != 0 {
                x ^= POLY;
            }
        }
        assert_eq!(x, 1, "polynomial is not primitive");
        for i in ORDER..2 * ORDER {
            exp[i] = exp[i - ORDER];
        }
        Tables { exp, log }
    })
}

/// Discrete log base the generator; `a` must be nonzero.
#[inline]
pub fn log(a: u16) -> u32 {
    debug_assert!(a != 0);
    tables().log[a as usize] as u32
}

/// Generator to the power `e`, any `e < 2 * 65535`.
#[inline]
pub fn exp(e: u32) -> u16 {
    tables().exp[e as usize]
}

pub const GROUP_ORDER: u32 = ORDER as u32;

#[inline]
pub fn add(a: u16, b: u16) -> u16 {
    a ^ b
}

#[inline]
pub fn mul(a: u16, b: u16) -> u16 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

pub fn inv(a: u16) -> u16 {
    assert!(a != 0, "zero has no inverse");
    let t = tables();
    t.exp[ORDER - t.log[a as usize] as usize]
}

#[inline]
pub fn div(a: u16, b: u16) -> u16 {
    if a == 0 {
        return 0;
    }
    assert!(b != 0, "division by zero");
    let t = tables();
    t.exp[t.log[a as usize] as usize + ORDER - t.log[b as usize] as usize]
}
