//! Binary linear feedback shift registers with verified maximum period.
//!
//! The connection polynomial is `x^cells + Σ taps_j x^j` over GF(2); the
//! register reaches its full period `2^cells - 1` exactly when that
//! polynomial is primitive, which is tested directly (order of `x` in the
//! quotient ring) rather than assumed.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LfsrError {
    #[error("cell count {0} out of range 1..=32")]
    BadCells(u32),
    #[error("all-zero state is degenerate")]
    ZeroState,
    #[error("state {state:#x} does not fit in {cells} cells")]
    StateTooWide { state: u64, cells: u32 },
    #[error("taps {taps:#x} are not a primitive connection polynomial of degree {cells}")]
    NotPrimitive { taps: u64, cells: u32 },
}

/// Fibonacci-style register: output is the low bit, feedback is the parity
/// of the tapped cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lfsr {
    cells: u32,
    taps: u64,
    state: u64,
}

impl Lfsr {
    /// Builds a register, requiring primitive taps and a nonzero state.
    pub fn new(cells: u32, taps: u64, state: u64) -> Result<Lfsr, LfsrError> {
        if !(1..=32).contains(&cells) {
            return Err(LfsrError::BadCells(cells));
        }
        if state == 0 {
            return Err(LfsrError::ZeroState);
        }
        if state >> cells != 0 {
            return Err(LfsrError::StateTooWide { state, cells });
        }
        if !is_primitive(cells, taps) {
            return Err(LfsrError::NotPrimitive { taps, cells });
        }
        Ok(Lfsr { cells, taps, state })
    }

    pub fn cells(&self) -> u32 {
        self.cells
    }

    pub fn taps(&self) -> u64 {
        self.taps
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Emits the output bit and advances.
    pub fn step_bit(&mut self) -> u8 {
        let out = (self.state & 1) as u8;
        let fb = (self.state & self.taps).count_ones() & 1;
        self.state = (self.state >> 1) | ((fb as u64) << (self.cells - 1));
        out
    }

    /// Emits the whole register contents and advances.
    pub fn step_word(&mut self) -> u64 {
        let out = self.state;
        self.step_bit();
        out
    }

    /// One full period of output bits: length `2^cells - 1`.
    pub fn bit_period(&self) -> Vec<u8> {
        let mut copy = *self;
        (0..(1u64 << self.cells) - 1)
            .map(|_| copy.step_bit())
            .collect()
    }

    /// One full period of register states.
    pub fn state_period(&self) -> Vec<u64> {
        let mut copy = *self;
        (0..(1u64 << self.cells) - 1)
            .map(|_| copy.step_word())
            .collect()
    }
}

// GF(2)[x] arithmetic on bitmask polynomials, degree < 64.

fn gf2_mulmod(a: u64, b: u64, modulus: u64, degree: u32) -> u64 {
    let mut acc = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> degree) & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

fn gf2_powmod(mut base: u64, mut e: u64, modulus: u64, degree: u32) -> u64 {
    let mut acc = 1u64;
    while e != 0 {
        if e & 1 == 1 {
            acc = gf2_mulmod(acc, base, modulus, degree);
        }
        base = gf2_mulmod(base, base, modulus, degree);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primitivity of `x^degree + taps` over GF(2): the residue of `x` must have
/// multiplicative order exactly `2^degree - 1`.
pub fn is_primitive(degree: u32, taps: u64) -> bool {
    if degree == 0 || degree > 32 || taps >> degree != 0 {
        return false;
    }
    if taps & 1 == 0 {
        // reducible: divisible by x
        return false;
    }
    if degree == 1 {
        return taps == 1; // x + 1
    }
    let modulus = taps | (1u64 << degree);
    let group = (1u64 << degree) - 1;
    if gf2_powmod(2, group, modulus, degree) != 1 {
        return false;
    }
    for q in prime_factors(group) {
        if gf2_powmod(2, group / q, modulus, degree) == 1 {
            return false;
        }
    }
    true
}

/// One primitive connection polynomial per degree, for spec templates.
/// Index by degree; entry 0 is unused.
pub const DEFAULT_TAPS: [u64; 33] = [
    0, 0x1, 0x3, 0x3, 0x3, 0x5, 0x3, 0x3, 0x1d, 0x11, 0x9, 0x5, 0x53, 0x1b, 0x443, 0x3, 0x100b,
    0x9, 0x81, 0x27, 0x9, 0x5, 0x3, 0x21, 0x87, 0x9, 0x47, 0x27, 0x9, 0x5, 0x800007, 0x9, 0x400007,
];
