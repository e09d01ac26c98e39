//! Fixed-precision truncated 2-adic arithmetic.
//!
//! A [`Word`] holds the canonical unsigned residue of a 2-adic integer kept
//! to `width` bits (1..=64). Every operation reduces modulo `2^width`,
//! exactly as a `width`-bit register would. Negative values exist only
//! through wraparound: the all-ones word is `-1`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

/// Largest supported word width in bits.
pub const MAX_WIDTH: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("width {0} out of range 1..=64")]
    BadWidth(u32),
    #[error("cannot invert even value {0:#x}")]
    EvenInverse(u64),
}

/// 2-adic valuation of a word: the index of its lowest set bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    /// Valuation of the zero word.
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Finite order, if any.
    pub fn order(self) -> Option<u32> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::Infinite => None,
        }
    }

    /// `true` when the distance this valuation encodes is at most the other
    /// one (larger order means smaller 2-adic norm).
    pub fn dist_le(self, other: Valuation) -> bool {
        match (self, other) {
            (Valuation::Infinite, _) => true,
            (_, Valuation::Infinite) => false,
            (Valuation::Finite(a), Valuation::Finite(b)) => a >= b,
        }
    }
}

/// An n-bit truncation of a 2-adic integer.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    value: u64,
    width: u32,
}

#[inline]
fn mask_for(width: u32) -> u64 {
    debug_assert!((1..=MAX_WIDTH).contains(&width));
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[allow(clippy::should_implement_trait)]
impl Word {
    /// Builds a word, truncating `value` to `width` bits.
    ///
    /// Panics when `width` is outside 1..=64; widths coming from user input
    /// should be validated with [`check_width`] first.
    pub fn new(value: u64, width: u32) -> Word {
        assert!(
            (1..=MAX_WIDTH).contains(&width),
            "word width {width} out of range 1..=64"
        );
        Word {
            value: value & mask_for(width),
            width,
        }
    }

    pub fn zero(width: u32) -> Word {
        Word::new(0, width)
    }

    pub fn one(width: u32) -> Word {
        Word::new(1, width)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn width(self) -> u32 {
        self.width
    }

    #[inline]
    fn check_same_width(self, rhs: Word) {
        assert_eq!(
            self.width, rhs.width,
            "width mismatch: {} vs {}",
            self.width, rhs.width
        );
    }

    pub fn add(self, rhs: Word) -> Word {
        self.check_same_width(rhs);
        Word::new(self.value.wrapping_add(rhs.value), self.width)
    }

    pub fn sub(self, rhs: Word) -> Word {
        self.check_same_width(rhs);
        Word::new(self.value.wrapping_sub(rhs.value), self.width)
    }

    pub fn mul(self, rhs: Word) -> Word {
        self.check_same_width(rhs);
        Word::new(self.value.wrapping_mul(rhs.value), self.width)
    }

    pub fn neg(self) -> Word {
        Word::new(self.value.wrapping_neg(), self.width)
    }

    pub fn xor(self, rhs: Word) -> Word {
        self.check_same_width(rhs);
        Word::new(self.value ^ rhs.value, self.width)
    }

    pub fn and(self, rhs: Word) -> Word {
        self.check_same_width(rhs);
        Word::new(self.value & rhs.value, self.width)
    }

    pub fn or(self, rhs: Word) -> Word {
        self.check_same_width(rhs);
        Word::new(self.value | rhs.value, self.width)
    }

    pub fn not(self) -> Word {
        Word::new(!self.value, self.width)
    }

    /// Shift towards more significant bits; bits falling off are discarded.
    pub fn shl(self, k: u32) -> Word {
        if k >= self.width {
            return Word::zero(self.width);
        }
        Word::new(self.value << k, self.width)
    }

    /// Reduction modulo `2^k`, i.e. masking with `2^k - 1`.
    pub fn mod2k(self, k: u32) -> Word {
        if k >= self.width {
            return self;
        }
        Word::new(self.value & ((1u64 << k) - 1), self.width)
    }

    /// The j-th binary digit, LSB being digit 0. Panics for `j >= width`.
    pub fn bit(self, j: u32) -> u8 {
        assert!(j < self.width, "bit index {j} out of width {}", self.width);
        ((self.value >> j) & 1) as u8
    }

    /// 2-adic valuation: index of the least significant set bit.
    pub fn val2(self) -> Valuation {
        if self.value == 0 {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.value.trailing_zeros())
        }
    }

    pub fn is_odd(self) -> bool {
        self.value & 1 == 1
    }

    /// Multiplicative inverse of an odd word, by Newton lifting.
    pub fn inv_odd(self) -> Result<Word, WordError> {
        if !self.is_odd() {
            return Err(WordError::EvenInverse(self.value));
        }
        let v = self.value;
        // x := v is correct to 3 bits (v*v ≡ 1 mod 8 for odd v); each step
        // doubles the number of correct bits.
        let mut x = v;
        for _ in 0..5 {
            x = x.wrapping_mul(2u64.wrapping_sub(v.wrapping_mul(x)));
        }
        Ok(Word::new(x, self.width))
    }
}

/// 2-adic valuation of the difference: encodes the distance `d₂(a, b)`.
pub fn dist_ord(a: Word, b: Word) -> Valuation {
    a.sub(b).val2()
}

/// Table of repeated squares of an odd base, for exponentiation with at most
/// `width` multiplications per call.
pub struct PowTable {
    squares: Vec<u64>,
    width: u32,
}

impl PowTable {
    /// Precomputes `(1+2u)^(2^j) mod 2^width` for `j < width`.
    pub fn new(u: Word, width: u32) -> PowTable {
        let mask = mask_for(width);
        let base = (1u64.wrapping_add(u.value() << 1)) & mask;
        let mut squares = Vec::with_capacity(width as usize);
        let mut cur = base;
        for _ in 0..width {
            squares.push(cur);
            cur = cur.wrapping_mul(cur) & mask;
        }
        PowTable { squares, width }
    }

    /// `(1+2u)^v mod 2^width`; the exponent is reduced modulo `2^width`.
    pub fn pow(&self, v: Word) -> Word {
        let mask = mask_for(self.width);
        let mut acc = 1u64;
        let e = v.value();
        for (j, sq) in self.squares.iter().enumerate() {
            if (e >> j) & 1 == 1 {
                acc = acc.wrapping_mul(*sq) & mask;
            }
        }
        Word::new(acc, self.width)
    }
}

/// `(1 + 2u)^v mod 2^width`. The base is always odd, so this is total.
pub fn pow_odd_base(u: Word, v: Word) -> Word {
    assert_eq!(u.width(), v.width(), "width mismatch");
    PowTable::new(u, u.width()).pow(v)
}

/// `ord₂(i!) = i - wt₂(i)` where `wt₂` counts ones in the binary expansion.
pub fn ord2_factorial(i: u32) -> u32 {
    i - i.count_ones()
}

/// Binomial coefficient `C(x, i) mod 2^width` of the canonical representative.
///
/// Worked in `width + ord₂(i!)` bits so the exact division by `i!` never
/// loses information: the numerator is reduced there, shifted down by the
/// 2-part of `i!` and multiplied by the inverse of its odd part.
pub fn binom_mod(x: Word, i: u32) -> Word {
    let width = x.width();
    if i == 0 {
        return Word::one(width);
    }
    let xv = x.value();
    if (xv as u128) < i as u128 {
        // The product x(x-1)...(x-i+1) hits zero.
        return Word::zero(width);
    }
    let e = ord2_factorial(i);
    let working = width + e;
    if working <= 128 {
        let wmask: u128 = if working == 128 {
            u128::MAX
        } else {
            (1u128 << working) - 1
        };
        let mut num: u128 = 1;
        let mut odd_fact: u128 = 1;
        for t in 0..i as u64 {
            num = num.wrapping_mul((xv - t) as u128) & wmask;
            let f = t + 1;
            odd_fact = odd_fact.wrapping_mul((f >> f.trailing_zeros()) as u128) & wmask;
        }
        let shifted = (num >> e) & (mask_for(width) as u128);
        let inv = Word::new(odd_fact as u64, width)
            .inv_odd()
            .expect("odd part is odd");
        Word::new((shifted as u64).wrapping_mul(inv.value()), width)
    } else {
        let modulus = BigUint::one() << working;
        let mut num = BigUint::one();
        let mut odd_fact = BigUint::one();
        for t in 0..i as u64 {
            num = (num * (xv - t)) % &modulus;
            let f = t + 1;
            odd_fact = (odd_fact * (f >> f.trailing_zeros())) % &modulus;
        }
        let shifted = (num >> e) % (BigUint::one() << width);
        let odd_small = (&odd_fact % (BigUint::one() << width))
            .iter_u64_digits()
            .next()
            .unwrap_or(0);
        let inv = Word::new(odd_small, width).inv_odd().expect("odd");
        let out = if shifted.is_zero() {
            0
        } else {
            shifted.iter_u64_digits().next().unwrap_or(0)
        };
        Word::new(out.wrapping_mul(inv.value()), width)
    }
}

/// Validates a user-supplied width.
pub fn check_width(width: u32) -> Result<u32, WordError> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(width)
    } else {
        Err(WordError::BadWidth(width))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:#x}/{})", self.value, self.width)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn w(v: u64, n: u32) -> Word {
        Word::new(v, n)
    }

    #[test]
    fn xor_identity_example() {
        // 6 XOR 3 = 6 + 3 - 2*(6 AND 3) at width 8
        let a = w(6, 8);
        let b = w(3, 8);
        assert_eq!(a.xor(b).value(), 5);
        let rhs = a.add(b).sub(a.and(b).shl(1));
        assert_eq!(rhs.value(), 5);
    }

    #[test]
    fn wraparound_and_bits() {
        assert_eq!(w(255, 8).add(w(1, 8)).value(), 0);
        assert_eq!(w(6, 4).bit(1), 1);
        assert_eq!(w(6, 4).bit(0), 0);
    }

    #[test]
    #[should_panic(expected = "bit index")]
    fn bit_out_of_width_panics() {
        w(6, 4).bit(4);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(w(12, 8).val2(), Valuation::Finite(2));
        assert_eq!(w(0, 8).val2(), Valuation::Infinite);
        assert_eq!(w(5, 8).val2(), Valuation::Finite(0));
    }

    /// Extended-Euclid oracle for modular inverses.
    fn inverse_by_euclid(v: u64, width: u32) -> u64 {
        let m = 1i128 << width;
        let (mut r0, mut r1) = (m, v as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        assert_eq!(r0, 1);
        (t0.rem_euclid(m)) as u64
    }

    #[test]
    fn inv_odd_against_euclid() {
        assert_eq!(w(3, 4).inv_odd().unwrap().value(), 11);
        assert_eq!(w(3, 4).inv_odd().unwrap().value(), inverse_by_euclid(3, 4));
        assert_eq!(w(1, 13).inv_odd().unwrap().value(), 1);
        assert_eq!(w(255, 8).inv_odd().unwrap().value(), 255);
        for width in [4, 8, 12] {
            for v in (1u64..1 << width).step_by(2) {
                assert_eq!(
                    w(v, width).inv_odd().unwrap().value(),
                    inverse_by_euclid(v, width),
                    "v={v} width={width}"
                );
            }
        }
    }

    #[test]
    fn inv_odd_rejects_even() {
        assert_eq!(w(4, 8).inv_odd(), Err(WordError::EvenInverse(4)));
    }

    #[test]
    fn inv_odd_is_involution() {
        for v in (1u64..256).step_by(2) {
            let x = w(v, 8);
            assert_eq!(x.inv_odd().unwrap().inv_odd().unwrap(), x);
        }
    }

    #[test]
    fn pow_examples() {
        assert_eq!(pow_odd_base(w(1, 8), w(2, 8)).value(), 9);
        assert_eq!(pow_odd_base(w(1, 8), w(0, 8)).value(), 1);
        assert_eq!(pow_odd_base(w(2, 8), w(3, 8)).value(), 125);
    }

    #[test]
    fn pow_against_repeated_multiplication() {
        for width in [5u32, 8] {
            for u in 0..1u64 << width.min(6) {
                let mut acc = Word::one(width);
                let base = w(1, width).add(w(u, width).shl(1));
                for v in 0..1u64 << width.min(6) {
                    assert_eq!(pow_odd_base(w(u, width), w(v, width)), acc);
                    acc = acc.mul(base);
                }
            }
        }
    }

    #[test]
    fn pow_exponent_reduction_is_sound() {
        // (1+2u)^(2^w) ≡ 1 mod 2^w, so reducing exponents mod 2^w is exact.
        for width in 1..=12u32 {
            for a in (1u64..1 << width).step_by(2) {
                let mut acc = w(a, width);
                for _ in 0..width {
                    acc = acc.mul(acc);
                }
                assert_eq!(acc.value(), 1, "a={a} width={width}");
            }
        }
    }

    fn binom_oracle(x: u64, i: u32, width: u32) -> u64 {
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for t in 0..i as u64 {
            if x < t + 1 && x < i as u64 {
                // product will contain a zero factor
            }
            if x >= t {
                num *= BigUint::from(x - t);
            } else {
                num *= BigUint::from(0u32);
            }
            den *= BigUint::from(t + 1);
        }
        let q = num / den;
        let m = BigUint::from(1u32) << width;
        (q % m).iter_u64_digits().next().unwrap_or(0)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom_mod(w(5, 8), 2).value(), 10);
        assert_eq!(binom_mod(w(7, 4), 3).value(), 3); // 35 mod 16
        for x in 0..64u64 {
            assert_eq!(binom_mod(w(x, 10), 0).value(), 1);
        }
    }

    #[test]
    fn binom_against_exact_oracle() {
        // binomial of the canonical representative, truncated
        for width in [4u32, 8, 16] {
            for x in 0..40u64 {
                let canonical = x & mask_for(width);
                for i in 0..20u32 {
                    assert_eq!(
                        binom_mod(w(x, width), i).value(),
                        binom_oracle(canonical, i, width),
                        "x={x} i={i} width={width}"
                    );
                }
            }
        }
        // wide-accumulator path
        assert_eq!(
            binom_mod(w(1000, 60), 70).value(),
            binom_oracle(1000, 70, 60)
        );
    }

    #[test]
    fn binom_pascal_recurrence() {
        // C(x+1, i) = C(x, i) + C(x, i-1) mod 2^width, away from wraparound.
        let width = 10;
        for x in 0..(1u64 << width) - 1 {
            for i in 1..8u32 {
                let lhs = binom_mod(w(x + 1, width), i);
                let rhs = binom_mod(w(x, width), i).add(binom_mod(w(x, width), i - 1));
                assert_eq!(lhs, rhs, "x={x} i={i}");
            }
        }
    }

    #[test]
    fn ord2_factorial_matches_direct_count() {
        let mut ord = 0u32;
        for i in 1..=200u32 {
            ord += i.trailing_zeros();
            assert_eq!(ord2_factorial(i), ord, "i={i}");
        }
    }

    #[test]
    fn bitwise_arithmetic_identities_exhaustive() {
        // NOT u = u XOR -1; NOT u + u = -1; u XOR v = u+v-2(u AND v);
        // u OR v = u+v-(u AND v); u OR v = (u XOR v)+(u AND v).
        for width in [1u32, 2, 3, 6, 12] {
            let minus_one = Word::zero(width).sub(Word::one(width));
            for uv in 0..1u64 << width {
                let u = w(uv, width);
                assert_eq!(u.not(), u.xor(minus_one));
                assert_eq!(u.not().add(u), minus_one);
            }
            for uv in 0..1u64 << width {
                for vv in 0..1u64 << width {
                    let (u, v) = (w(uv, width), w(vv, width));
                    let and = u.and(v);
                    assert_eq!(u.xor(v), u.add(v).sub(and.shl(1)));
                    assert_eq!(u.or(v), u.add(v).sub(and));
                    assert_eq!(u.or(v), u.xor(v).add(and));
                }
            }
        }
    }

    #[test]
    fn strong_triangle_inequality_exhaustive() {
        let width = 6;
        for a in 0..1u64 << width {
            for b in 0..1u64 << width {
                for c in 0..1u64 << width {
                    let (x, y, z) = (w(a, width), w(b, width), w(c, width));
                    let dxz = dist_ord(x, z);
                    let dxy = dist_ord(x, y);
                    let dyz = dist_ord(y, z);
                    // d(x,z) <= max(d(x,y), d(y,z))
                    assert!(dxz.dist_le(if dxy.dist_le(dyz) { dyz } else { dxy }));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn prop_identities_width_64(a in any::<u64>(), b in any::<u64>()) {
            let width = 64;
            let (u, v) = (w(a, width), w(b, width));
            prop_assert_eq!(u.xor(v), u.add(v).sub(u.and(v).shl(1)));
            prop_assert_eq!(u.or(v), u.xor(v).add(u.and(v)));
        }

        #[test]
        fn prop_strong_triangle_width_16(a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
            let (x, y, z) = (w(a as u64, 16), w(b as u64, 16), w(c as u64, 16));
            let dxz = dist_ord(x, z);
            let dxy = dist_ord(x, y);
            let dyz = dist_ord(y, z);
            let bigger = if dxy.dist_le(dyz) { dyz } else { dxy };
            prop_assert!(dxz.dist_le(bigger));
        }

        #[test]
        fn prop_inv_odd(a in any::<u64>()) {
            let v = w(a | 1, 64);
            let inv = v.inv_odd().unwrap();
            prop_assert_eq!(v.mul(inv), Word::one(64));
        }
    }
}
