//! 2-adic complexity: the size of the reduced fraction whose 2-adic
//! expansion is the given periodic bit stream, reported exactly plus as a
//! binary logarithm.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::bits::BitSeq;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdicError {
    #[error("empty period")]
    Empty,
    #[error("half-period value {gamma} out of range for coordinate {j}")]
    GammaOutOfRange { j: u32, gamma: String },
}

/// Exact fraction `u/v` (reduced, `v > 0` odd) with its complexity
/// `log2(max(|u|, v))`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdicComplexity {
    pub u: BigInt,
    pub v: BigUint,
    pub log2_bits: f64,
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Binary logarithm of a positive big integer, good to well below 1e-6.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let top = (x >> (bits - 53)).to_u64().unwrap();
    (top as f64).log2() + (bits - 53) as f64
}

impl AdicComplexity {
    fn from_fraction(u: BigInt, v: BigUint) -> AdicComplexity {
        let mag = u.magnitude().clone();
        let max = if mag > v { mag } else { v.clone() };
        AdicComplexity {
            log2_bits: log2_big(&max),
            u,
            v,
        }
    }
}

/// General mode: one full period `s_0 s_1 ...` read as the 2-adic expansion
/// of `-γ_T / (2^T - 1)` with `γ_T = Σ s_i 2^i`, reduced exactly.
pub fn two_adic_general(period: &BitSeq) -> Result<AdicComplexity, AdicError> {
    let t = period.len();
    if t == 0 {
        return Err(AdicError::Empty);
    }
    let mut gamma = BigUint::zero();
    for i in (0..t).rev() {
        gamma <<= 1;
        if period.get(i) {
            gamma |= BigUint::one();
        }
    }
    let denom = (BigUint::one() << t) - BigUint::one();
    if gamma.is_zero() {
        return Ok(AdicComplexity::from_fraction(
            BigInt::zero(),
            BigUint::one(),
        ));
    }
    let g = gcd(gamma.clone(), denom.clone());
    let u = BigInt::from_biguint(Sign::Minus, gamma / &g);
    let v = denom / g;
    Ok(AdicComplexity::from_fraction(u, v))
}

/// Coordinate-sequence mode: for the j-th coordinate stream of a
/// single-cycle map, the complexity depends only on the first half period
/// `γ` through `(2^(2^j) + 1) / gcd(2^(2^j) + 1, γ + 1)`.
pub fn two_adic_coord(j: u32, gamma: &BigUint) -> Result<AdicComplexity, AdicError> {
    let half = 1u64 << j;
    if gamma.bits() > half {
        return Err(AdicError::GammaOutOfRange {
            j,
            gamma: gamma.to_string(),
        });
    }
    let fermat = (BigUint::one() << half) + BigUint::one();
    let g = gcd(fermat.clone(), gamma + BigUint::one());
    // value = (γ - 2^(2^j)) / (2^(2^j) + 1): numerator negative, same gcd
    let num = (BigUint::one() << half) - gamma;
    let u = BigInt::from_biguint(Sign::Minus, num / &g);
    let v = fermat / g;
    Ok(AdicComplexity::from_fraction(u, v))
}
