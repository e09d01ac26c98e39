//! Polynomial criteria: falling-factorial parities, small-modulus
//! classification for arbitrary primes, integer-valuedness screening for
//! rational coefficients, and the bit tests for the `x + (x²∨C)` family.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::cycle::{Oracle, OracleError};
use crate::expr::TExpr;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyClass {
    Ergodic,
    MeasurePreservingOnly,
    Neither,
}

/// Coefficients `c_i` over the descending factorial basis
/// `1, x, x(x-1), x(x-1)(x-2), ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFF {
    pub coeffs: Vec<BigInt>,
}

impl PolyFF {
    pub fn new(coeffs: Vec<BigInt>) -> PolyFF {
        PolyFF { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> PolyFF {
        PolyFF {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    fn coeff_residue(&self, i: usize, modulus: u32) -> u32 {
        match self.coeffs.get(i) {
            None => 0,
            Some(c) => {
                let m = BigInt::from(modulus);
                let r = c % &m;
                let r = if r.is_negative() { r + &m } else { r };
                r.to_string().parse::<u32>().expect("small residue")
            }
        }
    }
}

/// Stirling numbers of the second kind: `x^n = Σ_k S(n,k) x^{(k)}`.
fn stirling2_row(n: usize) -> Vec<BigInt> {
    let mut row: Vec<BigInt> = vec![BigInt::one()];
    for cur in 1..=n {
        let mut next = vec![BigInt::zero(); cur + 1];
        for (k, v) in row.iter().enumerate() {
            next[k] += v * BigInt::from(k as u64);
            if k < cur {
                next[k + 1] += v;
            }
        }
        row = next;
    }
    row
}

/// Converts monomial coefficients to the descending-factorial basis; exact.
pub fn monomial_to_ff(coeffs: &[BigInt]) -> PolyFF {
    let d = coeffs.len();
    let mut out = vec![BigInt::zero(); d.max(1)];
    for (n, a) in coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (k, s) in stirling2_row(n).iter().enumerate() {
            out[k] += a * s;
        }
    }
    PolyFF { coeffs: out }
}

/// Converts back to monomial coefficients via the signed first-kind numbers:
/// `x^{(n)} = Σ_k s(n,k) x^k`.
pub fn ff_to_monomial(p: &PolyFF) -> Vec<BigInt> {
    let d = p.coeffs.len();
    let mut out = vec![BigInt::zero(); d.max(1)];
    // build rows of signed Stirling numbers of the first kind iteratively
    let mut row: Vec<BigInt> = vec![BigInt::one()];
    for (n, c) in p.coeffs.iter().enumerate() {
        if !c.is_zero() {
            for (k, s) in row.iter().enumerate() {
                out[k] += c * s;
            }
        }
        // next row: s(n+1,k) = s(n,k-1) - n*s(n,k)
        let mut next = vec![BigInt::zero(); n + 2];
        for (k, v) in row.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * BigInt::from(n as u64);
        }
        row = next;
    }
    out
}

/// Parity criterion on the four lowest falling-factorial coefficients;
/// complete for integer polynomials.
pub fn classify_poly_ff(p: &PolyFF) -> PolyClass {
    let c0 = p.coeff_residue(0, 2);
    let c1_mod4 = p.coeff_residue(1, 4);
    let c2 = p.coeff_residue(2, 2);
    let c3_mod4 = p.coeff_residue(3, 4);
    if c0 == 1 && c1_mod4 == 1 && c2 == 0 && c3_mod4 == 0 {
        return PolyClass::Ergodic;
    }
    if c1_mod4 % 2 == 1 && c2 == 0 && c3_mod4.is_multiple_of(2) {
        return PolyClass::MeasurePreservingOnly;
    }
    PolyClass::Neither
}

fn horner_mod(coeffs: &[i64], x: u64, m: u64) -> u64 {
    let mut acc: i128 = 0;
    for c in coeffs.iter().rev() {
        acc = (acc * x as i128 + *c as i128).rem_euclid(m as i128);
    }
    acc as u64
}

fn table_is_transitive(table: &[u64]) -> bool {
    let n = table.len() as u64;
    let mut seen = vec![false; table.len()];
    let mut cur = 0u64;
    for _ in 0..n {
        if seen[cur as usize] {
            return false;
        }
        seen[cur as usize] = true;
        cur = table[cur as usize];
    }
    cur == 0
}

fn table_is_bijective(table: &[u64]) -> bool {
    let mut seen = vec![false; table.len()];
    for &y in table {
        if seen[y as usize] {
            return false;
        }
        seen[y as usize] = true;
    }
    true
}

/// Classification of an integer polynomial over an arbitrary prime, decided
/// at exactly the small modulus that settles every power: transitivity
/// modulo `p^3` for p in {2, 3} (else `p^2`), bijectivity modulo `p^2`.
pub fn classify_poly_modp(
    p: u64,
    coeffs: &[i64],
    oracle: &Oracle,
) -> Result<PolyClass, OracleError> {
    let erg_mod = p
        .checked_mul(p)
        .and_then(|m| if p <= 3 { m.checked_mul(p) } else { Some(m) })
        .filter(|&m| m <= oracle.cap)
        .ok_or(OracleError::OverCap {
            bits: 64,
            cap: oracle.cap,
        })?;
    let bij_mod = p * p;
    let erg_table: Vec<u64> = (0..erg_mod)
        .map(|x| horner_mod(coeffs, x, erg_mod))
        .collect();
    if table_is_transitive(&erg_table) {
        return Ok(PolyClass::Ergodic);
    }
    let bij_table: Vec<u64> = (0..bij_mod)
        .map(|x| horner_mod(coeffs, x, bij_mod))
        .collect();
    if table_is_bijective(&bij_table) {
        Ok(PolyClass::MeasurePreservingOnly)
    } else {
        Ok(PolyClass::Neither)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalPolyError {
    #[error("polynomial takes the non-integer value {value} at z = {z}")]
    NonIntegerValued { z: u64, value: String },
    #[error("induced map is not compatible: images of {a} and {b} differ modulo {modulus}")]
    NotCompatible { a: u64, b: u64, modulus: u64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Screens a polynomial with rational coefficients for integer-valuedness,
/// then decides ergodicity/measure preservation from the induced map at the
/// modulus `p^(floor(log_p(deg)) + 3)`.
pub fn classify_rational_poly(
    coeffs: &[BigRational],
    p: u64,
    oracle: &Oracle,
) -> Result<PolyClass, RationalPolyError> {
    let degree = coeffs.len().saturating_sub(1).max(1) as u64;
    let mut level = 3u32;
    {
        let mut t = degree;
        while t >= p {
            t /= p;
            level += 1;
        }
    }
    let modulus =
        p.checked_pow(level)
            .filter(|&m| m <= oracle.cap)
            .ok_or(OracleError::OverCap {
                bits: 64,
                cap: oracle.cap,
            })?;

    // exact evaluation over the rationals: any denominator is a rejection
    let big_m = BigInt::from(modulus);
    let mut table = Vec::with_capacity(modulus as usize);
    for z in 0..modulus {
        let zq = BigRational::from(BigInt::from(z));
        let mut acc = BigRational::zero();
        for c in coeffs.iter().rev() {
            acc = acc * &zq + c;
        }
        if !acc.is_integer() {
            return Err(RationalPolyError::NonIntegerValued {
                z,
                value: acc.to_string(),
            });
        }
        let r = acc.to_integer() % &big_m;
        let r = if r.is_negative() { r + &big_m } else { r };
        table.push(r.to_string().parse::<u64>().expect("reduced residue"));
    }

    // compatibility of the induced table
    let mut step = p;
    while step < modulus {
        for z in 0..modulus - step {
            if table[z as usize] % step != table[(z + step) as usize] % step {
                return Err(RationalPolyError::NotCompatible {
                    a: z,
                    b: z + step,
                    modulus: step,
                });
            }
        }
        step *= p;
    }

    if table_is_transitive(&table) {
        Ok(PolyClass::Ergodic)
    } else if table_is_bijective(&table) {
        Ok(PolyClass::MeasurePreservingOnly)
    } else {
        Ok(PolyClass::Neither)
    }
}

/// Bijectivity of `a_0 + a_1 x + ... + a_d x^d` modulo all powers of two:
/// `a_1` odd, the even-index tail sums even, the odd-index tail sums even.
/// The same parities decide the XOR-combined variant
/// `a_0 ^ a_1 x ^ ... ^ a_d x^d`.
pub fn permutation_poly(coeffs: &[i64]) -> bool {
    let a = |i: usize| coeffs.get(i).copied().unwrap_or(0);
    if a(1).rem_euclid(2) != 1 {
        return false;
    }
    let even_tail: i64 = (2..coeffs.len()).step_by(2).map(a).sum();
    let odd_tail: i64 = (3..coeffs.len()).step_by(2).map(a).sum();
    even_tail.rem_euclid(2) == 0 && odd_tail.rem_euclid(2) == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsClass {
    SingleCycle,
    InvertibleOnly,
    NotInvertible,
}

/// Classification of `x + (x² ∨ C)` on n-bit words (n >= 3) by the first and
/// third bits of C: invertible iff bit 0 of C is set, single cycle iff bits 0
/// and 2 are both set.
pub fn klimov_shamir_c(c: Word) -> KsClass {
    assert!(c.width() >= 3, "single-cycle clause needs width >= 3");
    if c.bit(0) == 0 {
        KsClass::NotInvertible
    } else if c.bit(2) == 1 {
        KsClass::SingleCycle
    } else {
        KsClass::InvertibleOnly
    }
}

/// The expression `x + (x*x | C)`, for oracle cross-checks.
pub fn klimov_shamir_expr(c: u64) -> TExpr {
    TExpr::x().add(TExpr::x().mul(TExpr::x()).or(TExpr::constant(c)))
}

const EXTRACT_DEGREE_CAP: usize = 64;

/// Dense monomial coefficients of a polynomial expression, when the tree is
/// built from ring operations only.
pub fn extract_poly(e: &TExpr) -> Option<Vec<BigInt>> {
    fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
        while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    }
    fn go(e: &TExpr) -> Option<Vec<BigInt>> {
        Some(match e {
            TExpr::Var(0) => vec![BigInt::zero(), BigInt::one()],
            TExpr::Var(_) => return None,
            TExpr::Const(c) => vec![BigInt::from(*c)],
            TExpr::Add(a, b) => {
                let (pa, pb) = (go(a)?, go(b)?);
                let mut out = vec![BigInt::zero(); pa.len().max(pb.len())];
                for (i, c) in pa.into_iter().enumerate() {
                    out[i] += c;
                }
                for (i, c) in pb.into_iter().enumerate() {
                    out[i] += c;
                }
                out
            }
            TExpr::Sub(a, b) => {
                let (pa, pb) = (go(a)?, go(b)?);
                let mut out = vec![BigInt::zero(); pa.len().max(pb.len())];
                for (i, c) in pa.into_iter().enumerate() {
                    out[i] += c;
                }
                for (i, c) in pb.into_iter().enumerate() {
                    out[i] -= c;
                }
                out
            }
            TExpr::Mul(a, b) => {
                let (pa, pb) = (go(a)?, go(b)?);
                if pa.len() + pb.len() > EXTRACT_DEGREE_CAP {
                    return None;
                }
                let mut out = vec![BigInt::zero(); pa.len() + pb.len() - 1];
                for (i, ca) in pa.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (j, cb) in pb.iter().enumerate() {
                        out[i + j] += ca * cb;
                    }
                }
                out
            }
            TExpr::Neg(a) => go(a)?.into_iter().map(|c| -c).collect(),
            TExpr::Shl(a, k) => {
                let scale = BigInt::one() << *k;
                go(a)?.into_iter().map(|c| c * &scale).collect()
            }
            TExpr::Compose { body, args } => {
                if args.len() != 1 {
                    return None;
                }
                let inner = go(&args[0])?;
                let outer = go(body)?;
                // polynomial composition by Horner
                let mut acc = vec![BigInt::zero()];
                for c in outer.into_iter().rev() {
                    // acc = acc * inner + c
                    if acc.len() + inner.len() > EXTRACT_DEGREE_CAP + 1 {
                        return None;
                    }
                    let mut next = vec![BigInt::zero(); acc.len() + inner.len() - 1];
                    for (i, ca) in acc.iter().enumerate() {
                        if ca.is_zero() {
                            continue;
                        }
                        for (j, cb) in inner.iter().enumerate() {
                            next[i + j] += ca * cb;
                        }
                    }
                    next[0] += c;
                    acc = next;
                }
                acc
            }
            _ => return None,
        })
    }
    go(e).map(trim)
}
