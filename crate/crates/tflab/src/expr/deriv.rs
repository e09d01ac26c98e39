//! Derivatives modulo 2 and modulo 4, with certified uniform-differentiability
//! thresholds.
//!
//! The per-node rules: masking with a non-negative constant differentiates to
//! 0 (`&`), 1 (`|`), or ±1 (`^`), with the signs flipped for negative
//! constants; `~x` differentiates to -1; reduction mod `2^k` to 0; sums,
//! products and compositions follow the classical rules. `x ^ y` in two live
//! variables has both partials 1 but only modulo 2. A product carrying a
//! constant factor divisible by `2^k` needs no derivative of the other
//! factor: its contribution vanishes modulo `2^k`.

use thiserror::Error;

use super::TExpr;
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivError {
    #[error("{0} has no derivative rule modulo 2^{1}")]
    NoRule(String, u8),
    #[error("expression must be univariate for a plain derivative")]
    NotUnivariate,
    #[error("system must be square: {eqs} equations over {vars} variables")]
    NotSquare { eqs: usize, vars: usize },
    #[error(
        "differential validation failed at width {width}: \
         F(u + 2^{level}*h) != F(u) + 2^{level}*h*F'(u) at u={u:#x}, h={h:#x}"
    )]
    ValidationFailed {
        width: u32,
        level: u32,
        u: u64,
        h: u64,
    },
    #[error("derivative evaluation failed: {0}")]
    Eval(String),
    #[error("k must be 1 or 2, got {0}")]
    BadK(u8),
    #[error("test width {width} cannot validate a structural bound of {needed}")]
    TestWidthTooSmall { width: u32, needed: u32 },
}

fn bitlen(v: i128) -> u32 {
    let a = v.unsigned_abs();
    128 - a.leading_zeros()
}

struct Deriv {
    expr: TExpr,
    bound: u32,
}

fn d(expr: TExpr, bound: u32) -> Deriv {
    Deriv { expr, bound }
}

/// Derivative of `e` with respect to `Var(var)`, valid modulo `2^k`, together
/// with a structural threshold from which the Taylor congruence should hold.
fn deriv_and_bound(e: &TExpr, var: usize, k: u8) -> Result<Deriv, DerivError> {
    let zero = TExpr::Const(0);
    let one = TExpr::Const(1);
    match e {
        TExpr::Var(i) => Ok(d(if *i == var { one } else { zero }, 1)),
        TExpr::Const(_) => Ok(d(zero, 1)),
        TExpr::Add(a, b) => {
            let (da, db) = (deriv_and_bound(a, var, k)?, deriv_and_bound(b, var, k)?);
            Ok(d(da.expr.add(db.expr), da.bound.max(db.bound)))
        }
        TExpr::Sub(a, b) => {
            let (da, db) = (deriv_and_bound(a, var, k)?, deriv_and_bound(b, var, k)?);
            Ok(d(da.expr.sub(db.expr), da.bound.max(db.bound)))
        }
        TExpr::Neg(a) => {
            let da = deriv_and_bound(a, var, k)?;
            Ok(d(da.expr.neg(), da.bound))
        }
        TExpr::Mul(a, b) => {
            let (cside, vside) = match (a.const_value(), b.const_value()) {
                (Some(_), _) => (a, b),
                (_, Some(_)) => (b, a),
                (None, None) => {
                    // both factors live: the squared-increment term forces
                    // the threshold up to k
                    let da = deriv_and_bound(a, var, k)?;
                    let db = deriv_and_bound(b, var, k)?;
                    let expr = da.expr.mul((**b).clone()).add((**a).clone().mul(db.expr));
                    return Ok(d(expr, da.bound.max(db.bound).max(k as u32)));
                }
            };
            let c = cside.const_value().unwrap();
            match deriv_and_bound(vside, var, k) {
                Ok(dv) => Ok(d((**cside).clone().mul(dv.expr), dv.bound)),
                // 2^k | c kills the increment of the other factor entirely
                Err(_) if c % (1i128 << k) == 0 => Ok(d(zero, 1)),
                Err(e) => Err(e),
            }
        }
        TExpr::Shl(a, s) => match deriv_and_bound(a, var, k) {
            Ok(da) => Ok(d(da.expr.shl(*s), da.bound)),
            Err(_) if *s >= k as u32 => Ok(d(zero, 1)),
            Err(e) => Err(e),
        },
        TExpr::Xor(a, b) => match (a.const_value(), b.const_value()) {
            (Some(_), Some(_)) => Ok(d(zero, 1)),
            (None, Some(c)) | (Some(c), None) => {
                let vside = if b.const_value().is_some() { a } else { b };
                let dv = deriv_and_bound(vside, var, k)?;
                let expr = if c >= 0 { dv.expr } else { dv.expr.neg() };
                Ok(d(expr, dv.bound.max(bitlen(c)).max(1)))
            }
            (None, None) => {
                if k != 1 {
                    return Err(DerivError::NoRule("xor of two live operands".into(), k));
                }
                let (da, db) = (deriv_and_bound(a, var, k)?, deriv_and_bound(b, var, k)?);
                Ok(d(da.expr.add(db.expr), da.bound.max(db.bound).max(1)))
            }
        },
        TExpr::And(a, b) => {
            let (c, vside) = match (b.const_value(), a.const_value()) {
                (Some(c), _) => (c, a),
                (_, Some(c)) => (c, b),
                (None, None) => {
                    return Err(DerivError::NoRule("and of two live operands".into(), k))
                }
            };
            if c >= 0 {
                // (y + s) & c = (y & c) once s vanishes past the mask; no
                // derivative of the live side is needed
                Ok(d(zero, bitlen(c).max(1)))
            } else {
                let dv = deriv_and_bound(vside, var, k)?;
                Ok(d(dv.expr, dv.bound.max(bitlen(c))))
            }
        }
        TExpr::Or(a, b) => {
            let (c, vside) = match (b.const_value(), a.const_value()) {
                (Some(c), _) => (c, a),
                (_, Some(c)) => (c, b),
                (None, None) => {
                    return Err(DerivError::NoRule("or of two live operands".into(), k))
                }
            };
            if c >= 0 {
                let dv = deriv_and_bound(vside, var, k)?;
                Ok(d(dv.expr, dv.bound.max(bitlen(c))))
            } else {
                Ok(d(zero, bitlen(c).max(1)))
            }
        }
        TExpr::Not(a) => {
            let da = deriv_and_bound(a, var, k)?;
            Ok(d(da.expr.neg(), da.bound.max(1)))
        }
        TExpr::Mod2k(_, kk) => Ok(d(zero, (*kk).max(1))),
        TExpr::InvOdd(_) => Err(DerivError::NoRule("inv".into(), k)),
        TExpr::PowOddBase(..) => Err(DerivError::NoRule("pow1p2".into(), k)),
        TExpr::Binom2k { .. } => Err(DerivError::NoRule("binom2".into(), k)),
        TExpr::Compose { body, args } => {
            let mut total: Option<TExpr> = None;
            let mut bound = 1;
            for (i, arg) in args.iter().enumerate() {
                let darg = deriv_and_bound(arg, var, k)?;
                if darg.expr == TExpr::Const(0) {
                    continue;
                }
                let dbody = deriv_and_bound(body, i, k)?;
                bound = bound.max(darg.bound).max(dbody.bound);
                let part = TExpr::compose(dbody.expr, args.clone()).mul(darg.expr);
                total = Some(match total {
                    None => part,
                    Some(t) => t.add(part),
                });
            }
            Ok(d(total.unwrap_or(TExpr::Const(0)), bound))
        }
    }
}

/// Derivative modulo 2 of a univariate expression.
pub fn deriv_mod2(e: &TExpr) -> Result<TExpr, DerivError> {
    if !e.is_univariate() {
        return Err(DerivError::NotUnivariate);
    }
    Ok(deriv_and_bound(e, 0, 1)?.expr)
}

/// Partial derivative modulo `2^k` with respect to `Var(var)`.
pub fn partial_deriv(e: &TExpr, var: usize, k: u8) -> Result<TExpr, DerivError> {
    if !(1..=2).contains(&k) {
        return Err(DerivError::BadK(k));
    }
    Ok(deriv_and_bound(e, var, k)?.expr)
}

/// Jacobi matrix modulo 2 of a square system: entry `[i][j]` is `∂f_i/∂x_j`.
pub fn jacobian_mod2(system: &[TExpr]) -> Result<Vec<Vec<TExpr>>, DerivError> {
    let m = system.len();
    system
        .iter()
        .map(|f| (0..m).map(|j| partial_deriv(f, j, 1)).collect())
        .collect()
}

/// Determinant over GF(2) of the Jacobi matrix evaluated at `point`.
pub fn jacobian_det_mod2(system: &[TExpr], point: &[Word]) -> Result<u8, DerivError> {
    let m = system.len();
    let vars = system
        .iter()
        .filter_map(|f| f.max_var())
        .max()
        .map_or(0, |v| v + 1);
    if vars > m {
        return Err(DerivError::NotSquare { eqs: m, vars });
    }
    let jac = jacobian_mod2(system)?;
    let width = point.first().map_or(1, |w| w.width());
    let mut rows: Vec<u64> = Vec::with_capacity(m);
    for row in &jac {
        let mut bits = 0u64;
        for (j, entry) in row.iter().enumerate() {
            let v = entry
                .eval(point, width)
                .map_err(|e| DerivError::Eval(e.to_string()))?;
            bits |= (v.value() & 1) << j;
        }
        rows.push(bits);
    }
    Ok(gf2_det(&mut rows))
}

fn gf2_det(rows: &mut [u64]) -> u8 {
    let m = rows.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| (rows[r] >> col) & 1 == 1);
        match pivot {
            None => return 0,
            Some(p) => rows.swap(col, p),
        }
        for r in col + 1..m {
            if (rows[r] >> col) & 1 == 1 {
                rows[r] ^= rows[col];
            }
        }
    }
    1
}

/// The derivative payload of a [`DiffCertificate`].
#[derive(Debug, Clone)]
pub enum DerivForm {
    Univariate(TExpr),
    Jacobian(Vec<Vec<TExpr>>),
}

/// A certified uniform-differentiability threshold: the Taylor congruence
/// `F(u + 2^K h) = F(u) + 2^K h F'(u)  (mod 2^{k+K})` was checked
/// exhaustively for every `K` from `n` up to `test_width - k`.
#[derive(Debug, Clone)]
pub struct DiffCertificate {
    pub k: u8,
    /// Certified threshold; never below the structural bound.
    pub n: u32,
    /// The table-driven structural bound before validation.
    pub structural: u32,
    pub test_width: u32,
    pub verified: bool,
    pub derivative: DerivForm,
}

/// Certifies the differentiability threshold of a univariate expression.
pub fn n_bound(e: &TExpr, k: u8, test_width: u32) -> Result<DiffCertificate, DerivError> {
    if !e.is_univariate() {
        return Err(DerivError::NotUnivariate);
    }
    let dv = deriv_and_bound(e, 0, k)?;
    let structural = dv.bound.max(1);
    let top = test_width.saturating_sub(k as u32);
    if structural > top {
        return Err(DerivError::TestWidthTooSmall {
            width: test_width,
            needed: structural,
        });
    }
    let mut n = structural;
    let mut worst: Option<(u32, u64, u64)> = None;
    for level in structural..=top {
        if let Some((u, h)) = univariate_level_fails(e, &dv.expr, k, level) {
            worst = Some((level, u, h));
            n = level + 1;
        }
    }
    if n > top {
        let (level, u, h) = worst.expect("raise implies a failure");
        return Err(DerivError::ValidationFailed {
            width: test_width,
            level,
            u,
            h,
        });
    }
    Ok(DiffCertificate {
        k,
        n,
        structural,
        test_width,
        verified: true,
        derivative: DerivForm::Univariate(dv.expr),
    })
}

fn univariate_level_fails(e: &TExpr, de: &TExpr, k: u8, level: u32) -> Option<(u64, u64)> {
    let width = level + k as u32;
    let modulus = 1u64 << width;
    for u in 0..modulus {
        let fu = e.eval1(u, width).ok()?;
        let du = de.eval1(u, width).ok()?;
        for h in 1..(1u64 << k) {
            let shifted = (u + (h << level)) % modulus;
            let lhs = e.eval1(shifted, width).ok()?;
            let rhs = (fu + (h << level).wrapping_mul(du)) % modulus;
            if lhs != rhs {
                return Some((u, h));
            }
        }
    }
    None
}

/// Certifies the threshold of a square system (modulo 2 only).
pub fn n_bound_system(system: &[TExpr], test_width: u32) -> Result<DiffCertificate, DerivError> {
    let k = 1u8;
    let m = system.len();
    let vars = system
        .iter()
        .filter_map(|f| f.max_var())
        .max()
        .map_or(0, |v| v + 1);
    if vars > m {
        return Err(DerivError::NotSquare { eqs: m, vars });
    }
    let mut jac = Vec::with_capacity(m);
    let mut structural = 1u32;
    for f in system {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let dv = deriv_and_bound(f, j, k)?;
            structural = structural.max(dv.bound);
            row.push(dv.expr);
        }
        jac.push(row);
    }
    let top = test_width.saturating_sub(k as u32);
    if structural > top {
        return Err(DerivError::TestWidthTooSmall {
            width: test_width,
            needed: structural,
        });
    }
    let mut n = structural;
    let mut worst: Option<(u32, u64, u64)> = None;
    for level in structural..=top {
        if let Some((u, h)) = system_level_fails(system, &jac, level) {
            worst = Some((level, u, h));
            n = level + 1;
        }
    }
    if n > top {
        let (level, u, h) = worst.expect("raise implies a failure");
        return Err(DerivError::ValidationFailed {
            width: test_width,
            level,
            u,
            h,
        });
    }
    Ok(DiffCertificate {
        k,
        n,
        structural,
        test_width,
        verified: true,
        derivative: DerivForm::Jacobian(jac),
    })
}

// Packs the tuple (x_0, ..., x_{m-1}) of `width`-bit coordinates into one
// integer for witness reporting.
fn system_level_fails(system: &[TExpr], jac: &[Vec<TExpr>], level: u32) -> Option<(u64, u64)> {
    let m = system.len();
    let width = level + 1;
    let modulus = 1u64 << width;
    let mut point = vec![Word::zero(width); m];
    let mut shifted = vec![Word::zero(width); m];
    let states = modulus.pow(m as u32);
    for packed_u in 0..states {
        for (i, p) in point.iter_mut().enumerate() {
            *p = Word::new((packed_u >> (i as u32 * width)) & (modulus - 1), width);
        }
        for packed_h in 1..1u64 << m {
            for i in 0..m {
                let h = (packed_h >> i) & 1;
                shifted[i] = point[i].add(Word::new(h << level, width));
            }
            for (i, f) in system.iter().enumerate() {
                let lhs = f.eval(&shifted, width).ok()?.value();
                let mut rhs = f.eval(&point, width).ok()?.value();
                for (j, entry) in jac[i].iter().enumerate() {
                    if (packed_h >> j) & 1 == 1 {
                        let dj = entry.eval(&point, width).ok()?.value();
                        rhs = rhs.wrapping_add((1u64 << level).wrapping_mul(dj));
                    }
                }
                if lhs != rhs % modulus {
                    return Some((packed_u, packed_h));
                }
            }
        }
    }
    None
}
