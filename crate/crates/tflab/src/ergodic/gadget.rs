//! Constructors that are ergodic or measure-preserving by construction.
//!
//! Each builder returns the expression together with the certificate naming
//! the criterion instance that guarantees the property, so downstream users
//! (generators, packers) can demand a verdict without re-deriving it.

use rand::Rng;
use thiserror::Error;

use super::{Property, Theorem, Verdict, VerdictResult};
use crate::expr::TExpr;

/// An expression carrying the verdict that certifies it.
#[derive(Debug, Clone)]
pub struct Verified {
    pub expr: TExpr,
    pub verdict: Verdict,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("the additive constant must be odd, got {0}")]
    EvenConstant(u64),
    #[error("lift needs a proven ergodic base map")]
    BaseNotErgodic,
}

fn proven(property: Property, method: &str, theorem: Theorem) -> Verdict {
    Verdict {
        property,
        result: VerdictResult::Proven,
        method: method.to_string(),
        modulus_checked: None,
        witness: None,
        theorem: Some(theorem),
    }
}

/// `c + x + 2(g(x+1) - g(x))` for odd `c` and any compatible `g`: ergodic.
pub fn delta_ergodic(c: u64, g: &TExpr) -> Result<Verified, GadgetError> {
    if c.is_multiple_of(2) {
        return Err(GadgetError::EvenConstant(c));
    }
    let g_next = TExpr::compose(g.clone(), vec![TExpr::x().add(TExpr::constant(1))]);
    let g_here = TExpr::compose(g.clone(), vec![TExpr::x()]);
    let expr = TExpr::constant(c)
        .add(TExpr::x())
        .add(g_next.sub(g_here).shl(1));
    Ok(Verified {
        expr,
        verdict: proven(Property::Ergodic, &format!("delta(c={c})"), Theorem::Delta),
    })
}

/// `d + c*x + 2*g(x)` for odd `c`: measure preserving for every `d` and
/// compatible `g`.
pub fn affine_mp(d: u64, c: u64, g: &TExpr) -> Result<Verified, GadgetError> {
    if c.is_multiple_of(2) {
        return Err(GadgetError::EvenConstant(c));
    }
    let expr = TExpr::constant(d)
        .add(TExpr::constant(c).mul(TExpr::x()))
        .add(g.clone().shl(1));
    Ok(Verified {
        expr,
        verdict: proven(
            Property::MeasurePreserving,
            &format!("affine(d={d},c={c})"),
            Theorem::Delta,
        ),
    })
}

/// `1 + x + Σ c_i · 2^(⌊log2(i+1)⌋+1) · C(x, i)`, the interpolation-series
/// form that characterizes ergodic maps; `coeffs[0]` is `c_1`.
pub fn mahler_ergodic(coeffs: &[u64]) -> Verified {
    let mut expr = TExpr::constant(1).add(TExpr::x());
    for (idx, &c) in coeffs.iter().enumerate() {
        let i = idx as u32 + 1;
        if c == 0 {
            continue;
        }
        let pow = (i + 1).ilog2() + 1;
        expr = expr.add(TExpr::constant(c).mul(TExpr::binom2k(i, pow, TExpr::x())));
    }
    Verified {
        verdict: proven(
            Property::Ergodic,
            &format!("mahler_ergodic(terms={})", coeffs.len()),
            Theorem::ErgBin,
        ),
        expr,
    }
}

/// `c0 + x + Σ c_i · 2^(⌊log2(i)⌋+1) · C(x, i)`: measure preserving;
/// `coeffs[0]` is `c_1`.
pub fn mahler_mp(c0: u64, coeffs: &[u64]) -> Verified {
    let mut expr = TExpr::constant(c0).add(TExpr::x());
    for (idx, &c) in coeffs.iter().enumerate() {
        let i = idx as u32 + 1;
        if c == 0 {
            continue;
        }
        let pow = i.ilog2() + 1;
        expr = expr.add(TExpr::constant(c).mul(TExpr::binom2k(i, pow, TExpr::x())));
    }
    Verified {
        verdict: proven(
            Property::MeasurePreserving,
            &format!("mahler_mp(terms={})", coeffs.len()),
            Theorem::ErgBin,
        ),
        expr,
    }
}

/// How an ergodic map is combined with a free compatible perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    /// `f(x + 4g(x))`
    AddInner,
    /// `f(x ^ 4g(x))`
    XorInner,
    /// `f(x) + 4g(x)`
    AddOuter,
    /// `f(x) ^ 4g(x)`
    XorOuter,
}

/// Perturbs a proven-ergodic `f` by `4g` in any of the four positions; the
/// result stays ergodic for every compatible `g`.
pub fn lift_ergodic(kind: LiftKind, f: &Verified, g: &TExpr) -> Result<Verified, GadgetError> {
    if !f.verdict.is_proven_ergodic() {
        return Err(GadgetError::BaseNotErgodic);
    }
    let scaled = g.clone().shl(2);
    let expr = match kind {
        LiftKind::AddInner => TExpr::compose(f.expr.clone(), vec![TExpr::x().add(scaled)]),
        LiftKind::XorInner => TExpr::compose(f.expr.clone(), vec![TExpr::x().xor(scaled)]),
        LiftKind::AddOuter => f.expr.clone().add(scaled),
        LiftKind::XorOuter => f.expr.clone().xor(scaled),
    };
    Ok(Verified {
        expr,
        verdict: proven(
            Property::Ergodic,
            &format!("lift({kind:?})"),
            Theorem::CompBool,
        ),
    })
}

/// A random compatible expression over safe primitives, for stress tests and
/// demos. Depth-bounded; inversion is only applied to forced-odd values.
pub fn random_compatible_expr(rng: &mut impl Rng, depth: u32) -> TExpr {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => TExpr::x(),
            1 => TExpr::constant(rng.gen_range(0..64)),
            _ => TExpr::x().mul(TExpr::x()),
        };
    }
    let a = random_compatible_expr(rng, depth - 1);
    let choice = rng.gen_range(0..9);
    match choice {
        0..=3 => {
            let b = random_compatible_expr(rng, depth - 1);
            match choice {
                0 => a.add(b),
                1 => a.sub(b),
                2 => a.mul(b),
                _ => a.xor(b),
            }
        }
        4 => a.and(TExpr::constant(rng.gen_range(0..256))),
        5 => a.or(TExpr::constant(rng.gen_range(0..256))),
        6 => a.not(),
        7 => a.shl(rng.gen_range(1..3)),
        _ => TExpr::constant(2).mul(a).add(TExpr::constant(1)).inv_odd(),
    }
}

/// A random certified-ergodic construction with the given seed material.
pub fn random_ergodic_gadget(rng: &mut impl Rng) -> Verified {
    match rng.gen_range(0..4) {
        0 => {
            let depth = rng.gen_range(1..4);
            let g = random_compatible_expr(rng, depth);
            let c = rng.gen_range(0..64u64) * 2 + 1;
            delta_ergodic(c, &g).expect("odd constant")
        }
        1 => {
            let terms: Vec<u64> = (0..rng.gen_range(1..6))
                .map(|_| rng.gen_range(0..32))
                .collect();
            mahler_ergodic(&terms)
        }
        2 => {
            let base = delta_ergodic(1, &random_compatible_expr(rng, 2)).unwrap();
            let depth = rng.gen_range(1..3);
            let g = random_compatible_expr(rng, depth);
            let kind = match rng.gen_range(0..4) {
                0 => LiftKind::AddInner,
                1 => LiftKind::XorInner,
                2 => LiftKind::AddOuter,
                _ => LiftKind::XorOuter,
            };
            lift_ergodic(kind, &base, &g).expect("base is proven")
        }
        _ => {
            let depth = rng.gen_range(1..3);
            let g = random_compatible_expr(rng, depth);
            let base = delta_ergodic(rng.gen_range(0..16u64) * 2 + 1, &g).unwrap();
            lift_ergodic(LiftKind::AddOuter, &base, &TExpr::x()).expect("base is proven")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::cycle::cycle_structure;
    use crate::expr::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_with_square_is_a_linear_single_cycle() {
        // g = x^2: c + x + 2((x+1)^2 - x^2) = 3 + 5x for c = 1
        let g = parse("x*x").unwrap();
        let made = delta_ergodic(1, &g).unwrap();
        let reference = parse("3 + 5*x").unwrap();
        for v in 0..256 {
            assert_eq!(
                made.expr.eval1(v, 8).unwrap(),
                reference.eval1(v, 8).unwrap()
            );
        }
        for w in [2u32, 6, 10] {
            assert!(cycle_structure(&made.expr, w).unwrap().single_cycle);
        }
    }

    #[test]
    fn delta_with_xor_gadget() {
        let g = parse("x ^ (2*x + 1)").unwrap();
        let made = delta_ergodic(1, &g).unwrap();
        assert!(made.verdict.is_proven_ergodic());
        for w in [4u32, 8, 10] {
            assert!(
                cycle_structure(&made.expr, w).unwrap().single_cycle,
                "width {w}"
            );
        }
    }

    #[test]
    fn delta_rejects_even_constant() {
        let g = parse("x").unwrap();
        assert!(matches!(
            delta_ergodic(2, &g),
            Err(GadgetError::EvenConstant(2))
        ));
    }

    #[test]
    fn affine_mp_is_bijective() {
        let g = parse("x*x | 3").unwrap();
        let made = affine_mp(4, 7, &g).unwrap();
        for w in [1u32, 5, 9] {
            assert!(
                cycle_structure(&made.expr, w).unwrap().bijective,
                "width {w}"
            );
        }
    }

    #[test]
    fn mahler_ergodic_matches_exponential_form() {
        // 3x + 3^x equals 1 + x + 4C(x,1) + sum of 2^i C(x,i): coefficients
        // c_i = m^i with m = 1 give exactly that after the forced scaling.
        let direct = parse("3*x + pow1p2(1, x)").unwrap();
        // c_i chosen so that c_i * 2^(floor(log2(i+1))+1) = 2^i, i = 1..=7;
        // terms beyond vanish at width 8
        let made = mahler_ergodic(&[1, 1, 1, 2, 4, 8, 8]);
        let width = 8;
        for v in 0..1u64 << width {
            assert_eq!(
                made.expr.eval1(v, width).unwrap(),
                direct.eval1(v, width).unwrap(),
                "at {v}"
            );
        }
        assert!(cycle_structure(&made.expr, 10).unwrap().single_cycle);
    }

    #[test]
    fn lift_keeps_single_cycle() {
        let base = delta_ergodic(1, &parse("x*x").unwrap()).unwrap();
        let g = parse("x & 11").unwrap();
        for kind in [
            LiftKind::AddInner,
            LiftKind::XorInner,
            LiftKind::AddOuter,
            LiftKind::XorOuter,
        ] {
            let lifted = lift_ergodic(kind, &base, &g).unwrap();
            assert!(
                cycle_structure(&lifted.expr, 10).unwrap().single_cycle,
                "{kind:?}"
            );
        }
    }

    #[test]
    fn random_gadgets_pass_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..25 {
            let made = random_ergodic_gadget(&mut rng);
            let r = cycle_structure(&made.expr, 8).unwrap();
            assert!(r.single_cycle, "instance {i}: {}", made.expr);
        }
    }
}
