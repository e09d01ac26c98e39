//! Multivariate systems: bijectivity via the Jacobian criterion, and the
//! packing tricks that trade one wide single-cycle map for several narrow
//! coordinates.

use thiserror::Error;

use super::cycle::{CycleReport, Oracle, OracleError};
use super::gadget::Verified;
use super::{Property, Theorem, Verdict, VerdictResult, Witness};
use crate::expr::deriv::{self, DerivError};
use crate::expr::TExpr;
use crate::word::Word;

#[derive(Debug, Error)]
pub enum MultivarError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error("component ({0},{1}) is missing the required verdict")]
    MissingVerdict(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Packs coordinates `(x_0, .., x_{m-1})`, each `width` bits, into one state.
pub fn pack_state(coords: &[u64], width: u32) -> u64 {
    coords
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &x)| acc | (x << (i as u32 * width)))
}

pub fn unpack_state(state: u64, m: usize, width: u32) -> Vec<u64> {
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1 << width) - 1
    };
    (0..m)
        .map(|i| (state >> (i as u32 * width)) & mask)
        .collect()
}

/// Cycle decomposition of a square system acting on `(Z/2^width)^m`.
pub fn system_cycle_structure(
    system: &[TExpr],
    width: u32,
    oracle: &Oracle,
) -> Result<CycleReport, MultivarError> {
    let m = system.len();
    let total_bits = m as u32 * width;
    let step = |packed: u64| -> Result<u64, String> {
        let coords = unpack_state(packed, m, width);
        let env: Vec<Word> = coords.iter().map(|&x| Word::new(x, width)).collect();
        let mut out = Vec::with_capacity(m);
        for f in system {
            out.push(f.eval(&env, width).map_err(|e| e.to_string())?.value());
        }
        Ok(pack_state(&out, width))
    };
    Ok(oracle.cycle_structure_fn(step, total_bits)?)
}

/// Measure preservation of a square system: certified threshold, then
/// bijectivity at that modulus with a nowhere-vanishing Jacobian. Falls back
/// to plain exhaustive bijectivity (evidence only) when no derivative exists.
pub fn multivar_check_bijective(
    system: &[TExpr],
    oracle: &Oracle,
    test_width: u32,
) -> Result<Verdict, MultivarError> {
    let m = system.len();
    match deriv::n_bound_system(system, test_width) {
        Ok(cert) => {
            let width = cert.n;
            oracle.check_cap(m as u32 * width)?;
            // Jacobian must be invertible at every point of the fundamental
            // domain
            for packed in 0..1u64 << (m as u32 * width) {
                let coords = unpack_state(packed, m, width);
                let env: Vec<Word> = coords.iter().map(|&x| Word::new(x, width)).collect();
                let det = deriv::jacobian_det_mod2(system, &env)?;
                if det == 0 {
                    return Ok(Verdict {
                        property: Property::MeasurePreserving,
                        result: VerdictResult::Refuted,
                        method: format!("jacobian(N1={width})"),
                        modulus_checked: Some(1 << width),
                        witness: Some(Witness::ZeroDerivative { at: packed }),
                        theorem: Some(Theorem::MhlBj),
                    });
                }
            }
            let report = system_cycle_structure(system, width, oracle)?;
            Ok(Verdict {
                property: Property::MeasurePreserving,
                result: if report.bijective {
                    VerdictResult::Proven
                } else {
                    VerdictResult::Refuted
                },
                method: format!("jacobian(N1={width})"),
                modulus_checked: Some(1 << width),
                witness: report.collision.map(|(a, b)| Witness::Collision { a, b }),
                theorem: Some(Theorem::MhlBj),
            })
        }
        Err(DerivError::NoRule(..)) => {
            let report = system_cycle_structure(system, test_width, oracle)?;
            Ok(Verdict {
                property: Property::MeasurePreserving,
                result: if report.bijective {
                    VerdictResult::Unknown
                } else {
                    VerdictResult::Refuted
                },
                method: format!("brute({test_width})"),
                modulus_checked: Some(1 << test_width),
                witness: report.collision.map(|(a, b)| Witness::Collision { a, b }),
                theorem: None,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn conjunction(terms: Vec<TExpr>) -> Option<TExpr> {
    terms.into_iter().reduce(|a, b| a.and(b))
}

/// The m-variate single-cycle form of a univariate single-cycle map `h`:
/// component `k` is `x_k ^ ((h(A) ^ A) & x_0 & .. & x_{k-1})` where `A` is
/// the conjunction of all coordinates. Reading the coordinates bit-interleaved
/// recovers one wide single-cycle map; for `h = x + 1` it is the wide
/// successor map itself.
pub fn multivar_pack(h: &Verified, m: usize) -> Result<Vec<TExpr>, MultivarError> {
    if !h.verdict.is_proven_ergodic() {
        return Err(MultivarError::MissingVerdict(0, 0));
    }
    if m == 0 {
        return Err(MultivarError::Shape("need at least one variable".into()));
    }
    if m == 1 {
        return Ok(vec![h.expr.clone()]);
    }
    let all = conjunction((0..m).map(TExpr::Var).collect()).expect("m >= 1");
    let delta = TExpr::compose(h.expr.clone(), vec![all.clone()]).xor(all);
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let guarded = match conjunction((0..k).map(TExpr::Var).collect()) {
            Some(guard) => delta.clone().and(guard),
            None => delta.clone(),
        };
        out.push(TExpr::Var(k).xor(guarded));
    }
    Ok(out)
}

/// Bit-interleaved reading of packed coordinates: bit `j` of coordinate `r`
/// becomes bit `j*m + r` of the wide word.
pub fn interleave(coords: &[u64], width: u32) -> u64 {
    let m = coords.len();
    let mut out = 0u64;
    for (r, &x) in coords.iter().enumerate() {
        for j in 0..width {
            out |= ((x >> j) & 1) << (j * m as u32 + r as u32);
        }
    }
    out
}

/// Counter-flavored ergodic system: component `t` is
/// `x_t ⊞ ((g_t^{(0)}(x_0) & .. & g_t^{(t-1)}(x_{t-1})) & ⋀_r (f_t^{(r)}(x_r) ^ x_r))`
/// with every `f` ergodic and every `g` measure preserving; `⊞` is `+` or `^`.
pub fn wreath_mult_pack(
    f: &[Vec<Verified>],
    g: &[Vec<Verified>],
    xor_combine: bool,
) -> Result<Vec<TExpr>, MultivarError> {
    let m = f.len();
    if g.len() != m {
        return Err(MultivarError::Shape(format!(
            "f has {m} rows but g has {}",
            g.len()
        )));
    }
    let mut out = Vec::with_capacity(m);
    for (t, frow) in f.iter().enumerate() {
        if frow.len() != m {
            return Err(MultivarError::Shape(format!(
                "f row {t} has {} entries, need {m}",
                frow.len()
            )));
        }
        if g[t].len() != t {
            return Err(MultivarError::Shape(format!(
                "g row {t} has {} entries, need {t}",
                g[t].len()
            )));
        }
        for (r, comp) in frow.iter().enumerate() {
            if !comp.verdict.is_proven_ergodic() {
                return Err(MultivarError::MissingVerdict(t, r));
            }
        }
        for (r, comp) in g[t].iter().enumerate() {
            if !comp.verdict.is_proven_mp() {
                return Err(MultivarError::MissingVerdict(t, r));
            }
        }
        let drift = conjunction(
            frow.iter()
                .enumerate()
                .map(|(r, comp)| {
                    TExpr::compose(comp.expr.clone(), vec![TExpr::Var(r)]).xor(TExpr::Var(r))
                })
                .collect(),
        )
        .expect("m >= 1");
        let gated = match conjunction(
            g[t].iter()
                .enumerate()
                .map(|(s, comp)| TExpr::compose(comp.expr.clone(), vec![TExpr::Var(s)]))
                .collect(),
        ) {
            Some(guard) => guard.and(drift),
            None => drift,
        };
        out.push(if xor_combine {
            TExpr::Var(t).xor(gated)
        } else {
            TExpr::Var(t).add(gated)
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::gadget::delta_ergodic;
    use crate::ergodic::{verify_ergodic, ErgodicPolicy};
    use crate::expr::parse;

    fn oracle() -> Oracle {
        Oracle::default()
    }

    fn verified_successor() -> Verified {
        let h = parse("x + 1").unwrap();
        let verdict = verify_ergodic(&h, ErgodicPolicy::DerivativeMod4, &oracle()).unwrap();
        Verified { expr: h, verdict }
    }

    #[test]
    fn ks_pair_proven_bijective() {
        let sys = vec![
            parse("x0 ^ 2*(x0 & x1)").unwrap(),
            parse("(x1 + 3*x0*x0*x0) ^ x0").unwrap(),
        ];
        let v = multivar_check_bijective(&sys, &oracle(), 6).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.theorem, Some(Theorem::MhlBj));
        // oracle agreement at a few widths
        for w in [2u32, 4, 6] {
            assert!(
                system_cycle_structure(&sys, w, &oracle())
                    .unwrap()
                    .bijective
            );
        }
    }

    #[test]
    fn identity_pair_proven_and_singular_pair_refuted() {
        let id = vec![TExpr::Var(0), TExpr::Var(1)];
        let v = multivar_check_bijective(&id, &oracle(), 6).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);

        let sing = vec![parse("x0 + x1").unwrap(), parse("x0 + x1").unwrap()];
        let v = multivar_check_bijective(&sing, &oracle(), 6).unwrap();
        assert_eq!(v.result, VerdictResult::Refuted);
        assert!(matches!(v.witness, Some(Witness::ZeroDerivative { .. })));
    }

    #[test]
    fn packed_successor_is_single_cycle_on_pairs() {
        let packed = multivar_pack(&verified_successor(), 2).unwrap();
        let report = system_cycle_structure(&packed, 2, &oracle()).unwrap();
        assert!(report.single_cycle);
        assert_eq!(report.cycle_lengths.get(&16), Some(&1));
    }

    #[test]
    fn packed_successor_reads_as_wide_increment() {
        let m = 2;
        let width = 3;
        let packed = multivar_pack(&verified_successor(), m).unwrap();
        for x0 in 0..1u64 << width {
            for x1 in 0..1u64 << width {
                let env = [Word::new(x0, width), Word::new(x1, width)];
                let out: Vec<u64> = packed
                    .iter()
                    .map(|f| f.eval(&env, width).unwrap().value())
                    .collect();
                let wide_in = interleave(&[x0, x1], width);
                let wide_out = interleave(&out, width);
                assert_eq!(
                    wide_out,
                    (wide_in + 1) % (1 << (m as u32 * width)),
                    "x0={x0} x1={x1}"
                );
            }
        }
    }

    #[test]
    fn pack_m1_returns_the_map() {
        let v = verified_successor();
        assert_eq!(multivar_pack(&v, 1).unwrap(), vec![v.expr]);
    }

    #[test]
    fn pack_requires_verdict() {
        let unproven = Verified {
            expr: parse("x + 2").unwrap(),
            verdict: Verdict {
                property: Property::Ergodic,
                result: VerdictResult::Unknown,
                method: "none".into(),
                modulus_checked: None,
                witness: None,
                theorem: None,
            },
        };
        assert!(multivar_pack(&unproven, 2).is_err());
    }

    #[test]
    fn wreath_mult_family_is_single_cycle() {
        // all f = x + 1, all g = x, m = 2, additive combine
        let succ = verified_successor();
        let id = Verified {
            expr: TExpr::x(),
            verdict: delta_ergodic(1, &TExpr::constant(0)).unwrap().verdict,
        };
        // x is measure preserving; reuse a proven-MP style verdict by
        // verifying directly
        let id = Verified {
            verdict: crate::ergodic::verify_measure_preserving(
                &id.expr,
                crate::ergodic::MpPolicy::DerivativeMod2,
                &oracle(),
            )
            .unwrap(),
            ..id
        };
        let f = vec![
            vec![succ.clone(), succ.clone()],
            vec![succ.clone(), succ.clone()],
        ];
        let g = vec![vec![], vec![id]];
        let sys = wreath_mult_pack(&f, &g, false).unwrap();
        let report = system_cycle_structure(&sys, 3, &oracle()).unwrap();
        assert!(report.single_cycle, "{report:?}");
        assert_eq!(report.cycle_lengths.get(&64), Some(&1));
    }
}
