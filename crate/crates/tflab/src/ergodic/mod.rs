//! Verifiers and constructors for measure-preserving and ergodic word maps.
//!
//! A map on 2-adic integers preserves the uniform measure exactly when it is
//! invertible modulo every power of two, and is ergodic exactly when it is a
//! single cycle modulo every power of two. The verifiers here turn finite
//! checks into verdicts about all precisions by way of the criteria each
//! policy names; the brute-force oracle is the common ground truth and never
//! promotes its evidence beyond the width it actually scanned.

pub mod cycle;
pub mod gadget;
pub mod multivar;
pub mod poly;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{anf, deriv, DerivError, TExpr};

pub use cycle::{
    brent_cycle, cycle_structure, CycleReport, Oracle, OracleError, DEFAULT_ORACLE_CAP,
};
pub use gadget::{
    affine_mp, delta_ergodic, lift_ergodic, mahler_ergodic, mahler_mp, LiftKind, Verified,
};
pub use multivar::{
    interleave, multivar_check_bijective, multivar_pack, system_cycle_structure, wreath_mult_pack,
};
pub use poly::{
    classify_poly_ff, classify_poly_modp, classify_rational_poly, extract_poly, klimov_shamir_c,
    monomial_to_ff, permutation_poly, KsClass, PolyClass, PolyFF, RationalPolyError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    MeasurePreserving,
    Ergodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictResult {
    Proven,
    Refuted,
    Unknown,
}

/// Criterion behind a Proven/Refuted verdict, as named in certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "erg_Der")]
    ErgDer,
    #[serde(rename = "MHL-bj")]
    MhlBj,
    #[serde(rename = "ergBool")]
    ErgBool,
    #[serde(rename = "ergPol")]
    ErgPol,
    #[serde(rename = "ergPolGen")]
    ErgPolGen,
    #[serde(rename = "ergAnGen")]
    ErgAnGen,
    #[serde(rename = "Delta")]
    Delta,
    #[serde(rename = "ergBin")]
    ErgBin,
    #[serde(rename = "Qpol")]
    Qpol,
    #[serde(rename = "compBool")]
    CompBool,
    #[serde(rename = "WP")]
    Wp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Two distinct states with the same image at the stated modulus.
    Collision {
        a: u64,
        b: u64,
    },
    NotTransitive {
        modulus: u64,
    },
    NotSeparable {
        bit: u32,
        a: u64,
        b: u64,
    },
    EvenWeight {
        bit: u32,
    },
    ZeroDerivative {
        at: u64,
    },
    NonIntegerValue {
        at: u64,
    },
    ConditionFailed {
        condition: u32,
    },
}

/// A machine-checkable claim about one property of one map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: Property,
    pub result: VerdictResult,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus_checked: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<Theorem>,
}

impl Verdict {
    pub fn proven(self: &Verdict, property: Property) -> bool {
        self.property == property && self.result == VerdictResult::Proven
    }

    pub fn is_proven_ergodic(&self) -> bool {
        self.proven(Property::Ergodic)
    }

    pub fn is_proven_mp(&self) -> bool {
        // ergodicity implies measure preservation
        self.result == VerdictResult::Proven
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgodicPolicy {
    /// Exhaustive transitivity at all widths up to the given one. Necessary
    /// evidence only: passing yields Unknown, failing is conclusive.
    Brute(u32),
    /// Differentiability-mod-4 certificate plus one exhaustive cycle check.
    DerivativeMod4,
    /// Coordinate-function weight parity up to the given bit.
    Anf(u32),
    /// Falling-factorial coefficient parities (polynomials only).
    FallingFactorial,
    /// Arithmetic-with-inverses class: decided modulo 8.
    B2Class,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpPolicy {
    Brute(u32),
    /// Bijective at the certified threshold with nowhere-zero derivative.
    DerivativeMod2,
    Anf(u32),
    FallingFactorial,
    /// Decided modulo 4.
    B2Class,
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("policy not applicable: {0}")]
    Inapplicable(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("derivative prerequisite failed: {0}")]
    Deriv(#[from] DerivError),
}

fn brute_widths(
    f: &TExpr,
    oracle: &Oracle,
    max_width: u32,
    transitive: bool,
) -> Result<Option<u32>, PolicyError> {
    for w in 1..=max_width {
        let ok = if transitive {
            oracle.is_transitive(f, w)?
        } else {
            oracle.is_bijective(f, w)?
        };
        if !ok {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Default exhaustive width for validating derivative certificates.
pub const DERIV_TEST_WIDTH: u32 = 10;

fn deriv_certificate(f: &TExpr, k: u8) -> Result<deriv::DiffCertificate, PolicyError> {
    match deriv::n_bound(f, k, DERIV_TEST_WIDTH) {
        Ok(cert) => Ok(cert),
        Err(DerivError::ValidationFailed { .. }) => {
            // raised bounds may need more room; widen once
            Ok(deriv::n_bound(f, k, DERIV_TEST_WIDTH + 4)?)
        }
        Err(DerivError::TestWidthTooSmall { needed, .. }) => {
            Ok(deriv::n_bound(f, k, needed + k as u32 + 2)?)
        }
        Err(e) => Err(e.into()),
    }
}

/// Verifies ergodicity under the chosen policy.
pub fn verify_ergodic(
    f: &TExpr,
    policy: ErgodicPolicy,
    oracle: &Oracle,
) -> Result<Verdict, PolicyError> {
    if !f.is_univariate() {
        return Err(PolicyError::Inapplicable(
            "univariate verifier got a multivariate expression".into(),
        ));
    }
    match policy {
        ErgodicPolicy::Brute(n) => {
            let fail = brute_widths(f, oracle, n, true)?;
            Ok(match fail {
                Some(w) => Verdict {
                    property: Property::Ergodic,
                    result: VerdictResult::Refuted,
                    method: format!("brute({n})"),
                    modulus_checked: Some(1 << w),
                    witness: Some(Witness::NotTransitive { modulus: 1 << w }),
                    theorem: None,
                },
                None => Verdict {
                    property: Property::Ergodic,
                    result: VerdictResult::Unknown,
                    method: format!("brute({n})"),
                    modulus_checked: Some(1 << n),
                    witness: None,
                    theorem: None,
                },
            })
        }
        ErgodicPolicy::DerivativeMod4 => {
            let cert = deriv_certificate(f, 2)?;
            let width = cert.n + 2;
            oracle.check_cap(width)?;
            let transitive = oracle.is_transitive(f, width)?;
            Ok(Verdict {
                property: Property::Ergodic,
                result: if transitive {
                    VerdictResult::Proven
                } else {
                    VerdictResult::Refuted
                },
                method: format!("deriv_mod4(N2={})", cert.n),
                modulus_checked: Some(1 << width),
                witness: (!transitive).then_some(Witness::NotTransitive {
                    modulus: 1 << width,
                }),
                theorem: Some(Theorem::ErgDer),
            })
        }
        ErgodicPolicy::Anf(maxbit) => {
            for j in 0..=maxbit {
                match anf::coord_anf(f, j, maxbit + 1) {
                    Ok(table) => {
                        if !table.weight_odd() {
                            return Ok(Verdict {
                                property: Property::Ergodic,
                                result: VerdictResult::Refuted,
                                method: format!("anf({maxbit})"),
                                modulus_checked: Some(1 << (j + 1)),
                                witness: Some(Witness::EvenWeight { bit: j }),
                                theorem: Some(Theorem::ErgBool),
                            });
                        }
                    }
                    Err(anf::AnfError::NotMeasurePreserving { bit, a, b }) => {
                        return Ok(Verdict {
                            property: Property::Ergodic,
                            result: VerdictResult::Refuted,
                            method: format!("anf({maxbit})"),
                            modulus_checked: Some(1 << (bit + 1)),
                            witness: Some(Witness::NotSeparable { bit, a, b }),
                            theorem: Some(Theorem::ErgBool),
                        });
                    }
                    Err(e) => return Err(PolicyError::Inapplicable(e.to_string())),
                }
            }
            // every checked bit passed; the criterion quantifies over all
            // bits, so this is evidence, not proof
            Ok(Verdict {
                property: Property::Ergodic,
                result: VerdictResult::Unknown,
                method: format!("anf({maxbit})"),
                modulus_checked: Some(1 << (maxbit + 1)),
                witness: None,
                theorem: Some(Theorem::ErgBool),
            })
        }
        ErgodicPolicy::FallingFactorial => {
            let coeffs = extract_poly(f).ok_or_else(|| {
                PolicyError::Inapplicable("falling-factorial policy needs a polynomial".into())
            })?;
            let class = classify_poly_ff(&monomial_to_ff(&coeffs));
            Ok(Verdict {
                property: Property::Ergodic,
                result: if class == PolyClass::Ergodic {
                    VerdictResult::Proven
                } else {
                    VerdictResult::Refuted
                },
                method: "falling_factorial".into(),
                modulus_checked: None,
                witness: None,
                theorem: Some(Theorem::ErgPol),
            })
        }
        ErgodicPolicy::B2Class => {
            if !f.is_b2_class() {
                return Err(PolicyError::Inapplicable(
                    "expression uses operations outside the arithmetic-with-inverses class".into(),
                ));
            }
            let transitive = oracle.is_transitive(f, 3)?;
            Ok(Verdict {
                property: Property::Ergodic,
                result: if transitive {
                    VerdictResult::Proven
                } else {
                    VerdictResult::Refuted
                },
                method: "b2_class".into(),
                modulus_checked: Some(8),
                witness: (!transitive).then_some(Witness::NotTransitive { modulus: 8 }),
                theorem: Some(Theorem::ErgAnGen),
            })
        }
    }
}

/// Verifies measure preservation under the chosen policy.
pub fn verify_measure_preserving(
    f: &TExpr,
    policy: MpPolicy,
    oracle: &Oracle,
) -> Result<Verdict, PolicyError> {
    if !f.is_univariate() {
        return Err(PolicyError::Inapplicable(
            "univariate verifier got a multivariate expression".into(),
        ));
    }
    match policy {
        MpPolicy::Brute(n) => {
            let fail = brute_widths(f, oracle, n, false)?;
            Ok(match fail {
                Some(w) => Verdict {
                    property: Property::MeasurePreserving,
                    result: VerdictResult::Refuted,
                    method: format!("brute({n})"),
                    modulus_checked: Some(1 << w),
                    witness: collision_witness(f, oracle, w)?,
                    theorem: None,
                },
                None => Verdict {
                    property: Property::MeasurePreserving,
                    result: VerdictResult::Unknown,
                    method: format!("brute({n})"),
                    modulus_checked: Some(1 << n),
                    witness: None,
                    theorem: None,
                },
            })
        }
        MpPolicy::DerivativeMod2 => {
            let cert = deriv_certificate(f, 1)?;
            let width = cert.n;
            oracle.check_cap(width + 1)?;
            if !oracle.is_bijective(f, width)? {
                return Ok(Verdict {
                    property: Property::MeasurePreserving,
                    result: VerdictResult::Refuted,
                    method: format!("deriv_mod2(N1={width})"),
                    modulus_checked: Some(1 << width),
                    witness: collision_witness(f, oracle, width)?,
                    theorem: Some(Theorem::MhlBj),
                });
            }
            let df = match &cert.derivative {
                deriv::DerivForm::Univariate(d) => d.clone(),
                _ => unreachable!("univariate certificate"),
            };
            for u in 0..1u64 << width {
                let parity = df
                    .eval1(u, width.max(1))
                    .map_err(|e| PolicyError::Inapplicable(e.to_string()))?
                    & 1;
                if parity == 0 {
                    return Ok(Verdict {
                        property: Property::MeasurePreserving,
                        result: VerdictResult::Refuted,
                        method: format!("deriv_mod2(N1={width})"),
                        modulus_checked: Some(1 << width),
                        witness: Some(Witness::ZeroDerivative { at: u }),
                        theorem: Some(Theorem::MhlBj),
                    });
                }
            }
            Ok(Verdict {
                property: Property::MeasurePreserving,
                result: VerdictResult::Proven,
                method: format!("deriv_mod2(N1={width})"),
                modulus_checked: Some(1 << width),
                witness: None,
                theorem: Some(Theorem::MhlBj),
            })
        }
        MpPolicy::Anf(maxbit) => {
            for j in 0..=maxbit {
                match anf::coord_anf(f, j, maxbit + 1) {
                    Ok(_) => {}
                    Err(anf::AnfError::NotMeasurePreserving { bit, a, b }) => {
                        return Ok(Verdict {
                            property: Property::MeasurePreserving,
                            result: VerdictResult::Refuted,
                            method: format!("anf({maxbit})"),
                            modulus_checked: Some(1 << (bit + 1)),
                            witness: Some(Witness::NotSeparable { bit, a, b }),
                            theorem: Some(Theorem::ErgBool),
                        });
                    }
                    Err(e) => return Err(PolicyError::Inapplicable(e.to_string())),
                }
            }
            Ok(Verdict {
                property: Property::MeasurePreserving,
                result: VerdictResult::Unknown,
                method: format!("anf({maxbit})"),
                modulus_checked: Some(1 << (maxbit + 1)),
                witness: None,
                theorem: Some(Theorem::ErgBool),
            })
        }
        MpPolicy::FallingFactorial => {
            let coeffs = extract_poly(f).ok_or_else(|| {
                PolicyError::Inapplicable("falling-factorial policy needs a polynomial".into())
            })?;
            let class = classify_poly_ff(&monomial_to_ff(&coeffs));
            Ok(Verdict {
                property: Property::MeasurePreserving,
                result: if class == PolyClass::Neither {
                    VerdictResult::Refuted
                } else {
                    VerdictResult::Proven
                },
                method: "falling_factorial".into(),
                modulus_checked: None,
                witness: None,
                theorem: Some(Theorem::ErgPol),
            })
        }
        MpPolicy::B2Class => {
            if !f.is_b2_class() {
                return Err(PolicyError::Inapplicable(
                    "expression uses operations outside the arithmetic-with-inverses class".into(),
                ));
            }
            let bijective = oracle.is_bijective(f, 2)?;
            Ok(Verdict {
                property: Property::MeasurePreserving,
                result: if bijective {
                    VerdictResult::Proven
                } else {
                    VerdictResult::Refuted
                },
                method: "b2_class".into(),
                modulus_checked: Some(4),
                witness: if bijective {
                    None
                } else {
                    collision_witness(f, oracle, 2)?
                },
                theorem: Some(Theorem::ErgAnGen),
            })
        }
    }
}

/// Certificate form of the small-modulus polynomial classification for an
/// arbitrary prime: ergodicity is decided modulo `p^3` (p in {2,3}) or
/// `p^2`, measure preservation modulo `p^2`.
pub fn verify_poly_modp(
    p: u64,
    coeffs: &[i64],
    property: Property,
    oracle: &Oracle,
) -> Result<Verdict, PolicyError> {
    let class = classify_poly_modp(p, coeffs, oracle)?;
    let holds = match property {
        Property::Ergodic => class == PolyClass::Ergodic,
        Property::MeasurePreserving => class != PolyClass::Neither,
    };
    let modulus = match property {
        Property::Ergodic if p <= 3 => p * p * p,
        _ => p * p,
    };
    Ok(Verdict {
        property,
        result: if holds {
            VerdictResult::Proven
        } else {
            VerdictResult::Refuted
        },
        method: format!("poly_modp(p={p})"),
        modulus_checked: Some(modulus),
        witness: None,
        theorem: Some(Theorem::ErgPolGen),
    })
}

/// Certificate form of the rational-coefficient screening: integer-valued,
/// compatible, and ergodic (or measure preserving) is decided by the induced
/// table at `p^(floor(log_p deg) + 3)`.
pub fn verify_rational_poly(
    coeffs: &[num_rational::BigRational],
    p: u64,
    property: Property,
    oracle: &Oracle,
) -> Result<Verdict, RationalPolyError> {
    let degree = coeffs.len().saturating_sub(1).max(1) as u64;
    let mut level = 3u32;
    {
        let mut t = degree;
        while t >= p {
            t /= p;
            level += 1;
        }
    }
    let class = classify_rational_poly(coeffs, p, oracle)?;
    let holds = match property {
        Property::Ergodic => class == PolyClass::Ergodic,
        Property::MeasurePreserving => class != PolyClass::Neither,
    };
    Ok(Verdict {
        property,
        result: if holds {
            VerdictResult::Proven
        } else {
            VerdictResult::Refuted
        },
        method: format!("rational_poly(p={p})"),
        modulus_checked: p.checked_pow(level),
        witness: None,
        theorem: Some(Theorem::Qpol),
    })
}

fn collision_witness(
    f: &TExpr,
    oracle: &Oracle,
    width: u32,
) -> Result<Option<Witness>, PolicyError> {
    let report = oracle.cycle_structure(f, width)?;
    Ok(report.collision.map(|(a, b)| Witness::Collision { a, b }))
}

/// Chains of `+c` / `^c` steps are ergodic iff transitive modulo 4.
fn is_add_xor_chain(e: &TExpr) -> bool {
    match e {
        TExpr::Var(0) => true,
        TExpr::Add(a, b) | TExpr::Xor(a, b) | TExpr::Sub(a, b) => {
            (b.const_value().is_some() && is_add_xor_chain(a))
                || (a.const_value().is_some() && is_add_xor_chain(b))
        }
        _ => false,
    }
}

/// The alternating add/xor family criterion: ergodic iff transitive mod 4.
pub fn verify_add_xor_chain(f: &TExpr, oracle: &Oracle) -> Result<Option<Verdict>, PolicyError> {
    if !is_add_xor_chain(f) {
        return Ok(None);
    }
    let transitive = oracle.is_transitive(f, 2)?;
    Ok(Some(Verdict {
        property: Property::Ergodic,
        result: if transitive {
            VerdictResult::Proven
        } else {
            VerdictResult::Refuted
        },
        method: "add_xor_chain".into(),
        modulus_checked: Some(4),
        witness: (!transitive).then_some(Witness::NotTransitive { modulus: 4 }),
        theorem: Some(Theorem::CompBool),
    }))
}

/// Tries the proving policies in order and returns the first conclusive
/// verdict; used when loading generator specs that need an ergodic update.
pub fn prove_ergodic_any(f: &TExpr, oracle: &Oracle) -> Option<Verdict> {
    if let Ok(Some(v)) = verify_add_xor_chain(f, oracle) {
        return Some(v);
    }
    for policy in [
        ErgodicPolicy::DerivativeMod4,
        ErgodicPolicy::B2Class,
        ErgodicPolicy::FallingFactorial,
    ] {
        if let Ok(v) = verify_ergodic(f, policy, oracle) {
            if v.result != VerdictResult::Unknown {
                return Some(v);
            }
        }
    }
    None
}

/// Like [`prove_ergodic_any`] for measure preservation.
pub fn prove_mp_any(f: &TExpr, oracle: &Oracle) -> Option<Verdict> {
    for policy in [
        MpPolicy::DerivativeMod2,
        MpPolicy::B2Class,
        MpPolicy::FallingFactorial,
    ] {
        if let Ok(v) = verify_measure_preserving(f, policy, oracle) {
            if v.result != VerdictResult::Unknown {
                return Some(v);
            }
        }
    }
    // peeling a constant `+c` / `-c` / `^c` layer preserves bijectivity at
    // every modulus, so a proven core settles the composition
    if let Some(core) = split_const_layer(f) {
        let core_proven = prove_mp_any(core, oracle)
            .filter(|v| v.result == VerdictResult::Proven)
            .or_else(|| {
                prove_ergodic_any(core, oracle).filter(|v| v.result == VerdictResult::Proven)
            });
        if core_proven.is_some() {
            return Some(Verdict {
                property: Property::MeasurePreserving,
                result: VerdictResult::Proven,
                method: "const_composition".into(),
                modulus_checked: None,
                witness: None,
                theorem: Some(Theorem::CompBool),
            });
        }
    }
    None
}

fn split_const_layer(e: &TExpr) -> Option<&TExpr> {
    match e {
        TExpr::Add(a, b) | TExpr::Xor(a, b) | TExpr::Sub(a, b) => {
            if a.const_value().is_some() && b.const_value().is_none() {
                Some(b)
            } else if b.const_value().is_some() && a.const_value().is_none() {
                Some(a)
            } else {
                None
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn oracle() -> Oracle {
        Oracle::default()
    }

    #[test]
    fn klimov_shamir_proven_via_derivative() {
        let f = parse("x + (x*x | 5)").unwrap();
        let v = verify_ergodic(&f, ErgodicPolicy::DerivativeMod4, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.theorem, Some(Theorem::ErgDer));
        // N2 = 3, so the single exhaustive check runs modulo 32
        assert_eq!(v.modulus_checked, Some(32));
    }

    #[test]
    fn exponential_generator_proven_via_b2() {
        // 3x + 3^x, with 3^x = (1+2*1)^x
        let f = parse("3*x + pow1p2(1, x)").unwrap();
        let brute = verify_ergodic(&f, ErgodicPolicy::Brute(12), &oracle()).unwrap();
        assert_eq!(brute.result, VerdictResult::Unknown);
        let v = verify_ergodic(&f, ErgodicPolicy::B2Class, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.modulus_checked, Some(8));
        assert_eq!(v.theorem, Some(Theorem::ErgAnGen));
    }

    #[test]
    fn inversive_generator_proven_via_b2() {
        // -1/(2x+1) - x
        let f = parse("-inv(2*x + 1) - x").unwrap();
        let v = verify_ergodic(&f, ErgodicPolicy::B2Class, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        // cross-check against the oracle at several widths
        for w in 1..=10 {
            assert!(oracle().is_transitive(&f, w).unwrap(), "width {w}");
        }
    }

    #[test]
    fn mp_examples_from_derivative_criterion() {
        let rc6 = parse("x + 2*x*x").unwrap();
        let v = verify_measure_preserving(&rc6, MpPolicy::DerivativeMod2, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.theorem, Some(Theorem::MhlBj));

        let xor_v = parse("x ^ (x*x | 1)").unwrap();
        let v = verify_measure_preserving(&xor_v, MpPolicy::DerivativeMod2, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);

        let bad = parse("x + (x*x*x | 1)").unwrap();
        let v = verify_measure_preserving(&bad, MpPolicy::DerivativeMod2, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Refuted);
    }

    #[test]
    fn anf_policy_refutes_with_witness() {
        let f = parse("x + x*x").unwrap();
        let v = verify_ergodic(&f, ErgodicPolicy::Anf(6), &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Refuted);
        assert_eq!(
            v.witness,
            Some(Witness::NotSeparable { bit: 0, a: 0, b: 1 })
        );
    }

    #[test]
    fn proven_verdicts_agree_with_oracle_up_to_width_12() {
        let corpus = [
            "x + (x*x | 5)",
            "x + (x*x | 7)",
            "3*x + pow1p2(1, x)",
            "-inv(2*x + 1) - x",
            // falling-factorial coefficients [1, 1, 2, 4]
            "1 + 7*x - 10*x*x + 4*x*x*x",
        ];
        for src in corpus {
            let f = parse(src).unwrap();
            let v = prove_ergodic_any(&f, &oracle()).unwrap_or_else(|| panic!("{src} unproven"));
            assert_eq!(v.result, VerdictResult::Proven, "{src}");
            for w in 1..=12u32 {
                assert!(oracle().is_transitive(&f, w).unwrap(), "{src} width {w}");
            }
        }
    }

    /// A proven measure preservation verdict forces derivative parity 1
    /// everywhere the certificate can see.
    #[test]
    fn mp_implies_unit_derivative() {
        let corpus = ["x + 2*x*x", "x ^ (x*x | 1)", "5*x + 3"];
        for src in corpus {
            let f = parse(src).unwrap();
            let v = verify_measure_preserving(&f, MpPolicy::DerivativeMod2, &oracle()).unwrap();
            assert_eq!(v.result, VerdictResult::Proven, "{src}");
            let df = crate::expr::deriv::deriv_mod2(&f).unwrap();
            for u in 0..1u64 << 8 {
                assert_eq!(df.eval1(u, 8).unwrap() & 1, 1, "{src} at {u}");
            }
        }
    }

    #[test]
    fn falling_factorial_policy_direct() {
        // falling-factorial coefficients [1, 1, 2, 4] expand to this monomial form
        let f = parse("1 + 7*x - 10*x*x + 4*x*x*x").unwrap();
        let v = verify_ergodic(&f, ErgodicPolicy::FallingFactorial, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.theorem, Some(Theorem::ErgPol));
        let g = parse("1 + 2*x").unwrap();
        let v = verify_measure_preserving(&g, MpPolicy::FallingFactorial, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Refuted);
        // not a polynomial: policy inapplicable
        assert!(verify_ergodic(
            &parse("x | 1").unwrap(),
            ErgodicPolicy::FallingFactorial,
            &oracle()
        )
        .is_err());
    }

    #[test]
    fn modp_and_rational_verdicts_carry_their_tags() {
        let v = verify_poly_modp(5, &[1, 1], Property::Ergodic, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.theorem, Some(Theorem::ErgPolGen));
        assert_eq!(v.modulus_checked, Some(25));
        let v = verify_poly_modp(2, &[0, 1, 2], Property::MeasurePreserving, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.modulus_checked, Some(4));

        use num_bigint::BigInt;
        use num_rational::BigRational;
        let q = |n: i64| BigRational::from(BigInt::from(n));
        let v = verify_rational_poly(&[q(1), q(5)], 2, Property::Ergodic, &oracle()).unwrap();
        assert_eq!(v.result, VerdictResult::Proven);
        assert_eq!(v.theorem, Some(Theorem::Qpol));
        // degree 1: the table at 2^(floor(log2 1) + 3) already decides
        assert_eq!(v.modulus_checked, Some(8));
    }

    #[test]
    fn verdict_json_has_schema_fields() {
        let f = parse("x + (x*x | 5)").unwrap();
        let v = verify_ergodic(&f, ErgodicPolicy::DerivativeMod4, &oracle()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(json["property"], "Ergodic");
        assert_eq!(json["result"], "Proven");
        assert_eq!(json["theorem"], "erg_Der");
        assert_eq!(json["modulus_checked"], 32);
    }
}
