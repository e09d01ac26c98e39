//! Expression trees for (possibly multivariate) T-functions.
//!
//! Every node is a processor primitive that only lets information flow from
//! low bits to high bits, so any tree evaluates to a compatible map: output
//! bit `j` depends on input bits `0..=j` alone. Right shifts and rotations
//! are not constructible.

pub mod anf;
pub mod deriv;
pub mod parse;

use std::fmt;

use thiserror::Error;

use crate::word::{self, Word};

pub use anf::{coord_anf, AnfError, AnfTable};
pub use deriv::{jacobian_mod2, n_bound, n_bound_system, DerivError, DiffCertificate};
pub use parse::{parse, parse_with_defs, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable x{0} is unbound (env has {1} entries)")]
    UnboundVar(usize, usize),
    #[error("inv() applied to even value {0:#x}")]
    EvenInverse(u64),
    #[error("environment width {0} does not match evaluation width {1}")]
    WidthMismatch(u32, u32),
}

/// A T-function expression. All constants are non-negative literals;
/// negative values arise only through explicit `Neg`/`Not` nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TExpr {
    Var(usize),
    Const(u64),
    Add(Box<TExpr>, Box<TExpr>),
    Sub(Box<TExpr>, Box<TExpr>),
    Mul(Box<TExpr>, Box<TExpr>),
    Neg(Box<TExpr>),
    Xor(Box<TExpr>, Box<TExpr>),
    And(Box<TExpr>, Box<TExpr>),
    Or(Box<TExpr>, Box<TExpr>),
    Not(Box<TExpr>),
    /// Shift towards more significant bits by a fixed amount.
    Shl(Box<TExpr>, u32),
    /// Reduction modulo `2^k`.
    Mod2k(Box<TExpr>, u32),
    /// Inverse of an odd value.
    InvOdd(Box<TExpr>),
    /// `(1 + 2u)^v` for children `(u, v)`.
    PowOddBase(Box<TExpr>, Box<TExpr>),
    /// `2^pow * C(arg, index)`. The constructor [`TExpr::binom2k`] enforces
    /// `pow >= floor(log2(index))`, the valuation that makes a single
    /// binomial term compatible.
    Binom2k {
        index: u32,
        pow: u32,
        arg: Box<TExpr>,
    },
    /// A named sub-expression applied to arguments: `body` with `Var(i)`
    /// bound to `args[i]`.
    Compose {
        body: Box<TExpr>,
        args: Vec<TExpr>,
    },
}

#[allow(clippy::should_implement_trait)]
impl TExpr {
    pub fn var(i: usize) -> TExpr {
        TExpr::Var(i)
    }

    pub fn x() -> TExpr {
        TExpr::Var(0)
    }

    pub fn constant(c: u64) -> TExpr {
        TExpr::Const(c)
    }

    pub fn add(self, rhs: TExpr) -> TExpr {
        TExpr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: TExpr) -> TExpr {
        TExpr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: TExpr) -> TExpr {
        TExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn neg(self) -> TExpr {
        TExpr::Neg(Box::new(self))
    }

    pub fn xor(self, rhs: TExpr) -> TExpr {
        TExpr::Xor(Box::new(self), Box::new(rhs))
    }

    pub fn and(self, rhs: TExpr) -> TExpr {
        TExpr::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: TExpr) -> TExpr {
        TExpr::Or(Box::new(self), Box::new(rhs))
    }

    pub fn not(self) -> TExpr {
        TExpr::Not(Box::new(self))
    }

    pub fn shl(self, k: u32) -> TExpr {
        TExpr::Shl(Box::new(self), k)
    }

    pub fn mod2k(self, k: u32) -> TExpr {
        TExpr::Mod2k(Box::new(self), k)
    }

    pub fn inv_odd(self) -> TExpr {
        TExpr::InvOdd(Box::new(self))
    }

    pub fn pow_odd_base(u: TExpr, v: TExpr) -> TExpr {
        TExpr::PowOddBase(Box::new(u), Box::new(v))
    }

    /// `2^pow * C(arg, index)`; panics when the scale is below the
    /// compatibility valuation `floor(log2(index))`.
    pub fn binom2k(index: u32, pow: u32, arg: TExpr) -> TExpr {
        let need = if index >= 2 { index.ilog2() } else { 0 };
        assert!(
            pow >= need,
            "binomial term needs scale 2^{need} at index {index}, got 2^{pow}"
        );
        TExpr::Binom2k {
            index,
            pow,
            arg: Box::new(arg),
        }
    }

    pub fn compose(body: TExpr, args: Vec<TExpr>) -> TExpr {
        TExpr::Compose {
            body: Box::new(body),
            args,
        }
    }

    /// Evaluates the induced map modulo `2^width`.
    pub fn eval(&self, env: &[Word], width: u32) -> Result<Word, EvalError> {
        for v in env {
            if v.width() != width {
                return Err(EvalError::WidthMismatch(v.width(), width));
            }
        }
        self.eval_unchecked(env, width)
    }

    fn eval_unchecked(&self, env: &[Word], width: u32) -> Result<Word, EvalError> {
        Ok(match self {
            TExpr::Var(i) => *env.get(*i).ok_or(EvalError::UnboundVar(*i, env.len()))?,
            TExpr::Const(c) => Word::new(*c, width),
            TExpr::Add(a, b) => a
                .eval_unchecked(env, width)?
                .add(b.eval_unchecked(env, width)?),
            TExpr::Sub(a, b) => a
                .eval_unchecked(env, width)?
                .sub(b.eval_unchecked(env, width)?),
            TExpr::Mul(a, b) => a
                .eval_unchecked(env, width)?
                .mul(b.eval_unchecked(env, width)?),
            TExpr::Neg(a) => a.eval_unchecked(env, width)?.neg(),
            TExpr::Xor(a, b) => a
                .eval_unchecked(env, width)?
                .xor(b.eval_unchecked(env, width)?),
            TExpr::And(a, b) => a
                .eval_unchecked(env, width)?
                .and(b.eval_unchecked(env, width)?),
            TExpr::Or(a, b) => a
                .eval_unchecked(env, width)?
                .or(b.eval_unchecked(env, width)?),
            TExpr::Not(a) => a.eval_unchecked(env, width)?.not(),
            TExpr::Shl(a, k) => a.eval_unchecked(env, width)?.shl(*k),
            TExpr::Mod2k(a, k) => a.eval_unchecked(env, width)?.mod2k(*k),
            TExpr::InvOdd(a) => {
                let v = a.eval_unchecked(env, width)?;
                v.inv_odd().map_err(|_| EvalError::EvenInverse(v.value()))?
            }
            TExpr::PowOddBase(u, v) => {
                word::pow_odd_base(u.eval_unchecked(env, width)?, v.eval_unchecked(env, width)?)
            }
            TExpr::Binom2k { index, pow, arg } => {
                word::binom_mod(arg.eval_unchecked(env, width)?, *index).shl(*pow)
            }
            TExpr::Compose { body, args } => {
                let inner: Result<Vec<Word>, EvalError> =
                    args.iter().map(|a| a.eval_unchecked(env, width)).collect();
                body.eval_unchecked(&inner?, width)?
            }
        })
    }

    /// Univariate convenience: evaluate at a single point.
    pub fn eval1(&self, x: u64, width: u32) -> Result<u64, EvalError> {
        Ok(self.eval(&[Word::new(x, width)], width)?.value())
    }

    /// Highest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            TExpr::Var(i) => Some(*i),
            TExpr::Const(_) => None,
            TExpr::Add(a, b)
            | TExpr::Sub(a, b)
            | TExpr::Mul(a, b)
            | TExpr::Xor(a, b)
            | TExpr::And(a, b)
            | TExpr::Or(a, b)
            | TExpr::PowOddBase(a, b) => a.max_var().into_iter().chain(b.max_var()).max(),
            TExpr::Neg(a) | TExpr::Not(a) | TExpr::InvOdd(a) => a.max_var(),
            TExpr::Shl(a, _) | TExpr::Mod2k(a, _) => a.max_var(),
            TExpr::Binom2k { arg, .. } => arg.max_var(),
            TExpr::Compose { args, .. } => args.iter().filter_map(|a| a.max_var()).max(),
        }
    }

    pub fn is_univariate(&self) -> bool {
        self.max_var().is_none_or(|m| m == 0)
    }

    /// Constant value of a closed subtree (literals under `Neg`/`Not`), used
    /// by the derivative table's sign convention. The value is reported as a
    /// signed 2-adic integer: `Neg(c) -> -c`, `Not(c) -> -(c+1)`.
    pub fn const_value(&self) -> Option<i128> {
        match self {
            TExpr::Const(c) => Some(*c as i128),
            TExpr::Neg(a) => a.const_value().map(|v| -v),
            TExpr::Not(a) => a.const_value().map(|v| -(v + 1)),
            TExpr::Add(a, b) => Some(a.const_value()? + b.const_value()?),
            TExpr::Sub(a, b) => Some(a.const_value()? - b.const_value()?),
            TExpr::Mul(a, b) => Some(a.const_value()? * b.const_value()?),
            TExpr::Shl(a, k) => Some(a.const_value()? << k.min(&64)),
            _ => None,
        }
    }

    /// Substitutes `Compose` nodes away, leaving a plain tree.
    pub fn inline(&self) -> TExpr {
        match self {
            TExpr::Compose { body, args } => {
                let args: Vec<TExpr> = args.iter().map(|a| a.inline()).collect();
                body.inline().substitute(&args)
            }
            other => other.map_children(|c| c.inline()),
        }
    }

    fn substitute(&self, args: &[TExpr]) -> TExpr {
        match self {
            TExpr::Var(i) => args
                .get(*i)
                .cloned()
                .unwrap_or_else(|| panic!("substitution for unbound variable x{i}")),
            TExpr::Compose { body, args: inner } => {
                let inner: Vec<TExpr> = inner.iter().map(|a| a.substitute(args)).collect();
                TExpr::Compose {
                    body: body.clone(),
                    args: inner,
                }
            }
            other => other.map_children(|c| c.substitute(args)),
        }
    }

    fn map_children(&self, mut f: impl FnMut(&TExpr) -> TExpr) -> TExpr {
        match self {
            TExpr::Var(i) => TExpr::Var(*i),
            TExpr::Const(c) => TExpr::Const(*c),
            TExpr::Add(a, b) => f(a).add(f(b)),
            TExpr::Sub(a, b) => f(a).sub(f(b)),
            TExpr::Mul(a, b) => f(a).mul(f(b)),
            TExpr::Neg(a) => f(a).neg(),
            TExpr::Xor(a, b) => f(a).xor(f(b)),
            TExpr::And(a, b) => f(a).and(f(b)),
            TExpr::Or(a, b) => f(a).or(f(b)),
            TExpr::Not(a) => f(a).not(),
            TExpr::Shl(a, k) => f(a).shl(*k),
            TExpr::Mod2k(a, k) => f(a).mod2k(*k),
            TExpr::InvOdd(a) => f(a).inv_odd(),
            TExpr::PowOddBase(a, b) => TExpr::pow_odd_base(f(a), f(b)),
            TExpr::Binom2k { index, pow, arg } => TExpr::Binom2k {
                index: *index,
                pow: *pow,
                arg: Box::new(f(arg)),
            },
            TExpr::Compose { body, args } => TExpr::Compose {
                body: body.clone(),
                args: args.iter().map(f).collect(),
            },
        }
    }

    /// True when the tree uses only ring operations and the odd-inverse /
    /// odd-base-power operators, the class decided by bijectivity modulo 4
    /// and transitivity modulo 8.
    pub fn is_b2_class(&self) -> bool {
        match self {
            TExpr::Var(_) | TExpr::Const(_) => true,
            TExpr::Add(a, b) | TExpr::Sub(a, b) | TExpr::Mul(a, b) | TExpr::PowOddBase(a, b) => {
                a.is_b2_class() && b.is_b2_class()
            }
            TExpr::Neg(a) | TExpr::InvOdd(a) => a.is_b2_class(),
            TExpr::Shl(a, _) => a.is_b2_class(),
            TExpr::Compose { body, args } => {
                body.is_b2_class() && args.iter().all(|a| a.is_b2_class())
            }
            _ => false,
        }
    }
}

// Display precedence, mirroring the parser: higher binds tighter.
fn precedence(e: &TExpr) -> u8 {
    match e {
        TExpr::Or(..) => 1,
        TExpr::Xor(..) => 2,
        TExpr::And(..) => 3,
        TExpr::Shl(..) => 4,
        TExpr::Add(..) | TExpr::Sub(..) => 5,
        TExpr::Mul(..) | TExpr::Mod2k(..) => 6,
        TExpr::Neg(..) | TExpr::Not(..) => 7,
        _ => 8,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &TExpr, parent_prec: u8) -> fmt::Result {
    if precedence(child) < parent_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for TExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = precedence(self);
        match self {
            TExpr::Var(0) => write!(f, "x"),
            TExpr::Var(i) => write!(f, "x{i}"),
            TExpr::Const(c) => write!(f, "{c}"),
            TExpr::Add(a, b) => {
                fmt_child(f, a, p)?;
                write!(f, " + ")?;
                fmt_child(f, b, p + 1)
            }
            TExpr::Sub(a, b) => {
                fmt_child(f, a, p)?;
                write!(f, " - ")?;
                fmt_child(f, b, p + 1)
            }
            TExpr::Mul(a, b) => {
                fmt_child(f, a, p)?;
                write!(f, "*")?;
                fmt_child(f, b, p + 1)
            }
            TExpr::Neg(a) => {
                write!(f, "-")?;
                fmt_child(f, a, p + 1)
            }
            TExpr::Xor(a, b) => {
                fmt_child(f, a, p)?;
                write!(f, " ^ ")?;
                fmt_child(f, b, p + 1)
            }
            TExpr::And(a, b) => {
                fmt_child(f, a, p)?;
                write!(f, " & ")?;
                fmt_child(f, b, p + 1)
            }
            TExpr::Or(a, b) => {
                fmt_child(f, a, p)?;
                write!(f, " | ")?;
                fmt_child(f, b, p + 1)
            }
            TExpr::Not(a) => {
                write!(f, "~")?;
                fmt_child(f, a, p + 1)
            }
            TExpr::Shl(a, k) => {
                fmt_child(f, a, p)?;
                write!(f, " << {k}")
            }
            TExpr::Mod2k(a, k) => {
                fmt_child(f, a, p)?;
                write!(f, " % 2^{k}")
            }
            TExpr::InvOdd(a) => write!(f, "inv({a})"),
            TExpr::PowOddBase(u, v) => write!(f, "pow1p2({u}, {v})"),
            TExpr::Binom2k { index, pow, arg } => write!(f, "binom2({index}, {pow}, {arg})"),
            TExpr::Compose { .. } => write!(f, "{}", self.inline()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_spec_examples() {
        // x + (x*x | 5) at x=3, width 5: 9|5 = 13, 3+13 = 16
        let e = TExpr::x().add(TExpr::x().mul(TExpr::x()).or(TExpr::constant(5)));
        assert_eq!(e.eval1(3, 5).unwrap(), 16);
        // x+1 wraps
        let inc = TExpr::x().add(TExpr::constant(1));
        assert_eq!(inc.eval1((1 << 8) - 1, 8).unwrap(), 0);
        // x ^ x = 0
        let z = TExpr::x().xor(TExpr::x());
        for v in 0..32 {
            assert_eq!(z.eval1(v, 5).unwrap(), 0);
        }
    }

    #[test]
    fn eval_inv_even_is_error() {
        let e = TExpr::x().inv_odd();
        assert_eq!(e.eval1(2, 4), Err(EvalError::EvenInverse(2)));
        assert_eq!(e.eval1(3, 4).unwrap(), 11);
    }

    #[test]
    fn compose_inlines_to_same_values() {
        // g(x) = x*x | 5; e = 1 + x + 2*(g(x+1) - g(x))
        let g = TExpr::x().mul(TExpr::x()).or(TExpr::constant(5));
        let e = TExpr::constant(1).add(TExpr::x()).add(
            TExpr::compose(g.clone(), vec![TExpr::x().add(TExpr::constant(1))])
                .sub(TExpr::compose(g, vec![TExpr::x()]))
                .shl(1),
        );
        let inlined = e.inline();
        for v in 0..256 {
            assert_eq!(e.eval1(v, 8).unwrap(), inlined.eval1(v, 8).unwrap());
        }
    }

    #[test]
    fn const_value_sign_convention() {
        assert_eq!(TExpr::constant(5).const_value(), Some(5));
        assert_eq!(TExpr::constant(5).neg().const_value(), Some(-5));
        assert_eq!(TExpr::constant(0).not().const_value(), Some(-1));
        assert_eq!(TExpr::x().const_value(), None);
    }

    #[test]
    fn display_parse_roundtrip() {
        let exprs = vec![
            TExpr::x().add(TExpr::x().mul(TExpr::x()).or(TExpr::constant(5))),
            TExpr::x().xor(TExpr::x().and(TExpr::constant(3)).shl(1)),
            TExpr::constant(1).add(TExpr::x()).mod2k(3),
            TExpr::pow_odd_base(TExpr::x(), TExpr::x().add(TExpr::constant(2))),
            TExpr::x().not().sub(TExpr::x().neg()),
            TExpr::binom2k(3, 2, TExpr::x()),
        ];
        for e in exprs {
            let text = e.to_string();
            let back = parse(&text).unwrap_or_else(|err| panic!("{text}: {err}"));
            for v in 0..64 {
                assert_eq!(
                    e.eval1(v, 10).unwrap(),
                    back.eval1(v, 10).unwrap(),
                    "expr {text} at {v}"
                );
            }
        }
    }

    mod fuzz {
        use super::super::*;
        use proptest::prelude::*;

        fn arb_expr() -> impl Strategy<Value = TExpr> {
            let leaf = prop_oneof![
                3 => Just(TExpr::x()),
                2 => (0u64..64).prop_map(TExpr::constant),
            ];
            leaf.prop_recursive(4, 24, 3, |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| a.xor(b)),
                    (inner.clone(), 0u64..256).prop_map(|(a, c)| a.and(TExpr::constant(c))),
                    (inner.clone(), 0u64..256).prop_map(|(a, c)| a.or(TExpr::constant(c))),
                    inner.clone().prop_map(|a| a.not()),
                    inner.clone().prop_map(|a| a.neg()),
                    (inner.clone(), 1u32..4).prop_map(|(a, k)| a.shl(k)),
                    (inner.clone(), 1u32..6).prop_map(|(a, k)| a.mod2k(k)),
                    // inversion of a forced-odd value
                    inner.clone().prop_map(|a| {
                        TExpr::constant(2).mul(a).add(TExpr::constant(1)).inv_odd()
                    }),
                    (inner.clone(), inner).prop_map(|(u, v)| TExpr::pow_odd_base(u, v)),
                ]
            })
        }

        proptest! {
            /// Any constructible tree is a T-function: output bit i never
            /// looks above input bit i.
            #[test]
            fn prop_random_trees_are_compatible(
                e in arb_expr(),
                a in 0u64..1024,
                flip in 0u32..10,
            ) {
                let width = 10;
                let b = a ^ (1 << flip);
                let fa = e.eval1(a, width).unwrap();
                let fb = e.eval1(b, width).unwrap();
                let mask = (1u64 << flip) - 1;
                prop_assert_eq!(fa & mask, fb & mask);
            }

            /// Printing and re-parsing preserves the induced map.
            #[test]
            fn prop_display_parse_roundtrip(e in arb_expr(), x in 0u64..256) {
                let text = e.to_string();
                let back = parse(&text).unwrap();
                prop_assert_eq!(e.eval1(x, 8).unwrap(), back.eval1(x, 8).unwrap(), "{}", text);
            }
        }
    }

    /// Compatibility: congruent inputs give congruent outputs, exhaustively.
    #[test]
    fn compatibility_exhaustive() {
        let corpus = vec![
            TExpr::x().add(TExpr::x().mul(TExpr::x()).or(TExpr::constant(5))),
            TExpr::x().xor(TExpr::x().mul(TExpr::x()).or(TExpr::constant(1))),
            TExpr::pow_odd_base(TExpr::constant(1), TExpr::x())
                .add(TExpr::constant(3).mul(TExpr::x())),
            TExpr::constant(1)
                .add(TExpr::x())
                .add(TExpr::constant(2).mul(TExpr::x().not())),
            TExpr::x().mod2k(3).sub(TExpr::x().shl(2)),
            TExpr::constant(2)
                .mul(TExpr::x())
                .add(TExpr::constant(1))
                .inv_odd(),
            TExpr::constant(1)
                .add(TExpr::x())
                .add(TExpr::constant(3).mul(TExpr::binom2k(2, 2, TExpr::x()))),
        ];
        let width = 10;
        for e in &corpus {
            for a in 0..1u64 << width {
                // neighbour differing above bit i
                for i in 0..width {
                    let b = a ^ (1 << i);
                    let fa = e.eval1(a, width).unwrap();
                    let fb = e.eval1(b, width).unwrap();
                    assert_eq!(
                        fa & ((1 << i) - 1),
                        fb & ((1 << i) - 1),
                        "expr {e} a={a} i={i}"
                    );
                }
            }
        }
    }
}
