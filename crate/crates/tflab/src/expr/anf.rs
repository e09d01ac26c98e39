//! Boolean coordinate functions of a univariate T-function.
//!
//! Bit `j` of a compatible map is a Boolean function `τ_j(χ_0..χ_j)`; the map
//! is invertible at that bit exactly when it separates as
//! `τ_j = χ_j ⊕ φ_j(χ_0..χ_{j-1})`. The truth table of `φ_j` and its weight
//! parity are what the single-cycle criterion consumes.

use thiserror::Error;

use super::TExpr;
use crate::bits::BitSeq;

/// Largest coordinate index at which a truth table is materialized.
pub const MAX_ANF_BIT: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnfError {
    #[error("bit {bit} is not separable: inputs {a:#x} and {b:#x} collide at that bit")]
    NotMeasurePreserving { bit: u32, a: u64, b: u64 },
    #[error("bit index {0} not below width {1}")]
    BitOutOfWidth(u32, u32),
    #[error("bit index {0} exceeds the table cap {MAX_ANF_BIT}")]
    TableTooBig(u32),
    #[error("coordinate extraction needs a univariate expression")]
    NotUnivariate,
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Truth table of `φ_j` over `χ_0..χ_{j-1}`; index `x` holds `φ_j(x)` for
/// `x` read as `χ_0 + 2χ_1 + ...`. The length is exactly `2^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnfTable {
    pub bit: u32,
    pub table: BitSeq,
    /// Confirmed `τ_j = χ_j ⊕ φ_j` during extraction.
    pub separated: bool,
}

impl AnfTable {
    /// Weight parity: true when `φ_j` takes the value 1 at an odd number of
    /// points. Equivalently, the coefficient of the top monomial
    /// `χ_0···χ_{j-1}` in the algebraic normal form.
    pub fn weight_odd(&self) -> bool {
        self.table.popcount() % 2 == 1
    }
}

/// `true` when the table has odd weight.
pub fn anf_weight_odd(t: &AnfTable) -> bool {
    t.weight_odd()
}

/// Extracts `φ_j` for bit `j` of a univariate expression by evaluating it on
/// all residues modulo `2^{j+1}`.
pub fn coord_anf(e: &TExpr, j: u32, width: u32) -> Result<AnfTable, AnfError> {
    if !e.is_univariate() {
        return Err(AnfError::NotUnivariate);
    }
    if j >= width {
        return Err(AnfError::BitOutOfWidth(j, width));
    }
    if j > MAX_ANF_BIT {
        return Err(AnfError::TableTooBig(j));
    }
    let eval_width = j + 1;
    let half = 1u64 << j;
    let mut table = BitSeq::with_capacity(half as usize);
    for x in 0..half {
        let lo = e
            .eval1(x, eval_width)
            .map_err(|err| AnfError::Eval(err.to_string()))?;
        let hi = e
            .eval1(x + half, eval_width)
            .map_err(|err| AnfError::Eval(err.to_string()))?;
        let tau_lo = (lo >> j) & 1;
        let tau_hi = (hi >> j) & 1;
        if tau_lo == tau_hi {
            return Err(AnfError::NotMeasurePreserving {
                bit: j,
                a: x,
                b: x + half,
            });
        }
        table.push(tau_lo == 1);
    }
    Ok(AnfTable {
        bit: j,
        table,
        separated: true,
    })
}
