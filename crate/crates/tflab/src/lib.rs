//! A laboratory for T-functions over truncated 2-adic integers.
//!
//! The crate builds word mappings that are provably invertible or
//! single-cycle at every precision, assembles them into ordinary and
//! counter-dependent keystream generators, and verifies every claimed
//! property with independent checkers backed by exhaustive oracles at desk
//! scale.
//!
//! Start with the runnable programs in `examples/`; each one exercises a
//! major capability end to end. The `tflab` binary exposes the same
//! machinery as subcommands.

pub mod analysis;
pub mod bits;
pub mod cli;
pub mod ergodic;
pub mod expr;
pub mod generator;
pub mod word;

pub use bits::BitSeq;
pub use expr::TExpr;
pub use word::{Valuation, Word};
