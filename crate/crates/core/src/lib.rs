//! Operator norms of the Cesàro and Copson matrices, their differences with
//! the identity and shifts, on cones of sequences in weighted `l^inf`
//! spaces, together with best constants for the inequalities comparing the
//! two operators.
//!
//! The crate is organised bottom-up:
//!
//! * [`sequences`]: weights, weighted norms, monotone envelopes
//! * [`special`]: zeta, Hurwitz-type tails and related certified sums
//! * [`operators`]: the matrices, their row structure and application
//! * [`formulas`]: norm evaluation for general weights
//! * [`power`]: closed forms for power weights
//! * [`constants`]: best constants of the two-operator inequalities
//! * [`oracle`]: independent brute-force checks of the formulas
//! * [`cli`]: the `ccnorms` command line

pub mod cli;
pub mod constants;
pub mod error;
pub mod formulas;
pub mod operators;
pub mod oracle;
pub mod power;
pub mod sequences;
pub mod special;

pub use error::{NormError, SpecialError, WeightError};
pub use formulas::{NormResult, NormStatus, TruncConfig};
pub use operators::{OpKind, OpTag, RowFlip};
pub use sequences::{Cone, ExtReal, SeqWindow, Weight};
