//! Best constants in the two-operator inequalities
//! `||Cx||_{l^inf(v)} <= A ||C*x||_{d(u)}` and
//! `||C*x||_{l^inf(v)} <= A ||Cx||_{d(u)}`, over all `x` in the domain of
//! `C*` or over nonnegative `x` only.
//!
//! Each reduces to a single-operator norm:
//!
//! | direction  | cone     | norm                          |
//! |------------|----------|-------------------------------|
//! | `C <= C*`  | all      | `C - S*` on `u`, all inputs    |
//! | `C <= C*`  | nonneg   | `C - S*` on `u`, nonincreasing |
//! | `C* <= C`  | all      | `(C* - S)D` on `w`, all inputs |
//! | `C* <= C`  | nonneg   | `(C* - S)D` on `w`, nondecreasing |
//!
//! where `w_k = k u_k`.

use serde::{Deserialize, Serialize};

use crate::error::NormError;
use crate::formulas::{canonical_kind, norm_general, NormResult, TruncConfig};
use crate::operators::OpTag;
use crate::sequences::{envelope_up, Cone, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `||Cx|| <= A ||C*x||`
    CLeCstar,
    /// `||C*x|| <= A ||Cx||`
    CstarLeC,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoOpQuery {
    pub direction: Direction,
    /// `All` or `Nonneg`.
    pub cone: Cone,
    pub u: Weight,
    pub v: Weight,
    pub cfg: TruncConfig,
}

/// `w_k = k u_k`. A power weight `k^(-alpha)` becomes `k^(1-alpha)`.
pub fn scaled_by_index(u: &Weight) -> Weight {
    match u {
        Weight::Power { alpha } => Weight::Power { alpha: alpha - 1.0 },
        Weight::List { values } => Weight::List {
            values: values.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).collect(),
        },
    }
}

/// `inf_{j>=k} j u_j` for `k = 1..=k_max`; lists carry their last value
/// of `w` forward.
pub fn w_envelope(u: &Weight, k_max: usize) -> Vec<f64> {
    envelope_up(&scaled_by_index(u), k_max)
}

pub fn best_constant(q: &TwoOpQuery) -> Result<NormResult, NormError> {
    let (tag, weight, cone) = match (q.direction, q.cone) {
        (Direction::CLeCstar, Cone::All) => (OpTag::CminusSstar, q.u.clone(), Cone::All),
        (Direction::CLeCstar, Cone::Nonneg) => (OpTag::CminusSstar, q.u.clone(), Cone::Nonincr),
        (Direction::CstarLeC, Cone::All) => (OpTag::CstarSD, scaled_by_index(&q.u), Cone::All),
        (Direction::CstarLeC, Cone::Nonneg) => (OpTag::CstarSD, scaled_by_index(&q.u), Cone::Nondecr),
        (_, other) => {
            return Err(NormError::Unsupported(format!(
                "two-operator constants are defined for the all and nonneg cones, not {other}"
            )))
        }
    };
    let op = canonical_kind(tag, cone)?;
    norm_general(op, &weight, &q.v, cone, &q.cfg)
}
