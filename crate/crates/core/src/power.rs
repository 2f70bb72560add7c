//! Closed-form best constants for the matched power weights
//! `u_k = k^(-alpha)`, `v_n = n^alpha`.
//!
//! Branch edges follow the stated inequalities exactly; the branch taken is
//! reported in [`PowerCaseResult::case_label`].

use serde::{Deserialize, Serialize};

use crate::constants::{best_constant, Direction, TwoOpQuery};
use crate::error::NormError;
use crate::formulas::{norm_general, canonical_kind, NormResult, TruncConfig};
use crate::operators::OpTag;
use crate::sequences::{Cone, ExtReal, Weight};
use crate::special::{m_alpha, zeta};

/// Special quantities a branch used, if any.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpecialValues {
    /// Argument `s` of `zeta(s)`.
    pub zeta_arg: Option<f64>,
    /// `sum_k k^(-alpha)/(k+1)`.
    pub m_alpha: Option<f64>,
    /// Index `m` with `s_m < alpha <= s_{m+1}`.
    pub m_breakpoint: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerCaseResult {
    pub value: ExtReal,
    pub case_label: String,
    pub special_values: SpecialValues,
}

impl PowerCaseResult {
    fn new(value: f64, label: &str) -> Self {
        PowerCaseResult {
            value: ExtReal::new(value),
            case_label: label.to_string(),
            special_values: SpecialValues::default(),
        }
    }

    fn infinite(label: &str) -> Self {
        PowerCaseResult::new(f64::INFINITY, label)
    }
}

/// `zeta(s)` for the closed forms; `s > 1` holds on every branch that asks.
fn zeta_value(s: f64) -> f64 {
    zeta(s).expect("zeta argument above 1 on this branch").value
}

/// Norm of the Cesàro matrix.
pub fn cesaro_power(alpha: f64, cone: Cone) -> PowerCaseResult {
    match cone {
        Cone::Nondecr if alpha <= 0.0 => PowerCaseResult::new(1.0, "alpha <= 0"),
        Cone::Nondecr => PowerCaseResult::new(0.0, "alpha > 0"),
        _ if alpha < 0.0 => PowerCaseResult::new(1.0, "alpha < 0"),
        _ if alpha < 1.0 => PowerCaseResult::new(1.0 / (1.0 - alpha), "0 <= alpha < 1"),
        _ => PowerCaseResult::infinite("alpha >= 1"),
    }
}

/// Norm of the Copson matrix.
pub fn copson_power(alpha: f64, cone: Cone) -> PowerCaseResult {
    match cone {
        Cone::Nondecr => PowerCaseResult::new(0.0, "nondecreasing: only 0 in the domain"),
        _ if alpha <= 0.0 => PowerCaseResult::infinite("alpha <= 0"),
        _ => {
            let mut r = PowerCaseResult::new(zeta_value(alpha + 1.0), "alpha > 0");
            r.special_values.zeta_arg = Some(alpha + 1.0);
            r
        }
    }
}

/// `s_m = 1 + ln(1 - 1/m) / ln(1 + 1/m)` for `m >= 2`; `s_1 = -inf`.
pub fn breakpoint_s(m: usize) -> f64 {
    assert!(m >= 1);
    if m == 1 {
        return f64::NEG_INFINITY;
    }
    let r = 1.0 / m as f64;
    1.0 + (-r).ln_1p() / r.ln_1p()
}

/// The `m >= 1` with `s_m < alpha <= s_{m+1}`, for `alpha < 0`.
///
/// `s_m` increases to 0, so an exponential bracket followed by bisection
/// finds the least `j >= 2` with `alpha <= s_j`, and `m = j - 1`.
pub fn select_breakpoint(alpha: f64) -> usize {
    assert!(alpha < 0.0, "breakpoints only cover alpha < 0");
    let mut hi = 2usize;
    while breakpoint_s(hi) < alpha {
        hi *= 2;
    }
    let mut lo = hi / 2; // s_lo < alpha, or lo = 1 where s_1 = -inf
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if breakpoint_s(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi - 1
}

/// `(m+1)^(alpha-1) m`, the value of `n^(alpha-1) (n-1)` at `n = m + 1`.
pub fn breakpoint_value(alpha: f64, m: usize) -> f64 {
    ((m + 1) as f64).powf(alpha - 1.0) * m as f64
}

/// Distance from the Cesàro matrix to the identity (`I - C` on the
/// nondecreasing cone).
pub fn cesaro_minus_id_power(alpha: f64, cone: Cone) -> PowerCaseResult {
    match cone {
        Cone::All if alpha < 1.0 => PowerCaseResult::new((2.0 - alpha) / (1.0 - alpha), "alpha < 1"),
        Cone::All => PowerCaseResult::infinite("alpha >= 1"),
        Cone::Nonneg if alpha < 0.0 => PowerCaseResult::new(1.0, "alpha < 0"),
        Cone::Nonincr if alpha < 0.0 => {
            let m = select_breakpoint(alpha);
            let mut r = PowerCaseResult::new(breakpoint_value(alpha, m), "s_m < alpha <= s_(m+1)");
            r.special_values.m_breakpoint = Some(m);
            r
        }
        Cone::Nonneg | Cone::Nonincr if alpha < 1.0 => {
            PowerCaseResult::new(1.0 / (1.0 - alpha), "0 <= alpha < 1")
        }
        Cone::Nonneg | Cone::Nonincr => PowerCaseResult::infinite("alpha >= 1"),
        Cone::Nondecr if alpha <= 0.0 => PowerCaseResult::new(1.0, "alpha <= 0"),
        Cone::Nondecr => PowerCaseResult::new(0.0, "alpha > 0"),
    }
}

/// Distance from the Copson matrix to the identity. Only the full and
/// nonnegative cones have closed forms here: the nonincreasing cone is open
/// and the nondecreasing one is identically 0.
pub fn copson_minus_id_power(alpha: f64, cone: Cone) -> Result<PowerCaseResult, NormError> {
    Ok(match cone {
        Cone::All | Cone::Nonneg if alpha <= 0.0 => PowerCaseResult::infinite("alpha <= 0"),
        Cone::All => PowerCaseResult::new(1.0 + 1.0 / alpha, "alpha > 0"),
        Cone::Nonneg if alpha < 1.0 => PowerCaseResult::new(1.0 / alpha, "0 < alpha < 1"),
        Cone::Nonneg => PowerCaseResult::new(1.0, "alpha >= 1"),
        Cone::Nonincr => {
            return Err(NormError::Unsupported(
                "the norm of C* - I on nonnegative nonincreasing sequences is an open problem".into(),
            ))
        }
        Cone::Nondecr => {
            return Err(NormError::Unsupported(
                "no power closed form for C* - I on the nondecreasing cone; the general formula gives 0".into(),
            ))
        }
    })
}

fn two_op_cone(cone: Cone) -> Result<(), NormError> {
    match cone {
        Cone::All | Cone::Nonneg => Ok(()),
        other => Err(NormError::Unsupported(format!(
            "two-operator constants are defined for the all and nonneg cones, not {other}"
        ))),
    }
}

/// Best constant in `||Cx|| <= A ||C*x||`.
pub fn two_op_cc_power(alpha: f64, cone: Cone) -> Result<PowerCaseResult, NormError> {
    two_op_cone(cone)?;
    Ok(match cone {
        _ if alpha >= 1.0 => PowerCaseResult::infinite("alpha >= 1"),
        Cone::All if alpha <= 0.0 => PowerCaseResult::new(1.0 + (-alpha).exp2(), "alpha <= 0"),
        Cone::All => PowerCaseResult::new((2.0 - alpha) / (1.0 - alpha), "0 < alpha < 1"),
        _ if alpha <= 0.0 => PowerCaseResult::new(1.0, "alpha <= 0"),
        _ => PowerCaseResult::new(1.0 / (1.0 - alpha), "0 < alpha < 1"),
    })
}

/// Best constant in `||C*x|| <= A ||Cx||`.
pub fn two_op_cstarc_power(alpha: f64, cone: Cone) -> Result<PowerCaseResult, NormError> {
    two_op_cone(cone)?;
    Ok(match cone {
        _ if alpha <= 0.0 => PowerCaseResult::infinite("alpha <= 0"),
        Cone::All if alpha <= 1.0 => PowerCaseResult::new(1.0 + 1.0 / alpha, "0 < alpha <= 1"),
        Cone::All => {
            let m = m_alpha(alpha).expect("alpha > 0 on this branch").value;
            let mut r = PowerCaseResult::new(alpha.exp2() * m, "alpha > 1");
            r.special_values.m_alpha = Some(m);
            r
        }
        _ if alpha <= 1.0 => PowerCaseResult::new(1.0 / alpha, "0 < alpha <= 1"),
        _ => PowerCaseResult::new(0.0, "alpha > 1"),
    })
}

/// The six closed-form families, for sweeping and cross-checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PowerFamily {
    Cesaro,
    Copson,
    CesaroMinusIdentity,
    CopsonMinusIdentity,
    CLeCstar,
    CstarLeC,
}

impl PowerFamily {
    pub const ALL: [PowerFamily; 6] = [
        PowerFamily::Cesaro,
        PowerFamily::Copson,
        PowerFamily::CesaroMinusIdentity,
        PowerFamily::CopsonMinusIdentity,
        PowerFamily::CLeCstar,
        PowerFamily::CstarLeC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PowerFamily::Cesaro => "cesaro",
            PowerFamily::Copson => "copson",
            PowerFamily::CesaroMinusIdentity => "cesaro-minus-identity",
            PowerFamily::CopsonMinusIdentity => "copson-minus-identity",
            PowerFamily::CLeCstar => "c-le-cstar",
            PowerFamily::CstarLeC => "cstar-le-c",
        }
    }

    pub fn from_name(name: &str) -> Option<PowerFamily> {
        PowerFamily::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Cones with a closed form.
    pub fn cones(self) -> &'static [Cone] {
        match self {
            PowerFamily::CopsonMinusIdentity | PowerFamily::CLeCstar | PowerFamily::CstarLeC => &[Cone::All, Cone::Nonneg],
            _ => &Cone::ALL,
        }
    }

    pub fn closed_form(self, alpha: f64, cone: Cone) -> Result<PowerCaseResult, NormError> {
        match self {
            PowerFamily::Cesaro => Ok(cesaro_power(alpha, cone)),
            PowerFamily::Copson => Ok(copson_power(alpha, cone)),
            PowerFamily::CesaroMinusIdentity => Ok(cesaro_minus_id_power(alpha, cone)),
            PowerFamily::CopsonMinusIdentity => copson_minus_id_power(alpha, cone),
            PowerFamily::CLeCstar => two_op_cc_power(alpha, cone),
            PowerFamily::CstarLeC => two_op_cstarc_power(alpha, cone),
        }
    }

    /// The same quantity from the general row formulas on
    /// `u_k = k^(-alpha)`, `v_n = n^alpha`.
    pub fn general(self, alpha: f64, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
        let u = Weight::power(alpha).map_err(|e| NormError::Config(e.to_string()))?;
        let v = Weight::power(-alpha).map_err(|e| NormError::Config(e.to_string()))?;
        let tag = match self {
            PowerFamily::Cesaro => OpTag::C,
            PowerFamily::Copson => OpTag::Cstar,
            PowerFamily::CesaroMinusIdentity => OpTag::CminusI,
            PowerFamily::CopsonMinusIdentity => OpTag::CstarMinusI,
            PowerFamily::CLeCstar | PowerFamily::CstarLeC => {
                let direction = if self == PowerFamily::CLeCstar { Direction::CLeCstar } else { Direction::CstarLeC };
                return best_constant(&TwoOpQuery { direction, cone, u, v, cfg: *cfg });
            }
        };
        norm_general(canonical_kind(tag, cone)?, &u, &v, cone, cfg)
    }
}
