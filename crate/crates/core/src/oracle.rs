//! Brute-force checks of the norm formulas.
//!
//! Two independent paths bound a norm from below by evaluating
//! `||Bx||_{l^inf(v)} / ||x||_{d(u)}` on concrete inputs:
//!
//! * [`extremal_lower_bound`] builds, for each row, the input that makes
//!   that row's functional tight. On list weights the result equals the
//!   formula; on power weights it approaches it from below as `N` grows.
//! * [`random_lower_bound`] samples inputs from the cone.
//!
//! Rows are evaluated through [`apply_tailed`], which works from prefix and
//! suffix sums of the input rather than from the row segment description the
//! formulas use.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{scaled_by_index, Direction};
use crate::error::NormError;
use crate::formulas::{norm_general, NormStatus, TruncConfig};
use crate::power::PowerFamily;
use crate::operators::{apply, apply_tailed, entry, has_infinite_row, row_signs, OpKind, OpTag, TailedSeq};
use crate::sequences::{
    quotient, quotient_norm_weighted, sup_norm_weighted, times, weight_at, Cone, ExtReal, SeqWindow, Weight,
};

/// Tolerance for the lower-bound property of the random path.
pub const RANDOM_TOL: f64 = 1e-9;
/// Relative tolerance for extremal values on list weights.
pub const EXACT_TOL: f64 = 1e-12;

/// The weight `u` as the oracle sees it: explicit values on `1..=K` and the
/// infimum of `u` beyond `K`, which bounds a constant tail of the input.
struct Domain {
    u: Vec<f64>,
    tail_inf: f64,
}

impl Domain {
    /// `K = L` for lists, `K = n` for power weights. On the nondecreasing
    /// cone a list is continued by its last value, elsewhere by zeros.
    fn new(weight: &Weight, cone: Cone, n: usize) -> Domain {
        match weight {
            Weight::List { values } => {
                let tail_inf = match cone {
                    Cone::Nondecr => values.last().copied().unwrap_or(0.0),
                    _ => 0.0,
                };
                Domain { u: values.clone(), tail_inf }
            }
            Weight::Power { alpha } => {
                let u = (1..=n).map(|k| weight_at(weight, k)).collect();
                // k^(-alpha) beyond n: increasing for alpha <= 0, tends to 0 otherwise.
                let tail_inf = if *alpha <= 0.0 { weight_at(weight, n + 1) } else { 0.0 };
                Domain { u, tail_inf }
            }
        }
    }

    fn len(&self) -> usize {
        self.u.len()
    }

    fn running_min(&self) -> Vec<f64> {
        let mut cur = f64::INFINITY;
        self.u.iter().map(|&x| {
            cur = cur.min(x);
            cur
        }).collect()
    }

    fn suffix_inf(&self) -> Vec<f64> {
        let mut out = self.u.clone();
        let mut cur = self.tail_inf;
        for x in out.iter_mut().rev() {
            cur = cur.min(*x);
            *x = cur;
        }
        out
    }

    /// `||x||_{d(u)}` including the constant tail.
    fn norm(&self, x: &TailedSeq) -> f64 {
        let mut best = 0.0f64;
        for (k, xk) in x.head.iter().enumerate() {
            let uk = self.u.get(k).copied().unwrap_or(self.tail_inf);
            best = best.max(quotient(xk.abs(), uk));
        }
        if x.tail != 0.0 {
            best = best.max(quotient(x.tail.abs(), self.tail_inf));
        }
        best
    }
}

fn rows_for(v: &Weight, n: usize) -> usize {
    v.len().unwrap_or(n)
}

/// `v_n |(Bx)_n| / ||x||_{d(u)}`, zero when `x = 0`.
fn row_ratio(op: OpKind, x: &TailedSeq, n: usize, vn: f64, dom: &Domain) -> f64 {
    let norm = dom.norm(x);
    if norm == 0.0 {
        return 0.0;
    }
    let y = apply_tailed(op, x, n)[n - 1];
    times(vn, y.abs()) / norm
}

/// `||Bx||_{l^inf(v)} / ||x||_{d(u)}` over rows `1..=rows`.
fn full_ratio(op: OpKind, x: &TailedSeq, v: &Weight, rows: usize, dom: &Domain) -> f64 {
    let norm = dom.norm(x);
    if norm == 0.0 {
        return 0.0;
    }
    let y = apply_tailed(op, x, rows);
    let sup = y.iter().enumerate().map(|(i, yn)| times(weight_at(v, i + 1), yn.abs())).fold(0.0, f64::max);
    sup / norm
}

fn cone_supported(op: OpKind, cone: Cone) -> Result<(), NormError> {
    use crate::operators::{nondecreasing_hypothesis, nonincreasing_hypothesis};
    let ok = match cone {
        Cone::All | Cone::Nonneg => true,
        Cone::Nonincr => nonincreasing_hypothesis(op),
        Cone::Nondecr => nondecreasing_hypothesis(op),
    };
    if ok {
        Ok(())
    } else {
        Err(NormError::Unsupported(format!("{:?} does not meet the {cone} cone hypothesis", op)))
    }
}

/// Row-by-row extremal inputs.
///
/// * `All`: `x_k = sign(b_{n,k}) u_k` for `k <= K`
/// * `Nonneg`: `u` on the positive entries, and separately on the negative
/// * `Nonincr`: the running minimum of `u` up to the last positive entry
/// * `Nondecr`: 0 up to the last negative entry, then the suffix infimum of
///   `u`, continued by the infimum of `u` beyond `K`
pub fn extremal_lower_bound(op: OpKind, u: &Weight, v: &Weight, cone: Cone, n: usize) -> Result<f64, NormError> {
    cone_supported(op, cone)?;
    if cone == Cone::Nondecr && has_infinite_row(op) {
        return Ok(0.0);
    }
    let dom = Domain::new(u, cone, n);
    let kk = dom.len();
    let down = dom.running_min();
    let up = dom.suffix_inf();
    let rows = rows_for(v, n);

    let best = (1..=rows)
        .into_par_iter()
        .map(|row| {
            let vn = weight_at(v, row);
            if vn == 0.0 {
                return 0.0;
            }
            let signs = row_signs(op, row);
            match cone {
                Cone::All => {
                    let head = (1..=kk).map(|k| entry(op, row, k).signum() * dom.u[k - 1]).map(zero_sign).collect();
                    row_ratio(op, &TailedSeq::finite(head), row, vn, &dom)
                }
                Cone::Nonneg => {
                    let part = |positive: bool| {
                        let head = (1..=kk)
                            .map(|k| {
                                let b = entry(op, row, k);
                                if (b > 0.0 && positive) || (b < 0.0 && !positive) {
                                    dom.u[k - 1]
                                } else {
                                    0.0
                                }
                            })
                            .collect();
                        row_ratio(op, &TailedSeq::finite(head), row, vn, &dom)
                    };
                    part(true).max(part(false))
                }
                Cone::Nonincr => {
                    let m = match signs.positive {
                        None => 0,
                        Some(span) => span.last.map_or(kk, |l| l.min(kk)),
                    };
                    let head = down[..m].to_vec();
                    row_ratio(op, &TailedSeq::finite(head), row, vn, &dom)
                }
                Cone::Nondecr => {
                    let m = match signs.negative {
                        None => 0,
                        Some(span) => span.last.expect("rows meeting the hypothesis end their negatives"),
                    };
                    let len = kk.max(m);
                    let head = (1..=len).map(|k| if k <= m { 0.0 } else { up[k - 1] }).collect();
                    row_ratio(op, &TailedSeq { head, tail: dom.tail_inf }, row, vn, &dom)
                }
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

fn zero_sign(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// One random input in `cone`, scaled by the envelope of `u` the cone needs.
fn sample(rng: &mut ChaCha8Rng, cone: Cone, dom: &Domain, down: &[f64], up: &[f64]) -> TailedSeq {
    let kk = dom.len();
    let mut t: Vec<f64> = (0..kk).map(|_| rng.gen::<f64>()).collect();
    match cone {
        Cone::All => {
            let cut = rng.gen_range(0..=kk);
            let head = (0..kk).map(|i| if i < cut { (2.0 * t[i] - 1.0) * dom.u[i] } else { 0.0 }).collect();
            TailedSeq::finite(head)
        }
        Cone::Nonneg => {
            let cut = rng.gen_range(0..=kk);
            let head = (0..kk).map(|i| if i < cut { t[i] * dom.u[i] } else { 0.0 }).collect();
            TailedSeq::finite(head)
        }
        Cone::Nonincr => {
            let cut = rng.gen_range(0..=kk);
            t.sort_by(|a, b| b.total_cmp(a));
            let head = (0..kk).map(|i| if i < cut { t[i] * down[i] } else { 0.0 }).collect();
            TailedSeq::finite(head)
        }
        Cone::Nondecr => {
            let start = rng.gen_range(0..=kk);
            let mut level = 0.0f64;
            let head: Vec<f64> = (0..kk)
                .map(|i| {
                    if i < start {
                        0.0
                    } else {
                        level = level.max(t[i]);
                        level * up[i]
                    }
                })
                .collect();
            // The tail continues at the last level against the infimum of u
            // beyond K, keeping x nondecreasing and below u.
            let tail = if start < kk { level * dom.tail_inf } else { rng.gen::<f64>() * dom.tail_inf };
            TailedSeq { head, tail }
        }
    }
}

const SAMPLE_ATTEMPTS: usize = 8;

/// Best ratio over `trials` random inputs from the cone. Trial `i` draws
/// from stream `i` of a ChaCha8 generator seeded with `seed`, so the result
/// does not depend on scheduling.
pub fn random_lower_bound(op: OpKind, u: &Weight, v: &Weight, cone: Cone, n: usize, trials: usize, seed: u64) -> f64 {
    assert!(trials >= 1, "at least one trial");
    let dom = Domain::new(u, cone, n);
    let down = dom.running_min();
    let up = dom.suffix_inf();
    let rows = rows_for(v, n);
    // Inputs with a nonzero constant tail lie outside the domain of a matrix
    // with an infinite row sum.
    let tail_allowed = !has_infinite_row(op);
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            for _ in 0..SAMPLE_ATTEMPTS {
                let x = sample(&mut rng, cone, &dom, &down, &up);
                if x.tail != 0.0 && !tail_allowed {
                    continue;
                }
                if dom.norm(&x) == 0.0 {
                    continue;
                }
                return full_ratio(op, &x, v, rows, &dom);
            }
            0.0
        })
        .reduce(|| 0.0, f64::max)
}

/// Outcome of checking one norm against both lower-bound paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub op: OpKind,
    pub cone: Cone,
    pub formula_value: ExtReal,
    pub extremal_value: ExtReal,
    pub random_best: ExtReal,
    pub gap_extremal: ExtReal,
    pub gap_random: ExtReal,
    pub pass: bool,
    pub seed: u64,
    pub trials: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

/// Runs the formula, extremal and random paths.
///
/// On list weights fully covered by the scan the extremal value must match
/// the formula to [`EXACT_TOL`] relative; elsewhere both paths only need to
/// stay below the formula value (plus [`RANDOM_TOL`]).
#[allow(clippy::too_many_arguments)]
pub fn verify(
    op: OpKind,
    u: &Weight,
    v: &Weight,
    cone: Cone,
    cfg: &TruncConfig,
    trials: usize,
    seed: u64,
    n: usize,
) -> Result<VerifyReport, NormError> {
    let formula = norm_general(op, u, v, cone, cfg)?.value.value();
    let extremal = extremal_lower_bound(op, u, v, cone, n)?;
    let random = random_lower_bound(op, u, v, cone, n, trials, seed);
    let exact = u.len().is_some() && v.len().is_some_and(|l| l <= cfg.n_max);
    let gap_extremal = if formula.is_infinite() { f64::INFINITY } else { (formula - extremal).abs() };
    let gap_random = if formula.is_infinite() { 0.0 } else { (random - formula).max(0.0) };
    let scale = if formula.is_finite() { formula.max(1.0) } else { 1.0 };
    let below = |x: f64| formula.is_infinite() || x <= formula + RANDOM_TOL * scale;
    let pass = below(extremal) && below(random) && (!exact || gap_extremal <= EXACT_TOL * scale);
    Ok(VerifyReport {
        op,
        cone,
        formula_value: ExtReal::new(formula),
        extremal_value: ExtReal::new(extremal),
        random_best: ExtReal::new(random),
        gap_extremal: ExtReal::new(gap_extremal),
        gap_random: ExtReal::new(gap_random),
        pass,
        seed,
        trials,
        n,
    })
}

/// For each row `n`, the two-operator ratio on the input built from the
/// reduction witness of row `n`; returns the largest.
///
/// * `C <= C*`: `y = (u_1..u_n, -u_{n+1}, 0, ..)` (all) or the running
///   minimum of `u` on `1..=n` (nonneg), and `x_k = k (y_k - y_{k+1})`, so
///   `C*x = y`. The ratio is `||Cx||_v / ||C*x||_u`.
/// * `C* <= C`: with `w_k = k u_k`, `z = (0.., -w_{n-1}, w_n..w_K, 0..)`
///   (all) or `(0.., w^up_n..w^up_K, w^up_K, ..)` (nonneg), and
///   `x_k = z_k - z_{k-1}`, so `Cx = z_k/k`. The ratio is
///   `||C*x||_v / ||Cx||_u`.
///
/// Only list weights are accepted; `u` has length `K`.
pub fn two_op_witness_ratio(direction: Direction, cone: Cone, u: &[f64], v: &Weight) -> f64 {
    assert!(matches!(cone, Cone::All | Cone::Nonneg));
    let kk = u.len();
    let u_w = Weight::List { values: u.to_vec() };
    let rows = v.len().expect("list v");
    let u_at = |k: usize| if (1..=kk).contains(&k) { u[k - 1] } else { 0.0 };
    let mut best = 0.0f64;
    for n in 1..=rows {
        let ratio = match direction {
            Direction::CLeCstar => {
                let mut y: Vec<f64> = match cone {
                    Cone::All => (1..=n).map(u_at).chain([-u_at(n + 1)]).collect(),
                    _ => {
                        let mut cur = f64::INFINITY;
                        (1..=n).map(|k| {
                            cur = cur.min(u_at(k));
                            cur
                        }).collect()
                    }
                };
                y.push(0.0);
                let x: Vec<f64> = (1..y.len()).map(|k| k as f64 * (y[k - 1] - y[k])).collect();
                let x = SeqWindow::from_first(x);
                let cx = apply(OpTag::C.into(), &x, rows);
                let csx = apply(OpTag::Cstar.into(), &x, x.end().max(1));
                let num = sup_norm_weighted(&cx, v).value();
                let den = quotient_norm_weighted(&csx, &u_w).value();
                quotient(num, den)
            }
            Direction::CstarLeC => {
                let w: Vec<f64> = (1..=kk).map(|k| k as f64 * u[k - 1]).collect();
                let w_last = w.last().copied().unwrap_or(0.0);
                let (z, tail, u_ext) = match cone {
                    Cone::All => {
                        let z: Vec<f64> = (1..=kk)
                            .map(|k| if k + 1 == n { -w[k - 1] } else if k >= n { w[k - 1] } else { 0.0 })
                            .collect();
                        (z, 0.0, u.to_vec())
                    }
                    _ => {
                        // The nonneg reading continues w by w_K, i.e. u_k = w_K/k.
                        let len = kk.max(n.saturating_sub(1));
                        let w_up = crate::constants::w_envelope(&u_w, kk);
                        let w_up_at = |k: usize| w_up[k.min(kk) - 1];
                        let z: Vec<f64> = (1..=len).map(|k| if k >= n { w_up_at(k) } else { 0.0 }).collect();
                        let u_ext = (1..=len).map(|k| if k <= kk { u[k - 1] } else { w_last / k as f64 }).collect();
                        (z, w_last, u_ext)
                    }
                };
                let len = z.len();
                // x_k = z_k - z_{k-1} on 1..=len+1; beyond len the sequence z
                // is the constant `tail`, so x vanishes there.
                let x: Vec<f64> = (1..=len + 1)
                    .map(|k| {
                        let zk = if k <= len { z[k - 1] } else { tail };
                        let prev = if k >= 2 { z[k - 2] } else { 0.0 };
                        zk - prev
                    })
                    .collect();
                let x = SeqWindow::from_first(x);
                let csx = apply(OpTag::Cstar.into(), &x, rows);
                let cx = apply(OpTag::C.into(), &x, len);
                let num = sup_norm_weighted(&csx, v).value();
                // Beyond len, (Cx)_k = tail/k exactly, so against
                // u_k = w_K/k the quotient is tail / w_K.
                let u_ext = Weight::List { values: u_ext };
                let den = quotient_norm_weighted(&cx, &u_ext).value().max(quotient(tail, w_last));
                quotient(num, den)
            }
        };
        best = best.max(ratio);
    }
    best
}

/// Splits `u` into the weight the inner norm reads (`u` or `w = k u_k`).
pub fn two_op_inner_weight(direction: Direction, u: &Weight) -> Weight {
    match direction {
        Direction::CLeCstar => u.clone(),
        Direction::CstarLeC => scaled_by_index(u),
    }
}

/// Random list weights of length `1..=max_len`, entries in `[0, 1]` with
/// about one in ten set to zero.
pub fn random_list(rng: &mut ChaCha8Rng, max_len: usize) -> Weight {
    let len = rng.gen_range(1..=max_len);
    let values = (0..len).map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen::<f64>() }).collect();
    Weight::List { values }
}

/// A finitely supported window: start in `1..=10`, support of `1..=max_support`
/// entries in `[-1, 1]`.
pub fn random_window(rng: &mut ChaCha8Rng, max_support: usize) -> SeqWindow {
    let start = rng.gen_range(1..=10);
    let len = rng.gen_range(1..=max_support);
    SeqWindow::new(start, (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

/// Deviation of an identity check relative to the size of the data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub check: String,
    pub cases: usize,
    pub rows: usize,
    pub max_relative_deviation: ExtReal,
    pub pass: bool,
}

/// Runs both operator identities on `cases` random windows.
pub fn identity_suite(cases: usize, rows: usize, seed: u64) -> Vec<IdentityReport> {
    type Check = fn(&SeqWindow, usize) -> f64;
    let checks: [(&str, Check); 2] = [
        ("first", crate::operators::check_identity_first),
        ("second", crate::operators::check_identity_second),
    ];
    checks
        .into_iter()
        .map(|(name, check)| {
            let worst = (0..cases)
                .into_par_iter()
                .map(|case| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(case as u64);
                    let x = random_window(&mut rng, 40);
                    let rhs = apply(OpTag::C.into(), &x, rows);
                    let scale = x.values.iter().chain(&rhs.values).fold(0.0f64, |m, y| m.max(y.abs()));
                    quotient(check(&x, rows), scale)
                })
                .reduce(|| 0.0, f64::max);
            IdentityReport {
                check: name.to_string(),
                cases,
                rows,
                max_relative_deviation: ExtReal::new(worst),
                pass: worst <= EXACT_TOL,
            }
        })
        .collect()
}

/// Closed form against the general formulas at one power exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub family: String,
    pub alpha: f64,
    pub cone: Cone,
    pub closed_form: ExtReal,
    pub general: ExtReal,
    pub status: String,
    pub residual: ExtReal,
    pub pass: bool,
}

/// Finite closed forms must agree with the general scan to
/// `max(1e-3, residual)`; infinite ones must be flagged divergent or scan
/// above `1e6`.
pub fn consistency_suite(alphas: &[f64], cfg: &TruncConfig) -> Result<Vec<ConsistencyReport>, NormError> {
    let mut out = Vec::new();
    for family in PowerFamily::ALL {
        for &cone in family.cones() {
            for &alpha in alphas {
                let closed = family.closed_form(alpha, cone)?.value.value();
                let general = family.general(alpha, cone, cfg)?;
                let g = general.value.value();
                let pass = if closed.is_infinite() {
                    general.status == NormStatus::Divergent || g > 1e6
                } else {
                    (g - closed).abs() <= general.residual_estimate.max(1e-3)
                };
                out.push(ConsistencyReport {
                    family: family.name().to_string(),
                    alpha,
                    cone,
                    closed_form: ExtReal::new(closed),
                    general: general.value,
                    status: general.status.name().to_string(),
                    residual: ExtReal::new(general.residual_estimate),
                    pass,
                });
            }
        }
    }
    Ok(out)
}

/// Every principal operator on every cone it supports: `lists` random list
/// pairs checked exactly, then matched power pairs at a few exponents
/// truncated at `n`.
pub fn oracle_suite(seed: u64, trials: usize, n: usize, lists: usize, cfg: &TruncConfig) -> Vec<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Weight, Weight)> =
        (0..lists).map(|_| (random_list(&mut rng, 20), random_list(&mut rng, 20))).collect();
    let mut out = Vec::new();
    for tag in OpTag::PRINCIPAL {
        for cone in Cone::ALL {
            let Ok(op) = crate::formulas::canonical_kind(tag, cone) else { continue };
            if cone_supported(op, cone).is_err() {
                continue;
            }
            for (u, v) in &pairs {
                let len = u.len().unwrap_or(n).max(v.len().unwrap_or(n));
                out.extend(verify(op, u, v, cone, cfg, trials, seed, len).ok());
            }
            for alpha in [-1.0, 0.5, 2.0] {
                let (u, v) = (Weight::Power { alpha }, Weight::Power { alpha: -alpha });
                out.extend(verify(op, &u, &v, cone, cfg, trials, seed, n).ok());
            }
        }
    }
    out
}
