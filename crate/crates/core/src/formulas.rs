//! Norm evaluation for general weights.
//!
//! For a matrix `B` with rows split into single-signed segments, the norm on
//! each cone is a weighted supremum over rows of a row functional:
//!
//! * `All`: `v_n * sum_k |b_{n,k}| u_k`
//! * `Nonneg`: `v_n * max(sum_k b+_{n,k} u_k, sum_k b-_{n,k} u_k)`
//! * `Nonincr`: `v_n * sum_k b+_{n,k} u_k` with `u` replaced by its running
//!   minimum (rows must have positives before negatives, nonnegative sums)
//! * `Nondecr`: `v_n * sum_k b+_{n,k} u_k` with `u` replaced by its suffix
//!   infimum (rows must have negatives before positives, nonnegative sums),
//!   and `0` outright when some row has an infinite sum
//!
//! Inner sums never truncate: weights are tabulated up to the scan length
//! and the tails beyond are closed forms from [`crate::special`]. Only the
//! outer supremum is truncated; see [`NormStatus`] for how that is reported.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::NormError;
use crate::operators::{
    has_infinite_row, nondecreasing_hypothesis, nonincreasing_hypothesis, row_segments, Kernel,
    OpKind, OpTag, RowFlip, Segment, ROWS_CHECKED,
};
use crate::sequences::{envelope_down, envelope_up, power_at, times, Cone, ExtReal, Weight};
use crate::special::{hurwitz_tail, shifted_tail, zeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormStatus {
    ClosedForm,
    /// The outer supremum is settled: either every row was scanned, the
    /// tail of the scan is monotone towards a known limit, or the last tenth
    /// of the scan moved the supremum by less than the tolerance.
    TruncatedConverged,
    /// The value is a partial supremum and may still grow.
    TruncatedLowerBound,
    Divergent,
    Unsupported,
}

impl NormStatus {
    pub fn name(self) -> &'static str {
        match self {
            NormStatus::ClosedForm => "ClosedForm",
            NormStatus::TruncatedConverged => "TruncatedConverged",
            NormStatus::TruncatedLowerBound => "TruncatedLowerBound",
            NormStatus::Divergent => "Divergent",
            NormStatus::Unsupported => "Unsupported",
        }
    }
}

/// Invariants: `value >= 0`; `Divergent` implies `value = inf`;
/// `TruncatedConverged` implies `residual_estimate <= tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: ExtReal,
    pub status: NormStatus,
    pub n_used: usize,
    pub residual_estimate: f64,
}

impl NormResult {
    pub fn closed_form(value: f64) -> Self {
        let status = if value.is_infinite() { NormStatus::Divergent } else { NormStatus::ClosedForm };
        NormResult { value: ExtReal::new(value), status, n_used: 0, residual_estimate: 0.0 }
    }

    fn divergent(n_used: usize) -> Self {
        NormResult {
            value: ExtReal::INFINITY,
            status: NormStatus::Divergent,
            n_used,
            residual_estimate: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncConfig {
    pub n_max: usize,
    pub tol: f64,
    pub divergence_threshold: f64,
}

impl Default for TruncConfig {
    fn default() -> Self {
        TruncConfig { n_max: 1_000_000, tol: 1e-9, divergence_threshold: 1e15 }
    }
}

impl TruncConfig {
    pub fn with_n_max(n_max: usize) -> Self {
        TruncConfig { n_max, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), NormError> {
        if self.n_max < 1 {
            return Err(NormError::Config("n_max must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(NormError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(NormError::Config(format!(
                "divergence threshold must be positive, got {}",
                self.divergence_threshold
            )));
        }
        Ok(())
    }
}

/// The row flips under which the cone formulas apply to `tag`.
///
/// `C - I` and `C - S*` are negated on the nondecreasing cone (giving
/// `I - C` and `S* - C`); `(C* - S)D` is negated from row 2 on for the
/// nonincreasing cone, since row 1 is already nonnegative.
pub fn canonical_kind(tag: OpTag, cone: Cone) -> Result<OpKind, NormError> {
    let flip = match (tag, cone) {
        (OpTag::CstarMinusI, Cone::Nonincr) => return Err(open_problem()),
        (OpTag::CminusI | OpTag::CminusSstar, Cone::Nondecr) => RowFlip::ALL,
        (OpTag::CstarSD, Cone::Nonincr) => RowFlip::RowsFrom(2),
        _ => RowFlip::None,
    };
    Ok(OpKind::flipped(tag, flip))
}

fn open_problem() -> NormError {
    NormError::Unsupported(
        "the norm of C* - I on nonnegative nonincreasing sequences is an open problem".into(),
    )
}

/// Weighted sums of one sequence `w` tabulated on `1..=len`, with closed-form
/// tails beyond.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Tail {
    Zero,
    Const(f64),
    /// `k^(-a)`
    Power(f64),
}

impl Tail {
    fn at(self, k: usize) -> f64 {
        match self {
            Tail::Zero => 0.0,
            Tail::Const(c) => c,
            Tail::Power(a) => power_at(a, k),
        }
    }

    /// `sum_{k>=m} w_k / k`
    fn harmonic_from(self, m: usize) -> f64 {
        match self {
            Tail::Zero | Tail::Const(0.0) => 0.0,
            Tail::Const(_) => f64::INFINITY,
            Tail::Power(a) if a > 0.0 => hurwitz_tail(a + 1.0, m).map_or(f64::INFINITY, |c| c.value),
            Tail::Power(_) => f64::INFINITY,
        }
    }

    /// `sum_{k>=m} w_k / (k(k+1))`
    fn telescoping_from(self, m: usize) -> f64 {
        match self {
            Tail::Zero => 0.0,
            Tail::Const(c) => c / m as f64,
            Tail::Power(a) if a > -1.0 => shifted_tail(a + 1.0, m).map_or(f64::INFINITY, |c| c.value),
            Tail::Power(_) => f64::INFINITY,
        }
    }
}

/// Explicit values on `1..=head.len()`, then `tail`.
#[derive(Clone, Debug, PartialEq)]
struct Profile {
    head: Vec<f64>,
    tail: Tail,
}

impl Profile {
    /// The sequence the row functional of `cone` reads: `u`, its running
    /// minimum or its suffix infimum.
    fn for_cone(u: &Weight, cone: Cone) -> Profile {
        match (u, cone) {
            (Weight::Power { alpha }, Cone::All | Cone::Nonneg) => Profile::pure(Tail::Power(*alpha)),
            (Weight::Power { alpha }, Cone::Nonincr) if *alpha < 0.0 => Profile::pure(Tail::Const(1.0)),
            (Weight::Power { alpha }, Cone::Nonincr) => Profile::pure(Tail::Power(*alpha)),
            (Weight::Power { alpha }, Cone::Nondecr) if *alpha > 0.0 => Profile::pure(Tail::Zero),
            (Weight::Power { alpha }, Cone::Nondecr) => Profile::pure(Tail::Power(*alpha)),
            (Weight::List { values }, Cone::All | Cone::Nonneg) => {
                Profile { head: values.clone(), tail: Tail::Zero }
            }
            (Weight::List { values }, _) if values.is_empty() => Profile::pure(Tail::Zero),
            (Weight::List { values }, Cone::Nonincr) => {
                Profile { head: envelope_down(u, values.len()), tail: Tail::Zero }
            }
            (Weight::List { values }, Cone::Nondecr) => Profile {
                head: envelope_up(u, values.len()),
                tail: Tail::Const(values[values.len() - 1]),
            },
        }
    }

    fn pure(tail: Tail) -> Profile {
        Profile { head: Vec::new(), tail }
    }

    fn is_pure(&self) -> bool {
        self.head.is_empty()
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// A profile tabulated on `1..=len` with prefix sums and the harmonic and
/// telescoping suffix sums.
pub(crate) struct Table {
    values: Vec<f64>,
    prefix: Vec<f64>,
    harmonic: Vec<f64>,
    telescoping: Vec<f64>,
}

impl Table {
    fn build(profile: &Profile, min_len: usize) -> Table {
        let len = min_len.max(profile.head.len()).max(1);
        let values: Vec<f64> = (1..=len)
            .map(|k| profile.head.get(k - 1).copied().unwrap_or_else(|| profile.tail.at(k)))
            .collect();

        let mut prefix = Vec::with_capacity(len + 1);
        prefix.push(0.0);
        let mut acc = Compensated::default();
        for &w in &values {
            acc.add(w);
            prefix.push(acc.total());
        }

        // Index m holds the suffix sum from m. Beyond an explicit head the
        // tail sums are closed forms, so lists give the same table entries
        // whatever the scan length.
        let anchor = if profile.is_pure() { len } else { profile.head.len() };
        let mut harmonic = vec![0.0; len + 2];
        let mut telescoping = vec![0.0; len + 2];
        for m in anchor + 1..=len + 1 {
            harmonic[m] = profile.tail.harmonic_from(m);
            telescoping[m] = profile.tail.telescoping_from(m);
        }
        let h_seed = harmonic[anchor + 1];
        let t_seed = telescoping[anchor + 1];
        let mut h = Compensated { sum: h_seed, carry: 0.0 };
        let mut t = Compensated { sum: t_seed, carry: 0.0 };
        for k in (1..=anchor).rev() {
            let kf = k as f64;
            let w = values[k - 1];
            if h_seed.is_finite() {
                h.add(w / kf);
            }
            if t_seed.is_finite() {
                t.add(w / (kf * (kf + 1.0)));
            }
            harmonic[k] = h.total();
            telescoping[k] = t.total();
        }
        Table { values, prefix, harmonic, telescoping }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    /// `w_k`, zero for `k = 0`.
    fn value(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    /// `sum_{k<=m} w_k`
    fn prefix(&self, m: usize) -> f64 {
        self.prefix[m]
    }

    /// `sum_{k>=m} w_k / k`
    fn harmonic(&self, m: usize) -> f64 {
        self.harmonic[m]
    }

    /// `sum_{k>=m} w_k / (k(k+1))`
    fn telescoping(&self, m: usize) -> f64 {
        self.telescoping[m]
    }

    /// `sum_{k in span} kernel(k) w_k`
    fn segment_sum(&self, seg: &Segment) -> f64 {
        let first = seg.span.first;
        match (seg.kernel, seg.span.last) {
            (kernel, Some(last)) if last == first => kernel.at(first) * self.value(first),
            (Kernel::Unit, Some(last)) => self.prefix(last) - self.prefix(first - 1),
            (kernel, Some(last)) => (first..=last).map(|k| kernel.at(k) * self.value(k)).sum(),
            (Kernel::Harmonic, None) => self.harmonic(first),
            (Kernel::Telescoping, None) => self.telescoping(first),
            (Kernel::Unit, None) => unreachable!("no row here has an unbounded unit segment"),
        }
    }
}

/// The cone's row functional applied to row `n` of `op`, without `v_n`.
fn generic_row(op: OpKind, cone: Cone, t: &Table, n: usize) -> f64 {
    let segs = row_segments(op, n);
    let mut pos = 0.0;
    let mut neg = 0.0;
    for s in &segs {
        let part = s.coef.abs() * t.segment_sum(s);
        if s.coef > 0.0 {
            pos += part;
        } else {
            neg += part;
        }
    }
    match cone {
        Cone::All => pos + neg,
        Cone::Nonneg => pos.max(neg),
        Cone::Nonincr | Cone::Nondecr => pos,
    }
}

/// Asymptotic size of one segment's contribution `v_n * |coef| * sum`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Asym {
    Vanish,
    Finite(f64),
    Infinite,
}

const EXPONENT_EPS: f64 = 1e-12;

fn by_exponent(p: f64, constant: f64) -> Asym {
    if p < -EXPONENT_EPS {
        Asym::Vanish
    } else if p <= EXPONENT_EPS {
        Asym::Finite(constant)
    } else {
        Asym::Infinite
    }
}

/// Limit of `n^b * |lead| n^order * sum_{k in span} kernel(k) * mult * k^(-a)`
/// as `n -> inf`, or `None` when the segment shape is not one of the
/// families handled.
fn segment_limit(seg: &Segment, a: f64, mult: f64, b: f64) -> Option<Asym> {
    if mult == 0.0 {
        return Some(Asym::Vanish);
    }
    let scale = seg.lead.abs() * mult;
    let e = seg.order as f64;
    let first = seg.span.first;
    Some(match (seg.kernel, seg.span.last) {
        (Kernel::Unit, Some(last)) if last == first => by_exponent(b + e - a, scale),
        (Kernel::Unit, Some(_)) if first == 1 => {
            if a < 1.0 - EXPONENT_EPS {
                by_exponent(b + e + 1.0 - a, scale / (1.0 - a))
            } else if a <= 1.0 + EXPONENT_EPS {
                // Partial sums grow like ln n.
                if b + e < -EXPONENT_EPS {
                    Asym::Vanish
                } else {
                    Asym::Infinite
                }
            } else {
                by_exponent(b + e, scale * zeta(a).ok()?.value)
            }
        }
        (Kernel::Harmonic, None) if a > 0.0 => by_exponent(b + e - a, scale / a),
        (Kernel::Harmonic, None) => Asym::Infinite,
        (Kernel::Telescoping, None) if a > -1.0 => by_exponent(b + e - a - 1.0, scale / (a + 1.0)),
        (Kernel::Telescoping, None) => Asym::Infinite,
        _ => return None,
    })
}

fn add_asym(x: Asym, y: Asym) -> Asym {
    match (x, y) {
        (Asym::Infinite, _) | (_, Asym::Infinite) => Asym::Infinite,
        (Asym::Finite(p), Asym::Finite(q)) => Asym::Finite(p + q),
        (Asym::Finite(p), Asym::Vanish) | (Asym::Vanish, Asym::Finite(p)) => Asym::Finite(p),
        (Asym::Vanish, Asym::Vanish) => Asym::Vanish,
    }
}

fn max_asym(x: Asym, y: Asym) -> Asym {
    match (x, y) {
        (Asym::Infinite, _) | (_, Asym::Infinite) => Asym::Infinite,
        (Asym::Finite(p), Asym::Finite(q)) => Asym::Finite(p.max(q)),
        (Asym::Finite(p), Asym::Vanish) | (Asym::Vanish, Asym::Finite(p)) => Asym::Finite(p),
        (Asym::Vanish, Asym::Vanish) => Asym::Vanish,
    }
}

/// `lim_n v_n * row_functional(n)` for a pure power/constant profile and a
/// power `v`; `None` when no closed-form limit is available.
fn row_limit(op: OpKind, cone: Cone, profile: &Profile, v: &Weight) -> Option<Asym> {
    let Weight::Power { alpha: v_alpha } = v else { return None };
    if !profile.is_pure() {
        return None;
    }
    let b = -v_alpha;
    let (a, mult) = match profile.tail {
        Tail::Zero => (0.0, 0.0),
        Tail::Const(c) => (0.0, c),
        Tail::Power(a) => (a, 1.0),
    };
    // Past the first few rows every row has the same shape.
    let segs = row_segments(op, ROWS_CHECKED + 1);
    let mut pos = Asym::Vanish;
    let mut neg = Asym::Vanish;
    for s in &segs {
        let lim = segment_limit(s, a, mult, b)?;
        if s.coef > 0.0 {
            pos = add_asym(pos, lim);
        } else {
            neg = add_asym(neg, lim);
        }
    }
    Some(match cone {
        Cone::All => add_asym(pos, neg),
        Cone::Nonneg => max_asym(pos, neg),
        Cone::Nonincr | Cone::Nondecr => pos,
    })
}

/// Relative slack for monotonicity of the scan tail.
const MONOTONE_SLACK: f64 = 1e-13;

fn tail_is_monotone(tail: &[f64], increasing: bool) -> bool {
    tail.windows(2).all(|w| {
        let slack = MONOTONE_SLACK * w[0].abs().max(1.0);
        if increasing {
            w[1] >= w[0] - slack
        } else {
            w[1] <= w[0] + slack
        }
    })
}

/// One norm problem: hypotheses, tabulation, parallel scan, limit.
fn evaluate<F>(op: OpKind, u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig, row: F) -> Result<NormResult, NormError>
where
    F: Fn(&Table, usize) -> f64 + Sync,
{
    cfg.validate()?;
    check_hypothesis(op, cone)?;
    if cone == Cone::Nondecr && has_infinite_row(op) {
        // The only nonnegative nondecreasing sequence in the domain is 0.
        return Ok(NormResult::closed_form(0.0));
    }
    let n_stop = v.len().map_or(cfg.n_max, |l| l.min(cfg.n_max));
    let fully_scanned = v.len().is_some_and(|l| l <= cfg.n_max);
    let profile = Profile::for_cone(u, cone);
    let table = Table::build(&profile, n_stop + 1);
    debug_assert!(table.len() > n_stop);

    let terms: Vec<f64> = (1..=n_stop)
        .into_par_iter()
        .map(|n| times(crate::sequences::weight_at(v, n), row(&table, n)))
        .collect();

    if let Some(i) = terms.iter().position(|t| !(*t <= cfg.divergence_threshold)) {
        return Ok(NormResult::divergent(i + 1));
    }
    let limit = if fully_scanned { None } else { row_limit(op, cone, &profile, v) };
    if limit == Some(Asym::Infinite) {
        return Ok(NormResult::divergent(n_stop));
    }

    let sup = terms.iter().copied().fold(0.0, f64::max);
    let converged = |residual: f64| NormResult {
        value: ExtReal::new(sup),
        status: NormStatus::TruncatedConverged,
        n_used: n_stop,
        residual_estimate: residual,
    };
    if fully_scanned {
        return Ok(converged(0.0));
    }

    let head_len = n_stop - n_stop / 10;
    let sup_head = terms[..head_len].iter().copied().fold(0.0, f64::max);
    let change = sup - sup_head;
    let tail = &terms[head_len.saturating_sub(1)..];
    let last = terms.last().copied().unwrap_or(0.0);

    if let Some(lim) = limit {
        let l = match lim {
            Asym::Finite(l) => l,
            _ => 0.0,
        };
        let value = sup.max(l);
        let slack = 1e-9 * l.max(1.0);
        let towards_from_below = tail_is_monotone(tail, true) && last <= l + slack;
        let towards_from_above = tail_is_monotone(tail, false) && last >= l - slack;
        let (status, residual) = if towards_from_below || towards_from_above {
            (NormStatus::TruncatedConverged, 0.0)
        } else if change < cfg.tol {
            (NormStatus::TruncatedConverged, change)
        } else {
            (NormStatus::TruncatedLowerBound, change.max((l - last).abs()))
        };
        return Ok(NormResult { value: ExtReal::new(value), status, n_used: n_stop, residual_estimate: residual });
    }

    if change < cfg.tol {
        Ok(converged(change))
    } else {
        Ok(NormResult {
            value: ExtReal::new(sup),
            status: NormStatus::TruncatedLowerBound,
            n_used: n_stop,
            residual_estimate: change,
        })
    }
}

fn check_hypothesis(op: OpKind, cone: Cone) -> Result<(), NormError> {
    let holds = match cone {
        Cone::All | Cone::Nonneg => true,
        Cone::Nonincr => nonincreasing_hypothesis(op),
        Cone::Nondecr => nondecreasing_hypothesis(op),
    };
    if holds {
        Ok(())
    } else if op.tag == OpTag::CstarMinusI && cone == Cone::Nonincr {
        Err(open_problem())
    } else {
        Err(NormError::Unsupported(format!(
            "rows of {:?} (flips {:?}) do not have the sign pattern and sums the {cone} cone needs",
            op.tag, op.flip
        )))
    }
}

/// Norm of `op` from `d(u)` to `l^inf(v)` restricted to `cone`, from the row
/// segment description.
pub fn norm_general(op: OpKind, u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    evaluate(op, u, v, cone, cfg, |t, n| generic_row(op, cone, t, n))
}

/// Norm of the Cesàro matrix: `sup_n (v_n/n) sum_{k<=n} w_k` with `w` the
/// cone's profile of `u`.
pub fn norm_cesaro(u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    let op = canonical_kind(OpTag::C, cone)?;
    evaluate(op, u, v, cone, cfg, |t, n| t.prefix(n) / n as f64)
}

/// Norm of the Copson matrix: `sup_n v_n sum_{k>=n} w_k/k`, and `0` on the
/// nondecreasing cone.
pub fn norm_copson(u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    let op = canonical_kind(OpTag::Cstar, cone)?;
    evaluate(op, u, v, cone, cfg, |t, n| t.harmonic(n))
}

/// Norm of `C - I` (of `I - C` on the nondecreasing cone).
pub fn dist_cesaro_identity(u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    let op = canonical_kind(OpTag::CminusI, cone)?;
    evaluate(op, u, v, cone, cfg, |t, n| {
        let nf = n as f64;
        let diagonal = (nf - 1.0) * t.value(n);
        let before = t.prefix(n - 1);
        match cone {
            Cone::All => (diagonal + before) / nf,
            Cone::Nonneg => diagonal.max(before) / nf,
            Cone::Nonincr => before / nf,
            Cone::Nondecr => diagonal / nf,
        }
    })
}

/// Norm of `C* - I`. The nonincreasing cone is rejected as an open problem.
pub fn dist_copson_identity(u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    let op = canonical_kind(OpTag::CstarMinusI, cone)?;
    evaluate(op, u, v, cone, cfg, |t, n| {
        let nf = n as f64;
        let diagonal = (nf - 1.0) / nf * t.value(n);
        let after = t.harmonic(n + 1);
        match cone {
            Cone::All => diagonal + after,
            Cone::Nonneg => diagonal.max(after),
            Cone::Nonincr | Cone::Nondecr => unreachable!("handled before the scan"),
        }
    })
}

/// Norm of `C - S*` (of `S* - C` on the nondecreasing cone).
pub fn norm_c_minus_sstar(u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    let op = canonical_kind(OpTag::CminusSstar, cone)?;
    evaluate(op, u, v, cone, cfg, |t, n| {
        let average = t.prefix(n) / n as f64;
        let next = t.value(n + 1);
        match cone {
            Cone::All => average + next,
            Cone::Nonneg => average.max(next),
            Cone::Nonincr => average,
            Cone::Nondecr => next,
        }
    })
}

/// Norm of `(C* - S) D`, with `u_0 = 0`. On the nonincreasing cone rows
/// `n >= 2` are negated; row 1 contributes `v_1 sum_k w_k/(k(k+1))`.
pub fn norm_cstarsd(u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    let op = canonical_kind(OpTag::CstarSD, cone)?;
    evaluate(op, u, v, cone, cfg, |t, n| {
        let previous = t.value(n - 1) / n as f64;
        let tail = t.telescoping(n);
        match cone {
            Cone::All => previous + tail,
            Cone::Nonneg => previous.max(tail),
            Cone::Nonincr if n == 1 => tail,
            Cone::Nonincr => previous,
            Cone::Nondecr => tail,
        }
    })
}

/// The specialized evaluator for a principal matrix.
pub fn norm_specialized(tag: OpTag, u: &Weight, v: &Weight, cone: Cone, cfg: &TruncConfig) -> Result<NormResult, NormError> {
    match tag {
        OpTag::C => norm_cesaro(u, v, cone, cfg),
        OpTag::Cstar => norm_copson(u, v, cone, cfg),
        OpTag::CminusI => dist_cesaro_identity(u, v, cone, cfg),
        OpTag::CstarMinusI => dist_copson_identity(u, v, cone, cfg),
        OpTag::CminusSstar => norm_c_minus_sstar(u, v, cone, cfg),
        OpTag::CstarSD => norm_cstarsd(u, v, cone, cfg),
        other => {
            let op = canonical_kind(other, cone)?;
            norm_general(op, u, v, cone, cfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg() -> TruncConfig {
        TruncConfig::with_n_max(100_000)
    }

    fn list(v: &[f64]) -> Weight {
        Weight::list(v.to_vec()).unwrap()
    }

    /// `u_k = k^(-alpha)` and `v_n = n^alpha`.
    fn pair(alpha: f64) -> (Weight, Weight) {
        (Weight::power(alpha).unwrap(), Weight::power(-alpha).unwrap())
    }

    fn value(r: Result<NormResult, NormError>) -> f64 {
        r.unwrap().value.value()
    }

    #[test]
    fn cesaro_examples() {
        let (u, v) = pair(0.5);
        let r = norm_cesaro(&u, &v, Cone::All, &cfg()).unwrap();
        assert!((r.value.value() - 2.0).abs() < 1e-12, "{r:?}");
        assert_eq!(r.status, NormStatus::TruncatedConverged);
        let (u, v) = pair(-1.0);
        assert!((value(norm_cesaro(&u, &v, Cone::Nonincr, &cfg())) - 1.0).abs() < 1e-12);
        assert_eq!(value(norm_cesaro(&list(&[3.0, 1.0, 2.0]), &list(&[1.0, 0.0, 0.0]), Cone::All, &cfg())), 3.0);
        let ones = list(&[1.0; 4]);
        let r = norm_general(OpTag::C.into(), &ones, &ones, Cone::All, &cfg()).unwrap();
        assert_eq!(r.value.value(), 1.0);
        assert_eq!((r.status, r.n_used, r.residual_estimate), (NormStatus::TruncatedConverged, 4, 0.0));
    }

    #[test]
    fn identity_operator() {
        let u = list(&[0.5, 2.0, 4.0]);
        let v = list(&[2.0, 0.5, 0.25]);
        for cone in [Cone::All, Cone::Nonneg] {
            assert_eq!(value(norm_general(OpTag::I.into(), &u, &v, cone, &cfg())), 1.0);
        }
    }

    #[test]
    fn copson_examples() {
        let (u, v) = pair(1.0);
        let r = norm_copson(&u, &v, Cone::Nonneg, &cfg()).unwrap();
        assert!((r.value.value() - PI * PI / 6.0).abs() < 1e-12, "{r:?}");
        let (u, v) = pair(-1.0);
        let r = norm_copson(&u, &v, Cone::All, &cfg()).unwrap();
        assert_eq!(r.status, NormStatus::Divergent);
        assert!(r.value.is_infinite());
        for (u, v) in [pair(2.0), pair(-3.0), (list(&[1.0, 2.0]), list(&[5.0]))] {
            let r = norm_copson(&u, &v, Cone::Nondecr, &cfg()).unwrap();
            assert_eq!((r.value.value(), r.status), (0.0, NormStatus::ClosedForm));
        }
    }

    #[test]
    fn cesaro_identity_examples() {
        let (u, v) = pair(0.5);
        assert!((value(dist_cesaro_identity(&u, &v, Cone::All, &cfg())) - 3.0).abs() < 1e-12);
        let (u, v) = pair(-1.0);
        assert!((value(dist_cesaro_identity(&u, &v, Cone::Nonneg, &cfg())) - 1.0).abs() < 1e-12);
        let (u, v) = pair(0.0);
        assert!((value(dist_cesaro_identity(&u, &v, Cone::Nondecr, &cfg())) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn copson_identity_examples() {
        let (u, v) = pair(2.0);
        assert!((value(dist_copson_identity(&u, &v, Cone::All, &cfg())) - 1.5).abs() < 1e-12);
        let (u, v) = pair(0.5);
        assert!((value(dist_copson_identity(&u, &v, Cone::Nonneg, &cfg())) - 2.0).abs() < 1e-12);
        match dist_copson_identity(&u, &v, Cone::Nonincr, &cfg()) {
            Err(NormError::Unsupported(msg)) => assert!(msg.contains("open problem")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            norm_general(OpTag::CstarMinusI.into(), &u, &v, Cone::Nonincr, &cfg()),
            Err(NormError::Unsupported(_))
        ));
    }

    #[test]
    fn c_minus_sstar_examples() {
        let (u, v) = pair(0.0);
        assert!((value(norm_c_minus_sstar(&u, &v, Cone::All, &cfg())) - 2.0).abs() < 1e-12);
        assert!((value(norm_c_minus_sstar(&u, &v, Cone::Nondecr, &cfg())) - 1.0).abs() < 1e-12);
        assert_eq!(value(norm_c_minus_sstar(&list(&[1.0, 1.0]), &list(&[1.0]), Cone::Nonneg, &cfg())), 1.0);
    }

    #[test]
    fn cstarsd_examples() {
        let (u, v) = pair(0.0);
        assert!((value(norm_cstarsd(&u, &v, Cone::Nondecr, &cfg())) - 1.0).abs() < 1e-12);
        // Row 1 alone gives sum_k 1/(k(k+1)) = 1 (attained by x = 1).
        assert!((value(norm_cstarsd(&u, &v, Cone::Nonincr, &cfg())) - 1.0).abs() < 1e-12);
        let zero = list(&[0.0; 5]);
        for cone in Cone::ALL {
            assert_eq!(value(norm_cstarsd(&zero, &list(&[1.0; 5]), cone, &cfg())), 0.0);
        }
    }

    #[test]
    fn hypothesis_failures_are_unsupported() {
        let (u, v) = pair(0.5);
        assert!(norm_general(OpTag::CminusI.into(), &u, &v, Cone::Nondecr, &cfg()).is_err());
        assert!(norm_general(OpTag::CstarSD.into(), &u, &v, Cone::Nonincr, &cfg()).is_err());
        assert!(norm_general(OpKind::flipped(OpTag::CstarSD, RowFlip::ALL), &u, &v, Cone::Nonincr, &cfg()).is_err());
    }

    #[test]
    fn bad_config_rejected() {
        let (u, v) = pair(0.5);
        let bad = TruncConfig { n_max: 0, ..Default::default() };
        assert!(matches!(norm_cesaro(&u, &v, Cone::All, &bad), Err(NormError::Config(_))));
        let bad = TruncConfig { tol: 0.0, ..Default::default() };
        assert!(norm_cesaro(&u, &v, Cone::All, &bad).is_err());
    }

    #[test]
    fn list_weights_are_exact_and_power_u_uses_analytic_tails() {
        // v = (1), u_k = k^-2: row 1 of C* is zeta(3).
        let r = norm_copson(&Weight::power(2.0).unwrap(), &list(&[1.0]), Cone::All, &cfg()).unwrap();
        assert!((r.value.value() - 1.202_056_903_159_594_3).abs() < 1e-13);
        assert_eq!(r.n_used, 1);
    }

    #[test]
    fn slow_convergence_is_settled_by_the_limit() {
        let (u, v) = pair(0.99);
        let r = norm_cesaro(&u, &v, Cone::All, &TruncConfig::with_n_max(1000)).unwrap();
        assert!((r.value.value() - 100.0).abs() < 1e-9, "{r:?}");
        assert_eq!(r.status, NormStatus::TruncatedConverged);
    }

    #[test]
    fn heuristic_status_for_mixed_weights() {
        // A list u with growing power v: the row functional keeps growing.
        let u = list(&[1.0, 1.0]);
        let v = Weight::power(-2.0).unwrap();
        let r = norm_cesaro(&u, &v, Cone::All, &TruncConfig::with_n_max(1000)).unwrap();
        assert_eq!(r.status, NormStatus::TruncatedLowerBound);
        assert!(r.residual_estimate > 0.0);
        let r = norm_cesaro(&u, &v, Cone::All, &TruncConfig { n_max: 1000, divergence_threshold: 100.0, ..Default::default() }).unwrap();
        assert_eq!(r.status, NormStatus::Divergent);
    }

    const GRID: [f64; 9] = [-2.0, -1.0, -0.5, 0.0, 0.3, 0.7, 1.0, 1.5, 2.0];

    fn agree(a: &Result<NormResult, NormError>, b: &Result<NormResult, NormError>) -> bool {
        match (a, b) {
            (Ok(x), Ok(y)) => {
                let (p, q) = (x.value.value(), y.value.value());
                (p.is_infinite() && q.is_infinite()) || (p - q).abs() <= 1e-12 * p.abs().max(1.0)
            }
            (Err(_), Err(_)) => true,
            _ => false,
        }
    }

    #[test]
    fn generic_matches_specialized_on_power_weights() {
        let c = TruncConfig::with_n_max(20_000);
        for tag in OpTag::PRINCIPAL {
            for cone in Cone::ALL {
                for a in GRID {
                    for (u, v) in [pair(a), (Weight::power(a).unwrap(), Weight::power(0.5).unwrap())] {
                        let special = norm_specialized(tag, &u, &v, cone, &c);
                        let generic = canonical_kind(tag, cone).and_then(|op| norm_general(op, &u, &v, cone, &c));
                        assert!(agree(&special, &generic), "{tag:?} {cone} {a}: {special:?} vs {generic:?}");
                    }
                }
            }
        }
    }

    fn weight_list() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![1 => Just(0.0), 9 => 0.0..1.0f64], 0..=30)
    }

    proptest! {
        #[test]
        fn generic_matches_specialized_on_lists(us in weight_list(), vs in weight_list()) {
            let (u, v) = (list(&us), list(&vs));
            for tag in OpTag::PRINCIPAL {
                for cone in Cone::ALL {
                    let special = norm_specialized(tag, &u, &v, cone, &cfg());
                    let generic = canonical_kind(tag, cone).and_then(|op| norm_general(op, &u, &v, cone, &cfg()));
                    prop_assert!(agree(&special, &generic), "{:?} {}: {:?} vs {:?}", tag, cone, special, generic);
                }
            }
        }

        #[test]
        fn cone_ordering(us in weight_list(), vs in weight_list()) {
            let (u, v) = (list(&us), list(&vs));
            for tag in OpTag::PRINCIPAL {
                let get = |cone| canonical_kind(tag, cone).and_then(|op| norm_general(op, &u, &v, cone, &cfg())).ok().map(|r| r.value.value());
                let all = get(Cone::All).unwrap();
                let nonneg = get(Cone::Nonneg).unwrap();
                let slack = 1e-12 * all.max(1.0);
                prop_assert!(nonneg <= all + slack);
                if let Some(down) = get(Cone::Nonincr) {
                    prop_assert!(down <= nonneg + slack, "{:?} {} {}", tag, down, nonneg);
                }
            }
        }

        /// The nondecreasing cone carries the last list value forward while
        /// the other cones pad with zeros; the two readings agree when the
        /// list ends in 0.
        #[test]
        fn cone_ordering_nondecreasing(mut us in weight_list(), vs in weight_list()) {
            us.push(0.0);
            let (u, v) = (list(&us), list(&vs));
            for tag in OpTag::PRINCIPAL {
                let get = |cone| canonical_kind(tag, cone).and_then(|op| norm_general(op, &u, &v, cone, &cfg())).ok().map(|r| r.value.value());
                let nonneg = get(Cone::Nonneg).unwrap();
                if let Some(up) = get(Cone::Nondecr) {
                    prop_assert!(up <= nonneg + 1e-12 * nonneg.max(1.0), "{:?} {} {}", tag, up, nonneg);
                }
            }
        }

        #[test]
        fn envelope_substitution(us in weight_list(), vs in weight_list()) {
            prop_assume!(!us.is_empty());
            let (u, v) = (list(&us), list(&vs));
            let down = list(&envelope_down(&u, us.len()));
            let up = list(&envelope_up(&u, us.len()));
            for tag in OpTag::PRINCIPAL {
                if let Ok(op) = canonical_kind(tag, Cone::Nonincr) {
                    let a = norm_general(op, &u, &v, Cone::Nonincr, &cfg()).ok().map(|r| r.value);
                    let b = norm_general(op, &down, &v, Cone::Nonincr, &cfg()).ok().map(|r| r.value);
                    prop_assert_eq!(a, b);
                }
                if let Ok(op) = canonical_kind(tag, Cone::Nondecr) {
                    let a = norm_general(op, &u, &v, Cone::Nondecr, &cfg()).ok().map(|r| r.value);
                    let b = norm_general(op, &up, &v, Cone::Nondecr, &cfg()).ok().map(|r| r.value);
                    prop_assert_eq!(a, b);
                }
            }
        }

        #[test]
        fn monotone_in_truncation(us in weight_list(), vs in weight_list(), n in 1usize..30) {
            let (u, v) = (list(&us), list(&vs));
            for tag in OpTag::PRINCIPAL {
                for cone in Cone::ALL {
                    let Ok(op) = canonical_kind(tag, cone) else { continue };
                    let short = norm_general(op, &u, &v, cone, &TruncConfig::with_n_max(n));
                    let long = norm_general(op, &u, &v, cone, &TruncConfig::with_n_max(n + 1));
                    if let (Ok(s), Ok(l)) = (short, long) {
                        prop_assert!(s.value.value() <= l.value.value());
                    }
                }
            }
        }

        #[test]
        fn homogeneous_in_both_weights(us in weight_list(), vs in weight_list(), c in 0.1..10.0f64) {
            let (u, v) = (list(&us), list(&vs));
            let cu = Weight::List { values: us.iter().map(|x| c * x).collect() };
            let cv = Weight::List { values: vs.iter().map(|x| c * x).collect() };
            for tag in OpTag::PRINCIPAL {
                for cone in Cone::ALL {
                    let Ok(op) = canonical_kind(tag, cone) else { continue };
                    let base = norm_general(op, &u, &v, cone, &cfg()).unwrap().value.value();
                    for (p, q) in [(&cu, &v), (&u, &cv)] {
                        let scaled = norm_general(op, p, q, cone, &cfg()).unwrap().value.value();
                        prop_assert!((scaled - c * base).abs() <= 1e-12 * (c * base).max(1.0));
                    }
                }
            }
        }
    }
}
