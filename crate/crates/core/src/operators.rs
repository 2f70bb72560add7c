//! The structured infinite matrices: Cesàro `C`, Copson `C*`, their
//! differences with the identity and shifts, and the helpers `S`, `S*`, `D`,
//! `E`, `I`.
//!
//! Nothing is ever materialized. Entries come from closed forms in `(n, k)`,
//! row sign structure and row sums are tabulated analytically, and each row
//! also has a segment description ([`row_segments`]) that the norm formulas
//! evaluate against weight tables.

use serde::{Deserialize, Serialize};

use crate::sequences::SeqWindow;

/// Which matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpTag {
    /// `(Cx)_n = (1/n) sum_{k<=n} x_k`
    C,
    /// `(C*x)_n = sum_{k>=n} x_k / k`
    Cstar,
    CminusI,
    CstarMinusI,
    /// `C - S*`
    CminusSstar,
    /// `(C* - S) D`
    CstarSD,
    /// Right shift, ones on the subdiagonal.
    S,
    /// Left shift, ones on the superdiagonal.
    Sstar,
    /// `(Dx)_n = x_n / (n+1)`
    D,
    /// `(Ex)_n = sum_{k<=n} x_k`
    E,
    I,
}

impl OpTag {
    pub const PRINCIPAL: [OpTag; 6] = [
        OpTag::C,
        OpTag::Cstar,
        OpTag::CminusI,
        OpTag::CstarMinusI,
        OpTag::CminusSstar,
        OpTag::CstarSD,
    ];

    pub const ALL: [OpTag; 11] = [
        OpTag::C,
        OpTag::Cstar,
        OpTag::CminusI,
        OpTag::CstarMinusI,
        OpTag::CminusSstar,
        OpTag::CstarSD,
        OpTag::S,
        OpTag::Sstar,
        OpTag::D,
        OpTag::E,
        OpTag::I,
    ];
}

/// Rows whose sign is flipped before applying the cone formulas.
///
/// Negating a row leaves `|(Bx)_n|` unchanged, so the norm is the same; the
/// flip only exists to put rows into the sign pattern a cone formula needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RowFlip {
    #[default]
    None,
    /// Negate every row `n >= from`.
    RowsFrom(usize),
}

impl RowFlip {
    pub const ALL: RowFlip = RowFlip::RowsFrom(1);

    pub fn sign(self, n: usize) -> f64 {
        match self {
            RowFlip::RowsFrom(from) if n >= from => -1.0,
            _ => 1.0,
        }
    }
}

/// A matrix together with its row sign flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpKind {
    pub tag: OpTag,
    pub flip: RowFlip,
}

impl OpKind {
    pub const fn plain(tag: OpTag) -> Self {
        OpKind { tag, flip: RowFlip::None }
    }

    pub const fn flipped(tag: OpTag, flip: RowFlip) -> Self {
        OpKind { tag, flip }
    }
}

impl From<OpTag> for OpKind {
    fn from(tag: OpTag) -> Self {
        OpKind::plain(tag)
    }
}

/// `b_{n,k}`, including the row flip.
pub fn entry(op: OpKind, n: usize, k: usize) -> f64 {
    assert!(n >= 1 && k >= 1, "matrix indices start at 1");
    let nf = n as f64;
    let kf = k as f64;
    let raw = match op.tag {
        OpTag::C => {
            if k <= n {
                1.0 / nf
            } else {
                0.0
            }
        }
        OpTag::Cstar => {
            if k >= n {
                1.0 / kf
            } else {
                0.0
            }
        }
        OpTag::CminusI => {
            if k < n {
                1.0 / nf
            } else if k == n {
                1.0 / nf - 1.0
            } else {
                0.0
            }
        }
        OpTag::CstarMinusI => {
            if k == n {
                1.0 / nf - 1.0
            } else if k > n {
                1.0 / kf
            } else {
                0.0
            }
        }
        OpTag::CminusSstar => {
            if k <= n {
                1.0 / nf
            } else if k == n + 1 {
                -1.0
            } else {
                0.0
            }
        }
        OpTag::CstarSD => {
            if k >= n {
                1.0 / (kf * (kf + 1.0))
            } else if k + 1 == n {
                -1.0 / nf
            } else {
                0.0
            }
        }
        OpTag::S => f64::from(k + 1 == n),
        OpTag::Sstar => f64::from(k == n + 1),
        OpTag::D => {
            if k == n {
                1.0 / (nf + 1.0)
            } else {
                0.0
            }
        }
        OpTag::E => f64::from(k <= n),
        OpTag::I => f64::from(k == n),
    };
    // Avoid producing -0.0 for flipped zero entries.
    if raw == 0.0 {
        0.0
    } else {
        op.flip.sign(n) * raw
    }
}

/// A contiguous run of column indices; `last = None` means unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub first: usize,
    pub last: Option<usize>,
}

impl Span {
    fn point(k: usize) -> Self {
        Span { first: k, last: Some(k) }
    }
    fn range(first: usize, last: usize) -> Self {
        Span { first, last: Some(last) }
    }
    fn from(first: usize) -> Self {
        Span { first, last: None }
    }
}

/// Where the positive and negative entries of a row sit. For the matrices
/// here each sign occupies a single contiguous span.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowSigns {
    pub positive: Option<Span>,
    pub negative: Option<Span>,
}

/// Sign layout of row `n`, from the closed-form entries.
pub fn row_signs(op: OpKind, n: usize) -> RowSigns {
    assert!(n >= 1);
    let (pos, neg) = match op.tag {
        OpTag::C => (Some(Span::range(1, n)), None),
        OpTag::Cstar => (Some(Span::from(n)), None),
        OpTag::CminusI if n == 1 => (None, None),
        OpTag::CminusI => (Some(Span::range(1, n - 1)), Some(Span::point(n))),
        OpTag::CstarMinusI if n == 1 => (Some(Span::from(2)), None),
        OpTag::CstarMinusI => (Some(Span::from(n + 1)), Some(Span::point(n))),
        OpTag::CminusSstar => (Some(Span::range(1, n)), Some(Span::point(n + 1))),
        OpTag::CstarSD if n == 1 => (Some(Span::from(1)), None),
        OpTag::CstarSD => (Some(Span::from(n)), Some(Span::point(n - 1))),
        OpTag::S if n == 1 => (None, None),
        OpTag::S => (Some(Span::point(n - 1)), None),
        OpTag::Sstar => (Some(Span::point(n + 1)), None),
        OpTag::D | OpTag::I => (Some(Span::point(n)), None),
        OpTag::E => (Some(Span::range(1, n)), None),
    };
    if op.flip.sign(n) < 0.0 {
        RowSigns { positive: neg, negative: pos }
    } else {
        RowSigns { positive: pos, negative: neg }
    }
}

/// Analytic row sum, `+inf`/`-inf` for divergent rows.
pub fn row_sum(op: OpKind, n: usize) -> f64 {
    assert!(n >= 1);
    let raw = match op.tag {
        OpTag::C | OpTag::Sstar | OpTag::I => 1.0,
        OpTag::Cstar | OpTag::CstarMinusI => f64::INFINITY,
        OpTag::CminusI | OpTag::CminusSstar => 0.0,
        OpTag::CstarSD => f64::from(n == 1),
        OpTag::S => f64::from(n >= 2),
        OpTag::D => 1.0 / (n as f64 + 1.0),
        OpTag::E => n as f64,
    };
    if raw == 0.0 {
        0.0
    } else {
        op.flip.sign(n) * raw
    }
}

/// Sign pattern of a row.
///
/// One-signed rows satisfy both orderings vacuously; they are reported with
/// the ordering the matrix family has on its mixed rows (so row 1 of `C*-I`
/// is `NegBeforePos`). `Both` marks rows where positive and negative entries
/// interleave so that neither ordering holds; none of the matrices here has
/// such a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowPattern {
    PosBeforeNeg,
    NegBeforePos,
    Both,
    AllZero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowClass {
    pub pattern: RowPattern,
    pub row_sum: f64,
    pub finite_sum: bool,
    pub has_positive: bool,
    pub has_negative: bool,
}

impl RowClass {
    /// No positive entry appears after a negative one.
    pub fn positives_before_negatives(&self) -> bool {
        !self.has_positive || !self.has_negative || self.pattern == RowPattern::PosBeforeNeg
    }

    /// No negative entry appears after a positive one.
    pub fn negatives_before_positives(&self) -> bool {
        !self.has_positive || !self.has_negative || self.pattern == RowPattern::NegBeforePos
    }
}

/// The ordering a matrix family has on its mixed-sign rows.
fn family_pattern(op: OpKind, n: usize) -> RowPattern {
    let unflipped = match op.tag {
        OpTag::CstarMinusI | OpTag::CstarSD => RowPattern::NegBeforePos,
        _ => RowPattern::PosBeforeNeg,
    };
    match (unflipped, op.flip.sign(n) < 0.0) {
        (p, false) => p,
        (RowPattern::PosBeforeNeg, true) => RowPattern::NegBeforePos,
        (_, true) => RowPattern::PosBeforeNeg,
    }
}

pub fn classify_row(op: OpKind, n: usize) -> RowClass {
    let signs = row_signs(op, n);
    let sum = row_sum(op, n);
    let pattern = match (signs.positive, signs.negative) {
        (None, None) => RowPattern::AllZero,
        (Some(p), Some(q)) => {
            // Spans are contiguous, so compare their positions.
            if p.last.is_some_and(|l| l < q.first) {
                RowPattern::PosBeforeNeg
            } else if q.last.is_some_and(|l| l < p.first) {
                RowPattern::NegBeforePos
            } else {
                RowPattern::Both
            }
        }
        _ => family_pattern(op, n),
    };
    RowClass {
        pattern,
        row_sum: sum,
        finite_sum: sum.is_finite(),
        has_positive: signs.positive.is_some(),
        has_negative: signs.negative.is_some(),
    }
}

/// Rows `2, 3, ...` of every matrix here share one sign layout up to shifts,
/// so checking rows `1..=ROWS_CHECKED` decides a hypothesis for all rows.
pub const ROWS_CHECKED: usize = 4;

/// Every row has positives before negatives and a nonnegative sum.
pub fn nonincreasing_hypothesis(op: OpKind) -> bool {
    (1..=ROWS_CHECKED).all(|n| {
        let c = classify_row(op, n);
        c.positives_before_negatives() && c.row_sum >= 0.0
    })
}

/// Every row has negatives before positives and a nonnegative sum.
pub fn nondecreasing_hypothesis(op: OpKind) -> bool {
    (1..=ROWS_CHECKED).all(|n| {
        let c = classify_row(op, n);
        c.negatives_before_positives() && c.row_sum >= 0.0
    })
}

/// Some row has an infinite sum.
pub fn has_infinite_row(op: OpKind) -> bool {
    (1..=ROWS_CHECKED).any(|n| !classify_row(op, n).finite_sum)
}

/// Column weighting of a row segment: entries are `coef * kernel(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `1`
    Unit,
    /// `1/k`
    Harmonic,
    /// `1/(k(k+1))`
    Telescoping,
}

impl Kernel {
    pub fn at(self, k: usize) -> f64 {
        let kf = k as f64;
        match self {
            Kernel::Unit => 1.0,
            Kernel::Harmonic => 1.0 / kf,
            Kernel::Telescoping => 1.0 / (kf * (kf + 1.0)),
        }
    }
}

/// A run of same-signed row entries `coef * kernel(k)` for `k` in `span`.
///
/// `lead * n^order` is the leading behaviour of `coef` as `n` grows, used for
/// asymptotic limits of the row functionals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub span: Span,
    pub kernel: Kernel,
    pub coef: f64,
    pub lead: f64,
    pub order: i32,
}

impl Segment {
    fn new(span: Span, kernel: Kernel, coef: f64, lead: f64, order: i32) -> Self {
        Segment { span, kernel, coef, lead, order }
    }
}

/// Row `n` as a list of disjoint single-signed segments (flip applied).
pub fn row_segments(op: OpKind, n: usize) -> Vec<Segment> {
    use Kernel::*;
    assert!(n >= 1);
    let nf = n as f64;
    let mut segs = match op.tag {
        OpTag::C => vec![Segment::new(Span::range(1, n), Unit, 1.0 / nf, 1.0, -1)],
        OpTag::Cstar => vec![Segment::new(Span::from(n), Harmonic, 1.0, 1.0, 0)],
        OpTag::CminusI if n == 1 => vec![],
        OpTag::CminusI => vec![
            Segment::new(Span::range(1, n - 1), Unit, 1.0 / nf, 1.0, -1),
            Segment::new(Span::point(n), Unit, 1.0 / nf - 1.0, -1.0, 0),
        ],
        OpTag::CstarMinusI => {
            let mut v = Vec::with_capacity(2);
            if n >= 2 {
                v.push(Segment::new(Span::point(n), Unit, 1.0 / nf - 1.0, -1.0, 0));
            }
            v.push(Segment::new(Span::from(n + 1), Harmonic, 1.0, 1.0, 0));
            v
        }
        OpTag::CminusSstar => vec![
            Segment::new(Span::range(1, n), Unit, 1.0 / nf, 1.0, -1),
            Segment::new(Span::point(n + 1), Unit, -1.0, -1.0, 0),
        ],
        OpTag::CstarSD => {
            let mut v = Vec::with_capacity(2);
            if n >= 2 {
                v.push(Segment::new(Span::point(n - 1), Unit, -1.0 / nf, -1.0, -1));
            }
            v.push(Segment::new(Span::from(n), Telescoping, 1.0, 1.0, 0));
            v
        }
        OpTag::S if n == 1 => vec![],
        OpTag::S => vec![Segment::new(Span::point(n - 1), Unit, 1.0, 1.0, 0)],
        OpTag::Sstar => vec![Segment::new(Span::point(n + 1), Unit, 1.0, 1.0, 0)],
        OpTag::D => vec![Segment::new(Span::point(n), Unit, 1.0 / (nf + 1.0), 1.0, -1)],
        OpTag::E => vec![Segment::new(Span::range(1, n), Unit, 1.0, 1.0, 0)],
        OpTag::I => vec![Segment::new(Span::point(n), Unit, 1.0, 1.0, 0)],
    };
    let s = op.flip.sign(n);
    for seg in &mut segs {
        seg.coef *= s;
        seg.lead *= s;
    }
    segs
}

/// A sequence given by explicit values on `1..=K` and a constant `tail` for
/// every index beyond `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailedSeq {
    pub head: Vec<f64>,
    pub tail: f64,
}

impl TailedSeq {
    pub fn finite(head: Vec<f64>) -> Self {
        TailedSeq { head, tail: 0.0 }
    }

    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1);
        self.head.get(k - 1).copied().unwrap_or(self.tail)
    }

    pub fn from_window(x: &SeqWindow) -> Self {
        TailedSeq::finite(x.to_dense())
    }
}

/// `(Bx)_1, ..., (Bx)_rows` for a finitely supported `x`.
pub fn apply(op: OpKind, x: &SeqWindow, rows: usize) -> SeqWindow {
    SeqWindow::from_first(apply_tailed(op, &TailedSeq::from_window(x), rows))
}

/// `(Bx)_1, ..., (Bx)_rows` where `x` may carry a constant tail.
///
/// Tails enter through closed forms: `sum_{k>m} c/(k(k+1)) = c/m`, and
/// `sum_{k>m} c/k` diverges to `sign(c) * inf` for `c != 0`.
pub fn apply_tailed(op: OpKind, x: &TailedSeq, rows: usize) -> Vec<f64> {
    let kk = x.head.len();
    let c = x.tail;
    // prefix[m] = sum_{k<=m} x_k for m <= kk
    let mut prefix = Vec::with_capacity(kk + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in &x.head {
        acc += v;
        prefix.push(acc);
    }
    let prefix_at = |m: usize| {
        if m <= kk {
            prefix[m]
        } else {
            prefix[kk] + (m - kk) as f64 * c
        }
    };
    let harmonic_tail_beyond = if c == 0.0 { 0.0 } else { c.signum() * f64::INFINITY };
    // harmonic[m] = sum_{k>=m} x_k/k, telescoping[m] = sum_{k>=m} x_k/(k(k+1)),
    // for 1 <= m <= kk + 1.
    let mut harmonic = vec![0.0; kk + 2];
    let mut telescoping = vec![0.0; kk + 2];
    harmonic[kk + 1] = harmonic_tail_beyond;
    telescoping[kk + 1] = c / (kk as f64 + 1.0);
    for k in (1..=kk).rev() {
        let kf = k as f64;
        harmonic[k] = x.head[k - 1] / kf + harmonic[k + 1];
        telescoping[k] = x.head[k - 1] / (kf * (kf + 1.0)) + telescoping[k + 1];
    }
    let harmonic_at = |m: usize| if m <= kk + 1 { harmonic[m] } else { harmonic_tail_beyond };
    let telescoping_at = |m: usize| {
        if m <= kk + 1 {
            telescoping[m]
        } else {
            c / m as f64
        }
    };
    let at = |k: usize| if k == 0 { 0.0 } else { x.get(k) };

    (1..=rows)
        .map(|n| {
            let nf = n as f64;
            let raw = match op.tag {
                OpTag::C => prefix_at(n) / nf,
                OpTag::Cstar => harmonic_at(n),
                OpTag::CminusI => prefix_at(n) / nf - at(n),
                OpTag::CstarMinusI => harmonic_at(n) - at(n),
                OpTag::CminusSstar => prefix_at(n) / nf - at(n + 1),
                OpTag::CstarSD => telescoping_at(n) - at(n - 1) / nf,
                OpTag::S => at(n - 1),
                OpTag::Sstar => at(n + 1),
                OpTag::D => at(n) / (nf + 1.0),
                OpTag::E => prefix_at(n),
                OpTag::I => at(n),
            };
            op.flip.sign(n) * raw
        })
        .collect()
}

/// `max_{n<=rows} |((C - S*) C* x)_n - (Cx)_n|` for finitely supported `x`.
pub fn check_identity_first(x: &SeqWindow, rows: usize) -> f64 {
    let y = apply(OpKind::plain(OpTag::Cstar), x, rows + 1);
    let lhs = apply(OpKind::plain(OpTag::CminusSstar), &y, rows);
    let rhs = apply(OpKind::plain(OpTag::C), x, rows);
    max_deviation(&lhs.values, &rhs.values)
}

/// `max_{n<=rows} |((C* - S) D E x)_n - (C*x)_n|` for finitely supported `x`.
///
/// `Ex` is constant (the total of `x`) beyond the support of `x`; that tail is
/// summed in closed form.
pub fn check_identity_second(x: &SeqWindow, rows: usize) -> f64 {
    let dense = TailedSeq::from_window(x);
    let ex = apply_tailed(OpKind::plain(OpTag::E), &dense, dense.head.len());
    let total = ex.last().copied().unwrap_or(0.0);
    let lhs = apply_tailed(OpKind::plain(OpTag::CstarSD), &TailedSeq { head: ex, tail: total }, rows);
    let rhs = apply_tailed(OpKind::plain(OpTag::Cstar), &dense, rows);
    max_deviation(&lhs, &rhs)
}

fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}
