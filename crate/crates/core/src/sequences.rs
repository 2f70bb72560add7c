//! Weight sequences, weighted sup norms and monotone minorants.
//!
//! Indices are 1-based throughout, matching the usual notation for
//! sequences `x_1, x_2, ...`. A [`Weight::List`] of length `L` is read as an
//! `L`-truncated problem: it is zero-padded beyond `L` everywhere except for
//! the nondecreasing cone, where the last value is carried forward (see
//! [`envelope_up`]).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::WeightError;

/// A nonnegative value in `[0, +inf]` (or a real in `(-inf, +inf]` for
/// intermediate quantities). Never NaN.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Panics on NaN.
    pub fn new(value: f64) -> Self {
        assert!(!value.is_nan(), "ExtReal cannot hold NaN");
        ExtReal(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Infinite values serialize as the string `"inf"`, never as a JSON number.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(ExtReal(v)),
            Repr::Str(s) if s == "inf" => Ok(ExtReal::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad extended real {s:?}"))),
        }
    }
}

/// The class of inputs a norm is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cone {
    /// Every real sequence.
    All,
    /// Nonnegative sequences.
    Nonneg,
    /// Nonnegative, nonincreasing sequences.
    Nonincr,
    /// Nonnegative, nondecreasing sequences.
    Nondecr,
}

impl Cone {
    pub const ALL: [Cone; 4] = [Cone::All, Cone::Nonneg, Cone::Nonincr, Cone::Nondecr];

    pub fn name(self) -> &'static str {
        match self {
            Cone::All => "all",
            Cone::Nonneg => "nonneg",
            Cone::Nonincr => "nonincr",
            Cone::Nondecr => "nondecr",
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A weight sequence.
///
/// `Power { alpha }` is `k^(-alpha)` for `k >= 1`. `List` holds `values[k-1]`
/// for `k = 1..=L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Weight {
    Power { alpha: f64 },
    List { values: Vec<f64> },
}

impl Weight {
    pub fn power(alpha: f64) -> Result<Self, WeightError> {
        if !alpha.is_finite() {
            return Err(WeightError::NonFiniteExponent(alpha));
        }
        Ok(Weight::Power { alpha })
    }

    pub fn list(values: Vec<f64>) -> Result<Self, WeightError> {
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(WeightError::InvalidEntry { index: i + 1, value: v });
        }
        Ok(Weight::List { values })
    }

    /// Checks the invariants of a deserialized weight.
    pub fn validate(self) -> Result<Self, WeightError> {
        match self {
            Weight::Power { alpha } => Weight::power(alpha),
            Weight::List { values } => Weight::list(values),
        }
    }

    /// Truncation length for lists, `None` for infinite weights.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self {
            Weight::Power { .. } => None,
            Weight::List { values } => Some(values.len()),
        }
    }

    /// Multiplies every entry by `c >= 0`. A power weight becomes a list of
    /// length `len` since scaled powers are not representable.
    pub fn scaled_list(&self, c: f64, len: usize) -> Weight {
        let values = match self {
            Weight::Power { .. } => (1..=len).map(|k| c * weight_at(self, k)).collect(),
            Weight::List { values } => values.iter().map(|v| c * v).collect(),
        };
        Weight::List { values }
    }

    /// Reads a list weight from CSV text: one value per line, blank lines
    /// ignored.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self, WeightError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| WeightError::Csv(e.to_string()))?;
            let field = match record.get(0) {
                Some(f) if !f.is_empty() => f,
                _ => continue,
            };
            let v: f64 = field.parse().map_err(|_| WeightError::Parse {
                line: line + 1,
                text: field.to_string(),
            })?;
            values.push(v);
        }
        Weight::list(values)
    }
}

/// `k^(-alpha)`, exactly 1 at `k = 1`.
pub(crate) fn power_at(alpha: f64, k: usize) -> f64 {
    if k == 1 || alpha == 0.0 {
        1.0
    } else {
        (k as f64).powf(-alpha)
    }
}

/// The `k`-th entry of `w` with lists zero-padded beyond their length.
pub fn weight_at(w: &Weight, k: usize) -> f64 {
    assert!(k >= 1, "sequence indices start at 1");
    match w {
        Weight::Power { alpha } => power_at(*alpha, k),
        Weight::List { values } => values.get(k - 1).copied().unwrap_or(0.0),
    }
}

/// A finite window `x_start, ..., x_{start+len-1}` of a sequence that is zero
/// outside the window.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqWindow {
    pub start: usize,
    pub values: Vec<f64>,
}

impl SeqWindow {
    pub fn new(start: usize, values: Vec<f64>) -> Self {
        assert!(start >= 1, "sequence indices start at 1");
        SeqWindow { start, values }
    }

    /// Window starting at index 1.
    pub fn from_first(values: Vec<f64>) -> Self {
        SeqWindow::new(1, values)
    }

    pub fn zeros(len: usize) -> Self {
        SeqWindow::from_first(vec![0.0; len])
    }

    /// Last index covered by the window (`start - 1` when empty).
    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        if k < self.start {
            return 0.0;
        }
        self.values.get(k - self.start).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.start + i, v))
    }

    /// The window as a dense vector over `1..=end`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.end()];
        for (k, v) in self.iter() {
            out[k - 1] = v;
        }
        out
    }
}

/// `sup_n |x_n| v_n` over the window.
pub fn sup_norm_weighted(x: &SeqWindow, v: &Weight) -> ExtReal {
    let mut best = 0.0_f64;
    for (n, xn) in x.iter() {
        let term = times(xn.abs(), weight_at(v, n));
        best = best.max(term);
    }
    ExtReal::new(best)
}

/// `sup_k |x_k| / u_k` with `0/0 = 0` and `x/0 = +inf` for `x != 0`.
pub fn quotient_norm_weighted(x: &SeqWindow, u: &Weight) -> ExtReal {
    let mut best = 0.0_f64;
    for (k, xk) in x.iter() {
        best = best.max(quotient(xk.abs(), weight_at(u, k)));
    }
    ExtReal::new(best)
}

/// `a / b` for `a, b >= 0` under the `0/0 = 0` convention.
pub(crate) fn quotient(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// `a * b` for `a, b >= 0` under the `0 * inf = 0` convention.
pub(crate) fn times(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Prefix `1..=k_max` of the greatest nonincreasing minorant
/// `min_{j<=k} u_j`.
pub fn envelope_down(u: &Weight, k_max: usize) -> Vec<f64> {
    assert!(k_max >= 1);
    match u {
        Weight::Power { alpha } if *alpha < 0.0 => vec![1.0; k_max],
        Weight::Power { alpha } => (1..=k_max).map(|k| power_at(*alpha, k)).collect(),
        Weight::List { .. } => running_min((1..=k_max).map(|k| weight_at(u, k))),
    }
}

/// Prefix `1..=k_max` of the greatest nondecreasing minorant
/// `inf_{j>=k} u_j`.
///
/// Power weights use the exact tail infimum. Lists use the truncated mode:
/// the infimum runs over `j` in `k..=L`, and indices beyond `L` carry the
/// last value `u_L` forward (so `u^up_k = u_L` for `k > L`). An empty list
/// gives zeros.
pub fn envelope_up(u: &Weight, k_max: usize) -> Vec<f64> {
    assert!(k_max >= 1);
    match u {
        Weight::Power { alpha } if *alpha > 0.0 => vec![0.0; k_max],
        Weight::Power { alpha } => (1..=k_max).map(|k| power_at(*alpha, k)).collect(),
        Weight::List { values } => truncated_suffix_min(values, k_max),
    }
}

pub(crate) fn running_min(it: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut cur = f64::INFINITY;
    it.map(|x| {
        cur = cur.min(x);
        cur
    })
    .collect()
}

/// Suffix minima of `values` over `k..=L`, extended by `values[L-1]`.
pub(crate) fn truncated_suffix_min(values: &[f64], k_max: usize) -> Vec<f64> {
    let Some(&last) = values.last() else {
        return vec![0.0; k_max];
    };
    let mut suffix = values.to_vec();
    for i in (0..suffix.len().saturating_sub(1)).rev() {
        suffix[i] = suffix[i].min(suffix[i + 1]);
    }
    (0..k_max).map(|i| suffix.get(i).copied().unwrap_or(last)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn list(v: &[f64]) -> Weight {
        Weight::list(v.to_vec()).unwrap()
    }

    #[test]
    fn weight_at_examples() {
        assert_eq!(weight_at(&Weight::power(-1.0).unwrap(), 3), 3.0);
        assert_eq!(weight_at(&Weight::power(0.0).unwrap(), 7), 1.0);
        assert_eq!(weight_at(&list(&[3.0, 1.0, 2.0]), 5), 0.0);
        assert!((weight_at(&Weight::power(2.0).unwrap(), 1000) - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Weight::list(vec![1.0, -0.5]).is_err());
        assert!(Weight::list(vec![f64::NAN]).is_err());
        assert!(Weight::power(f64::INFINITY).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let p0 = Weight::power(0.0).unwrap();
        let p1 = Weight::power(-1.0).unwrap();
        assert_eq!(sup_norm_weighted(&SeqWindow::from_first(vec![1.0, -2.0, 1.0]), &p0).value(), 2.0);
        assert_eq!(sup_norm_weighted(&SeqWindow::from_first(vec![1.0; 3]), &p1).value(), 3.0);
        assert_eq!(sup_norm_weighted(&SeqWindow::zeros(2), &p1).value(), 0.0);
    }

    #[test]
    fn quotient_norm_examples() {
        let u = list(&[0.0, 1.0]);
        assert_eq!(quotient_norm_weighted(&SeqWindow::from_first(vec![0.0, 5.0]), &u).value(), 5.0);
        assert!(quotient_norm_weighted(&SeqWindow::from_first(vec![1.0, 5.0]), &u).is_infinite());
        let p = Weight::power(1.0).unwrap();
        assert_eq!(quotient_norm_weighted(&SeqWindow::from_first(vec![2.0; 3]), &p).value(), 6.0);
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(envelope_down(&list(&[3.0, 1.0, 2.0]), 3), vec![3.0, 1.0, 1.0]);
        assert_eq!(envelope_down(&Weight::power(2.0).unwrap(), 3), vec![1.0, 0.25, 1.0 / 9.0]);
        assert_eq!(envelope_down(&Weight::power(-1.0).unwrap(), 3), vec![1.0; 3]);
        assert_eq!(envelope_up(&Weight::power(1.0).unwrap(), 3), vec![0.0; 3]);
        assert_eq!(envelope_up(&Weight::power(-1.0).unwrap(), 3), vec![1.0, 2.0, 3.0]);
        assert_eq!(envelope_up(&list(&[3.0, 1.0, 2.0]), 3), vec![1.0, 1.0, 2.0]);
        assert_eq!(envelope_up(&list(&[3.0, 1.0, 2.0]), 5), vec![1.0, 1.0, 2.0, 2.0, 2.0]);
        assert_eq!(envelope_down(&list(&[3.0, 1.0]), 4), vec![3.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn json_shape() {
        let w: Weight = serde_json::from_str(r#"{"kind":"power","alpha":0.5}"#).unwrap();
        assert_eq!(w, Weight::Power { alpha: 0.5 });
        let w: Weight = serde_json::from_str(r#"{"kind":"list","values":[1,2]}"#).unwrap();
        assert_eq!(w, list(&[1.0, 2.0]));
        assert_eq!(serde_json::to_string(&ExtReal::INFINITY).unwrap(), "\"inf\"");
        let bad: Weight = serde_json::from_str(r#"{"kind":"list","values":[-1]}"#).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn csv_ingestion() {
        let w = Weight::from_csv("1\n0.5\n\n2e-1\n".as_bytes()).unwrap();
        assert_eq!(w, list(&[1.0, 0.5, 0.2]));
        assert!(Weight::from_csv("1\nabc\n".as_bytes()).is_err());
    }

    fn weights() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0..3.0f64], 1..25)
    }

    proptest! {
        #[test]
        fn envelopes_are_monotone_minorants(values in weights()) {
            let l = values.len();
            let u = list(&values);
            let down = envelope_down(&u, l);
            let up = envelope_up(&u, l);
            for k in 0..l {
                prop_assert!(down[k] <= values[k] && up[k] <= values[k]);
                if k > 0 {
                    prop_assert!(down[k] <= down[k - 1]);
                    prop_assert!(up[k] >= up[k - 1]);
                }
            }
            prop_assert_eq!(envelope_down(&list(&down), l), down.clone());
            prop_assert_eq!(envelope_up(&list(&up), l), up);
        }

        #[test]
        fn norm_ignores_envelope_on_monotone_inputs(values in weights(), seed in prop::collection::vec(0.0..1.0f64, 25)) {
            let l = values.len();
            let u = list(&values);
            let mut dec: Vec<f64> = seed[..l].to_vec();
            dec.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let inc: Vec<f64> = dec.iter().rev().copied().collect();
            let down = list(&envelope_down(&u, l));
            let up = list(&envelope_up(&u, l));
            let xd = SeqWindow::from_first(dec);
            let xi = SeqWindow::from_first(inc);
            prop_assert_eq!(quotient_norm_weighted(&xd, &u), quotient_norm_weighted(&xd, &down));
            prop_assert_eq!(quotient_norm_weighted(&xi, &u), quotient_norm_weighted(&xi, &up));
        }

        #[test]
        fn quotient_norm_homogeneous(values in weights(), x in prop::collection::vec(-2.0..2.0f64, 25), p in 0i32..6) {
            let u = list(&values);
            let c = 2f64.powi(p - 2);
            let w = SeqWindow::from_first(x[..values.len()].to_vec());
            let scaled = SeqWindow::from_first(w.values.iter().map(|v| c * v).collect());
            let a = quotient_norm_weighted(&w, &u).value();
            let b = quotient_norm_weighted(&scaled, &u).value();
            prop_assert!(a * c == b || (a.is_infinite() && b.is_infinite()));
        }
    }
}
