//! Certified sums: Riemann zeta, Hurwitz-type tails, shifted tails and the
//! constant `M_alpha = sum_{k>=1} k^(-alpha)/(k+1)`.
//!
//! Every routine returns a [`Certified`] value whose `bound` covers both the
//! analytic truncation remainder and a rounding allowance.

use crate::error::SpecialError;

/// A value together with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub bound: f64,
}

const TARGET: f64 = 1e-14;

/// Euler-Maclaurin remainder aimed for in each Hurwitz tail, well below
/// `TARGET` so that sums of many tails stay within it.
const EM_TARGET: f64 = 1e-17;

/// `zeta(s)` for real `s > 1`.
pub fn zeta(s: f64) -> Result<Certified, SpecialError> {
    hurwitz_tail(s, 1)
}

/// `sum_{k>=n} k^(-s)` by direct summation up to a cut `N >= n` plus an
/// Euler-Maclaurin correction through the `B_4` term.
///
/// For `f(x) = x^(-s)` all derivatives have alternating constant sign, so the
/// remainder is bounded by the first omitted (`B_6`) term.
pub fn hurwitz_tail(s: f64, n: usize) -> Result<Certified, SpecialError> {
    assert!(n >= 1);
    if s.is_nan() || s <= 1.0 {
        return Err(SpecialError::Divergent(s));
    }
    let remainder = |cut: f64| {
        s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * cut.powf(-s - 5.0)
    };
    let mut cut = n.max(8);
    while remainder(cut as f64) > EM_TARGET && cut < (1 << 40) {
        cut *= 2;
    }
    let mut terms = Vec::with_capacity(cut - n);
    for k in n..cut {
        terms.push((k as f64).powf(-s));
    }
    let c = cut as f64;
    let fc = c.powf(-s);
    let em = c * fc / (s - 1.0) + 0.5 * fc + s / 12.0 * fc / c
        - s * (s + 1.0) * (s + 2.0) / 720.0 * fc / (c * c * c);
    // Smallest terms first.
    let value = terms.iter().rev().fold(em, |acc, t| acc + t);
    let rounding = value.abs() * f64::EPSILON * (terms.len() as f64 + 8.0);
    Ok(Certified { value, bound: remainder(c) + rounding })
}

/// `sum_{k>=n} 1/(k(k+1)) = 1/n`.
pub fn telescoping_tail(n: usize) -> f64 {
    assert!(n >= 1);
    1.0 / n as f64
}

/// `sum_{k>=n} k^(-alpha)/(k+1)` for `alpha > 0`.
///
/// For `n >= 2` uses `1/(k+1) = sum_j (-1)^j k^(-j-1)`, giving an alternating
/// series of Hurwitz tails with terms shrinking by at least `1/n`; the error
/// after stopping is below the first omitted term. For `n = 1` the `k = 1`
/// term `1/2` is split off.
pub fn shifted_tail(alpha: f64, n: usize) -> Result<Certified, SpecialError> {
    assert!(n >= 1);
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(SpecialError::Divergent(alpha));
    }
    if n == 1 {
        let rest = shifted_tail(alpha, 2)?;
        return Ok(Certified { value: 0.5 + rest.value, bound: rest.bound + f64::EPSILON });
    }
    let mut value = 0.0;
    let mut bound = 0.0;
    let mut sign = 1.0;
    for j in 0.. {
        let term = hurwitz_tail(alpha + 1.0 + j as f64, n)?;
        if term.value < TARGET * 1e-2 || j > 200 {
            bound += term.value;
            break;
        }
        value += sign * term.value;
        bound += term.bound;
        sign = -sign;
    }
    bound += value.abs() * f64::EPSILON * 4.0;
    Ok(Certified { value, bound })
}

/// `M_alpha = sum_{k>=1} k^(-alpha)/(k+1)` for `alpha > 0`.
pub fn m_alpha(alpha: f64) -> Result<Certified, SpecialError> {
    shifted_tail(alpha, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn brute_tail(n: usize, count: usize, term: impl Fn(f64) -> f64) -> f64 {
        // Summed from the smallest term upward.
        (n..n + count).rev().fold(0.0, |acc, k| acc + term(k as f64))
    }

    #[test]
    fn zeta_known_values() {
        let z2 = zeta(2.0).unwrap();
        assert!((z2.value - PI * PI / 6.0).abs() < 1e-14, "{z2:?}");
        assert!(z2.bound <= 1e-12);
        let z4 = zeta(4.0).unwrap();
        assert!((z4.value - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(60.0).unwrap().value - 1.0).abs() < 1e-15);
        assert!(zeta(1.0).is_err());
        assert!(zeta(0.5).is_err());
    }

    #[test]
    fn zeta_decreases_to_one() {
        let mut prev = f64::INFINITY;
        for s in [1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 40.0] {
            let z = zeta(s).unwrap().value;
            assert!(z < prev && z > 1.0);
            prev = z;
        }
    }

    #[test]
    fn hurwitz_examples() {
        let z2 = zeta(2.0).unwrap().value;
        assert!((hurwitz_tail(2.0, 2).unwrap().value - (z2 - 1.0)).abs() < 1e-14);
        let t = hurwitz_tail(3.0, 10).unwrap().value;
        assert!(t > 0.005 && t < 1.0 / 162.0, "{t}");
    }

    #[test]
    fn hurwitz_recurrence_and_bracketing() {
        for s in [1.1, 1.5, 2.0, 3.3, 7.0] {
            for n in [1usize, 2, 3, 9, 10, 57, 1000, 123_456] {
                let ca = hurwitz_tail(s, n).unwrap();
                let cb = hurwitz_tail(s, n + 1).unwrap();
                let a = ca.value;
                let exact = (n as f64).powf(-s);
                assert!((a - cb.value - exact).abs() <= ca.bound + cb.bound, "s={s} n={n}");
                if n >= 2 {
                    let lo = (n as f64).powf(1.0 - s) / (s - 1.0);
                    let hi = ((n - 1) as f64).powf(1.0 - s) / (s - 1.0);
                    assert!(lo <= a && a <= hi, "s={s} n={n}");
                }
            }
        }
    }

    #[test]
    fn hurwitz_against_long_brute_force() {
        // 10^8 terms plus an integral bracket for the rest.
        let count = 100_000_000usize;
        for (s, n) in [(2.0, 1usize), (3.5, 4)] {
            let head = brute_tail(n, count, |k| k.powf(-s));
            let end = (n + count) as f64;
            let lo = head + (end).powf(1.0 - s) / (s - 1.0);
            let hi = head + (end - 1.0).powf(1.0 - s) / (s - 1.0);
            let c = hurwitz_tail(s, n).unwrap();
            assert!(c.value + c.bound + 1e-13 >= lo && c.value - c.bound - 1e-13 <= hi, "s={s}");
        }
    }

    #[test]
    fn shifted_tail_identities() {
        let z2 = zeta(2.0).unwrap().value;
        let z3 = zeta(3.0).unwrap().value;
        // 1/(k^2(k+1)) = 1/k^2 - 1/k + 1/(k+1)
        assert!((m_alpha(2.0).unwrap().value - (z2 - 1.0)).abs() < 1e-13);
        assert!((m_alpha(1.0).unwrap().value - 1.0).abs() < 1e-13);
        assert!((m_alpha(3.0).unwrap().value - (z3 - z2 + 1.0)).abs() < 1e-13);
        let t = shifted_tail(1.0, 7).unwrap();
        assert!((t.value - 1.0 / 7.0).abs() <= t.bound && t.bound < 1e-14);
        assert!(m_alpha(0.0).is_err());
    }

    #[test]
    fn shifted_tail_bracket_and_brute_force() {
        // Integral bracket for alpha = 0.5, n = 100.
        let a = 0.5;
        let n = 100.0f64;
        let v = shifted_tail(a, 100).unwrap().value;
        // x^(-a)/(x+1) is decreasing, so the sum lies between the integrals
        // over [n, inf) and [n-1, inf); both are bracketed by power integrals.
        let lower = n.powf(-a) / a * (n / (n + 1.0));
        let upper = (n - 1.0f64).powf(-a) / a;
        assert!(lower < v && v < upper, "{lower} {v} {upper}");

        for (alpha, n) in [(0.7, 3usize), (2.5, 1), (1.2, 40)] {
            let count = 20_000_000usize;
            let head = brute_tail(n, count, |k| k.powf(-alpha) / (k + 1.0));
            let end = (n + count) as f64;
            let lo = head + end.powf(-alpha) / alpha * (end / (end + 1.0));
            let hi = head + (end - 1.0).powf(-alpha) / alpha;
            let c = shifted_tail(alpha, n).unwrap();
            assert!(c.bound <= 1e-12);
            assert!(c.value + c.bound + 1e-12 >= lo && c.value - c.bound - 1e-12 <= hi, "{alpha} {n}");
        }
    }
}
