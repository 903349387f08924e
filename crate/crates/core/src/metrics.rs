//! Precision, recall, F-measure and their full/partial/total variants.
//!
//! Measures are kept as exact integer ratios. Conversion to decimals happens
//! only when rendering, through [`format_decimal`].

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::SpatialCounts;

pub type Rational = Rational64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),
}

/// `numerator / denominator`, undefined when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Ratio { numerator, denominator }
    }

    pub fn is_defined(&self) -> bool {
        self.denominator > 0
    }

    pub fn value(&self) -> Option<Rational> {
        self.is_defined()
            .then(|| Rational::new(self.numerator as i64, self.denominator as i64))
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.is_defined()
            .then(|| self.numerator as f64 / self.denominator as f64)
    }
}

pub fn precision(tp: u64, fp: u64) -> Ratio {
    Ratio::new(tp, tp + fp)
}

pub fn recall(tp: u64, fn_: u64) -> Ratio {
    Ratio::new(tp, tp + fn_)
}

/// Weighted harmonic mean `(1+β²)·p·r / (β²·p + r)`.
pub fn f_measure(p: Ratio, r: Ratio, beta: f64) -> Result<Option<f64>, MetricsError> {
    if beta.is_nan() || beta <= 0.0 || beta.is_infinite() {
        return Err(MetricsError::NonPositiveBeta(beta));
    }
    let (Some(p), Some(r)) = (p.to_f64(), r.to_f64()) else {
        return Ok(None);
    };
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some((1.0 + b2) * p * r / denom))
}

/// Balanced F-measure in exact arithmetic.
pub fn f1(p: Ratio, r: Ratio) -> Option<Rational> {
    let (p, r) = (p.value()?, r.value()?);
    let sum = p + r;
    if sum == Rational::from_integer(0) {
        return None;
    }
    Some(Rational::from_integer(2) * p * r / sum)
}

/// Full, partial and total precision and recall from spatial counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialMetrics {
    pub pre_full: Ratio,
    pub pre_partial: Ratio,
    pub pre_total: Ratio,
    pub rec_full: Ratio,
    pub rec_partial: Ratio,
    pub rec_total: Ratio,
}

pub fn partial_metrics(c: &SpatialCounts) -> PartialMetrics {
    let estimated = c.estimated();
    let reference = c.reference();
    PartialMetrics {
        pre_full: Ratio::new(c.fm, estimated),
        pre_partial: Ratio::new(c.pm, estimated),
        pre_total: Ratio::new(c.fm + c.pm, estimated),
        rec_full: Ratio::new(c.fm, reference),
        rec_partial: Ratio::new(c.pm, reference),
        rec_total: Ratio::new(c.fm + c.pm, reference),
    }
}

/// Scales `v` by `10^digits` and rounds half away from zero, so non-negative
/// values round half up.
pub fn round_scaled(v: Rational, digits: u32) -> i128 {
    let n = *v.numer() as i128;
    let d = *v.denom() as i128;
    let scale = 10i128.pow(digits);
    let mag = (n.abs() * scale * 2 + d) / (2 * d);
    if n < 0 {
        -mag
    } else {
        mag
    }
}

/// Decimal text of `v` with exactly `digits` fractional digits. With `signed`,
/// positive values carry a leading `+`.
pub fn format_decimal(v: Rational, digits: u32, signed: bool) -> String {
    let scaled = round_scaled(v, digits);
    let scale = 10i128.pow(digits);
    let sign = if scaled < 0 {
        "-"
    } else if signed && scaled > 0 {
        "+"
    } else {
        ""
    };
    let mag = scaled.abs();
    if digits == 0 {
        format!("{sign}{mag}")
    } else {
        format!("{sign}{}.{:0width$}", mag / scale, mag % scale, width = digits as usize)
    }
}

/// Parses a decimal literal (`0.56`, `-0.06`, `+1`, `1e-3`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut num: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let mut den: i64 = 1;
    let shift = exp - frac.len() as i32;
    if shift >= 0 {
        num = num.checked_mul(10i64.checked_pow(shift as u32)?)?;
    } else {
        den = 10i64.checked_pow((-shift) as u32)?;
    }
    if neg {
        num = -num;
    }
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two(r: Ratio) -> String {
        format_decimal(r.value().unwrap(), 2, false)
    }

    #[test]
    fn traditional_worked_values() {
        assert_eq!(precision(5, 4).value(), Some(q(5, 9)));
        assert_eq!(two(precision(5, 4)), "0.56");
        assert_eq!(two(recall(5, 5)), "0.50");
        assert_eq!(two(precision(7, 2)), "0.78");
        assert_eq!(two(recall(7, 3)), "0.70");
        assert_eq!(two(precision(2, 1)), "0.67");
        assert_eq!(two(recall(2, 2)), "0.50");
    }

    #[test]
    fn zero_denominator_is_undefined() {
        assert!(precision(0, 0).value().is_none());
        assert!(recall(0, 0).to_f64().is_none());
        assert_eq!(precision(0, 3).value(), Some(q(0, 1)));
    }

    #[test]
    fn f_measure_cases() {
        let x = Ratio::new(3, 7);
        for beta in [0.5, 1.0, 2.0, 7.5] {
            let f = f_measure(x, x, beta).unwrap().unwrap();
            assert!((f - 3.0 / 7.0).abs() < 1e-12);
        }
        // 2·(5/9)·(1/2) / (5/9 + 1/2) = (5/9) / (19/18) = 10/19
        let f = f_measure(Ratio::new(5, 9), Ratio::new(1, 2), 1.0).unwrap().unwrap();
        assert!((f - 10.0 / 19.0).abs() < 1e-12);
        assert_eq!(f1(Ratio::new(5, 9), Ratio::new(1, 2)), Some(q(10, 19)));
        assert_eq!(f_measure(Ratio::new(1, 0), x, 1.0).unwrap(), None);
        assert_eq!(f_measure(Ratio::new(0, 4), Ratio::new(0, 3), 1.0).unwrap(), None);
        assert!(f_measure(x, x, 0.0).is_err());
        assert!(f_measure(x, x, -1.0).is_err());
        assert!(f_measure(x, x, f64::NAN).is_err());
    }

    #[test]
    fn partial_worked_values() {
        let m = partial_metrics(&SpatialCounts::new(5, 3, 1, 2));
        let got: Vec<_> = [
            m.pre_full,
            m.pre_partial,
            m.pre_total,
            m.rec_full,
            m.rec_partial,
            m.rec_total,
        ]
        .into_iter()
        .map(two)
        .collect();
        assert_eq!(got, ["0.56", "0.33", "0.89", "0.50", "0.30", "0.80"]);
    }

    #[test]
    fn perfect_annotator() {
        let m = partial_metrics(&SpatialCounts::new(12, 0, 0, 0));
        assert_eq!(m.pre_full.value(), Some(q(1, 1)));
        assert_eq!(m.rec_full.value(), Some(q(1, 1)));
        assert_eq!(m.pre_partial.value(), Some(q(0, 1)));
        assert_eq!(m.rec_partial.value(), Some(q(0, 1)));
    }

    #[test]
    fn empty_counts_are_undefined() {
        let m = partial_metrics(&SpatialCounts::default());
        assert!(m.pre_full.value().is_none() && m.rec_total.value().is_none());
    }

    #[test]
    fn rounding_is_half_up_and_exact() {
        assert_eq!(format_decimal(q(57, 200), 2, false), "0.29"); // 0.285
        assert_eq!(format_decimal(q(1, 8), 2, false), "0.13");
        assert_eq!(format_decimal(q(-1, 8), 2, false), "-0.13");
        assert_eq!(format_decimal(q(1, 18), 2, true), "+0.06");
        assert_eq!(format_decimal(q(0, 1), 2, true), "0.00");
        assert_eq!(format_decimal(q(1, 1), 2, false), "1.00");
        assert_eq!(format_decimal(q(2, 3), 0, false), "1");
        assert_eq!(format_decimal(q(1, 3), 4, false), "0.3333");
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("0.56"), Some(q(56, 100)));
        assert_eq!(parse_decimal("-0.06"), Some(q(-6, 100)));
        assert_eq!(parse_decimal("+1"), Some(q(1, 1)));
        assert_eq!(parse_decimal("1.0"), Some(q(1, 1)));
        assert_eq!(parse_decimal("1e-3"), Some(q(1, 1000)));
        assert_eq!(parse_decimal("2.5E1"), Some(q(25, 1)));
        assert_eq!(parse_decimal("—"), None);
        assert_eq!(parse_decimal(""), None);
        assert_eq!(parse_decimal("."), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn measures_bounded_and_consistent(fm in 0u64..500, pm in 0u64..500, wh in 0u64..500, cm in 0u64..500) {
                let c = SpatialCounts::new(fm, pm, wh, cm);
                let m = partial_metrics(&c);
                let zero = Rational::from_integer(0);
                let one = Rational::from_integer(1);
                for r in [m.pre_full, m.pre_partial, m.pre_total, m.rec_full, m.rec_partial, m.rec_total] {
                    if let Some(v) = r.value() {
                        prop_assert!(v >= zero && v <= one);
                    }
                }
                if let (Some(f), Some(p), Some(t)) = (m.pre_full.value(), m.pre_partial.value(), m.pre_total.value()) {
                    prop_assert_eq!(f + p, t);
                    prop_assert!(t >= f);
                }
                if let (Some(f), Some(p), Some(t)) = (m.rec_full.value(), m.rec_partial.value(), m.rec_total.value()) {
                    prop_assert_eq!(f + p, t);
                    prop_assert!(t >= f);
                }
                let exact = c.to_exact();
                prop_assert_eq!(precision(exact.tp, exact.fp).value(), m.pre_full.value());
                prop_assert_eq!(recall(exact.tp, exact.fn_).value(), m.rec_full.value());
            }

            #[test]
            fn formatted_values_parse_back(n in -100_000i64..100_000, d in 1i64..10_000, digits in 0u32..7) {
                let v = q(n, d);
                let text = format_decimal(v, digits, false);
                let back = parse_decimal(&text).unwrap();
                prop_assert_eq!(format_decimal(back, digits, false), text);
                let diff = back - v;
                let err = if diff < Rational::from_integer(0) { -diff } else { diff };
                prop_assert!(err * Rational::from_integer(2 * 10i64.pow(digits)) <= Rational::from_integer(1));
            }
        }
    }
}
