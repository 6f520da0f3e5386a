//! Exact rational arithmetic helpers shared by every solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Fixed-point resolution used for the rational stand-in of `log2 n`.
const LOG2_FRACTION_BITS: u32 = 20;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn uint(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^h` for any (possibly negative) integer `h`.
pub fn pow2(h: i64) -> Rational {
    let base = BigInt::one() << (h.unsigned_abs() as usize);
    if h >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// The unique `h` with `2^h <= q < 2^(h+1)`. `q` must be positive.
pub fn floor_log2(q: &Rational) -> i64 {
    assert!(q.is_positive(), "floor_log2 of non-positive value");
    let num_bits = q.numer().bits() as i64;
    let den_bits = q.denom().bits() as i64;
    let mut h = num_bits - den_bits;
    // h is within one of the answer; settle it exactly.
    while &pow2(h) > q {
        h -= 1;
    }
    while &pow2(h + 1) <= q {
        h += 1;
    }
    h
}

/// Rational stand-in for `log2 n`: exact on powers of two, otherwise rounded
/// to a multiple of `2^-20`. Every threshold and sampling scale in the crate
/// goes through this single function.
pub fn log2_rational(n: usize) -> Rational {
    assert!(n >= 1);
    if n.is_power_of_two() {
        return int(n.trailing_zeros() as i64);
    }
    let scaled = ((n as f64).log2() * f64::from(1u32 << LOG2_FRACTION_BITS)).round() as i64;
    Rational::new(BigInt::from(scaled), BigInt::one() << LOG2_FRACTION_BITS)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `ceil(a / b)` on positive integers.
pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub fn min_rat(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal rendering with a fixed number of digits, rounded half away from
/// zero. Deterministic, used in CSV reports.
pub fn format_decimal(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let (whole, frac) = abs.div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&whole.to_string());
    if digits > 0 {
        let frac = frac.to_string();
        s.push('.');
        for _ in frac.len()..digits as usize {
            s.push('0');
        }
        s.push_str(&frac);
    }
    s
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else if let Some((w, f)) = s.split_once('.') {
        let digits = f.len() as u32;
        let neg = w.starts_with('-');
        let w: BigInt = if w.is_empty() || w == "-" {
            BigInt::zero()
        } else {
            w.parse().ok()?
        };
        let f: BigInt = f.parse().ok()?;
        let scale = BigInt::from(10u32).pow(digits);
        let frac = Rational::new(f, scale);
        let whole = Rational::from_integer(w);
        Some(if neg { whole - frac } else { whole + frac })
    } else {
        Some(Rational::from_integer(s.parse().ok()?))
    }
}

/// Serde adapter storing a rational as its `p/q` string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_vec {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| {
                super::parse(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_log2_brackets() {
        assert_eq!(floor_log2(&int(1)), 0);
        assert_eq!(floor_log2(&int(6)), 2);
        assert_eq!(floor_log2(&int(8)), 3);
        assert_eq!(floor_log2(&ratio(1, 2)), -1);
        assert_eq!(floor_log2(&ratio(3, 8)), -2);
        assert_eq!(floor_log2(&ratio(1023, 1024)), -1);
    }

    #[test]
    fn log2_exact_on_powers_of_two() {
        assert_eq!(log2_rational(8), int(3));
        assert_eq!(log2_rational(1), int(0));
        let l10 = to_f64(&log2_rational(10));
        assert!((l10 - 10f64.log2()).abs() < 1e-6);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(format_decimal(&ratio(5, 2), 0), "3");
        assert_eq!(format_decimal(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(format_decimal(&int(12), 2), "12.00");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse("1.25"), Some(ratio(5, 4)));
        assert_eq!(parse("1/0"), None);
    }
}
