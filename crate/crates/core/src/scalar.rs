//! Complex scalars and their flexible JSON forms.
//!
//! A scalar may be written as a number, a `"p/q"` or decimal string, or a
//! `[re, im]` pair whose entries are numbers or strings.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational64::new(p, q));
    }
    if let Ok(p) = s.parse::<i64>() {
        return Some(Rational64::from_integer(p));
    }
    let (int, frac) = s.split_once('.')?;
    if frac.len() > 15 || !frac.chars().all(|ch| ch.is_ascii_digit()) {
        return None;
    }
    let neg = int.trim_start().starts_with('-');
    let int_part: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = int_part.checked_abs()?.checked_mul(den)?.checked_add(frac_part)?;
    Some(Rational64::new(if neg { -num } else { num }, den))
}

/// Rational from a JSON number or string.
pub fn rational_from_value(v: &Value) -> Option<Rational64> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(Rational64::from_integer(i))
            } else {
                parse_rational(&n.to_string())
            }
        }
        Value::String(s) => parse_rational(s),
        _ => None,
    }
}

pub fn rational_to_value(q: &Rational64) -> Value {
    if *q.denom() == 1 {
        Value::from(*q.numer())
    } else {
        Value::String(format!("{}/{}", q.numer(), q.denom()))
    }
}

fn real_from_value(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => parse_rational(s).and_then(|q| q.to_f64()).or_else(|| s.trim().parse::<f64>().ok()),
        _ => None,
    }
}

/// Complex scalar from any accepted JSON form.
pub fn complex_from_value(v: &Value) -> Option<C64> {
    match v {
        Value::Array(parts) if parts.len() == 2 => {
            Some(C64::new(real_from_value(&parts[0])?, real_from_value(&parts[1])?))
        }
        other => real_from_value(other).map(re),
    }
}

pub fn complex_to_value(z: C64) -> Value {
    if z.im == 0.0 {
        Value::from(z.re)
    } else {
        Value::Array(vec![Value::from(z.re), Value::from(z.im)])
    }
}

/// Parses a command-line scalar: `1.5`, `1/2`, `[1,0.5]` or `1,0.5`.
pub fn parse_scalar(s: &str) -> Option<C64> {
    let t = s.trim();
    if t.starts_with('[') {
        return complex_from_value(&serde_json::from_str(t).ok()?);
    }
    if let Some((a, b)) = t.split_once(',') {
        let a = complex_from_value(&Value::String(a.to_string()))?;
        let b = complex_from_value(&Value::String(b.to_string()))?;
        return Some(C64::new(a.re, b.re));
    }
    complex_from_value(&Value::String(t.to_string()))
}

/// Serde wrapper accepting every scalar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalar(pub C64);

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        complex_to_value(self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        complex_from_value(&v).map(Scalar).ok_or_else(|| de::Error::custom(format!("not a scalar: {v}")))
    }
}

/// Complex always written as `[re, im]`, as in table files and reports.
pub fn pair(z: C64) -> Value {
    Value::Array(vec![Value::from(z.re), Value::from(z.im)])
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

/// Principal square root.
pub fn sqrt(z: C64) -> C64 {
    z.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_rational("-3"), Some(Rational64::from_integer(-3)));
        assert_eq!(parse_rational("0.25"), Some(Rational64::new(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(Rational64::new(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("1"), Some(re(1.0)));
        assert_eq!(parse_scalar("[1,0.5]"), Some(c(1.0, 0.5)));
        assert_eq!(parse_scalar("1/4"), Some(re(0.25)));
        assert_eq!(parse_scalar("2,-1"), Some(c(2.0, -1.0)));
        let s: Scalar = serde_json::from_str("[\"1/2\", 3]").unwrap();
        assert_eq!(s.0, c(0.5, 3.0));
        assert_eq!(serde_json::to_string(&Scalar(re(2.0))).unwrap(), "2.0");
    }
}
