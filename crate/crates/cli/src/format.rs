//! Deterministic decimal output.

use std::str::FromStr;

use opjump_core::precision::decimal_digits;
use opjump_core::Float;

/// `d.ddd…e±XX` with exactly `digits` significant digits, round to nearest.
pub fn sci(x: &Float, digits: usize) -> String {
    assert!(digits >= 1);
    if x.is_zero() {
        return format!("{}e+00", pad_mantissa("0", digits));
    }
    assert!(x.is_finite(), "non-finite value in output");
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    let exp = exp.expect("finite non-zero value has an exponent") - 1;
    let sign = if neg { "-" } else { "" };
    let exp_sign = if exp < 0 { '-' } else { '+' };
    format!("{sign}{}e{exp_sign}{:02}", pad_mantissa(&mantissa, digits), exp.abs())
}

fn pad_mantissa(m: &str, digits: usize) -> String {
    let mut s = String::with_capacity(digits + 1);
    s.push_str(&m[..1]);
    if digits > 1 {
        s.push('.');
        s.push_str(&m[1..]);
        for _ in m.len()..digits {
            s.push('0');
        }
    }
    s
}

/// Largest digit count that still round-trips at `bits`.
pub fn max_digits(bits: u32) -> usize {
    decimal_digits(bits)
}

/// Parses a decimal string to `bits` of precision.
pub fn parse(s: &str, bits: u32) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}

/// A decimal number kept as text until the working precision is known.
#[derive(Debug, Clone, PartialEq)]
pub struct Decimal(String);

impl Decimal {
    pub fn to_float(&self, bits: u32) -> Float {
        parse(&self.0, bits).expect("validated on construction")
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse(s, 64) {
            Some(v) if v.is_finite() => Ok(Decimal(s.trim().to_string())),
            _ => Err(format!("not a finite decimal number: {s:?}")),
        }
    }
}

impl std::fmt::Display for Decimal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_layout() {
        assert_eq!(sci(&Float::with_val(64, 0), 4), "0.000e+00");
        assert_eq!(sci(&Float::with_val(64, 1.5), 3), "1.50e+00");
        assert_eq!(sci(&Float::with_val(64, -0.00125), 2), "-1.3e-03");
        assert_eq!(sci(&Float::with_val(64, 12345), 1), "1e+04");
        assert_eq!(sci(&Float::with_val(64, 9.96), 2), "1.0e+01");
        assert_eq!(sci(&Float::with_val(256, 1e123), 5), "1.0000e+123");
    }

    #[test]
    fn round_trip_is_idempotent() {
        let bits = 256;
        let d = max_digits(bits);
        let mut x = Float::with_val(bits, 3).sqrt() / 7u32;
        for _ in 0..50 {
            let s = sci(&x, d);
            assert_eq!(sci(&parse(&s, bits).unwrap(), d), s);
            x *= -13i32;
            x /= 3u32;
        }
    }

    #[test]
    fn decimal_validation() {
        assert!("1.5".parse::<Decimal>().is_ok());
        assert!("-2e-3".parse::<Decimal>().is_ok());
        assert!("abc".parse::<Decimal>().is_err());
        assert!("inf".parse::<Decimal>().is_err());
        let d: Decimal = "0.1".parse().unwrap();
        assert_eq!(d.to_float(128), Float::with_val(128, Float::parse("0.1").unwrap()));
    }
}
