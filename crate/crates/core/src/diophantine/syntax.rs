//! Text syntax for [`ExactReal`]:
//!
//! - `rat:p/q` (or `rat:p`)
//! - `quad:(p+q*sqrt(d))/r` (the `/r` may be omitted, `-` allowed before `q`)
//! - `float:<decimal>` with optional exponent, enclosed on a 128-bit grid
//! - `root:n:<rational>`, the positive `n`-th root of a positive rational
//!
//! Rationals and surds round-trip exactly through [`fmt::Display`] and
//! [`FromStr`]. Enclosures print their midpoint.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::enclosure::Enclosure;
use super::exact::{ExactReal, QuadSurd, DEFAULT_BITS};
use crate::{Error, Result};

fn quad_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*(?:/\s*([+-]?\d+))?$",
        )
        .expect("valid regex")
    })
}

fn parse_int(s: &str, input: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| Error::parse(input, e.to_string()))
}

fn parse_rational(body: &str, input: &str) -> Result<BigRational> {
    match body.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d, input)?;
            if d.is_zero() {
                return Err(Error::parse(input, "zero denominator"));
            }
            Ok(BigRational::new(parse_int(n, input)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(body, input)?)),
    }
}

/// Exact value of a decimal literal such as `-0.7182e-3`.
fn parse_decimal(body: &str, input: &str) -> Result<BigRational> {
    let body = body.trim();
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (
            &body[..i],
            body[i + 1..]
                .parse::<i32>()
                .map_err(|e| Error::parse(input, e.to_string()))?,
        ),
        None => (body, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::parse(input, "malformed decimal"));
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().expect("digits") / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

impl ExactReal {
    /// Parses the tagged syntax, placing enclosures on a `bits` grid.
    pub fn parse_with_bits(input: &str, bits: u32) -> Result<Self> {
        let s = input.trim();
        let (tag, body) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(input, "expected `rat:`, `quad:`, `float:` or `root:`"))?;
        match tag {
            "rat" => Ok(ExactReal::Rational(parse_rational(body, input)?)),
            "quad" => {
                let caps = quad_regex()
                    .captures(body.trim())
                    .ok_or_else(|| Error::parse(input, "expected (p+q*sqrt(d))/r"))?;
                let p = parse_int(&caps[1], input)?;
                let mut q = parse_int(&caps[3], input)?;
                if &caps[2] == "-" {
                    q = -q;
                }
                let d = parse_int(&caps[4], input)?;
                let r = match caps.get(5) {
                    Some(m) => parse_int(m.as_str(), input)?,
                    None => BigInt::one(),
                };
                QuadSurd::new(p, q, d, r).map_err(|e| Error::parse(input, e.to_string()))
            }
            "float" => {
                let v = parse_decimal(body, input)?;
                Ok(ExactReal::Float(Enclosure::from_rational(&v, bits)))
            }
            "root" => {
                let (n, x) = body
                    .split_once(':')
                    .ok_or_else(|| Error::parse(input, "expected root:n:<rational>"))?;
                let n: u32 = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(input, "root index must be a positive integer"))?;
                let x = parse_rational(x, input)?;
                ExactReal::root(&x, n, bits).map_err(|e| Error::parse(input, e.to_string()))
            }
            _ => Err(Error::parse(input, format!("unknown tag `{tag}`"))),
        }
    }

    /// Like [`FromStr`], but untagged input is accepted too: `p/q` and
    /// integers become rationals, other decimals become enclosures.
    pub fn parse_lenient(input: &str) -> Result<Self> {
        let s = input.trim();
        if s.contains(':') {
            return s.parse();
        }
        if let Ok(r) = parse_rational(s, input) {
            return Ok(ExactReal::Rational(r));
        }
        let v = parse_decimal(s, input)?;
        Ok(ExactReal::Float(Enclosure::from_rational(&v, DEFAULT_BITS)))
    }
}

impl FromStr for ExactReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_bits(s, DEFAULT_BITS)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => write!(f, "rat:{}/{}", r.numer(), r.denom()),
            ExactReal::Quadratic(s) => write!(f, "quad:{s}"),
            ExactReal::Float(e) => {
                let digits = (e.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
                write!(f, "float:{}", e.to_decimal(digits))
            }
        }
    }
}

impl Serialize for ExactReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_tag() {
        assert_eq!("rat:6/4".parse::<ExactReal>().unwrap(), ExactReal::ratio(3, 2).unwrap());
        assert_eq!("rat:-5".parse::<ExactReal>().unwrap(), ExactReal::integer(-5));
        assert_eq!(
            "quad:(1+1*sqrt(5))/2".parse::<ExactReal>().unwrap(),
            ExactReal::surd(1, 1, 5, 2).unwrap()
        );
        assert_eq!(
            "quad:(-1 - 3*sqrt(8))".parse::<ExactReal>().unwrap(),
            ExactReal::surd(-1, -6, 2, 1).unwrap()
        );
        let f = "float:0.718281828".parse::<ExactReal>().unwrap();
        assert!((f.to_f64() - 0.718281828).abs() < 1e-16);
        let c = "root:3:2".parse::<ExactReal>().unwrap();
        assert!((c.to_f64() - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "rat:1/0", "quad:(1+sqrt(5))/2", "float:abc", "cube:2", "rat:x", "root:0:2"] {
            assert!(bad.parse::<ExactReal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_variants_round_trip() {
        for s in ["rat:-3/7", "quad:(1+1*sqrt(5))/2", "quad:(0-2*sqrt(3))/5"] {
            let x: ExactReal = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            assert_eq!(x.to_string().parse::<ExactReal>().unwrap(), x);
        }
    }

    #[test]
    fn decimals_with_exponents() {
        let v = parse_decimal("-1.25e-2", "").unwrap();
        assert_eq!(v, BigRational::new((-1).into(), 80.into()));
        assert_eq!(parse_decimal("3", "").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_decimal(".", "").is_err());
    }

    #[test]
    fn lenient_parsing() {
        assert_eq!(ExactReal::parse_lenient("7/2").unwrap(), ExactReal::ratio(7, 2).unwrap());
        assert!(!ExactReal::parse_lenient("0.1").unwrap().is_exact());
        assert!(ExactReal::parse_lenient("quad:(0+1*sqrt(2))").unwrap().is_known_irrational());
    }

    #[test]
    fn serde_uses_text_syntax() {
        let x = ExactReal::golden_fraction();
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"quad:(-1+1*sqrt(5))/2\"");
        let back: ExactReal = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
