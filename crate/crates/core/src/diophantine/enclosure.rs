//! Dyadic interval enclosures `[lo, hi] · 2^-bits`.
//!
//! Used for every value that is neither rational nor a quadratic surd in a
//! single square root (cube roots, mixed-radical sums, decimal floats). All
//! operations round outward, so the true value always stays inside.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Closed interval with endpoints on the grid `2^-bits`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn shr_floor(x: &BigInt, n: u32) -> BigInt {
    // BigInt >> rounds toward negative infinity
    x >> n
}

fn shr_ceil(x: &BigInt, n: u32) -> BigInt {
    -((-x) >> n)
}

impl Enclosure {
    pub fn new(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi, bits }
    }

    pub fn point(value: BigInt, bits: u32) -> Self {
        Self {
            lo: value.clone(),
            hi: value,
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn from_integer(n: &BigInt, bits: u32) -> Self {
        Self::point(n << bits, bits)
    }

    pub fn from_rational(x: &BigRational, bits: u32) -> Self {
        let scaled = x.numer() << bits;
        let (lo, rem) = scaled.div_mod_floor(x.denom());
        let hi = if rem.is_zero() { lo.clone() } else { &lo + 1 };
        Self { lo, hi, bits }
    }

    /// Enclosure of `(p + q√d)/r` with `d > 0`, `r > 0`.
    pub fn from_surd(p: &BigInt, q: &BigInt, d: &BigInt, r: &BigInt, bits: u32) -> Self {
        let rad = (q * q * d) << (2 * bits);
        let s = rad.sqrt();
        let exact = &s * &s == rad;
        let base = p << bits;
        let (num_lo, num_hi) = if q.is_negative() {
            let hi = &base - &s;
            let lo = if exact { hi.clone() } else { &hi - 1 };
            (lo, hi)
        } else {
            let lo = &base + &s;
            let hi = if exact { lo.clone() } else { &lo + 1 };
            (lo, hi)
        };
        Self {
            lo: num_lo.div_floor(r),
            hi: -((-num_hi).div_floor(r)),
            bits,
        }
    }

    /// Enclosure of the positive `n`-th root of a positive rational.
    pub fn root_of_rational(x: &BigRational, n: u32, bits: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("root index must be positive"));
        }
        if !x.is_positive() {
            return Err(Error::invalid("root of a non-positive number"));
        }
        let scaled = (x.numer() << (n * bits)).div_floor(x.denom());
        let lo = scaled.nth_root(n);
        let exact = lo.pow(n) == scaled && (x.numer() << (n * bits)).is_multiple_of(x.denom());
        let hi = if exact { lo.clone() } else { &lo + 1 };
        Ok(Self { lo, hi, bits })
    }

    /// Re-express on a coarser grid (`bits` must not exceed the current one).
    pub fn with_bits(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Less => {
                let s = self.bits - bits;
                Self {
                    lo: shr_floor(&self.lo, s),
                    hi: shr_ceil(&self.hi, s),
                    bits,
                }
            }
            Ordering::Greater => {
                let s = bits - self.bits;
                Self {
                    lo: &self.lo << s,
                    hi: &self.hi << s,
                    bits,
                }
            }
        }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let bits = a.bits.min(b.bits);
        (a.with_bits(bits), b.with_bits(bits))
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    pub fn midpoint(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, BigInt::one() << (self.bits + 1))
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << self.bits)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo().to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        Self {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
            bits: a.bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let (lo, hi) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Self {
                lo: hi,
                hi: lo,
                bits: self.bits,
            }
        } else {
            Self {
                lo,
                hi,
                bits: self.bits,
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Self {
            lo: shr_floor(min, a.bits),
            hi: shr_ceil(max, a.bits),
            bits: a.bits,
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = Self::aligned(self, other);
        if b.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for n in [&a.lo, &a.hi] {
            for d in [&b.lo, &b.hi] {
                let num = n << a.bits;
                let f = num.div_floor(d);
                let c = -((-&num).div_floor(d));
                lo = Some(match lo {
                    Some(v) if v <= f => v,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(v) if v >= c => v,
                    _ => c,
                });
            }
        }
        Ok(Self {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            bits: a.bits,
        })
    }

    /// Floor of the enclosed value, if every point of the interval agrees.
    pub fn floor(&self) -> Option<BigInt> {
        let one = BigInt::one() << self.bits;
        let a = self.lo.div_floor(&one);
        let b = self.hi.div_floor(&one);
        (a == b).then_some(a)
    }

    /// Enclosure of the distance to the nearest integer.
    pub fn nearest_int_distance(&self) -> Self {
        let one = BigInt::one() << self.bits;
        let half = BigInt::one() << (self.bits.max(1) - 1);
        let bits = self.bits;
        // distance of a scaled grid point to the nearest multiple of `one`
        let dist = |v: &BigInt| -> BigInt {
            let r = v.mod_floor(&one);
            if r <= half {
                r
            } else {
                &one - r
            }
        };
        if &self.hi - &self.lo >= one {
            return Self {
                lo: BigInt::zero(),
                hi: half,
                bits,
            };
        }
        let (dl, dh) = (dist(&self.lo), dist(&self.hi));
        let contains_integer = self.lo.div_floor(&one) != self.hi.div_floor(&one)
            || self.lo.mod_floor(&one).is_zero();
        let shifted_lo = &self.lo + &half;
        let shifted_hi = &self.hi + &half;
        let contains_half = shifted_lo.div_floor(&one) != shifted_hi.div_floor(&one)
            || shifted_lo.mod_floor(&one).is_zero();
        let lo = if contains_integer {
            BigInt::zero()
        } else {
            dl.clone().min(dh.clone())
        };
        let hi = if contains_half { half } else { dl.max(dh) };
        Self { lo, hi, bits }
    }

    /// Ordering when the intervals are disjoint (or both the same point).
    pub fn partial_cmp_interval(&self, other: &Self) -> Option<Ordering> {
        let (a, b) = Self::aligned(self, other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.is_point() && b.is_point() && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.midpoint(), digits)
    }
}

/// Truncated decimal expansion of a rational.
pub(crate) fn rational_to_decimal(x: &BigRational, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let (int, mut rem) = a.numer().div_mod_floor(a.denom());
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        s.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            let (dg, r) = rem.div_mod_floor(a.denom());
            s.push_str(&dg.to_string());
            rem = r;
        }
        while s.ends_with('0') && !s.ends_with(".0") {
            s.pop();
        }
    }
    s
}
