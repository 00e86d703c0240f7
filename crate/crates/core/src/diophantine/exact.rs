//! The [`ExactReal`] number type.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::enclosure::Enclosure;
use crate::{Error, Result};

/// Default grid of dyadic enclosures (fractional bits).
pub const DEFAULT_BITS: u32 = 128;

/// Largest precision tried when separating two distinct algebraic values.
const MAX_SEPARATION_BITS: u32 = 1 << 14;

/// Quadratic surd `(p + q√d)/r` in lowest terms.
///
/// Invariants: `r > 0`, `q != 0`, `d > 1` square-free and
/// `gcd(p, q, r) = 1`. Values violating them are demoted to rationals by
/// [`QuadSurd::new`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

/// A real number that is a rational, a quadratic surd, or an enclosure.
///
/// Arithmetic, comparison and floor are exact for the first two variants.
/// Operations mixing different square roots, or involving an enclosure,
/// produce an enclosure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactReal {
    Rational(BigRational),
    Quadratic(QuadSurd),
    Float(Enclosure),
}

/// Splits `d > 0` into `(f, core)` with `d = f² · core`.
///
/// Trial division runs up to 2^20; the cofactor left after removing the
/// small primes is then tested for being a perfect square. A large prime
/// whose square sits next to another large prime is not detected.
pub(crate) fn square_free_split(d: &BigInt) -> (BigInt, BigInt) {
    let mut core = d.clone();
    let mut f = BigInt::one();
    // `core` with every trial prime removed; composites never divide it
    let mut rest = d.clone();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1u64 << 20);
    while &p * &p <= rest && p <= limit {
        let sq = &p * &p;
        while rest.is_multiple_of(&sq) {
            rest /= &sq;
            core /= &sq;
            f *= &p;
        }
        if rest.is_multiple_of(&p) {
            rest /= &p;
        }
        p += if p == BigInt::from(2u32) { 1 } else { 2 };
    }
    let s = rest.sqrt();
    if &s * &s == rest && !s.is_one() {
        f *= &s;
        core /= &rest;
    }
    (f, core)
}

/// Sign of `a + b√d` for `d > 1` square-free.
fn surd_sign(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    if b.is_zero() {
        return a.cmp(&BigInt::zero());
    }
    if a.is_zero() {
        return b.cmp(&BigInt::zero());
    }
    if a.is_positive() == b.is_positive() {
        return a.cmp(&BigInt::zero());
    }
    if a * a > b * b * d {
        a.cmp(&BigInt::zero())
    } else {
        b.cmp(&BigInt::zero())
    }
}

/// Floor of `(p + q√d)/r` with `r > 0`, `q != 0`, `d` square-free.
fn surd_floor(p: &BigInt, q: &BigInt, d: &BigInt, r: &BigInt) -> BigInt {
    let s = (q * q * d).sqrt();
    let num_floor = if q.is_positive() { p + s } else { p - s - 1 };
    num_floor.div_floor(r)
}

impl QuadSurd {
    /// Builds `(p + q√d)/r`, demoting to a rational when `q = 0` or `d` is a
    /// perfect square.
    pub fn new(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<ExactReal> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !d.is_positive() {
            return Err(Error::invalid("radicand must be positive"));
        }
        let (f, core) = square_free_split(&d);
        let q = q * f;
        if q.is_zero() || core.is_one() {
            let num = p + q * core.sqrt();
            return Ok(ExactReal::Rational(BigRational::new(num, r)));
        }
        let (mut p, mut q, mut r) = (p, q, r);
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        Ok(ExactReal::Quadratic(QuadSurd { p, q, d: core, r }))
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn floor(&self) -> BigInt {
        surd_floor(&self.p, &self.q, &self.d, &self.r)
    }

    pub fn sign(&self) -> Ordering {
        surd_sign(&self.p, &self.q, &self.d)
    }

    pub fn conjugate(&self) -> QuadSurd {
        QuadSurd {
            p: self.p.clone(),
            q: -&self.q,
            d: self.d.clone(),
            r: self.r.clone(),
        }
    }

    /// Field norm `x · conj(x)`, a nonzero rational.
    pub fn norm(&self) -> BigRational {
        BigRational::new(
            &self.p * &self.p - &self.q * &self.q * &self.d,
            &self.r * &self.r,
        )
    }

    /// Double-precision value without cancellation.
    pub fn to_f64(&self) -> f64 {
        let r = self.r.to_f64().unwrap_or(f64::INFINITY);
        let sd = self.d.to_f64().unwrap_or(f64::INFINITY).sqrt();
        let qf = self.q.to_f64().unwrap_or(f64::NAN);
        let pf = self.p.to_f64().unwrap_or(f64::NAN);
        if self.p.is_zero() || self.p.is_positive() == self.q.is_positive() {
            (pf + qf * sd) / r
        } else {
            // (p + q√d) = (p² - q²d)/(p - q√d), the denominator has no cancellation
            let num = &self.p * &self.p - &self.q * &self.q * &self.d;
            let numf = BigRational::new(num, self.r.clone())
                .to_f64()
                .unwrap_or(f64::NAN);
            numf / (pf - qf * sd)
        }
    }

    pub fn enclose(&self, bits: u32) -> Enclosure {
        Enclosure::from_surd(&self.p, &self.q, &self.d, &self.r, bits)
    }

    /// Adds the rational `a/b` exactly.
    fn add_rational(&self, x: &BigRational) -> ExactReal {
        let (a, b) = (x.numer(), x.denom());
        QuadSurd::new(
            &self.p * b + a * &self.r,
            &self.q * b,
            self.d.clone(),
            &self.r * b,
        )
        .expect("nonzero denominator")
    }

    fn scale(&self, x: &BigRational) -> ExactReal {
        let (a, b) = (x.numer(), x.denom());
        QuadSurd::new(&self.p * a, &self.q * a, self.d.clone(), &self.r * b)
            .expect("nonzero denominator")
    }
}

impl ExactReal {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        ExactReal::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let d = d.into();
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactReal::Rational(BigRational::new(n.into(), d)))
    }

    /// `(p + q√d)/r`.
    pub fn surd(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        d: impl Into<BigInt>,
        r: impl Into<BigInt>,
    ) -> Result<Self> {
        QuadSurd::new(p.into(), q.into(), d.into(), r.into())
    }

    /// `√n` for a non-negative integer `n`.
    pub fn sqrt_of(n: impl Into<BigInt>) -> Result<Self> {
        let n = n.into();
        if n.is_zero() {
            return Ok(ExactReal::integer(0));
        }
        QuadSurd::new(BigInt::zero(), BigInt::one(), n, BigInt::one())
    }

    /// `(√5 - 1)/2`, the fractional part of the golden ratio.
    pub fn golden_fraction() -> Self {
        Self::surd(-1, 1, 5, 2).expect("valid surd")
    }

    /// Positive `n`-th root of a positive rational, as an enclosure.
    pub fn root(x: &BigRational, n: u32, bits: u32) -> Result<Self> {
        if n == 2 {
            let s = BigRational::new(x.numer() * x.denom(), BigInt::one());
            return QuadSurd::new(
                BigInt::zero(),
                BigInt::one(),
                s.to_integer(),
                x.denom().clone(),
            );
        }
        let e = Enclosure::root_of_rational(x, n, bits)?;
        if e.is_point() {
            return Ok(ExactReal::Rational(e.lo()));
        }
        Ok(ExactReal::Float(e))
    }

    /// Enclosure of a double-precision value (exact: every f64 is dyadic).
    pub fn from_f64(x: f64) -> Result<Self> {
        let r = BigRational::from_float(x)
            .ok_or_else(|| Error::invalid(format!("non-finite value {x}")))?;
        Ok(ExactReal::Float(Enclosure::from_rational(&r, DEFAULT_BITS)))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ExactReal::Float(_))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactReal::Rational(_))
    }

    /// True for a quadratic surd; unknown (false) for enclosures.
    pub fn is_known_irrational(&self) -> bool {
        matches!(self, ExactReal::Quadratic(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_surd(&self) -> Option<&QuadSurd> {
        match self {
            ExactReal::Quadratic(s) => Some(s),
            _ => None,
        }
    }

    /// Precision of the enclosure variant, if any.
    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            ExactReal::Float(e) => Some(e.bits()),
            _ => None,
        }
    }

    pub fn enclose(&self, bits: u32) -> Enclosure {
        match self {
            ExactReal::Rational(r) => Enclosure::from_rational(r, bits),
            ExactReal::Quadratic(s) => s.enclose(bits),
            ExactReal::Float(e) => e.with_bits(bits.min(e.bits())),
        }
    }

    fn float_bits(a: &Self, b: &Self) -> u32 {
        match (a.precision_bits(), b.precision_bits()) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => DEFAULT_BITS,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactReal::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactReal::Quadratic(s) => s.to_f64(),
            ExactReal::Float(e) => e.mid_f64(),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(-r),
            ExactReal::Quadratic(s) => ExactReal::Quadratic(QuadSurd {
                p: -&s.p,
                q: -&s.q,
                d: s.d.clone(),
                r: s.r.clone(),
            }),
            ExactReal::Float(e) => ExactReal::Float(e.neg()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        use ExactReal::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a + b),
            (Rational(a), Quadratic(s)) | (Quadratic(s), Rational(a)) => s.add_rational(a),
            (Quadratic(x), Quadratic(y)) if x.d == y.d => QuadSurd::new(
                &x.p * &y.r + &y.p * &x.r,
                &x.q * &y.r + &y.q * &x.r,
                x.d.clone(),
                &x.r * &y.r,
            )
            .expect("nonzero denominator"),
            _ => {
                let bits = Self::float_bits(self, other);
                Float(self.enclose(bits).add(&other.enclose(bits)))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        use ExactReal::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Rational(a), Quadratic(s)) | (Quadratic(s), Rational(a)) => s.scale(a),
            (Quadratic(x), Quadratic(y)) if x.d == y.d => QuadSurd::new(
                &x.p * &y.p + &x.q * &y.q * &x.d,
                &x.p * &y.q + &y.p * &x.q,
                x.d.clone(),
                &x.r * &y.r,
            )
            .expect("nonzero denominator"),
            _ => {
                let bits = Self::float_bits(self, other);
                Float(self.enclose(bits).mul(&other.enclose(bits)))
            }
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(r * k),
            ExactReal::Quadratic(s) => s.scale(&BigRational::from_integer(k.clone())),
            ExactReal::Float(e) => ExactReal::Float(e.mul_int(k)),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        match self {
            ExactReal::Rational(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(ExactReal::Rational(r.recip()))
                }
            }
            ExactReal::Quadratic(s) => {
                // 1/x = conj(x) / N(x)
                let n = s.norm();
                Ok(s.conjugate().scale(&n.recip()))
            }
            ExactReal::Float(e) => {
                let one = Enclosure::from_integer(&BigInt::one(), e.bits());
                Ok(ExactReal::Float(one.div(e)?))
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if let (ExactReal::Float(_), _) | (_, ExactReal::Float(_)) = (self, other) {
            let bits = Self::float_bits(self, other);
            return Ok(ExactReal::Float(
                self.enclose(bits).div(&other.enclose(bits))?,
            ));
        }
        Ok(self.mul(&other.recip()?))
    }

    /// Exact floor; `None` when an enclosure straddles an integer.
    pub fn floor(&self) -> Option<BigInt> {
        match self {
            ExactReal::Rational(r) => Some(r.floor().to_integer()),
            ExactReal::Quadratic(s) => Some(s.floor()),
            ExactReal::Float(e) => e.floor(),
        }
    }

    /// Sign, exact for rationals and surds; `None` if an enclosure contains 0
    /// without being the point 0.
    pub fn sign(&self) -> Option<Ordering> {
        match self {
            ExactReal::Rational(r) => Some(r.cmp(&BigRational::zero())),
            ExactReal::Quadratic(s) => Some(s.sign()),
            ExactReal::Float(e) => {
                let z = Enclosure::point(BigInt::zero(), e.bits());
                e.partial_cmp_interval(&z)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Some(Ordering::Equal)
    }

    /// Comparison. Always decided for exact operands (distinct radicals are
    /// separated by refining enclosures); `None` when enclosures overlap.
    pub fn cmp_exact(&self, other: &Self) -> Option<Ordering> {
        use ExactReal::*;
        match (self, other) {
            (Rational(_) | Quadratic(_), Rational(_) | Quadratic(_)) => {
                let diff = self.sub(other);
                if let Some(o) = diff.sign() {
                    return Some(o);
                }
                // different square roots: values are distinct, refine
                let mut bits = DEFAULT_BITS;
                while bits <= MAX_SEPARATION_BITS {
                    if let Some(o) = self.enclose(bits).partial_cmp_interval(&other.enclose(bits))
                    {
                        return Some(o);
                    }
                    bits *= 2;
                }
                None
            }
            _ => {
                let bits = Self::float_bits(self, other);
                self.enclose(bits).partial_cmp_interval(&other.enclose(bits))
            }
        }
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Some(Ordering::Less) => self.neg(),
            Some(_) => self.clone(),
            None => match self {
                ExactReal::Float(e) => {
                    let lo = BigInt::zero();
                    let hi = (-e.lo_scaled()).max(e.hi_scaled().clone());
                    ExactReal::Float(Enclosure::new(lo, hi, e.bits()))
                }
                _ => unreachable!("exact values have a sign"),
            },
        }
    }

    /// `‖x‖`, the distance to the nearest integer, in `[0, 1/2]`.
    pub fn nearest_int_distance(&self) -> Self {
        match self {
            ExactReal::Rational(r) => {
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let m = (r + &half).floor();
                ExactReal::Rational((r - m).abs())
            }
            ExactReal::Quadratic(s) => {
                // m = floor(x + 1/2) = floor((2p + r + 2q√d)/(2r))
                let two = BigInt::from(2);
                let m = surd_floor(&(&two * &s.p + &s.r), &(&two * &s.q), &s.d, &(&two * &s.r));
                let a = &s.p - &m * &s.r;
                let (a, q) = if surd_sign(&a, &s.q, &s.d) == Ordering::Less {
                    (-a, -&s.q)
                } else {
                    (a, s.q.clone())
                };
                QuadSurd::new(a, q, s.d.clone(), s.r.clone()).expect("nonzero denominator")
            }
            ExactReal::Float(e) => ExactReal::Float(e.nearest_int_distance()),
        }
    }

    /// Rational value of an enclosure's midpoint, or the exact rational.
    pub fn approx_rational(&self, bits: u32) -> BigRational {
        match self {
            ExactReal::Rational(r) => r.clone(),
            other => other.enclose(bits).midpoint(),
        }
    }
}

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> Self {
        ExactReal::Rational(r)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.q.is_negative() { '-' } else { '+' };
        write!(
            f,
            "({}{}{}*sqrt({}))/{}",
            self.p,
            sign,
            self.q.abs(),
            self.d,
            self.r
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, qq: i64, d: i64, r: i64) -> ExactReal {
        ExactReal::surd(p, qq, d, r).unwrap()
    }

    #[test]
    fn surd_is_normalized() {
        // (2 + 2√8)/4 = (1 + 2√2)/2
        let x = q(2, 2, 8, 4);
        let s = x.as_surd().unwrap();
        assert_eq!((s.p(), s.q(), s.d(), s.r()), (&1.into(), &2.into(), &2.into(), &2.into()));
        assert!(q(3, 1, 9, 2).is_rational());
        assert_eq!(q(3, 1, 9, 2), ExactReal::integer(3));
        assert!(q(1, 0, 5, 1).is_rational());
        let neg = q(1, 1, 5, -2);
        assert_eq!(neg, q(-1, -1, 5, 2));
    }

    #[test]
    fn floors() {
        assert_eq!(q(1, 1, 5, 2).floor().unwrap(), 1.into());
        assert_eq!(q(1, -1, 5, 2).floor().unwrap(), (-1).into());
        assert_eq!(q(0, 1, 2, 1).floor().unwrap(), 1.into());
        assert_eq!(q(0, -1, 2, 1).floor().unwrap(), (-2).into());
        assert_eq!(ExactReal::ratio(-7, 3).unwrap().floor().unwrap(), (-3).into());
    }

    #[test]
    fn field_arithmetic_stays_exact() {
        let phi = q(1, 1, 5, 2);
        // φ² = φ + 1
        assert_eq!(phi.mul(&phi), phi.add(&ExactReal::integer(1)));
        // 1/φ = φ - 1
        assert_eq!(phi.recip().unwrap(), phi.sub(&ExactReal::integer(1)));
        let s2 = ExactReal::sqrt_of(2).unwrap();
        assert_eq!(s2.mul(&s2), ExactReal::integer(2));
        let x = s2.div(&phi.add(&ExactReal::integer(3))).unwrap();
        assert!(!x.is_exact());
        let y = phi.div(&phi.add(&ExactReal::integer(3))).unwrap();
        assert!(y.is_exact());
        assert!((y.to_f64() - 1.618_033_988_749_895 / 4.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn mixed_radicals_fall_back_to_enclosures() {
        let x = ExactReal::sqrt_of(2).unwrap().add(&ExactReal::sqrt_of(3).unwrap());
        assert!(!x.is_exact());
        assert!((x.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        assert_eq!(
            ExactReal::sqrt_of(2).unwrap().cmp_exact(&ExactReal::sqrt_of(3).unwrap()),
            Some(Ordering::Less)
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(
            ExactReal::ratio(1, 2).unwrap().nearest_int_distance(),
            ExactReal::ratio(1, 2).unwrap()
        );
        assert_eq!(
            ExactReal::ratio(7, 3).unwrap().nearest_int_distance(),
            ExactReal::ratio(1, 3).unwrap()
        );
        // ‖(1+√5)/2‖ = 2 - (1+√5)/2 = (3 - √5)/2
        assert_eq!(q(1, 1, 5, 2).nearest_int_distance(), q(3, -1, 5, 2));
        assert!((q(3, -1, 5, 2).to_f64() - 0.381_966_011_250_105_1).abs() < 1e-15);
    }

    #[test]
    fn f64_conversion_avoids_cancellation() {
        // 1000000 - √(10^12 - 1) ≈ 5e-7
        let x = q(1_000_000, -1, 999_999_999_999, 1);
        let expected = 1.0 / (1_000_000.0 + (999_999_999_999f64).sqrt());
        assert!((x.to_f64() - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn square_free_split_examples() {
        assert_eq!(square_free_split(&72.into()), (6.into(), 2.into()));
        assert_eq!(square_free_split(&49.into()), (7.into(), 1.into()));
        assert_eq!(square_free_split(&5.into()), (1.into(), 5.into()));
        // square factor built from primes beyond the trial bound
        let d: BigInt = "3277704843118545846".parse().unwrap();
        assert_eq!(square_free_split(&d), ("739110371".parse().unwrap(), 6.into()));
        // 2²·3·5³·11²·71², where the odd trial divisors pass through 15
        assert_eq!(square_free_split(&914_941_500.into()), (7810.into(), 15.into()));
    }

    #[test]
    fn root_of_rational_variants() {
        let two = BigRational::from_integer(2.into());
        let c = ExactReal::root(&two, 3, 128).unwrap();
        assert!(!c.is_exact());
        assert_eq!(ExactReal::root(&two, 2, 128).unwrap(), ExactReal::sqrt_of(2).unwrap());
        let eight = BigRational::from_integer(8.into());
        assert_eq!(ExactReal::root(&eight, 3, 64).unwrap(), ExactReal::integer(2));
    }
}
