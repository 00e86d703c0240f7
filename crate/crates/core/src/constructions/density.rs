//! Rational gaps `τ' ∈ πℚ` close to a target `τ` such that
//! `sin(τ' √(k² + q)) ≠ 0` for every `k >= 1`.
//!
//! Write `τ' = π r`. The sine vanishes iff `r √(k² + q) ∈ ℤ`.
//!
//! * `q` irrational: `r √(k² + q) = n` would make `q = n²/r² - k²` rational,
//!   so any nonzero `r` works.
//! * `q` integer: `√(k² + q)` is an integer `x_l` for finitely many `k`
//!   (`j² - k² = q` forces `j + k <= q`, so `k <= (q-1)/2`) and irrational
//!   otherwise. Starting from `a/b` near `τ/π`, take the smallest prime `p`
//!   dividing no `x_l` and the smallest `n` with `p^n ∤ a` that keeps
//!   `r = (p^n - 1) a / (p^n b)` within `δ`. Then `p^n ∤ (p^n - 1) a x_l`, so
//!   `r x_l ∉ ℤ`.
//! * `q = c/d` rational: `τ √(k² + c/d) = (τ/d) √(k²d² + cd)` reduces to the
//!   integer case for `τ/d`.

use std::fmt::Display;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::diophantine::ExactReal;
use crate::observability::rational_load_hits;
use crate::{Error, Result};

const PI_DIGITS: &str =
    "314159265358979323846264338327950288419716939937510582097494459230781640628620899";

/// `π ∈ [lo, hi]` with `hi - lo = 10^-80`.
fn pi_bounds() -> (BigRational, BigRational) {
    let num: BigInt = PI_DIGITS.parse().expect("digits");
    let den = num_traits::pow(BigInt::from(10), PI_DIGITS.len() - 1);
    let lo = BigRational::new(num.clone(), den.clone());
    let hi = BigRational::new(num + 1, den);
    (lo, hi)
}

fn display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapBranch {
    IrrationalQ,
    IntegerQDirect,
    IntegerQPerturbed,
    RationalQReduced,
}

/// An index `k` with `k² + q` a rational square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareHit {
    pub k: u64,
    /// `√(k²d² + cd)`, an integer.
    #[serde(serialize_with = "display")]
    pub x: BigInt,
    /// `√(k² + q) = x/d`.
    #[serde(serialize_with = "display")]
    pub root: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalGapCertificate {
    pub tau: f64,
    pub delta: f64,
    pub q: ExactReal,
    pub branch: GapBranch,
    /// `τ'/π` in lowest terms.
    #[serde(serialize_with = "display")]
    pub tau_prime_over_pi: BigRational,
    pub tau_prime: f64,
    /// Upper bound on `|τ - τ'|` from the enclosure of `π`.
    pub distance_bound: f64,
    /// Unperturbed `a/b` (for rational `q`, of `τ/(dπ)`).
    #[serde(serialize_with = "display")]
    pub base_fraction: BigRational,
    /// Denominator `d` of `q`; 1 for integer or irrational `q`.
    #[serde(serialize_with = "display")]
    pub scale: BigInt,
    /// `cd` for `q = c/d`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced_q: Option<String>,
    /// Enumeration bound `k <= (cd - 1)/(2d)` for the hits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_bound: Option<String>,
    pub hits: Vec<SquareHit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
    pub argument: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapVerification {
    pub within_delta: bool,
    /// `τ'/π` is a nonzero rational.
    pub rational_multiple: bool,
    /// Hits re-derived from factor pairs of `cd` agree with the certificate.
    pub hits_confirmed: bool,
    /// `(x_l, r x_l ∉ ℤ)` checked by exact division.
    pub non_integer: Vec<(String, bool)>,
    /// `p` prime, `p ∤ x_l` and `p^n ∤ a` when the perturbation ran.
    pub prime_conditions: bool,
    pub passed: bool,
}

impl RationalGapCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `(min_{k<=k_max} |sin(τ' √(k² + q))|, argmin)` in floating point.
    pub fn spot_check(&self, k_max: u64) -> (f64, u64) {
        let r = self.tau_prime_over_pi.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64();
        let mut best = (f64::INFINITY, 0);
        for k in 1..=k_max {
            let kf = k as f64;
            let x = r * (kf * kf + q).sqrt();
            let v = (std::f64::consts::PI * (x - x.round()).abs()).sin();
            if v < best.0 {
                best = (v, k);
            }
        }
        best
    }

    /// Re-checks the certificate with arithmetic independent of the
    /// construction: hits from factor pairs `f1 f2 = cd` rather than a scan
    /// over `k`, exact division for each `x_l`, and both ends of the `π`
    /// enclosure for the distance.
    pub fn verify(&self) -> GapVerification {
        let r = &self.tau_prime_over_pi;
        let within = within_delta(self.tau, r, self.delta);
        let rational_multiple = !r.is_zero();

        let (hits_confirmed, non_integer) = match self.q.as_rational() {
            Some(q) => {
                let mut by_factors = factor_pair_hits(q);
                by_factors.sort_by_key(|h| h.k);
                let ok = by_factors == self.hits;
                let d = q.denom();
                // r √(k²+q) = r x / d
                let checks = by_factors
                    .iter()
                    .map(|h| {
                        let v = r * BigRational::new(h.x.clone(), d.clone());
                        (h.x.to_string(), !v.is_integer())
                    })
                    .collect();
                (ok, checks)
            }
            None => (self.q.is_known_irrational() && self.hits.is_empty(), Vec::new()),
        };

        let prime_conditions = match (self.prime, self.power) {
            (Some(p), Some(n)) => {
                let pn = num_traits::pow(BigInt::from(p), n as usize);
                is_prime(p)
                    && self.hits.iter().all(|h| !h.x.is_multiple_of(&BigInt::from(p)))
                    && !self.base_fraction.numer().is_multiple_of(&pn)
            }
            (None, None) => true,
            _ => false,
        };
        let passed = within
            && rational_multiple
            && hits_confirmed
            && non_integer.iter().all(|(_, ok)| *ok)
            && prime_conditions;
        GapVerification {
            within_delta: within,
            rational_multiple,
            hits_confirmed,
            non_integer,
            prime_conditions,
            passed,
        }
    }
}

/// `max |τ - π r|` over the enclosure of `π`, exactly.
fn distance_exact(tau: f64, r: &BigRational) -> Option<BigRational> {
    let t = BigRational::from_float(tau)?;
    let (lo, hi) = pi_bounds();
    let a = (&t - &lo * r).abs();
    let b = (&t - &hi * r).abs();
    Some(if a > b { a } else { b })
}

/// Rigorous upper bound on `|τ - π r|`, rounded up to `f64`.
fn distance_bound(tau: f64, r: &BigRational) -> Option<f64> {
    let m = distance_exact(tau, r)?;
    let f = m.to_f64()?;
    Some(if BigRational::from_float(f)? >= m { f } else { f.next_up() })
}

fn within_delta(tau: f64, r: &BigRational, delta: f64) -> bool {
    match (distance_exact(tau, r), BigRational::from_float(delta)) {
        (Some(m), Some(d)) => m < d,
        _ => false,
    }
}

/// Fraction of smallest denominator in the open interval `(lo, hi)`;
/// `hi = None` means `+∞`. Requires `0 <= lo < hi`.
fn simplest_between(lo: &BigRational, hi: Option<&BigRational>) -> BigRational {
    let fl = lo.floor();
    let next = &fl + BigRational::one();
    if hi.is_none_or(|h| &next < h) {
        return next;
    }
    let h = hi.expect("finite");
    let inner_lo = (h - &fl).recip();
    let inner_hi = (lo != &fl).then(|| (lo - &fl).recip());
    fl + simplest_between(&inner_lo, inner_hi.as_ref()).recip()
}

/// Smallest-denominator `r > 0` with `π r` certainly inside `(t - h, t + h)`
/// for `t >= 0`.
fn simplest_multiple(t: f64, h: f64) -> Result<BigRational> {
    let (pi_lo, pi_hi) = pi_bounds();
    let t = BigRational::from_float(t).ok_or_else(|| Error::invalid("τ must be finite"))?;
    let h = BigRational::from_float(h).ok_or_else(|| Error::invalid("δ must be finite"))?;
    let left = &t - &h;
    let lo = if left.is_positive() { left / &pi_lo } else { BigRational::zero() };
    let hi = (&t + &h) / &pi_hi;
    if lo >= hi {
        return Err(Error::invalid("δ is below the resolution of the π enclosure"));
    }
    Ok(simplest_between(&lo, Some(&hi)))
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Hits of `k² + c/d` from factorisations `cd = f1 f2`, `f1 < f2` of equal
/// parity: `j = (f1+f2)/2`, `kd = (f2-f1)/2`.
fn factor_pair_hits(q: &BigRational) -> Vec<SquareHit> {
    let d = q.denom();
    let cd = q.numer() * d;
    let mut out = Vec::new();
    if !cd.is_positive() {
        return out;
    }
    let mut f1 = BigInt::one();
    while &f1 * &f1 < cd {
        if cd.is_multiple_of(&f1) {
            let f2 = &cd / &f1;
            let diff = &f2 - &f1;
            if diff.is_even() {
                let kd: BigInt = &diff / 2;
                if kd.is_multiple_of(d) {
                    if let Some(k) = (&kd / d).to_u64() {
                        let x: BigInt = (&f1 + &f2) / 2;
                        out.push(SquareHit {
                            k,
                            root: BigRational::new(x.clone(), d.clone()),
                            x,
                        });
                    }
                }
            }
        }
        f1 += 1;
    }
    out
}

/// Builds a certified rational gap within `δ` of `τ`.
///
/// `q` must be a positive rational or quadratic surd; `q = 0` is rejected
/// because every `√(k²)` is an integer and no `τ' ∈ πℚ` avoids them all.
pub fn construct_rational_gap(tau: f64, delta: f64, q: &ExactReal) -> Result<RationalGapCertificate> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid("δ must be a positive finite number"));
    }
    if !tau.is_finite() {
        return Err(Error::invalid("τ must be finite"));
    }
    match q.sign() {
        Some(std::cmp::Ordering::Greater) => {}
        Some(std::cmp::Ordering::Equal) => {
            return Err(Error::invalid(
                "q = 0 is out of scope: √(k²) = k is an integer for every k, so no rational multiple of π avoids all sine zeros",
            ))
        }
        _ => return Err(Error::invalid("q must be > 0")),
    }
    let sign = if tau < 0.0 { -1 } else { 1 };
    let t = tau.abs();
    let signed = |r: BigRational| if sign < 0 { -r } else { r };

    if q.is_known_irrational() {
        let r = signed(simplest_multiple(t, delta)?);
        return Ok(RationalGapCertificate {
            tau,
            delta,
            q: q.clone(),
            branch: GapBranch::IrrationalQ,
            tau_prime: r.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI,
            distance_bound: distance_bound(tau, &r).unwrap_or(f64::INFINITY),
            base_fraction: r.clone(),
            tau_prime_over_pi: r,
            scale: BigInt::one(),
            reduced_q: None,
            hit_bound: None,
            hits: Vec::new(),
            prime: None,
            power: None,
            argument: "q is irrational: r√(k²+q) = n with r rational, n integer would make q = n²/r² − k² rational".into(),
        });
    }
    let qr = q
        .as_rational()
        .ok_or_else(|| Error::invalid("q must be a rational or a quadratic surd"))?;
    let d = qr.denom().clone();
    let cd = qr.numer() * &d;
    let reduced = !d.is_one();

    // a/b approximates τ/(dπ) to within δ/(2d)
    let dr = BigRational::from_integer(d.clone());
    let d_f = d.to_f64().unwrap_or(f64::INFINITY);
    let base = simplest_multiple(t / d_f, delta / (2.0 * d_f))?;
    let mut hits: Vec<SquareHit> = rational_load_hits(qr)
        .into_iter()
        .map(|(k, root)| SquareHit {
            k,
            x: (&root * &dr).to_integer(),
            root,
        })
        .collect();
    hits.sort_by_key(|h| h.k);
    let hit_bound: BigInt = (&cd - 1) / (2 * &d);

    let (r_unsigned, prime, power, branch, argument) = if hits.is_empty() {
        let branch = if reduced { GapBranch::RationalQReduced } else { GapBranch::IntegerQDirect };
        (
            &base * &dr,
            None,
            None,
            branch,
            format!("k²d²+cd is never a square for k <= {hit_bound}, and never beyond that bound, so every √(k²+q) is irrational"),
        )
    } else {
        let p = (2u64..)
            .filter(|&p| is_prime(p))
            .find(|&p| hits.iter().all(|h| !h.x.is_multiple_of(&BigInt::from(p))))
            .expect("finitely many hits");
        let pb = BigInt::from(p);
        let (a, b) = (base.numer().clone(), base.denom().clone());
        let mut pn = BigInt::one();
        let mut found = None;
        for n in 1..=4096u32 {
            pn *= &pb;
            if a.is_multiple_of(&pn) {
                continue;
            }
            let s = BigRational::new((&pn - 1) * &a, &pn * &b);
            let r = &s * &dr;
            if within_delta(t, &r, delta) {
                found = Some((n, r));
                break;
            }
        }
        let (n, r) = found.ok_or_else(|| Error::invalid("no admissible power found"))?;
        let branch = if reduced { GapBranch::RationalQReduced } else { GapBranch::IntegerQPerturbed };
        (
            r,
            Some(p),
            Some(n),
            branch,
            format!(
                "√(k²+q) is irrational except at the listed k; for those, p^n ∤ (p^n−1)·a·x_l since p = {p} divides no x_l and p^{n} ∤ a"
            ),
        )
    };
    let r = signed(r_unsigned);
    Ok(RationalGapCertificate {
        tau,
        delta,
        q: q.clone(),
        branch,
        tau_prime: r.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI,
        distance_bound: distance_bound(tau, &r).unwrap_or(f64::INFINITY),
        base_fraction: signed(base),
        tau_prime_over_pi: r,
        scale: d,
        reduced_q: reduced.then(|| cd.to_string()),
        hit_bound: Some(hit_bound.to_string()),
        hits,
        prime,
        power,
        argument,
    })
}
