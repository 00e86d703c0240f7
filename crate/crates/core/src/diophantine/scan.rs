//! Nearest-integer-distance scans over index ranges.
//!
//! Every scan reports its minimiser. Ranges are split across rayon workers
//! and combined by a min-reduction that breaks ties on the smallest index,
//! so results do not depend on the thread count.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::cf::{cf_expand, convergents};
use super::exact::ExactReal;
use crate::{Error, Result};

/// `‖x‖`, exact for rationals and surds, an enclosure otherwise.
pub fn nearest_int_distance(x: &ExactReal) -> ExactReal {
    x.nearest_int_distance()
}

/// A distance evaluated at one index.
#[derive(Clone, Debug)]
pub struct DistanceSample {
    /// Best double-precision value (enclosure midpoint for floats).
    pub value: f64,
    /// Rigorous lower bound (equal to `value` up to rounding for exact inputs).
    pub lower: f64,
    /// The distance is exactly zero.
    pub exact_zero: bool,
    /// An enclosure contains zero, so a zero cannot be excluded.
    pub zero_possible: bool,
}

impl DistanceSample {
    pub fn of(x: &ExactReal) -> Self {
        let d = x.nearest_int_distance();
        match &d {
            ExactReal::Float(e) => {
                let exact_zero = e.is_point() && e.lo_scaled().sign() == num_bigint::Sign::NoSign;
                Self {
                    value: e.mid_f64(),
                    lower: e.lo_f64().max(0.0),
                    exact_zero,
                    zero_possible: e.contains_zero(),
                }
            }
            exact => {
                let z = exact.is_zero();
                let v = exact.to_f64();
                Self {
                    value: v,
                    lower: v,
                    exact_zero: z,
                    zero_possible: z,
                }
            }
        }
    }
}

/// Result of a one-dimensional floor scan `min_k w(k) · ‖m(k) ξ‖`.
#[derive(Clone, Debug, Serialize)]
pub struct FloorScan {
    pub c_star: f64,
    pub argmin: u64,
    /// Rigorous lower bound on the minimum over the scanned range.
    pub lower_bound: f64,
    /// Distances were computed with exact arithmetic.
    pub exact: bool,
    /// Some scanned distance is exactly zero (the first one is `argmin`).
    pub exact_zero: bool,
    /// Some enclosure could not exclude a zero distance.
    pub zero_not_excluded: bool,
    pub k_max: u64,
    pub exponent: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    lower: f64,
    index: u64,
    exact_zero: bool,
    zero_possible: bool,
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    match a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            if a.index <= b.index {
                a
            } else {
                b
            }
        }
    }
}

/// `min_{1<=k<=k_max} k^α ‖multiplier(k) · ξ‖`.
pub(crate) fn scan_with_multiplier<F>(
    xi: &ExactReal,
    alpha: f64,
    k_max: u64,
    multiplier: F,
) -> Result<FloorScan>
where
    F: Fn(u64) -> BigInt + Sync,
{
    if k_max == 0 {
        return Err(Error::invalid("scan bound must be at least 1"));
    }
    let (best, lower, any_zero_possible) = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let s = DistanceSample::of(&xi.mul_int(&multiplier(k)));
            let w = (k as f64).powf(alpha);
            let c = Candidate {
                value: w * s.value,
                lower: w * s.lower,
                index: k,
                exact_zero: s.exact_zero,
                zero_possible: s.zero_possible,
            };
            (c, c.lower, c.zero_possible)
        })
        .reduce_with(|(a, la, za), (b, lb, zb)| (better(a, b), la.min(lb), za || zb))
        .expect("nonempty range");
    Ok(FloorScan {
        c_star: best.value,
        argmin: best.index,
        lower_bound: lower,
        exact: xi.is_exact(),
        exact_zero: best.exact_zero,
        zero_not_excluded: any_zero_possible,
        k_max,
        exponent: alpha,
    })
}

/// `c* = min_{1<=k<=k_max} k^α ‖kξ‖` with its minimiser.
///
/// Distances are exact for rational and quadratic `ξ` and enclosed
/// otherwise; the weight `k^α` and the comparison use double precision.
pub fn badly_approx_floor(xi: &ExactReal, alpha: f64, k_max: u64) -> Result<FloorScan> {
    scan_with_multiplier(xi, alpha, k_max, BigInt::from)
}

/// Per-index rows `(k, ‖m(k)ξ‖, k^α ‖m(k)ξ‖)` for plotting.
pub fn floor_profile<F>(xi: &ExactReal, alpha: f64, k_max: u64, multiplier: F) -> Vec<(u64, f64, f64)>
where
    F: Fn(u64) -> BigInt + Sync,
{
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let d = DistanceSample::of(&xi.mul_int(&multiplier(k))).value;
            (k, d, (k as f64).powf(alpha) * d)
        })
        .collect()
}

/// `1/(K+2)`: for `k >= 1`, `k ‖kξ‖ >= 1/(K(ξ)+2)`.
pub fn theoretical_floor_from_k(k: &BigInt) -> Result<BigRational> {
    if k < &BigInt::one() {
        return Err(Error::invalid("largest partial quotient must be at least 1"));
    }
    Ok(BigRational::new(BigInt::one(), k + 2))
}

/// `count` distinct convergent denominators `k` with `‖kξ‖ < 1/k`, each
/// verified by exact comparison (or by enclosure for floats).
pub fn dirichlet_witnesses(xi: &ExactReal, count: usize) -> Result<Vec<BigInt>> {
    if xi.is_rational() {
        return Err(Error::RationalArgument("dirichlet_witnesses"));
    }
    let cf = cf_expand(xi, 4 * count + 64)?;
    let available = cf.available().unwrap_or(usize::MAX);
    let mut out: Vec<BigInt> = Vec::with_capacity(count);
    let mut n = 0;
    while out.len() < count && n < available {
        let c = convergents(&cf, n + 1)?.pop().expect("one convergent");
        n += 1;
        if out.last() == Some(&c.q) {
            continue;
        }
        let lhs = xi.mul_int(&c.q).nearest_int_distance().mul_int(&c.q);
        if lhs.cmp_exact(&ExactReal::integer(1)) == Some(Ordering::Less) {
            out.push(c.q);
        }
    }
    if out.len() < count {
        return Err(Error::NotFound(format!(
            "only {} verified witnesses within the trusted expansion",
            out.len()
        )));
    }
    Ok(out)
}

/// Convergent-based estimate of `ν(ξ) = liminf k‖kξ‖`.
#[derive(Clone, Debug, Serialize)]
pub struct NuEstimate {
    /// Minimum over the trailing window.
    pub estimate: f64,
    pub window_max: f64,
    pub window_len: usize,
    /// `q_n ‖q_n ξ‖` for each distinct convergent denominator.
    pub values: Vec<f64>,
    /// Difference between this window minimum and the one a window earlier;
    /// small magnitude means the estimate has settled.
    pub drift: f64,
}

/// Estimates `ν(ξ)` from the first `depth` convergent denominators.
pub fn nu_liminf_estimate(xi: &ExactReal, depth: usize) -> Result<NuEstimate> {
    if xi.is_rational() {
        return Err(Error::RationalArgument("nu_liminf_estimate"));
    }
    if depth < 4 {
        return Err(Error::invalid("nu estimate needs depth >= 4"));
    }
    let cf = cf_expand(xi, depth)?;
    let n = cf.available().map_or(depth, |a| a.min(depth));
    let mut values = Vec::with_capacity(n);
    let mut last_q = BigInt::from(0);
    for c in convergents(&cf, n)? {
        if c.q == last_q {
            continue;
        }
        let s = DistanceSample::of(&xi.mul_int(&c.q));
        values.push(c.q.to_f64().unwrap_or(f64::INFINITY) * s.value);
        last_q = c.q;
    }
    if values.len() < 4 {
        return Err(Error::invalid("too few trusted convergents for a nu estimate"));
    }
    let window_len = (values.len() / 4).max(2);
    let tail = &values[values.len() - window_len..];
    let prev = &values[values.len() - 2 * window_len.min(values.len() / 2)..values.len() - window_len];
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let estimate = min(tail);
    let window_max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let drift = if prev.is_empty() { 0.0 } else { estimate - min(prev) };
    Ok(NuEstimate {
        estimate,
        window_max,
        window_len,
        values,
        drift,
    })
}

/// Result of the two-variable scan.
#[derive(Clone, Debug, Serialize)]
pub struct LinearFormScan {
    pub c_star: f64,
    pub argmin: (u64, u64),
    pub lower_bound: f64,
    pub exact: bool,
    pub exact_zero: bool,
    pub zero_not_excluded: bool,
    /// Grid of the enclosures used when not exact.
    pub precision_bits: Option<u32>,
    pub m_max: u64,
    pub n_max: u64,
    pub exponent: f64,
}

/// `min (m²+n²)^β ‖m² x1 + n² x2‖` over `1 <= m <= m_max`, `1 <= n <= n_max`.
pub fn linear_form_floor(
    x1: &ExactReal,
    x2: &ExactReal,
    beta: f64,
    m_max: u64,
    n_max: u64,
) -> Result<LinearFormScan> {
    let probe = x1.add(x2);
    let mut out = box_scan(m_max, n_max, beta, |m, n| {
        x1.mul_int(&BigInt::from(m * m))
            .add(&x2.mul_int(&BigInt::from(n * n)))
    })?;
    out.exact = probe.is_exact();
    out.precision_bits = probe.precision_bits();
    Ok(out)
}

/// `min (m²+n²)^β ‖value(m, n)‖` over the box, with the same reporting as
/// [`linear_form_floor`]. `exact` and `precision_bits` are left for the
/// caller to fill in.
pub(crate) fn box_scan<F>(m_max: u64, n_max: u64, beta: f64, value: F) -> Result<LinearFormScan>
where
    F: Fn(u64, u64) -> ExactReal + Sync,
{
    if m_max == 0 || n_max == 0 {
        return Err(Error::invalid("box bounds must be at least 1"));
    }
    let (best, lower, zp) = (0..m_max * n_max)
        .into_par_iter()
        .map(|i| {
            let (m, n) = (i / n_max + 1, i % n_max + 1);
            let s = DistanceSample::of(&value(m, n));
            let w = ((m * m + n * n) as f64).powf(beta);
            let c = Candidate {
                value: w * s.value,
                lower: w * s.lower,
                index: i,
                exact_zero: s.exact_zero,
                zero_possible: s.zero_possible,
            };
            (c, c.lower, c.zero_possible)
        })
        .reduce_with(|(a, la, za), (b, lb, zb)| (better(a, b), la.min(lb), za || zb))
        .expect("nonempty box");
    Ok(LinearFormScan {
        c_star: best.value,
        argmin: (best.index / n_max + 1, best.index % n_max + 1),
        lower_bound: lower,
        exact: false,
        exact_zero: best.exact_zero,
        zero_not_excluded: zp,
        precision_bits: None,
        m_max,
        n_max,
        exponent: beta,
    })
}
