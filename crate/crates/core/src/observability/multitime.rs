//! Observation at `n >= 2` instants.
//!
//! With `τ_p = (t_1 - t_{p+1})/π`, the data determine the state with loss
//! `1/(n-1)` in the Sobolev order when
//! `k^{1/(n-1)} max_p ‖k τ_p‖` stays bounded away from zero.

use std::cmp::Ordering;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::{DistanceSample, ExactReal};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct MultiTimeFloor {
    pub c_star: f64,
    pub argmin: u64,
    /// `1/(n-1)`, also the order drop `r - s`.
    pub exponent: f64,
    pub lower_bound: f64,
    pub exact: bool,
    pub zero_not_excluded: bool,
    pub k_max: u64,
}

/// Floor for observation times given in units of `π`.
pub fn multi_time_floor(times_over_pi: &[ExactReal], k_max: u64) -> Result<MultiTimeFloor> {
    if times_over_pi.len() < 2 {
        return Err(Error::invalid("multi-time observation needs at least 2 times"));
    }
    for (i, a) in times_over_pi.iter().enumerate() {
        for b in &times_over_pi[i + 1..] {
            let d = a.sub(b);
            if d.is_zero() || (!d.is_exact() && d.sign().is_none()) {
                return Err(Error::invalid(format!("observation times {a} and {b} coincide")));
            }
        }
    }
    let t1 = &times_over_pi[0];
    let taus: Vec<ExactReal> = times_over_pi[1..].iter().map(|t| t1.sub(t)).collect();
    multi_time_floor_taus(&taus, k_max)
}

/// `min_{k<=k_max} k^{1/(n-1)} max_p ‖k τ_p‖` with `n - 1 = taus.len()`.
pub fn multi_time_floor_taus(taus: &[ExactReal], k_max: u64) -> Result<MultiTimeFloor> {
    if taus.is_empty() || k_max == 0 {
        return Err(Error::invalid("need at least one τ and k_max >= 1"));
    }
    let exponent = 1.0 / taus.len() as f64;
    let (value, lower, k, zero) = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let kb = BigInt::from(k);
            let (mut v, mut lo, mut all_zero_possible) = (0.0f64, 0.0f64, true);
            for t in taus {
                let s = DistanceSample::of(&t.mul_int(&kb));
                v = v.max(s.value);
                lo = lo.max(s.lower);
                all_zero_possible &= s.zero_possible;
            }
            let w = (k as f64).powf(exponent);
            (w * v, w * lo, k, all_zero_possible)
        })
        .reduce_with(|a, b| {
            let best = match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal => {
                    if a.2 <= b.2 {
                        a
                    } else {
                        b
                    }
                }
            };
            (best.0, a.1.min(b.1), best.2, a.3 || b.3)
        })
        .expect("nonempty");
    Ok(MultiTimeFloor {
        c_star: value,
        argmin: k,
        exponent,
        lower_bound: lower,
        exact: taus.iter().all(ExactReal::is_exact),
        zero_not_excluded: zero,
        k_max,
    })
}
