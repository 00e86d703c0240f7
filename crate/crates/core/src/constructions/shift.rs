//! The shift `ξ ↦ ξ/(1 + ξ)` and the search for a loaded-string gap.
//!
//! For `ξ = [0; a1, a2, ...]` the shifted value is `[0; 1 + a1, a2, ...]`:
//! the tail of the expansion, hence `ν(ξ) = liminf k‖kξ‖`, is unchanged while
//! the value tends to zero. A small enough gap `πξ_n` makes
//! `2ν - ξ_n π q / 2` positive.

use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::Serialize;

use crate::diophantine::{cf_expand, nu_liminf_estimate, ExactReal};
use crate::observability::sine_scan;
use crate::{Error, Result};

/// Multiplier applied to the finite-depth `ν` estimate.
pub const NU_SAFETY_FACTOR: f64 = 0.9;

/// Convergent depth of the `ν` estimate in [`loaded_gap_search`].
pub const NU_DEPTH: usize = 32;

/// Numerical threshold for `min_k k |sin(ω_k πξ_n)|` to count as nonzero.
pub const SINE_TOLERANCE: f64 = 1e-9;

/// `ξ_0 = ξ, ..., ξ_{n_max}` with `ξ_{n+1} = ξ_n/(1 + ξ_n)`.
pub fn cf_shift_sequence(xi: &ExactReal, n_max: usize) -> Result<Vec<ExactReal>> {
    if xi.is_rational() {
        return Err(Error::RationalArgument("cf_shift_sequence"));
    }
    let in_unit = xi.sign() == Some(std::cmp::Ordering::Greater)
        && xi.cmp_exact(&ExactReal::integer(1)) == Some(std::cmp::Ordering::Less);
    if !in_unit {
        return Err(Error::invalid(format!("ξ = {xi} must lie in (0, 1)")));
    }
    let one = ExactReal::integer(1);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(xi.clone());
    for _ in 0..n_max {
        let last = out.last().expect("nonempty");
        out.push(last.div(&one.add(last))?);
    }
    Ok(out)
}

/// Checks that the first `depth` terms of `ξ_n` are those of `ξ` with `a1`
/// replaced by `n + a1`. Returns `false` on any mismatch; for enclosures
/// only the certified terms are compared.
pub fn cf_shift_identity(xi: &ExactReal, xi_n: &ExactReal, n: usize, depth: usize) -> Result<bool> {
    let base = cf_expand(xi, depth)?.prefix(depth);
    let shifted = cf_expand(xi_n, depth)?.prefix(depth);
    let len = base.len().min(shifted.len());
    if len < 2 {
        return Ok(false);
    }
    let mut expected = base;
    expected[1] += BigInt::from(n);
    Ok(expected[..len] == shifted[..len])
}

#[derive(Clone, Debug, Serialize)]
pub struct LoadedGapSearch {
    pub q: f64,
    pub xi: ExactReal,
    pub nu_estimate: f64,
    pub safety_factor: f64,
    /// `safety_factor · nu_estimate`.
    pub nu: f64,
    pub n: usize,
    pub xi_n: ExactReal,
    /// `Δ = πξ_n`.
    pub gap: f64,
    /// `2ν - ξ_n π q / 2`.
    pub margin: f64,
    /// `min_{k<=k_max} k |sin(ω_k Δ)|`.
    pub sine_floor: f64,
    pub sine_argmin: u64,
    pub k_max: u64,
    /// Shifts that met the margin but failed the numerical sine check.
    pub rejected: Vec<usize>,
}

/// Smallest `n <= n_max` with `2ν(ξ) - ξ_n π q / 2 > 0` whose gap keeps
/// every `sin(√(k² + q) πξ_n)`, `k <= k_max`, numerically away from zero.
pub fn loaded_gap_search(q: f64, xi: &ExactReal, n_max: usize, k_max: u64) -> Result<LoadedGapSearch> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::invalid("the load q must be a positive finite number"));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max must be >= 1"));
    }
    let est = nu_liminf_estimate(xi, NU_DEPTH)?;
    let nu = NU_SAFETY_FACTOR * est.estimate;
    if !(nu > 0.0) {
        return Err(Error::invalid(format!("ξ = {xi} has no positive ν estimate")));
    }
    let seq = cf_shift_sequence(xi, n_max)?;
    let mut rejected = Vec::new();
    for (n, xi_n) in seq.into_iter().enumerate() {
        let x = xi_n.to_f64();
        let margin = 2.0 * nu - x * PI * q / 2.0;
        if margin <= 0.0 {
            continue;
        }
        let (_, sine_floor, sine_argmin) = sine_scan(x, q, k_max);
        if sine_floor <= SINE_TOLERANCE {
            rejected.push(n);
            continue;
        }
        return Ok(LoadedGapSearch {
            q,
            xi: xi.clone(),
            nu_estimate: est.estimate,
            safety_factor: NU_SAFETY_FACTOR,
            nu,
            n,
            xi_n,
            gap: PI * x,
            margin,
            sine_floor,
            sine_argmin,
            k_max,
            rejected,
        });
    }
    Err(Error::NotFound(format!(
        "no shift n <= {n_max} of ξ = {xi} satisfies 2ν − ξ_n·π·q/2 > 0 for q = {q}"
    )))
}
