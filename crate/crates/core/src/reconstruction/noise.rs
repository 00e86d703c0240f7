//! Monte-Carlo noise amplification.
//!
//! Both snapshots get independent real Gaussian perturbations of standard
//! deviation `σ` on every coefficient. Reconstruction is linear, so the
//! error in mode `k` is `M_k n_k` with `M_k = D_k B_k T_k^{-1}`, where
//! `B_k (a, b) = (a + b, iω(a - b))` returns to position/velocity
//! coefficients and `D_k = diag(w^s, w^{s-off})` applies the norm weights.
//! Hence the expected squared error is exactly `σ² Σ_k ‖M_k‖_F²`; its square
//! root is the reported prediction. With a certificate floor `c` on the sine
//! scale, `‖T_k^{-1}‖ <= k^α / c` also gives the upper envelope
//! `σ (Σ_k ‖D_k B_k‖_F² k^{2α} / c²)^{1/2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::diophantine::ExactReal;
use crate::observability::{certify_beam, certify_string, mode_map, ModeMap};
use crate::spectral::{evolve, ModalState, ModeIndex, Role, WaveSystem};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, Serialize)]
pub struct NoiseStats {
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub modes: usize,
    pub skipped_singular_modes: Vec<ModeIndex>,
    /// Order `s` of the error norm `D^s × D^{s-off}`.
    pub order: f64,
    pub mean_error: f64,
    pub max_error: f64,
    pub rms_error: f64,
    /// `σ (Σ_k ‖D_k B_k T_k^{-1}‖_F²)^{1/2}`, the exact RMS expectation.
    pub prediction: f64,
    /// `rms_error / prediction`.
    pub ratio: f64,
    /// Upper envelope from the certificate floor (string and beam only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_envelope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_sine_floor: Option<f64>,
}

struct Mode {
    map: ModeMap,
    omega: f64,
    /// `(w^s, w^{s-off})`
    weights: (f64, f64),
}

fn weighted_error(m: &Mode, da: Complex64, db: Complex64) -> f64 {
    let dc = da + db;
    let dd = I * m.omega * (da - db);
    (m.weights.0 * dc.norm()).powi(2) + (m.weights.1 * dd.norm()).powi(2)
}

/// Runs `trials` noisy reconstructions of `state` from `(πξ, 0)`.
pub fn noise_experiment(
    state: &ModalState,
    xi: &ExactReal,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<NoiseStats> {
    if !(sigma >= 0.0) || trials == 0 {
        return Err(Error::invalid("noise experiment needs sigma >= 0 and trials >= 1"));
    }
    let system = state.system;
    let s = state.order;
    let off = system.velocity_offset();
    let t0 = PI * xi.to_f64();
    let u0 = evolve(state, t0);
    let u1 = evolve(state, 0.0);

    let mut modes = Vec::new();
    let mut skipped = Vec::new();
    for (i, idx) in state.truncation.modes().enumerate() {
        let map = mode_map(&system, idx, &[t0, 0.0], &[Role::Position, Role::Position])?
            .with_exact_gap(&system, xi);
        if map.is_singular() {
            skipped.push(idx);
            continue;
        }
        let w = system.weight(idx)?;
        modes.push((
            i,
            Mode {
                omega: map.omega,
                map,
                weights: (w.powf(s), w.powf(s - off)),
            },
        ));
    }

    // exact expectation
    let mut pred_sq = 0.0;
    for (_, m) in &modes {
        let inv = m.map.inverse()?;
        for (da, db) in inv[0].iter().zip(&inv[1]) {
            pred_sq += weighted_error(m, *da, *db);
        }
    }
    let prediction = sigma * pred_sq.sqrt();

    let normal = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut e2 = 0.0;
        for (i, m) in &modes {
            let (n0, n1) = if sigma == 0.0 {
                (0.0, 0.0)
            } else {
                (normal.sample(&mut rng), normal.sample(&mut rng))
            };
            let v = [u0.coefficients[*i] + n0, u1.coefficients[*i] + n1];
            let (a, b, _) = m.map.solve(&v)?;
            e2 += weighted_error(m, a - state.a[*i], b - state.b[*i]);
        }
        errors.push(e2.sqrt());
    }
    let mean_error = errors.iter().sum::<f64>() / trials as f64;
    let max_error = errors.iter().cloned().fold(0.0, f64::max);
    let rms_error = (errors.iter().map(|e| e * e).sum::<f64>() / trials as f64).sqrt();

    let n_max = match state.truncation {
        crate::spectral::Truncation::Line(n) => n as u64,
        crate::spectral::Truncation::Grid(..) => 0,
    };
    let cert = match system {
        WaveSystem::String { q } if q == 0.0 && n_max > 0 => Some((1.0, certify_string(xi, 1.0, n_max)?)),
        WaveSystem::Beam if n_max > 0 => Some((2.0, certify_beam(xi, 2.0, n_max)?)),
        _ => None,
    };
    let (mut envelope, mut exponent, mut floor) = (None, None, None);
    if let Some((alpha, c)) = cert {
        let c_sine = 2.0 * c.observed_lower_bound;
        if c_sine > 0.0 && skipped.is_empty() {
            let mut sum = 0.0;
            for (_, m) in &modes {
                let ModeIndex::Line(k) = m.map.index else { continue };
                // ‖D B‖_F² = 2 (w^{2s} + ω² w^{2(s-off)})
                let db = 2.0 * (m.weights.0.powi(2) + (m.omega * m.weights.1).powi(2));
                sum += db * (k as f64).powf(2.0 * alpha) / (c_sine * c_sine);
            }
            envelope = Some(sigma * sum.sqrt());
            exponent = Some(alpha);
            floor = Some(c_sine);
        }
    }

    Ok(NoiseStats {
        sigma,
        trials,
        seed,
        modes: modes.len(),
        skipped_singular_modes: skipped,
        order: s,
        mean_error,
        max_error,
        rms_error,
        prediction,
        ratio: if prediction > 0.0 { rms_error / prediction } else { 0.0 },
        certificate_envelope: envelope,
        certificate_exponent: exponent,
        certificate_sine_floor: floor,
    })
}
