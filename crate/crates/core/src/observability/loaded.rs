//! The loaded string `y'' - y_xx + q y = 0`, `ω_k = √(k²+q)`.
//!
//! Two independent routes:
//!
//! - a rational gap together with `sin(ω_k Δ) ≠ 0` for every `k`, decided
//!   exactly through the finitely many `k` with `k² + q` a rational square;
//! - a badly approximable gap with sine-scale floor `c` for the unloaded
//!   string, which survives the load while `q < 2c/|Δ|`, leaving the floor
//!   `c' = c - |Δ| q / 2` because `|sin(ω_k Δ) - sin(kΔ)| <= |Δ| q / (2k)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::certify::{certain_k, certify_string, exact_rational, StrategicCertificate, Verdict};
use crate::diophantine::ExactReal;
use crate::spectral::ModeIndex;
use crate::{Error, Result};

/// Load threshold below which the unloaded floor survives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoadedThreshold {
    /// Sine-scale floor `c` with `k |sin kΔ| >= c`.
    pub base_constant: f64,
    pub delta: f64,
    /// `2c/|Δ|`.
    pub q_max: f64,
    /// `4/(|Δ|(K+2))`, the same threshold with `c = 2/(K+2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined_q_max: Option<f64>,
}

/// `q_max = 2c/|Δ|`, and `4/(|Δ|(K+2))` when `K` is given.
pub fn loaded_q_threshold(c: f64, delta: f64, k: Option<&BigInt>) -> Result<LoadedThreshold> {
    if !(c > 0.0) || delta == 0.0 || !delta.is_finite() {
        return Err(Error::invalid("threshold needs c > 0 and a nonzero finite gap"));
    }
    let d = delta.abs();
    Ok(LoadedThreshold {
        base_constant: c,
        delta,
        q_max: 2.0 * c / d,
        refined_q_max: k.map(|k| 4.0 / (d * (k.to_f64().unwrap_or(f64::INFINITY) + 2.0))),
    })
}

/// `(|Δ| q/(2k), |sin(√(k²+q) Δ) - sin(kΔ)|)`.
pub fn perturbation_gap(k: u64, q: f64, delta: f64) -> Result<(f64, f64)> {
    if k == 0 || !(q >= 0.0) {
        return Err(Error::invalid("perturbation gap needs k >= 1 and q >= 0"));
    }
    let kf = k as f64;
    let bound = delta.abs() * q / (2.0 * kf);
    let measured = (((kf * kf + q).sqrt()) * delta).sin() - (kf * delta).sin();
    Ok((bound, measured.abs()))
}

/// Status of the all-`k` nonvanishing hypothesis on a rational gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisStatus {
    /// Proven for every `k`.
    HoldsAllK,
    /// Some `ω_k Δ ∈ πℤ`.
    Fails,
    /// Numerically nonzero up to `k_max`; no finite argument for all `k`.
    CheckedUpToKMax,
    /// The gap is not rational.
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub status: HypothesisStatus,
    /// `(k, √(k²+q))` for every `k` with a rational root.
    pub perfect_square_hits: Vec<(u64, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_k: Option<u64>,
    pub argument: String,
}

/// Loaded-string part of a certificate.
#[derive(Clone, Debug, Serialize)]
pub struct LoadedSection {
    pub q: ExactReal,
    pub delta: f64,
    pub hypothesis: HypothesisCheck,
    /// `min_k k |sin(ω_k Δ)|` over the scan.
    pub sine_floor: f64,
    pub sine_floor_argmin: u64,
    /// Verdict of the unloaded string at exponent 1.
    pub base_verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<LoadedThreshold>,
    /// `c' = c - |Δ| q / 2` when `q < q_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guaranteed_sine_floor: Option<f64>,
    pub threshold_route_applies: bool,
}

/// Rational `k`-range check: every `k` with `k² + c/d` a rational square
/// satisfies `k d <= (c d - 1)/2` because `j² - (kd)² = cd` forces
/// `j + kd <= cd`.
pub(crate) fn rational_load_hits(q: &BigRational) -> Vec<(u64, BigRational)> {
    let (c, d) = (q.numer(), q.denom());
    let cd = c * d;
    if !cd.is_positive() {
        return Vec::new();
    }
    let bound: BigInt = (&cd - 1) / (2 * d);
    let bound = bound.to_u64().unwrap_or(u64::MAX);
    (1..=bound)
        .into_par_iter()
        .filter_map(|k| {
            let kd = BigInt::from(k) * d;
            let v = &kd * &kd + &cd;
            let j = v.sqrt();
            (&j * &j == v).then(|| (k, BigRational::new(j, d.clone())))
        })
        .collect()
}

fn hypothesis_check(xi: &ExactReal, q: &ExactReal, k_max: u64, sine_floor: f64, argmin: u64) -> HypothesisCheck {
    let na = |argument: &str| HypothesisCheck {
        status: HypothesisStatus::NotApplicable,
        perfect_square_hits: Vec::new(),
        failing_k: None,
        argument: argument.into(),
    };
    let Some(x) = exact_rational(xi) else {
        return na("gap over π is not an exact rational");
    };
    if x.is_zero() {
        return HypothesisCheck {
            status: HypothesisStatus::Fails,
            perfect_square_hits: Vec::new(),
            failing_k: Some(1),
            argument: "zero gap".into(),
        };
    }
    match q {
        ExactReal::Rational(qr) => {
            let hits = rational_load_hits(qr);
            let failing = hits
                .iter()
                .find(|(_, w)| (w * &x).is_integer())
                .map(|(k, _)| *k);
            HypothesisCheck {
                status: if failing.is_some() {
                    HypothesisStatus::Fails
                } else {
                    HypothesisStatus::HoldsAllK
                },
                perfect_square_hits: hits
                    .iter()
                    .map(|(k, w)| {
                        let s = if w.denom() == &BigInt::from(1) {
                            w.numer().to_string()
                        } else {
                            format!("{}/{}", w.numer(), w.denom())
                        };
                        (*k, s)
                    })
                    .collect(),
                failing_k: failing,
                argument: "ω_k is irrational off the listed k, so ω_k·(gap/π) is not an integer there"
                    .into(),
            }
        }
        ExactReal::Quadratic(_) => HypothesisCheck {
            status: HypothesisStatus::HoldsAllK,
            perfect_square_hits: Vec::new(),
            failing_k: None,
            argument: "k²+q is irrational for every k, hence so is ω_k and ω_k·(gap/π)".into(),
        },
        ExactReal::Float(_) => HypothesisCheck {
            status: if sine_floor > 0.0 {
                HypothesisStatus::CheckedUpToKMax
            } else {
                HypothesisStatus::Fails
            },
            perfect_square_hits: Vec::new(),
            failing_k: (sine_floor == 0.0).then_some(argmin),
            argument: format!("enclosed load: sines checked numerically for k <= {k_max}"),
        },
    }
}

/// `(min_k k‖ω_k ξ‖, min_k k |sin(ω_k Δ)|, argmin)` with `Δ = πξ`, using
/// `|sin πx| = sin(π‖x‖)`.
pub(crate) fn sine_scan(xi: f64, q: f64, k_max: u64) -> (f64, f64, u64) {
    let (s, k) = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            let x = (kf * kf + q).sqrt() * xi;
            let d = (x - x.round()).abs();
            (kf * (PI * d).sin(), k)
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("nonempty");
    let kf = k as f64;
    let x = (kf * kf + q).sqrt() * xi;
    (kf * (x - x.round()).abs(), s, k)
}

/// Certificate for the loaded string with gap `Δ = πξ`.
pub fn certify_loaded(xi: &ExactReal, q: &ExactReal, k_max: u64) -> Result<StrategicCertificate> {
    if q.sign() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::invalid("the load q must be > 0"));
    }
    let (xf, qf) = (xi.to_f64(), q.to_f64());
    let delta = PI * xf;
    let (nearest_floor, sine_floor, argmin) = sine_scan(xf, qf, k_max);
    let hypothesis = hypothesis_check(xi, q, k_max, sine_floor, argmin);

    let base = certify_string(xi, 1.0, k_max)?;
    let mut section = LoadedSection {
        q: q.clone(),
        delta,
        hypothesis,
        sine_floor,
        sine_floor_argmin: argmin,
        base_verdict: base.verdict,
        threshold: None,
        guaranteed_sine_floor: None,
        threshold_route_applies: false,
    };

    let mut cert = base.clone();
    cert.system = "loaded-string".into();
    cert.observed_floor = nearest_floor;
    cert.observed_lower_bound = nearest_floor;
    cert.argmin = ModeIndex::Line(argmin);
    cert.exact_arithmetic = false;
    cert.dirichlet_witnesses.clear();
    cert.notes = vec!["load scan uses double precision".into()];

    let c = base.sine_scale_floor;
    if matches!(base.verdict, Verdict::CertifiedAllK | Verdict::CertifiedUpToScan) && c > 0.0 && delta != 0.0 {
        let k = if base.verdict == Verdict::CertifiedAllK { certain_k(xi) } else { None };
        let th = loaded_q_threshold(c, delta, k.as_ref())?;
        if qf < th.q_max {
            let cp = c - delta.abs() * qf / 2.0;
            section.guaranteed_sine_floor = Some(cp);
            section.threshold_route_applies = true;
        }
        section.threshold = Some(th);
    }

    cert.verdict = if section.threshold_route_applies && base.verdict == Verdict::CertifiedAllK {
        Verdict::CertifiedAllK
    } else if section.hypothesis.status == HypothesisStatus::Fails {
        cert.argmin = ModeIndex::Line(section.hypothesis.failing_k.unwrap_or(argmin));
        Verdict::Refuted
    } else if !(xi.is_exact() && q.is_exact()) && sine_floor <= 1e-12 {
        Verdict::InconclusiveFloat
    } else {
        Verdict::CertifiedUpToScan
    };
    match (cert.verdict, section.guaranteed_sine_floor) {
        (Verdict::CertifiedAllK, Some(cp)) => {
            cert.sine_scale_floor = cp;
            cert.guaranteed_floor = cp / PI;
        }
        (Verdict::Refuted, _) => {
            cert.sine_scale_floor = 0.0;
            cert.guaranteed_floor = 0.0;
        }
        _ => {
            cert.sine_scale_floor = sine_floor;
            cert.guaranteed_floor = nearest_floor;
        }
    }
    if !section.threshold_route_applies {
        cert.notes.push("threshold route inconclusive: q is not below q_max".into());
    }
    cert.loaded = Some(section);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn threshold_examples() {
        let d = PI * (5f64.sqrt() - 1.0) / 2.0;
        let t = loaded_q_threshold(2.0 / 3.0, d, Some(&BigInt::from(1))).unwrap();
        assert!((t.q_max - 0.6867).abs() < 1e-3);
        assert_relative_eq!(t.q_max, t.refined_q_max.unwrap(), max_relative = 1e-15);
        assert_eq!(loaded_q_threshold(1.0, 2.0, None).unwrap().q_max, 1.0);
        assert!(loaded_q_threshold(0.0, 1.0, None).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let (b, m) = perturbation_gap(10, 1.0, 1.0).unwrap();
        assert_eq!(b, 0.05);
        assert!((m - 0.041_155_358_204_083_86).abs() < 1e-14, "{m}");
        assert_eq!(perturbation_gap(3, 0.0, 1.0).unwrap(), (0.0, 0.0));
        let (b, m) = perturbation_gap(1, 5.0, 0.5).unwrap();
        assert_eq!(b, 1.25);
        assert!(m <= b);
    }

    #[test]
    fn golden_small_load_is_certified() {
        let q = ExactReal::ratio(1, 10).unwrap();
        let c = certify_loaded(&ExactReal::golden_fraction(), &q, 10_000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedAllK);
        let s = c.loaded.as_ref().unwrap();
        let cp = s.guaranteed_sine_floor.unwrap();
        assert!((cp - 0.570).abs() < 1e-3, "{cp}");
        assert!(s.sine_floor >= cp - 1e-9);
        assert_eq!(s.hypothesis.status, HypothesisStatus::NotApplicable);
    }

    #[test]
    fn golden_large_load_is_scan_only() {
        let c = certify_loaded(&ExactReal::golden_fraction(), &ExactReal::integer(1), 1000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedUpToScan);
        assert!(!c.loaded.unwrap().threshold_route_applies);
    }

    #[test]
    fn rational_gap_hypothesis() {
        let c = certify_loaded(&ExactReal::ratio(1, 2).unwrap(), &ExactReal::integer(5), 1000).unwrap();
        let h = &c.loaded.as_ref().unwrap().hypothesis;
        assert_eq!(h.status, HypothesisStatus::HoldsAllK);
        assert_eq!(h.perfect_square_hits, vec![(2, "3".to_string())]);
        assert_eq!(c.verdict, Verdict::CertifiedUpToScan);

        // ξ = 1/3, q = 5: ω_2 = 3 gives sin(π) = 0
        let c = certify_loaded(&ExactReal::ratio(1, 3).unwrap(), &ExactReal::integer(5), 100).unwrap();
        assert_eq!((c.verdict, c.argmin), (Verdict::Refuted, ModeIndex::Line(2)));

        // q = 7/2: k²·4 + 14 = j² has no solutions below the bound
        let c = certify_loaded(&ExactReal::ratio(1, 2).unwrap(), &ExactReal::ratio(7, 2).unwrap(), 100)
            .unwrap();
        assert_eq!(c.loaded.unwrap().hypothesis.status, HypothesisStatus::HoldsAllK);
        assert!(certify_loaded(&ExactReal::ratio(1, 2).unwrap(), &ExactReal::integer(0), 10).is_err());
    }

    #[test]
    fn hits_enumeration() {
        let hits = rational_load_hits(&BigRational::from_integer(BigInt::from(15)));
        // k² + 15 = j²: (j-k)(j+k) = 15 → k = 1 (j = 4), k = 7 (j = 8)
        let ks: Vec<u64> = hits.iter().map(|h| h.0).collect();
        assert_eq!(ks, vec![1, 7]);
    }
}
