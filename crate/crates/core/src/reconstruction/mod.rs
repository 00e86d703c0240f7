//! Recovery of initial data from snapshots, one mode at a time.

mod noise;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::ExactReal;
use crate::observability::{certify_beam, certify_string, mode_map, ModeMap};
use crate::spectral::{
    from_modal, sobolev_norm, CoefficientVector, ModalState, ModeIndex, Role, Snapshot, Truncation,
    WaveSystem,
};
use crate::{Error, Result};

pub use noise::{noise_experiment, NoiseStats};

/// Snapshots of one system on a common truncation.
#[derive(Clone, Debug)]
pub struct SnapshotSet {
    pub system: WaveSystem,
    pub truncation: Truncation,
    pub snapshots: Vec<CoefficientVector>,
    /// Exact `(t_0 - t_1)/π` for the first two snapshots, if known.
    pub gap_over_pi: Option<ExactReal>,
}

impl SnapshotSet {
    pub fn new(snapshots: Vec<CoefficientVector>) -> Result<Self> {
        let first = snapshots
            .first()
            .ok_or_else(|| Error::invalid("no snapshots"))?;
        if snapshots.len() < 2 {
            return Err(Error::invalid("reconstruction needs at least 2 snapshots"));
        }
        if snapshots
            .iter()
            .any(|s| s.system != first.system || s.truncation != first.truncation)
        {
            return Err(Error::Inconsistent(
                "snapshots differ in system or truncation".into(),
            ));
        }
        Ok(Self {
            system: first.system,
            truncation: first.truncation,
            snapshots,
            gap_over_pi: None,
        })
    }

    /// From snapshot files; the first attached gap is used.
    pub fn from_snapshots(files: Vec<Snapshot>) -> Result<Self> {
        let gap = files.iter().find_map(|s| s.gap_over_pi.clone());
        let mut set = Self::new(files.into_iter().map(|s| s.vector).collect())?;
        set.gap_over_pi = gap;
        Ok(set)
    }

    pub fn with_gap(mut self, xi: ExactReal) -> Self {
        self.gap_over_pi = Some(xi);
        self
    }

    fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    fn roles(&self) -> Vec<Role> {
        self.snapshots.iter().map(|s| s.role).collect()
    }

    fn map_for(&self, idx: ModeIndex) -> Result<ModeMap> {
        let m = mode_map(&self.system, idx, &self.times(), &self.roles())?;
        Ok(match &self.gap_over_pi {
            Some(xi) if self.snapshots.len() == 2 => m.with_exact_gap(&self.system, xi),
            _ => m,
        })
    }
}

/// Per-mode outcome.
#[derive(Clone, Debug, Serialize)]
pub struct ModeReport {
    pub index: ModeIndex,
    /// `|det T|`, or `√det(TᴴT)` for more than two rows.
    pub abs_det: f64,
    /// `‖T‖·‖T^{-1}‖`; absent for singular modes.
    pub condition: Option<f64>,
    pub inverse_norm: Option<f64>,
    pub residual: f64,
    #[serde(serialize_with = "ser_complex")]
    pub a: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub b: Complex64,
    pub singular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_reason: Option<String>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Result of a reconstruction.
#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub state: ModalState,
    pub y0: CoefficientVector,
    pub y1: CoefficientVector,
    pub modes: Vec<ModeReport>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    system: &'a WaveSystem,
    modes_total: usize,
    singular_modes: Vec<ModeIndex>,
    worst_mode: Option<ModeIndex>,
    worst_condition: Option<f64>,
    max_residual: f64,
    modes: &'a [ModeReport],
}

impl ReconstructionReport {
    pub fn singular_modes(&self) -> Vec<ModeIndex> {
        self.modes.iter().filter(|m| m.singular).map(|m| m.index).collect()
    }

    /// Mode with the largest condition number.
    pub fn worst_mode(&self) -> Option<(ModeIndex, f64)> {
        self.modes
            .iter()
            .filter_map(|m| m.condition.map(|c| (m.index, c)))
            .fold(None, |acc, (i, c)| match acc {
                Some((_, best)) if best >= c => acc,
                _ => Some((i, c)),
            })
    }

    pub fn max_residual(&self) -> f64 {
        self.modes.iter().map(|m| m.residual).fold(0.0, f64::max)
    }

    /// The error for the first singular mode, if any.
    pub fn singular_error(&self) -> Option<Error> {
        self.modes.iter().find(|m| m.singular).map(|m| Error::SingularMode {
            index: m.index.to_string(),
            phase: m.singular_reason.clone().unwrap_or_default(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let worst = self.worst_mode();
        let j = ReportJson {
            system: &self.state.system,
            modes_total: self.modes.len(),
            singular_modes: self.singular_modes(),
            worst_mode: worst.map(|w| w.0),
            worst_condition: worst.map(|w| w.1),
            max_residual: self.max_residual(),
            modes: &self.modes,
        };
        Ok(serde_json::to_string_pretty(&j)? + "\n")
    }

    /// Per-mode table `k, abs_det, cond, err_a, err_b`. Errors are measured
    /// against `truth` and left empty without one; singular modes have an
    /// empty `cond`. Plate modes are labelled `m:n`.
    pub fn to_csv(&self, truth: Option<&ModalState>) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "abs_det", "cond", "err_a", "err_b"])?;
        for (i, m) in self.modes.iter().enumerate() {
            let label = match m.index {
                ModeIndex::Line(k) => k.to_string(),
                ModeIndex::Grid(a, b) => format!("{a}:{b}"),
            };
            let cond = m.condition.map(|c| format!("{c:e}")).unwrap_or_default();
            let (ea, eb) = match truth {
                Some(t) => (
                    format!("{:e}", (m.a - t.a[i]).norm()),
                    format!("{:e}", (m.b - t.b[i]).norm()),
                ),
                None => (String::new(), String::new()),
            };
            w.write_record([label, format!("{:e}", m.abs_det), cond, ea, eb])?;
        }
        csv_string(w)
    }

    /// Recovered amplitudes `k, re_a, im_a, re_b, im_b`.
    pub fn modes_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "re_a", "im_a", "re_b", "im_b"])?;
        for m in &self.modes {
            w.write_record([
                m.index.to_string(),
                format!("{:e}", m.a.re),
                format!("{:e}", m.a.im),
                format!("{:e}", m.b.re),
                format!("{:e}", m.b.im),
            ])?;
        }
        csv_string(w)
    }
}

pub(crate) fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Solves every mode; singular modes are skipped (left at zero) and flagged.
/// Exactly two snapshots use the closed-form inverse, more use least squares.
pub fn reconstruct(set: &SnapshotSet) -> Result<ReconstructionReport> {
    let n = set.truncation.len();
    let modes: Vec<ModeReport> = (0..n)
        .into_par_iter()
        .map(|i| {
            let idx = set.truncation.index(i);
            let map = set.map_for(idx)?;
            let values: Vec<Complex64> = set.snapshots.iter().map(|s| s.coefficients[i]).collect();
            let abs_det = if map.is_square() {
                map.closed_form_det()?.norm()
            } else {
                let (smax, smin) = crate::observability::singular_values(&map.rows, None);
                smax * smin
            };
            Ok(match map.solve(&values) {
                Ok((a, b, residual)) => {
                    let inv = map.inverse_norm()?;
                    ModeReport {
                        index: idx,
                        abs_det,
                        condition: Some(map.norm() * inv),
                        inverse_norm: Some(inv),
                        residual,
                        a,
                        b,
                        singular: false,
                        singular_reason: None,
                    }
                }
                Err(Error::SingularMode { phase, .. }) => ModeReport {
                    index: idx,
                    abs_det,
                    condition: None,
                    inverse_norm: None,
                    residual: 0.0,
                    a: Complex64::new(0.0, 0.0),
                    b: Complex64::new(0.0, 0.0),
                    singular: true,
                    singular_reason: Some(phase),
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_>>()?;
    let state = ModalState::new(
        set.system,
        0.0,
        set.truncation,
        modes.iter().map(|m| m.a).collect(),
        modes.iter().map(|m| m.b).collect(),
    )?;
    let (y0, y1) = from_modal(&state);
    Ok(ReconstructionReport {
        state,
        y0,
        y1,
        modes,
    })
}

/// [`reconstruct`] for sets with at least one velocity snapshot.
pub fn mixed_reconstruct(set: &SnapshotSet) -> Result<ReconstructionReport> {
    if !set.snapshots.iter().any(|s| s.role == Role::Velocity) {
        return Err(Error::invalid("mixed reconstruction needs a velocity snapshot"));
    }
    reconstruct(set)
}

/// Relative error of `recovered` against `truth` in `D^s × D^{s-off}`.
pub fn relative_data_error(truth: &ModalState, recovered: &ModalState, s: f64) -> f64 {
    let diff = ModalState {
        a: truth.a.iter().zip(&recovered.a).map(|(x, y)| x - y).collect(),
        b: truth.b.iter().zip(&recovered.b).map(|(x, y)| x - y).collect(),
        ..truth.clone()
    };
    let norm = |st: &ModalState| {
        let (y0, y1) = from_modal(st);
        (sobolev_norm(&y0, s).powi(2)
            + sobolev_norm(&y1, s - st.system.velocity_offset()).powi(2))
        .sqrt()
    };
    let base = norm(truth);
    if base == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / base
    }
}

/// One row of a sensitivity profile.
#[derive(Clone, Debug, Serialize)]
pub struct SensitivityRow {
    pub index: ModeIndex,
    /// `‖T^{-1}‖`, infinite for resonant modes.
    pub inverse_norm: f64,
    /// `k^α / c` with `c` the certificate's sine-scale floor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

/// `‖T_k^{-1}‖` for the position/position pair `(t0, t1) = (πξ, 0)` over
/// the first `n` modes (`n × n` for the plate), with the bound
/// `k^α / (2 c*)` from a string or beam certificate scanned up to `n`.
pub fn sensitivity_profile(xi: &ExactReal, system: &WaveSystem, alpha: f64, n: usize) -> Result<Vec<SensitivityRow>> {
    let cert = match system {
        WaveSystem::String { q } if *q == 0.0 => Some(certify_string(xi, alpha, n as u64)?),
        WaveSystem::Beam => Some(certify_beam(xi, alpha, n as u64)?),
        _ => None,
    };
    let c = cert.map(|c| 2.0 * c.observed_lower_bound).filter(|&c| c > 0.0);
    let t0 = PI * xi.to_f64();
    let truncation = Truncation::for_system(system, n);
    truncation
        .modes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|idx| {
            let map = mode_map(system, idx, &[t0, 0.0], &[Role::Position, Role::Position])?
                .with_exact_gap(system, xi);
            let inverse_norm = match map.inverse_norm() {
                Ok(v) => v,
                Err(Error::SingularMode { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            let bound = match (idx, c) {
                (ModeIndex::Line(k), Some(c)) => Some((k as f64).powf(alpha) / c),
                _ => None,
            };
            Ok(SensitivityRow {
                index: idx,
                inverse_norm,
                bound,
            })
        })
        .collect()
}
