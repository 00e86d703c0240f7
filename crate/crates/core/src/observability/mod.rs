//! Per-mode observation maps and strategic-pair certificates.
//!
//! For a mode with frequency `ω`, a position observation at time `t` is the
//! row `(e^{iωt}, e^{-iωt})` applied to the travelling-wave pair `(a, b)`,
//! and a velocity observation is `(iω e^{iωt}, -iω e^{-iωt})`.

mod certify;
mod loaded;
mod multitime;

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::diophantine::ExactReal;
use crate::spectral::{ModeIndex, Role, WaveSystem};
use crate::{Error, Result};

pub use certify::{
    certify_beam, certify_plate, certify_string, PlateGap, ScanExtent, StrategicCertificate,
    Verdict,
};
pub use loaded::{
    certify_loaded, loaded_q_threshold, perturbation_gap, HypothesisCheck, HypothesisStatus,
    LoadedSection, LoadedThreshold,
};
pub use multitime::{multi_time_floor, multi_time_floor_taus, MultiTimeFloor};
pub(crate) use loaded::{rational_load_hits, sine_scan};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size of `|det|` below which a mode is treated as singular when
/// no exact gap is available.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Complex 2×2 matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

/// Singular values `(σ_max, σ_min)` of an `n×2` matrix from the closed-form
/// eigenvalues of its Gram matrix. `det_sq`, when known, is `det(GᴴG)` and
/// avoids cancellation in `σ_min`.
pub fn singular_values(rows: &[[Complex64; 2]], det_sq: Option<f64>) -> (f64, f64) {
    let g11: f64 = rows.iter().map(|r| r[0].norm_sqr()).sum();
    let g22: f64 = rows.iter().map(|r| r[1].norm_sqr()).sum();
    let g12: Complex64 = rows.iter().map(|r| r[0].conj() * r[1]).sum();
    let half = 0.5 * (g11 + g22);
    let disc = (0.25 * (g11 - g22) * (g11 - g22) + g12.norm_sqr()).sqrt();
    let lmax = half + disc;
    let lmin = match det_sq {
        Some(d) if lmax > 0.0 => d / lmax,
        _ => (half - disc).max(0.0),
    };
    (lmax.sqrt(), lmin.max(0.0).sqrt())
}

/// `‖T^{-1}‖ = √(1+|cos θ|) / (√2 |sin θ|)` for the position/position map
/// with phase `θ = ωΔ`.
pub fn closed_form_inverse_norm(theta: f64) -> f64 {
    (1.0 + theta.cos().abs()).sqrt() / (std::f64::consts::SQRT_2 * theta.sin().abs())
}

/// Integer frequency, when `ω` is one: `k` or `√(k²+q)` for the string with
/// integer load, `k²` for the beam.
pub fn integer_frequency(system: &WaveSystem, idx: ModeIndex) -> Option<BigInt> {
    match (*system, idx) {
        (WaveSystem::String { q }, ModeIndex::Line(k)) => {
            if q.fract() != 0.0 || q > 9.0e15 {
                return None;
            }
            let v = BigInt::from(k) * k + BigInt::from(q as u64);
            let r = v.sqrt();
            (&r * &r == v).then_some(r)
        }
        (WaveSystem::Beam, ModeIndex::Line(k)) => Some(BigInt::from(k) * k),
        _ => None,
    }
}

/// The observation matrix of one mode.
#[derive(Clone, Debug, Serialize)]
pub struct ModeMap {
    pub index: ModeIndex,
    pub omega: f64,
    pub kinds: Vec<Role>,
    pub times: Vec<f64>,
    #[serde(skip)]
    pub rows: Vec<[Complex64; 2]>,
    /// `ω (t0 - t1)/π` exactly, when known; decides singularity exactly.
    #[serde(skip)]
    pub exact_phase_over_pi: Option<ExactReal>,
}

/// Builds the map for `times`/`kinds` (one row each).
pub fn mode_map(system: &WaveSystem, idx: ModeIndex, times: &[f64], kinds: &[Role]) -> Result<ModeMap> {
    if times.len() < 2 || times.len() != kinds.len() {
        return Err(Error::invalid("a mode map needs >= 2 rows with one kind per time"));
    }
    let omega = system.frequency(idx)?;
    let rows = times
        .iter()
        .zip(kinds)
        .map(|(&t, &kind)| row(omega, t, kind))
        .collect();
    Ok(ModeMap {
        index: idx,
        omega,
        kinds: kinds.to_vec(),
        times: times.to_vec(),
        rows,
        exact_phase_over_pi: None,
    })
}

fn row(omega: f64, t: f64, kind: Role) -> [Complex64; 2] {
    let e = Complex64::from_polar(1.0, omega * t);
    match kind {
        Role::Position => [e, e.conj()],
        Role::Velocity => [I * omega * e, -I * omega * e.conj()],
    }
}

impl ModeMap {
    /// Attaches `ξ = (t0 - t1)/π` for exact singularity decisions. Only
    /// effective when `ω` is an integer.
    pub fn with_exact_gap(mut self, system: &WaveSystem, xi: &ExactReal) -> Self {
        if self.is_square() && xi.is_exact() {
            if let Some(w) = integer_frequency(system, self.index) {
                self.exact_phase_over_pi = Some(xi.mul_int(&w));
            }
        }
        self
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == 2
    }

    fn gap(&self) -> f64 {
        self.times[0] - self.times[1]
    }

    /// `ωΔ` with `Δ = t0 - t1`.
    pub fn phase(&self) -> f64 {
        self.omega * self.gap()
    }

    /// Closed-form determinant of a square map:
    /// `2i sin ωΔ`, `∓2iω cos ωΔ` (position/velocity, velocity/position),
    /// `2iω² sin ωΔ`.
    pub fn closed_form_det(&self) -> Result<Complex64> {
        self.require_square()?;
        let (w, th) = (self.omega, self.phase());
        Ok(match (self.kinds[0], self.kinds[1]) {
            (Role::Position, Role::Position) => 2.0 * I * th.sin(),
            (Role::Position, Role::Velocity) => -2.0 * I * w * th.cos(),
            (Role::Velocity, Role::Position) => 2.0 * I * w * th.cos(),
            (Role::Velocity, Role::Velocity) => 2.0 * I * w * w * th.sin(),
        })
    }

    /// Determinant evaluated from the matrix entries.
    pub fn det(&self) -> Result<Complex64> {
        self.require_square()?;
        let r = &self.rows;
        Ok(r[0][0] * r[1][1] - r[0][1] * r[1][0])
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::invalid("determinant of a non-square mode map"))
        }
    }

    fn row_scale(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt())
            .product()
    }

    fn singular_error(&self) -> Error {
        let phase = match &self.exact_phase_over_pi {
            Some(p) => format!("ωΔ/π = {p}"),
            None => format!("ωΔ/π ≈ {:.12}", self.phase() / PI),
        };
        Error::SingularMode {
            index: self.index.to_string(),
            phase,
        }
    }

    /// Whether the rows fail to determine `(a, b)`.
    pub fn is_singular(&self) -> bool {
        if self.is_square() {
            if let Some(p) = &self.exact_phase_over_pi {
                if p.is_exact() {
                    let mixed = self.kinds[0] != self.kinds[1];
                    let shifted = if mixed {
                        p.sub(&ExactReal::ratio(1, 2).expect("nonzero"))
                    } else {
                        p.clone()
                    };
                    return shifted.nearest_int_distance().is_zero();
                }
            }
            let d = self.closed_form_det().expect("square");
            return d.norm() <= SINGULAR_RTOL * self.row_scale();
        }
        let (smax, smin) = singular_values(&self.rows, None);
        smin <= SINGULAR_RTOL * smax
    }

    /// Explicit inverse via the adjugate and the closed-form determinant.
    pub fn inverse(&self) -> Result<Mat2> {
        self.require_square()?;
        if self.is_singular() {
            return Err(self.singular_error());
        }
        let d = self.closed_form_det()?;
        let r = &self.rows;
        Ok([[r[1][1] / d, -r[0][1] / d], [-r[1][0] / d, r[0][0] / d]])
    }

    /// `‖T‖` (largest singular value).
    pub fn norm(&self) -> f64 {
        singular_values(&self.rows, None).0
    }

    /// `‖T^{-1}‖` for square maps (largest singular value of the explicit
    /// inverse) and `‖T^+‖ = 1/σ_min` otherwise.
    pub fn inverse_norm(&self) -> Result<f64> {
        if self.is_square() {
            let inv = self.inverse()?;
            let det_inv = (inv[0][0] * inv[1][1] - inv[0][1] * inv[1][0]).norm_sqr();
            return Ok(singular_values(&inv, Some(det_inv)).0);
        }
        if self.is_singular() {
            return Err(self.singular_error());
        }
        Ok(1.0 / singular_values(&self.rows, None).1)
    }

    /// `√(1+|cos ωΔ|)/(√2 |sin ωΔ|)` for position/position maps.
    pub fn closed_form_inverse_norm(&self) -> Option<f64> {
        (self.is_square() && self.kinds == [Role::Position, Role::Position])
            .then(|| closed_form_inverse_norm(self.phase()))
    }

    /// `‖T‖·‖T^{-1}‖`.
    pub fn condition(&self) -> Result<f64> {
        Ok(self.norm() * self.inverse_norm()?)
    }

    /// Row values for the pair `(a, b)`.
    pub fn apply(&self, a: Complex64, b: Complex64) -> Vec<Complex64> {
        self.rows.iter().map(|r| r[0] * a + r[1] * b).collect()
    }

    /// Solves `T(a, b) = values` (least squares when overdetermined).
    /// Returns `(a, b, residual)`.
    pub fn solve(&self, values: &[Complex64]) -> Result<(Complex64, Complex64, f64)> {
        if values.len() != self.rows.len() {
            return Err(Error::invalid("value count does not match the rows"));
        }
        if self.is_square() {
            let m = self.inverse()?;
            let a = m[0][0] * values[0] + m[0][1] * values[1];
            let b = m[1][0] * values[0] + m[1][1] * values[1];
            return Ok((a, b, 0.0));
        }
        if self.is_singular() {
            return Err(self.singular_error());
        }
        // normal equations TᴴT x = Tᴴ y
        let g11: f64 = self.rows.iter().map(|r| r[0].norm_sqr()).sum();
        let g22: f64 = self.rows.iter().map(|r| r[1].norm_sqr()).sum();
        let g12: Complex64 = self.rows.iter().map(|r| r[0].conj() * r[1]).sum();
        let h1: Complex64 = self.rows.iter().zip(values).map(|(r, y)| r[0].conj() * y).sum();
        let h2: Complex64 = self.rows.iter().zip(values).map(|(r, y)| r[1].conj() * y).sum();
        let det = g11 * g22 - g12.norm_sqr();
        let a = (g22 * h1 - g12 * h2) / det;
        let b = (g11 * h2 - g12.conj() * h1) / det;
        let residual = self
            .apply(a, b)
            .iter()
            .zip(values)
            .map(|(u, v)| (u - v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        Ok((a, b, residual))
    }
}

/// Free-function form of [`ModeMap::det`] preferring the closed form.
pub fn mode_map_det(map: &ModeMap) -> Result<Complex64> {
    map.closed_form_det()
}

/// Free-function form of [`ModeMap::inverse_norm`].
pub fn mode_map_inverse_norm(map: &ModeMap) -> Result<f64> {
    map.inverse_norm()
}

/// `(2‖kx/π‖, |sin kx|, π‖kx/π‖)`: the sine value and its two bounds.
pub fn sine_sandwich(k: u64, x: f64) -> (f64, f64, f64) {
    let y = k as f64 * x;
    let u = y / PI;
    let d = (u - u.round()).abs();
    (2.0 * d, y.sin().abs(), PI * d)
}
