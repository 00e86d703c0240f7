//! Modal representation of the string, loaded string, hinged beam and hinged
//! rectangular plate.
//!
//! A state is stored as travelling-wave pairs `(a, b)` per mode, so that the
//! position coefficient at time `t` is `a e^{iωt} + b e^{-iωt}`.

mod snapshot;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use snapshot::{read_snapshot, write_snapshot, Snapshot, FORMAT_VERSION};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The vibrating system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum WaveSystem {
    /// `y'' - y_xx + q y = 0` on `(0, π)`, `ω_k = √(k²+q)`.
    String { q: f64 },
    /// `y'' + y_xxxx = 0` on `(0, π)`, `ω_k = k²`.
    Beam,
    /// `y'' + Δ²y = 0` on `(0,a)×(0,b)`, `ω = λ_{m,n} = π²(m²/a² + n²/b²)`.
    Plate { a: f64, b: f64 },
}

impl WaveSystem {
    pub fn string(q: f64) -> Result<Self> {
        let s = WaveSystem::String { q };
        s.validate()?;
        Ok(s)
    }

    pub fn plate(a: f64, b: f64) -> Result<Self> {
        let s = WaveSystem::Plate { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WaveSystem::String { q } if !(q >= 0.0 && q.is_finite()) => {
                Err(Error::invalid(format!("load q must be finite and >= 0, got {q}")))
            }
            WaveSystem::Plate { a, b }
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) =>
            {
                Err(Error::invalid(format!("plate sides must be positive, got {a}, {b}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_plate(&self) -> bool {
        matches!(self, WaveSystem::Plate { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            WaveSystem::String { .. } => "string",
            WaveSystem::Beam => "beam",
            WaveSystem::Plate { .. } => "plate",
        }
    }

    /// Order drop of the velocity space: `D^s × D^{s-1}` for the string,
    /// `D^s × D^{s-2}` for beam and plate.
    pub fn velocity_offset(&self) -> f64 {
        match self {
            WaveSystem::String { .. } => 1.0,
            _ => 2.0,
        }
    }

    /// `ω` for a mode.
    pub fn frequency(&self, idx: ModeIndex) -> Result<f64> {
        match (*self, idx) {
            (WaveSystem::String { q }, ModeIndex::Line(k)) if k >= 1 => {
                Ok(((k * k) as f64 + q).sqrt())
            }
            (WaveSystem::Beam, ModeIndex::Line(k)) if k >= 1 => Ok((k * k) as f64),
            (WaveSystem::Plate { a, b }, ModeIndex::Grid(m, n)) if m >= 1 && n >= 1 => {
                Ok(PI * PI * ((m * m) as f64 / (a * a) + (n * n) as f64 / (b * b)))
            }
            _ => Err(Error::invalid(format!("mode {idx} is not valid for a {}", self.name()))),
        }
    }

    /// Norm weight `w` with `‖v‖_s² = Σ w^{2s} |v|²`: `k` in one dimension,
    /// `√λ` for the plate.
    pub fn weight(&self, idx: ModeIndex) -> Result<f64> {
        match (*self, idx) {
            (WaveSystem::Plate { .. }, _) => Ok(self.frequency(idx)?.sqrt()),
            (_, ModeIndex::Line(k)) if k >= 1 => Ok(k as f64),
            _ => Err(Error::invalid(format!("mode {idx} is not valid for a {}", self.name()))),
        }
    }
}

/// Free-function form of [`WaveSystem::frequency`].
pub fn frequency(system: &WaveSystem, idx: ModeIndex) -> Result<f64> {
    system.frequency(idx)
}

/// Mode label: `k` or `(m, n)`, all entries `>= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeIndex {
    Line(u64),
    Grid(u64, u64),
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeIndex::Line(k) => write!(f, "{k}"),
            ModeIndex::Grid(m, n) => write!(f, "({m},{n})"),
        }
    }
}

/// Truncation layout. Plate modes are stored row-major in `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Truncation {
    Line(usize),
    Grid(usize, usize),
}

impl Truncation {
    pub fn for_system(system: &WaveSystem, n: usize) -> Self {
        if system.is_plate() {
            Truncation::Grid(n, n)
        } else {
            Truncation::Line(n)
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Truncation::Line(n) => n,
            Truncation::Grid(m, n) => m * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Mode at storage position `i`.
    pub fn index(&self, i: usize) -> ModeIndex {
        match *self {
            Truncation::Line(_) => ModeIndex::Line(i as u64 + 1),
            Truncation::Grid(_, n) => ModeIndex::Grid((i / n) as u64 + 1, (i % n) as u64 + 1),
        }
    }

    /// Storage position of a mode, if inside the truncation.
    pub fn position(&self, idx: ModeIndex) -> Option<usize> {
        match (*self, idx) {
            (Truncation::Line(n), ModeIndex::Line(k)) if k >= 1 && (k as usize) <= n => {
                Some(k as usize - 1)
            }
            (Truncation::Grid(mm, nn), ModeIndex::Grid(m, n))
                if m >= 1 && n >= 1 && (m as usize) <= mm && (n as usize) <= nn =>
            {
                Some((m as usize - 1) * nn + n as usize - 1)
            }
            _ => None,
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..self.len()).map(|i| self.index(i))
    }

    fn check(&self, system: &WaveSystem) -> Result<()> {
        match (self, system.is_plate()) {
            (Truncation::Line(_), false) | (Truncation::Grid(..), true) => Ok(()),
            _ => Err(Error::invalid(format!(
                "truncation {self:?} does not fit a {}",
                system.name()
            ))),
        }
    }
}

/// Whether a coefficient vector holds positions or velocities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Position,
    Velocity,
}

/// Sine-basis coefficients of a function (or its time derivative) at `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector {
    pub system: WaveSystem,
    pub role: Role,
    pub time: f64,
    pub truncation: Truncation,
    pub coefficients: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(
        system: WaveSystem,
        role: Role,
        time: f64,
        truncation: Truncation,
        coefficients: Vec<Complex64>,
    ) -> Result<Self> {
        system.validate()?;
        truncation.check(&system)?;
        if coefficients.len() != truncation.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                truncation.len(),
                coefficients.len()
            )));
        }
        Ok(Self {
            system,
            role,
            time,
            truncation,
            coefficients,
        })
    }

    pub fn from_real(
        system: WaveSystem,
        role: Role,
        time: f64,
        truncation: Truncation,
        values: &[f64],
    ) -> Result<Self> {
        Self::new(
            system,
            role,
            time,
            truncation,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(system: WaveSystem, role: Role, time: f64, truncation: Truncation) -> Result<Self> {
        Self::new(system, role, time, truncation, vec![Complex64::new(0.0, 0.0); truncation.len()])
    }

    pub fn get(&self, idx: ModeIndex) -> Option<Complex64> {
        self.truncation.position(idx).map(|i| self.coefficients[i])
    }

    /// Largest imaginary part relative to the largest modulus.
    pub fn imaginary_ratio(&self) -> f64 {
        let scale = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        self.coefficients.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.system != other.system || self.truncation != other.truncation {
            return Err(Error::invalid("coefficient vectors differ in system or truncation"));
        }
        Ok(())
    }
}

/// Travelling-wave amplitudes per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalState {
    pub system: WaveSystem,
    /// Sobolev order `s` used by [`ModalState::energy`].
    pub order: f64,
    pub truncation: Truncation,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl ModalState {
    pub fn new(
        system: WaveSystem,
        order: f64,
        truncation: Truncation,
        a: Vec<Complex64>,
        b: Vec<Complex64>,
    ) -> Result<Self> {
        system.validate()?;
        truncation.check(&system)?;
        if a.len() != truncation.len() || b.len() != truncation.len() {
            return Err(Error::invalid("amplitude vectors do not match the truncation"));
        }
        Ok(Self {
            system,
            order,
            truncation,
            a,
            b,
        })
    }

    pub fn zero(system: WaveSystem, order: f64, truncation: Truncation) -> Result<Self> {
        let z = vec![Complex64::new(0.0, 0.0); truncation.len()];
        Self::new(system, order, truncation, z.clone(), z)
    }

    /// `(ω, w)` for every stored mode.
    pub fn frequencies(&self) -> Vec<(f64, f64)> {
        self.truncation
            .modes()
            .map(|m| {
                (
                    self.system.frequency(m).expect("checked layout"),
                    self.system.weight(m).expect("checked layout"),
                )
            })
            .collect()
    }

    /// `Σ w^{2s}(|a|² + |b|²)` at the stored order.
    pub fn energy(&self) -> f64 {
        modal_energy(self, self.order)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.a.iter_mut().chain(out.b.iter_mut()).for_each(|z| *z *= factor);
        out
    }

    /// Real data has `b = conj(a)`; returns the largest violation.
    pub fn real_closure_defect(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (b - a.conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Travelling-wave form of the initial data `(y0, y1)`:
/// `a = (c - i d/ω)/2`, `b = (c + i d/ω)/2`.
pub fn to_modal(y0: &CoefficientVector, y1: &CoefficientVector, order: f64) -> Result<ModalState> {
    y0.compatible(y1)?;
    if y0.role != Role::Position || y1.role != Role::Velocity {
        return Err(Error::invalid("to_modal expects a position and a velocity vector"));
    }
    let n = y0.truncation.len();
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for (i, m) in y0.truncation.modes().enumerate() {
        let w = y0.system.frequency(m)?;
        let (c, d) = (y0.coefficients[i], y1.coefficients[i]);
        a.push((c - I * d / w) / 2.0);
        b.push((c + I * d / w) / 2.0);
    }
    ModalState::new(y0.system, order, y0.truncation, a, b)
}

/// Inverse of [`to_modal`]: `c = a + b`, `d = iω(a - b)`.
pub fn from_modal(state: &ModalState) -> (CoefficientVector, CoefficientVector) {
    let y0 = evolve(state, 0.0);
    let y1 = evolve_velocity(state, 0.0);
    (y0, y1)
}

/// Position coefficients `a e^{iωt} + b e^{-iωt}` at time `t`.
pub fn evolve(state: &ModalState, t: f64) -> CoefficientVector {
    let coefficients = state
        .frequencies()
        .iter()
        .zip(state.a.iter().zip(&state.b))
        .map(|(&(w, _), (a, b))| {
            let e = Complex64::from_polar(1.0, w * t);
            a * e + b * e.conj()
        })
        .collect();
    CoefficientVector {
        system: state.system,
        role: Role::Position,
        time: t,
        truncation: state.truncation,
        coefficients,
    }
}

/// Velocity coefficients `iω(a e^{iωt} - b e^{-iωt})` at time `t`.
pub fn evolve_velocity(state: &ModalState, t: f64) -> CoefficientVector {
    let coefficients = state
        .frequencies()
        .iter()
        .zip(state.a.iter().zip(&state.b))
        .map(|(&(w, _), (a, b))| {
            let e = Complex64::from_polar(1.0, w * t);
            I * w * (a * e - b * e.conj())
        })
        .collect();
    CoefficientVector {
        system: state.system,
        role: Role::Velocity,
        time: t,
        truncation: state.truncation,
        coefficients,
    }
}

/// `(Σ w^{2·order} |c|²)^{1/2}`; for the plate `w^{2·order} = λ^{order}`.
pub fn sobolev_norm(v: &CoefficientVector, order: f64) -> f64 {
    v.truncation
        .modes()
        .zip(&v.coefficients)
        .map(|(m, c)| v.system.weight(m).expect("checked layout").powf(2.0 * order) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `Σ w^{2s}(|a|² + |b|²)`.
pub fn modal_energy(state: &ModalState, s: f64) -> f64 {
    state
        .frequencies()
        .iter()
        .zip(state.a.iter().zip(&state.b))
        .map(|(&(_, w), (a, b))| w.powf(2.0 * s) * (a.norm_sqr() + b.norm_sqr()))
        .sum()
}

/// `‖y0‖_s² + ‖y1‖_{s-off}²`, with the system's velocity offset.
pub fn data_norm_sq(y0: &CoefficientVector, y1: &CoefficientVector, s: f64) -> f64 {
    sobolev_norm(y0, s).powi(2) + sobolev_norm(y1, s - y0.system.velocity_offset()).powi(2)
}

/// Per-mode range of `(‖y0‖_s² + ‖y1‖_{s-off}²) / Σ w^{2s}(|a|²+|b|²)`.
///
/// The ratio is `|a+b|² + (ω/w^{off})²|a-b|²` over `|a|²+|b|²`, hence lies
/// between `2 min(1, ρ)` and `2 max(1, ρ)` with `ρ = ω²/w^{2·off}`. For the
/// loaded string `ρ = 1 + q/k² ∈ (1, 1+q]`; elsewhere `ρ = 1` and the ratio
/// is exactly 2.
pub fn energy_ratio_bounds(system: &WaveSystem, idx: ModeIndex) -> Result<(f64, f64)> {
    let w = system.frequency(idx)?;
    let rho = w * w / system.weight(idx)?.powf(2.0 * system.velocity_offset());
    Ok((2.0 * rho.min(1.0), 2.0 * rho.max(1.0)))
}

/// Uniform-range bound of [`energy_ratio_bounds`] over all modes.
pub fn energy_ratio_range(system: &WaveSystem) -> (f64, f64) {
    match *system {
        WaveSystem::String { q } => (2.0, 2.0 * (1.0 + q)),
        _ => (2.0, 2.0),
    }
}

/// Evaluates the sine series on a uniform grid including the boundary:
/// `points` nodes on `[0, π]`, or `points × points` nodes on `[0,a]×[0,b]`
/// (row-major in `x`). Returns real parts.
pub fn sample_grid(v: &CoefficientVector, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("sample_grid needs at least 2 points"));
    }
    let h = 1.0 / (points - 1) as f64;
    match (v.system, v.truncation) {
        (WaveSystem::Plate { a, b }, Truncation::Grid(mm, nn)) => {
            let mut out = Vec::with_capacity(points * points);
            for i in 0..points {
                let x = i as f64 * h * a;
                let sx: Vec<f64> = (1..=mm).map(|m| (m as f64 * PI * x / a).sin()).collect();
                for j in 0..points {
                    let y = j as f64 * h * b;
                    let mut acc = 0.0;
                    for (n, c) in (1..=nn).enumerate() {
                        let sy = (c as f64 * PI * y / b).sin();
                        for (m, s) in sx.iter().enumerate() {
                            acc += v.coefficients[m * nn + n].re * s * sy;
                        }
                    }
                    out.push(if i == 0 || j == 0 || i + 1 == points || j + 1 == points {
                        0.0
                    } else {
                        acc
                    });
                }
            }
            Ok(out)
        }
        (_, Truncation::Line(n)) => Ok((0..points)
            .map(|j| {
                if j == 0 || j + 1 == points {
                    return 0.0;
                }
                let x = j as f64 * h * PI;
                (1..=n).map(|k| v.coefficients[k - 1].re * (k as f64 * x).sin()).sum()
            })
            .collect()),
        _ => Err(Error::invalid("truncation does not fit the system")),
    }
}

/// Real initial data with independent standard normal coefficients damped
/// by `w^{-decay}`, scaled to unit modal energy at order `s`.
pub fn random_real_state<R: Rng + ?Sized>(
    system: WaveSystem,
    truncation: Truncation,
    s: f64,
    decay: f64,
    rng: &mut R,
) -> Result<ModalState> {
    truncation.check(&system)?;
    let n = truncation.len();
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for m in truncation.modes() {
        let w = system.weight(m)?;
        let om = system.frequency(m)?;
        let damp = w.powf(-decay);
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        c.push(x * damp);
        d.push(y * damp * om);
    }
    let y0 = CoefficientVector::from_real(system, Role::Position, 0.0, truncation, &c)?;
    let y1 = CoefficientVector::from_real(system, Role::Velocity, 0.0, truncation, &d)?;
    let state = to_modal(&y0, &y1, s)?;
    let e = state.energy();
    Ok(if e > 0.0 { state.scaled(1.0 / e.sqrt()) } else { state })
}
