//! Snapshot files: one coefficient vector as versioned JSON.
//!
//! ```json
//! { "format_version": 1, "system": {"type": "string", "q": 0.0},
//!   "role": "position", "time": 1.0, "modes": 3,
//!   "coefficients": [1.0, [0.0, -0.5], 0.25],
//!   "gap_over_pi": "quad:(-1+1*sqrt(5))/2" }
//! ```
//!
//! Plate files use `"modes": [M, N]` with coefficients row-major in `m`.
//! Coefficients are written as plain numbers when every imaginary part is
//! zero and as `[re, im]` pairs otherwise; both forms are accepted on read.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CoefficientVector, Role, Truncation, WaveSystem};
use crate::diophantine::ExactReal;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// A coefficient vector plus optional metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub vector: CoefficientVector,
    /// Exact `(t0 - t1)/π` of the pair this snapshot belongs to.
    pub gap_over_pi: Option<ExactReal>,
    /// Free-form provenance (configuration, tool version).
    pub header: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coef {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotJson {
    format_version: u32,
    system: WaveSystem,
    role: Role,
    time: f64,
    modes: Truncation,
    coefficients: Vec<Coef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gap_over_pi: Option<ExactReal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    header: Option<Value>,
}

impl Snapshot {
    pub fn new(vector: CoefficientVector) -> Self {
        Self {
            vector,
            gap_over_pi: None,
            header: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let v = &self.vector;
        let real = v.coefficients.iter().all(|c| c.im == 0.0);
        let coefficients = v
            .coefficients
            .iter()
            .map(|c| if real { Coef::Real(c.re) } else { Coef::Complex([c.re, c.im]) })
            .collect();
        let j = SnapshotJson {
            format_version: FORMAT_VERSION,
            system: v.system,
            role: v.role,
            time: v.time,
            modes: v.truncation,
            coefficients,
            gap_over_pi: self.gap_over_pi.clone(),
            header: self.header.clone(),
        };
        Ok(serde_json::to_string_pretty(&j)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: SnapshotJson = serde_json::from_str(text)?;
        if j.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported snapshot format_version {}",
                j.format_version
            )));
        }
        let coefficients = j
            .coefficients
            .into_iter()
            .map(|c| match c {
                Coef::Real(re) => Complex64::new(re, 0.0),
                Coef::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect();
        let vector = CoefficientVector::new(j.system, j.role, j.time, j.modes, coefficients)?;
        Ok(Self {
            vector,
            gap_over_pi: j.gap_over_pi,
            header: j.header,
        })
    }
}

pub fn write_snapshot(path: &Path, snapshot: &Snapshot) -> Result<()> {
    fs::write(path, snapshot.to_json()?)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    Snapshot::from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let s = WaveSystem::string(0.0).unwrap();
        let v = CoefficientVector::new(
            s,
            Role::Position,
            1.0,
            Truncation::Line(3),
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -0.5), Complex64::new(0.25, 0.0)],
        )
        .unwrap();
        let mut snap = Snapshot::new(v);
        snap.gap_over_pi = Some(ExactReal::golden_fraction());
        let text = snap.to_json().unwrap();
        assert!(text.contains("\"type\": \"string\""));
        assert!(text.contains("quad:(-1+1*sqrt(5))/2"));
        assert_eq!(Snapshot::from_json(&text).unwrap(), snap);
    }

    #[test]
    fn plate_layout_and_real_coefficients() {
        let p = WaveSystem::plate(1.0, 2.0).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
        let v = CoefficientVector::from_real(p, Role::Velocity, -0.5, Truncation::Grid(4, 4), &vals)
            .unwrap();
        let snap = Snapshot::new(v);
        let text = snap.to_json().unwrap();
        let j: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(j["modes"], serde_json::json!([4, 4]));
        assert!(j["coefficients"][3].is_number());
        assert_eq!(Snapshot::from_json(&text).unwrap(), snap);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(Snapshot::from_json("{").is_err());
        let bad = r#"{"format_version":2,"system":{"type":"beam"},"role":"position","time":0,"modes":1,"coefficients":[1]}"#;
        assert!(Snapshot::from_json(bad).is_err());
        let short = r#"{"format_version":1,"system":{"type":"beam"},"role":"position","time":0,"modes":2,"coefficients":[1]}"#;
        assert!(Snapshot::from_json(short).is_err());
        let ok = r#"{"format_version":1,"system":{"type":"beam"},"role":"position","time":0,"modes":1,"coefficients":[1]}"#;
        assert!(Snapshot::from_json(ok).is_ok());
    }
}
