use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regex::Regex;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{CommandKind, ExperimentConfig, ScanKind, SystemKind};
use super::{TOOL_NAME, TOOL_VERSION};
use crate::constructions::{cf_shift_identity, cf_shift_sequence, construct_rational_gap, loaded_gap_search};
use crate::diophantine::{
    badly_approx_floor, cf_expand, floor_profile, nu_liminf_estimate, partial_quotient_sup, DistanceSample,
    ExactReal,
};
use crate::observability::{
    certify_beam, certify_loaded, certify_plate, certify_string, multi_time_floor, PlateGap,
    StrategicCertificate,
};
use crate::reconstruction::{
    mixed_reconstruct, noise_experiment, reconstruct, relative_data_error, sensitivity_profile, SnapshotSet,
};
use crate::spectral::{
    evolve, from_modal, random_real_state, read_snapshot, to_modal, write_snapshot, Role, Snapshot,
    Truncation, FORMAT_VERSION,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Depth of continued-fraction summaries in scan output.
const CF_DEPTH: usize = 40;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_IO,
        Error::SingularMode { .. } => EXIT_SINGULAR,
        _ => EXIT_VALIDATION,
    }
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// The main JSON document (header included).
    pub document: Value,
}

struct Artifacts {
    dir: PathBuf,
    header: Value,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(&config.out_dir)?;
        Ok(Self {
            dir: config.out_dir.clone(),
            header: header(config)?,
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    /// `{"header": ..., key: payload}`
    fn json(&mut self, name: &str, key: &str, payload: impl Serialize) -> Result<Value> {
        let mut doc = serde_json::Map::new();
        doc.insert("header".into(), self.header.clone());
        doc.insert(key.into(), serde_json::to_value(payload)?);
        let doc = Value::Object(doc);
        let p = self.path(name);
        fs::write(p, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(doc)
    }

    /// CSV preceded by one `#` comment line carrying the header.
    fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let line = format!("# {}\n", serde_json::to_string(&self.header)?);
        let p = self.path(name);
        fs::write(p, line + body)?;
        Ok(())
    }

    fn done(self, code: i32, summary: String, document: Value) -> Outcome {
        Outcome {
            code,
            summary,
            files: self.files,
            document,
        }
    }
}

fn header(config: &ExperimentConfig) -> Result<Value> {
    Ok(json!({
        "format_version": FORMAT_VERSION,
        "tool": TOOL_NAME,
        "tool_version": TOOL_VERSION,
        "config": serde_json::to_value(config)?,
    }))
}

fn csv_rows<R: Serialize>(columns: &[&str], rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Runs a validated config.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    match config.command {
        CommandKind::Simulate => simulate(config),
        CommandKind::Certify => certify(config),
        CommandKind::Reconstruct => reconstruct_cmd(config),
        CommandKind::Construct => construct(config),
        CommandKind::Scan => scan(config),
    }
}

fn simulate(c: &ExperimentConfig) -> Result<Outcome> {
    let system = c.wave_system()?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let state = random_real_state(system, c.modes, c.orders[0], c.decay, &mut rng)?;
    let times = if c.times.is_empty() {
        vec![c.require_gap()?, ExactReal::integer(0)]
    } else {
        c.times.clone()
    };
    let gap = c.resolved_gap().filter(ExactReal::is_exact);
    let mut art = Artifacts::new(c)?;

    let (y0, y1) = from_modal(&state);
    for (name, v) in [("initial_y0.json", y0), ("initial_y1.json", y1)] {
        let mut s = Snapshot::new(v);
        s.header = Some(art.header.clone());
        let p = art.path(name);
        write_snapshot(&p, &s)?;
    }
    for (i, t) in times.iter().enumerate() {
        let mut s = Snapshot::new(evolve(&state, PI * t.to_f64()));
        s.gap_over_pi = gap.clone();
        s.header = Some(art.header.clone());
        let p = art.path(&format!("snapshot_{i}.json"));
        write_snapshot(&p, &s)?;
    }
    let summary = json!({
        "system": system.name(),
        "modes": c.modes.len(),
        "snapshots": times.len(),
        "energy": state.energy(),
        "gap_over_pi": gap,
    });
    let doc = art.json("simulate.json", "simulation", &summary)?;
    let text = format!(
        "simulated {} modes of the {} at {} times",
        c.modes.len(),
        system.name(),
        times.len()
    );
    Ok(art.done(0, text, doc))
}

#[derive(Serialize)]
struct FloorRow {
    k: String,
    distance: f64,
    scaled_floor: f64,
}

fn line_rows(rows: Vec<(u64, f64, f64)>) -> Vec<FloorRow> {
    rows.into_iter()
        .map(|(k, d, s)| FloorRow {
            k: k.to_string(),
            distance: d,
            scaled_floor: s,
        })
        .collect()
}

fn certificate_and_rows(c: &ExperimentConfig, xi: &ExactReal) -> Result<(StrategicCertificate, Vec<FloorRow>)> {
    let alpha = c.alpha();
    let k_max = c.k_max;
    Ok(match c.system {
        SystemKind::String if c.q.is_zero() => (
            certify_string(xi, alpha, k_max)?,
            line_rows(floor_profile(xi, alpha, k_max, BigInt::from)),
        ),
        SystemKind::String => {
            let q = c.q.to_f64();
            let x = xi.to_f64();
            let rows = (1..=k_max)
                .into_par_iter()
                .map(|k| {
                    let kf = k as f64;
                    let v = (kf * kf + q).sqrt() * x;
                    let d = (v - v.round()).abs();
                    (k, d, kf.powf(alpha) * d)
                })
                .collect();
            (certify_loaded(xi, &c.q, k_max)?, line_rows(rows))
        }
        SystemKind::Beam => (
            certify_beam(xi, alpha, k_max)?,
            line_rows(floor_profile(xi, alpha, k_max, |k| BigInt::from(k) * BigInt::from(k))),
        ),
        SystemKind::Plate => {
            let [a, b] = &c.plate_sides_over_pi;
            let gap = PlateGap::from_geometry(xi, a, b)?;
            let [m_max, n_max] = c.scan_box;
            let cert = certify_plate(&gap, alpha, m_max, n_max)?;
            let cells: Vec<(u64, u64)> = (1..=m_max).flat_map(|m| (1..=n_max).map(move |n| (m, n))).collect();
            let rows = cells
                .into_par_iter()
                .map(|(m, n)| {
                    let v = gap
                        .theta1
                        .mul_int(&BigInt::from(m * m))
                        .add(&gap.theta2.mul_int(&BigInt::from(n * n)));
                    let d = DistanceSample::of(&v).value;
                    FloorRow {
                        k: format!("{m}:{n}"),
                        distance: d,
                        scaled_floor: ((m * m + n * n) as f64).powf(alpha) * d,
                    }
                })
                .collect();
            (cert, rows)
        }
    })
}

fn certify(c: &ExperimentConfig) -> Result<Outcome> {
    let xi = c.require_gap()?;
    let (cert, rows) = certificate_and_rows(c, &xi)?;
    let mut art = Artifacts::new(c)?;
    let doc = art.json("certificate.json", "certificate", &cert)?;
    art.csv("certify.csv", &csv_rows(&["k", "distance", "scaled_floor"], rows)?)?;
    let text = format!(
        "{}: verdict {}, observed floor {:.15} at {}",
        cert.system, cert.verdict, cert.observed_floor, cert.argmin
    );
    Ok(art.done(0, text, doc))
}

/// `snapshot_<i>.json` files in `dir`, ordered by `i`.
fn discover_snapshots(dir: &Path) -> Result<Vec<PathBuf>> {
    let re = Regex::new(r"^snapshot_(\d+)\.json$").expect("valid regex");
    let mut found: Vec<(u64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(cap) = re.captures(name) {
            if let Ok(i) = cap[1].parse() {
                found.push((i, entry.path()));
            }
        }
    }
    found.sort();
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

fn reconstruct_cmd(c: &ExperimentConfig) -> Result<Outcome> {
    let mut resolved = c.clone();
    if resolved.inputs.is_empty() {
        resolved.inputs = discover_snapshots(&c.out_dir)?;
    }
    if resolved.inputs.len() < 2 {
        return Err(Error::invalid(format!(
            "reconstruct needs at least 2 snapshot files (found {})",
            resolved.inputs.len()
        )));
    }
    let snaps = resolved.inputs.iter().map(|p| read_snapshot(p)).collect::<Result<Vec<_>>>()?;
    let mut set = SnapshotSet::from_snapshots(snaps)?;
    if let Some(g) = &c.gap {
        set = set.with_gap(g.clone());
    }
    let mixed = set.snapshots.iter().any(|v| v.role == Role::Velocity);
    let report = if mixed { mixed_reconstruct(&set)? } else { reconstruct(&set)? };
    let truth = match resolved.truth.as_slice() {
        [p0, p1] => {
            let (y0, y1) = (read_snapshot(p0)?, read_snapshot(p1)?);
            Some(to_modal(&y0.vector, &y1.vector, c.orders[0])?)
        }
        _ => None,
    };
    let relative_error = truth.as_ref().map(|t| relative_data_error(t, &report.state, c.orders[0]));

    let mut art = Artifacts::new(&resolved)?;
    let mut body: Value = serde_json::from_str(&report.to_json()?)?;
    body["mixed_roles"] = json!(mixed);
    body["relative_error"] = json!(relative_error);
    let doc = art.json("reconstruction.json", "reconstruction", &body)?;
    art.csv("reconstruction.csv", &report.to_csv(truth.as_ref())?)?;
    art.csv("modes.csv", &report.modes_csv()?)?;

    let singular = report.singular_modes();
    let (code, text) = if singular.is_empty() {
        let worst = report
            .worst_mode()
            .map(|(k, cond)| format!(", worst condition {cond:.3e} at mode {k}"))
            .unwrap_or_default();
        let err = relative_error.map(|e| format!(", relative error {e:.3e}")).unwrap_or_default();
        (EXIT_OK, format!("reconstructed {} modes{worst}{err}", report.modes.len()))
    } else {
        let list: Vec<String> = singular.iter().map(ToString::to_string).collect();
        (
            EXIT_SINGULAR,
            format!(
                "{} of {} modes are singular ({}); partial report written",
                singular.len(),
                report.modes.len(),
                list.join(", ")
            ),
        )
    };
    Ok(art.done(code, text, doc))
}

fn construct(c: &ExperimentConfig) -> Result<Outcome> {
    let tau = c.tau.ok_or_else(|| Error::invalid("construct needs --tau"))?;
    let delta = c.delta.ok_or_else(|| Error::invalid("construct needs --delta"))?;
    let cert = construct_rational_gap(tau, delta, &c.q)?;
    let verification = cert.verify();
    let (min_abs_sin, argmin) = cert.spot_check(c.k_max);
    let mut art = Artifacts::new(c)?;
    let doc = art.json(
        "construction.json",
        "construction",
        json!({
            "certificate": cert,
            "verification": verification,
            "spot_check": { "k_max": c.k_max, "min_abs_sin": min_abs_sin, "argmin": argmin },
        }),
    )?;
    if !verification.passed {
        return Err(Error::Inconsistent(format!(
            "constructed gap failed independent verification: {verification:?}"
        )));
    }
    let text = format!(
        "τ' = π·{} ≈ {:.15} ({:?}), verified; min |sin| over k <= {} is {:.3e} at k = {}",
        cert.tau_prime_over_pi, cert.tau_prime, cert.branch, c.k_max, min_abs_sin, argmin
    );
    Ok(art.done(0, text, doc))
}

fn scan(c: &ExperimentConfig) -> Result<Outcome> {
    let kind = c.scan.ok_or_else(|| Error::invalid("scan needs --kind"))?;
    let mut art = Artifacts::new(c)?;
    let (doc, text) = match kind {
        ScanKind::Floor => {
            let xi = c.require_gap()?;
            let alpha = c.order_gap();
            let floor = badly_approx_floor(&xi, alpha, c.k_max)?;
            let cf = cf_expand(&xi, CF_DEPTH)?;
            let sup = if xi.is_rational() { None } else { Some(partial_quotient_sup(&xi, CF_DEPTH)?) };
            let nu = if xi.is_rational() { None } else { Some(nu_liminf_estimate(&xi, 32)?) };
            let doc = art.json(
                "scan_floor.json",
                "floor",
                json!({
                    "gap_over_pi": xi,
                    "continued_fraction": cf,
                    "partial_quotient_sup": sup.as_ref().map(|s| json!({
                        "value": s.value.to_string(), "certain": s.certain, "examined": s.examined,
                    })),
                    "nu": nu,
                    "scan": floor,
                }),
            )?;
            let rows = line_rows(floor_profile(&xi, alpha, c.k_max, BigInt::from));
            art.csv("scan_floor.csv", &csv_rows(&["k", "distance", "scaled_floor"], rows)?)?;
            let text = format!("min k^{alpha}‖kξ‖ = {:.15} at k = {}", floor.c_star, floor.argmin);
            (doc, text)
        }
        ScanKind::MultiTime => {
            let m = multi_time_floor(&c.times, c.k_max)?;
            let text = format!(
                "min k^{:.4}·max_p ‖kτ_p‖ = {:.15} at k = {}",
                m.exponent, m.c_star, m.argmin
            );
            (art.json("scan_multi_time.json", "multi_time", &m)?, text)
        }
        ScanKind::Noise => {
            let xi = c.require_gap()?;
            let system = c.wave_system()?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let state = random_real_state(system, c.modes, c.orders[1], c.decay, &mut rng)?;
            let stats = noise_experiment(&state, &xi, c.sigma, c.trials, c.seed)?;
            let text = format!(
                "rms error {:.4e}, prediction {:.4e}, ratio {:.3}",
                stats.rms_error, stats.prediction, stats.ratio
            );
            (art.json("scan_noise.json", "noise", &stats)?, text)
        }
        ScanKind::Sensitivity => {
            let xi = c.require_gap()?;
            let Truncation::Line(n) = c.modes else {
                return Err(Error::invalid("sensitivity scan is for the string and the beam"));
            };
            let rows = sensitivity_profile(&xi, &c.wave_system()?, c.order_gap(), n)?;
            let doc = art.json("scan_sensitivity.json", "sensitivity", &rows)?;
            let flat: Vec<(String, f64, Option<f64>)> =
                rows.iter().map(|r| (r.index.to_string(), r.inverse_norm, r.bound)).collect();
            art.csv("scan_sensitivity.csv", &csv_rows(&["k", "inverse_norm", "bound"], flat)?)?;
            (doc, format!("{} modes profiled", rows.len()))
        }
        ScanKind::LoadedGap => {
            let xi = c.require_gap()?;
            let r = loaded_gap_search(c.q.to_f64(), &xi, c.n_max, c.k_max)?;
            let text = format!("n = {}, gap π·ξ_n = {:.15}, margin {:.6}", r.n, r.gap, r.margin);
            (art.json("scan_loaded_gap.json", "loaded_gap", &r)?, text)
        }
        ScanKind::Shift => {
            let xi = c.require_gap()?;
            let seq = cf_shift_sequence(&xi, c.n_max)?;
            let rows = seq
                .iter()
                .enumerate()
                .map(|(n, x)| {
                    Ok(json!({
                        "n": n,
                        "xi_n": x,
                        "value": x.to_f64(),
                        "cf_identity": cf_shift_identity(&xi, x, n, 12)?,
                        "nu_estimate": nu_liminf_estimate(x, 32)?.estimate,
                    }))
                })
                .collect::<Result<Vec<Value>>>()?;
            let flat: Vec<(u64, String, f64, f64)> = rows
                .iter()
                .map(|r| {
                    (
                        r["n"].as_u64().unwrap_or(0),
                        r["xi_n"].as_str().unwrap_or("").to_string(),
                        r["value"].as_f64().unwrap_or(f64::NAN),
                        r["nu_estimate"].as_f64().unwrap_or(f64::NAN),
                    )
                })
                .collect();
            let doc = art.json("scan_shift.json", "shift", &rows)?;
            art.csv("scan_shift.csv", &csv_rows(&["n", "xi_n", "value", "nu_estimate"], flat)?)?;
            (doc, format!("{} shifts computed", rows.len()))
        }
    };
    Ok(art.done(0, text, doc))
}
