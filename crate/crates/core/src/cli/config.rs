use std::f64::consts::PI;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::Flags;
use crate::diophantine::ExactReal;
use crate::spectral::{Truncation, WaveSystem};
use crate::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "STRATEGIC_OUT_DIR";

const DEFAULT_OUT_DIR: &str = "strategic-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Certify,
    Reconstruct,
    Construct,
    Scan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    String,
    Beam,
    Plate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// Floor profile, partial quotients and ν estimate of the gap.
    Floor,
    /// `min k^{1/(n-1)} max_p ‖k τ_p‖` for the given times.
    MultiTime,
    /// Monte-Carlo noise amplification of two-snapshot reconstruction.
    Noise,
    /// `‖T_k^{-1}‖` against the certificate bound per mode.
    Sensitivity,
    /// Smallest shift of the gap admissible for the loaded string.
    LoadedGap,
    /// The shift sequence `ξ_{n+1} = ξ_n/(1+ξ_n)`.
    Shift,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub system: SystemKind,
    pub q: ExactReal,
    /// Plate sides `a/π`, `b/π`.
    pub plate_sides_over_pi: [ExactReal; 2],
    pub gap: Option<ExactReal>,
    /// Observation times in units of `π`.
    pub times: Vec<ExactReal>,
    /// `[r, s]`
    pub orders: [f64; 2],
    pub modes: Truncation,
    pub k_max: u64,
    pub scan_box: [u64; 2],
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub decay: f64,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub scan: Option<ScanKind>,
    pub n_max: usize,
    pub inputs: Vec<PathBuf>,
    pub truth: Vec<PathBuf>,
    pub out_dir: PathBuf,
}

fn exact(flag: &str, s: &str) -> Result<ExactReal> {
    ExactReal::parse_lenient(s).map_err(|e| Error::invalid(format!("--{flag}: {e}")))
}

fn pair<T: std::str::FromStr>(flag: &str, s: &str, seps: &[char]) -> Result<(T, T)> {
    let bad = || Error::invalid(format!("--{flag} expects two values, got `{s}`"));
    let (a, b) = s.split_once(|c| seps.contains(&c)).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl ExperimentConfig {
    /// Defaults for `command` on the plain string.
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            system: SystemKind::String,
            q: ExactReal::integer(0),
            plate_sides_over_pi: [ExactReal::integer(1), ExactReal::integer(1)],
            gap: None,
            times: Vec::new(),
            orders: [1.0, 0.0],
            modes: Truncation::Line(64),
            k_max: 10_000,
            scan_box: [50, 50],
            sigma: 1e-6,
            trials: 10,
            seed: 0,
            decay: 0.0,
            tau: None,
            delta: None,
            scan: None,
            n_max: 64,
            inputs: Vec::new(),
            truth: Vec::new(),
            out_dir: default_out_dir(),
        }
    }

    /// Resolves command-line flags and validates the result.
    pub fn from_flags(command: CommandKind, f: &Flags) -> Result<Self> {
        let mut c = Self::new(command);
        if let Some(s) = f.system {
            c.system = s;
        }
        c.orders = match c.system {
            SystemKind::String => [1.0, 0.0],
            SystemKind::Beam | SystemKind::Plate => [2.0, 0.0],
        };
        if c.system == SystemKind::Plate {
            c.modes = Truncation::Grid(8, 8);
        }
        if let Some(q) = &f.q {
            c.q = exact("q", q)?;
        }
        if let Some(a) = &f.plate_a {
            c.plate_sides_over_pi[0] = exact("plate-a", a)?;
        }
        if let Some(b) = &f.plate_b {
            c.plate_sides_over_pi[1] = exact("plate-b", b)?;
        }
        if let Some(g) = &f.gap {
            c.gap = Some(exact("gap", g)?);
        }
        c.times = f.times.iter().map(|t| exact("times", t)).collect::<Result<_>>()?;
        if let Some(o) = &f.orders {
            let (r, s) = pair::<f64>("orders", o, &[','])?;
            c.orders = [r, s];
        }
        if let Some(m) = &f.modes {
            c.modes = if m.contains(['x', 'X']) {
                let (a, b) = pair::<usize>("modes", m, &['x', 'X'])?;
                Truncation::Grid(a, b)
            } else {
                let n: usize = m
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("--modes expects N or MxN, got `{m}`")))?;
                if c.system == SystemKind::Plate {
                    Truncation::Grid(n, n)
                } else {
                    Truncation::Line(n)
                }
            };
        }
        if let Some(b) = &f.scan_box {
            let (m, n) = pair::<u64>("box", b, &['x', 'X'])?;
            c.scan_box = [m, n];
        }
        macro_rules! take {
            ($($field:ident <- $flag:ident),*) => { $( if let Some(v) = f.$flag { c.$field = v; } )* };
        }
        take!(k_max <- kmax, sigma <- sigma, trials <- trials, seed <- seed, decay <- decay, n_max <- nmax);
        c.tau = f.tau;
        c.delta = f.delta;
        c.scan = f.kind;
        c.inputs = f.input.clone();
        c.truth = f.truth.clone();
        if let Some(o) = &f.out {
            c.out_dir = o.clone();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// `r - s`.
    pub fn order_gap(&self) -> f64 {
        self.orders[0] - self.orders[1]
    }

    /// Exponent of the floor: `r - s` on a line, `(r - s)/2` on the plate.
    pub fn alpha(&self) -> f64 {
        match self.system {
            SystemKind::Plate => self.order_gap() / 2.0,
            _ => self.order_gap(),
        }
    }

    pub fn wave_system(&self) -> Result<WaveSystem> {
        match self.system {
            SystemKind::String => WaveSystem::string(self.q.to_f64()),
            SystemKind::Beam => Ok(WaveSystem::Beam),
            SystemKind::Plate => WaveSystem::plate(
                PI * self.plate_sides_over_pi[0].to_f64(),
                PI * self.plate_sides_over_pi[1].to_f64(),
            ),
        }
    }

    /// The gap: `--gap`, else `times[0] - times[1]`.
    pub fn resolved_gap(&self) -> Option<ExactReal> {
        self.gap.clone().or_else(|| match self.times.as_slice() {
            [t0, t1, ..] => Some(t0.sub(t1)),
            _ => None,
        })
    }

    pub fn require_gap(&self) -> Result<ExactReal> {
        self.resolved_gap()
            .ok_or_else(|| Error::invalid("this command needs --gap (or two --times)"))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(m));
        if self.k_max == 0 {
            return bad("--kmax must be >= 1");
        }
        if self.scan_box.contains(&0) {
            return bad("--box sides must be >= 1");
        }
        if !self.orders.iter().all(|o| o.is_finite()) {
            return bad("--orders must be finite");
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return bad("--sigma must be >= 0");
        }
        if self.trials == 0 {
            return bad("--trials must be >= 1");
        }
        if !self.decay.is_finite() {
            return bad("--decay must be finite");
        }
        if self.q.sign() == Some(std::cmp::Ordering::Less) {
            return bad("--q must be >= 0");
        }
        if self.system != SystemKind::String && !self.q.is_zero() {
            return bad("--q applies to the string only");
        }
        match (self.system, self.modes) {
            (SystemKind::Plate, Truncation::Line(_)) | (SystemKind::String | SystemKind::Beam, Truncation::Grid(..)) => {
                return bad("--modes: use MxN for the plate and N otherwise")
            }
            _ => {}
        }
        if self.modes.is_empty() {
            return bad("--modes must be >= 1");
        }
        self.wave_system()?.validate()?;
        match self.command {
            CommandKind::Simulate => {
                if self.times.is_empty() && self.gap.is_none() {
                    return bad("simulate needs --times or --gap");
                }
            }
            CommandKind::Certify => {
                self.require_gap()?;
                if !(self.alpha() > 0.0) {
                    return bad("certify needs r > s");
                }
            }
            CommandKind::Reconstruct => {
                if !self.truth.is_empty() && self.truth.len() != 2 {
                    return bad("--truth expects the position and velocity files");
                }
            }
            CommandKind::Construct => {
                match self.tau {
                    Some(t) if t.is_finite() => {}
                    _ => return bad("construct needs a finite --tau"),
                }
                match self.delta {
                    Some(d) if d > 0.0 && d.is_finite() => {}
                    _ => return bad("construct needs --delta > 0"),
                }
                if self.q.is_zero() {
                    return bad("construct: q = 0 is out of scope (every √(k²) is an integer); pass --q > 0");
                }
            }
            CommandKind::Scan => {
                let Some(kind) = self.scan else {
                    return bad("scan needs --kind");
                };
                match kind {
                    ScanKind::MultiTime => {
                        if self.times.len() < 2 {
                            return bad("multi-time scan needs at least 2 --times");
                        }
                    }
                    ScanKind::LoadedGap => {
                        self.require_gap()?;
                        if !self.q.sign().is_some_and(|s| s.is_gt()) {
                            return bad("loaded-gap scan needs --q > 0");
                        }
                    }
                    ScanKind::Floor | ScanKind::Noise | ScanKind::Sensitivity | ScanKind::Shift => {
                        self.require_gap()?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}
