//! Acceptance criteria, one line each.
//!
//! Runs as a plain binary (`harness = false`) so every line is printed on a
//! normal `cargo test`. Each criterion is a list of named parts; a criterion
//! passes when all of its parts do. Two parts assert bounds that the
//! mathematics does not support (see `KNOWN_FALSE`): they are evaluated
//! exactly as stated and reported as FAIL, but do not fail the process.
//! Any other failing part does.

use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strategic_pairs::constructions::construct_rational_gap;
use strategic_pairs::diophantine::{
    badly_approx_floor, cf_expand, convergents, dirichlet_witnesses, partial_quotient_sup,
    theoretical_floor_from_k, ExactReal,
};
use strategic_pairs::observability::{
    certify_beam, certify_loaded, certify_plate, loaded_q_threshold, mode_map, multi_time_floor_taus,
    perturbation_gap, PlateGap, Verdict,
};
use strategic_pairs::reconstruction::{noise_experiment, reconstruct, relative_data_error, SnapshotSet};
use strategic_pairs::spectral::{
    data_norm_sq, energy_ratio_bounds, evolve, evolve_velocity, from_modal, modal_energy,
    random_real_state, sobolev_norm, to_modal, ModeIndex, Role, Truncation, WaveSystem,
};
use strategic_pairs::Result;

/// `(criterion, part)` pairs whose stated bound is false; see the notes on
/// `floor_window` and `conservation`.
const KNOWN_FALSE: &[(u32, &str)] = &[(3, "in [0.447, 0.448]"), (11, "per-mode [2/(1+q), 2]")];

// Independent high-precision values (mpmath), frozen.
const GOLDEN_FLOOR_1E5: f64 = 0.381_966_011_250_105_1;
const PLATE_REDUCED_BASELINE: f64 = 0.145_898_033_750_315_45;
const PLATE_GENERAL_BASELINE: f64 = 0.267_742_737_885_348;
const MULTI_TIME_BASELINE: f64 = 0.295_924_619_922_951_55;
const CONSTRUCT_SPOT_CHECK: f64 = 4.476_475_213_488_093e-5;

type Criterion = (u32, &'static str, fn() -> Result<Outcome>);

struct Part {
    label: &'static str,
    ok: bool,
}

struct Outcome {
    parts: Vec<Part>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self { parts: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, label: &'static str, ok: bool) -> &mut Self {
        self.parts.push(Part { label, ok });
        self
    }

    fn note(&mut self, s: impl AsRef<str>) -> &mut Self {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(s.as_ref());
        self
    }
}

fn golden() -> ExactReal {
    ExactReal::golden_fraction()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn round_trip() -> Result<Outcome> {
    let mut out = Outcome::new();
    let system = WaveSystem::string(0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let truth = random_real_state(system, Truncation::Line(256), 1.0, 0.0, &mut rng)?;
    let start = Instant::now();
    let xi = golden();
    let t0 = PI * xi.to_f64();
    let set = SnapshotSet::new(vec![evolve(&truth, t0), evolve(&truth, 0.0)])?.with_gap(xi);
    let report = reconstruct(&set)?;
    let err = relative_data_error(&truth, &report.state, 1.0);
    let secs = start.elapsed().as_secs_f64();
    out.check("error <= 1e-9", err <= 1e-9)
        .check("no singular mode", report.singular_modes().is_empty())
        .check("runtime < 1 s", secs < 1.0)
        .note(format!("relative D¹×D⁰ error {err:.2e}, {secs:.3} s"));
    Ok(out)
}

fn closed_form_norm() -> Result<Outcome> {
    let mut out = Outcome::new();
    let system = WaveSystem::string(0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut accepted, mut worst) = (0usize, 0.0f64);
    while accepted < 10_000 {
        let k: u64 = rng.gen_range(1..=1000);
        let delta: f64 = rng.gen_range(0.0..2.0 * PI);
        if (k as f64 * delta).sin().abs() <= 1e-6 {
            continue;
        }
        let m = mode_map(&system, ModeIndex::Line(k), &[delta, 0.0], &[Role::Position, Role::Position])?;
        let svd = m.inverse_norm()?;
        let closed = m.closed_form_inverse_norm().expect("position pair");
        worst = worst.max(rel(closed, svd));
        accepted += 1;
    }
    out.check("max relative mismatch <= 1e-12", worst <= 1e-12)
        .note(format!("{accepted} samples, max relative mismatch {worst:.2e}"));
    Ok(out)
}

/// The stated window cannot hold: `k = 1` already gives `‖ξ‖ = 1 - ξ ≈ 0.382`,
/// and `k = 3` gives `≈ 0.438`. The values `k‖kξ‖` approach `1/√5` only
/// along the tail, alternately from above and below.
fn floor_window() -> Result<Outcome> {
    let mut out = Outcome::new();
    let xi = golden();
    let start = Instant::now();
    let scan = badly_approx_floor(&xi, 1.0, 100_000)?;
    let secs = start.elapsed().as_secs_f64();
    let sup = partial_quotient_sup(&xi, 64)?;
    let k = sup.value;
    let floor = theoretical_floor_from_k(&k)?;
    let floor_f = floor.to_f64().unwrap_or(0.0);
    out.check("in [0.447, 0.448]", (0.447..=0.448).contains(&scan.c_star))
        .check("> 1/(K+2) = 1/3", scan.lower_bound > floor_f)
        .check("exact arithmetic", scan.exact && sup.certain)
        .check("matches oracle", rel(scan.c_star, GOLDEN_FLOOR_1E5) <= 1e-12)
        .check("runtime < 10 s", secs < 10.0)
        .note(format!(
            "min k‖kξ‖ = {:.9} at k = {}, floor {floor} from K = {k}, {secs:.2} s",
            scan.c_star, scan.argmin
        ));
    Ok(out)
}

fn dirichlet() -> Result<Outcome> {
    let mut out = Outcome::new();
    let xi: ExactReal = "quad:(-1+1*sqrt(2))/1".parse()?;
    let witnesses = dirichlet_witnesses(&xi, 24)?;
    let one = ExactReal::integer(1);
    let all_exact = witnesses.iter().all(|k| {
        let d = xi.mul_int(k).nearest_int_distance();
        d.mul_int(k).cmp_exact(&one) == Some(std::cmp::Ordering::Less)
    });
    let cf = cf_expand(&xi, 64)?;
    let qs: Vec<BigInt> = convergents(&cf, 40)?.into_iter().map(|c| c.q).collect();
    let from_convergents = witnesses.iter().all(|k| qs.contains(k));
    out.check(">= 20 witnesses", witnesses.len() >= 20)
        .check("k‖kξ‖ < 1 exactly", all_exact)
        .check("convergent denominators", from_convergents)
        .note(format!(
            "{} witnesses, largest k = {}",
            witnesses.len(),
            witnesses.last().map(ToString::to_string).unwrap_or_default()
        ));
    Ok(out)
}

fn rational_refutation() -> Result<Outcome> {
    let mut out = Outcome::new();
    let system = WaveSystem::string(0.0)?;
    let third = ExactReal::ratio(1, 3)?;
    let t0 = PI / 3.0;
    let m3 = mode_map(&system, ModeIndex::Line(3), &[t0, 0.0], &[Role::Position, Role::Position])?
        .with_exact_gap(&system, &third);
    let phase_integer = m3.exact_phase_over_pi.as_ref().map(|p| p.nearest_int_distance().is_zero()) == Some(true);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let truth = random_real_state(system, Truncation::Line(8), 1.0, 0.0, &mut rng)?;
    let set = SnapshotSet::new(vec![evolve(&truth, t0), evolve(&truth, 0.0)])?.with_gap(third);
    let report = reconstruct(&set)?;
    let singular: Vec<String> = report.singular_modes().iter().map(ToString::to_string).collect();
    let worst = report
        .modes
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.singular)
        .map(|(i, m)| (m.a - truth.a[i]).norm().max((m.b - truth.b[i]).norm()))
        .fold(0.0, f64::max);
    out.check("det T_3 = 0 exactly", phase_integer && m3.is_singular())
        .check("mode 3 flagged", singular.contains(&"3".to_string()))
        .check("only multiples of 3 flagged", singular == ["3", "6"])
        .check("others to 1e-10", worst <= 1e-10)
        .note(format!("3ξ = {}, flagged {singular:?}, other modes max error {worst:.2e}", m3.exact_phase_over_pi.map(|p| p.to_string()).unwrap_or_default()));
    Ok(out)
}

fn loaded_chain() -> Result<Outcome> {
    let mut out = Outcome::new();
    let xi = golden();
    let delta = PI * xi.to_f64();
    let c = 2.0 / 3.0;
    let t = loaded_q_threshold(c, delta, None)?;
    let q = 0.1;
    let c_prime = c - delta * q / 2.0;
    let measured = (1..=10_000u64)
        .map(|k| {
            let kf = k as f64;
            kf * ((kf * kf + q).sqrt() * delta).sin().abs()
        })
        .fold(f64::INFINITY, f64::min);
    let cert = certify_loaded(&xi, &ExactReal::ratio(1, 10)?, 10_000)?;
    let section = cert.loaded.as_ref().expect("loaded section");
    let library_c_prime = section.guaranteed_sine_floor.unwrap_or(f64::NAN);

    let mut bound_holds = true;
    let mut worst_ratio = 0.0f64;
    for q in [0.1, 1.0, 5.0] {
        for k in 1..=10_000u64 {
            let (bound, gap) = perturbation_gap(k, q, delta)?;
            bound_holds &= gap <= bound;
            worst_ratio = worst_ratio.max(gap / bound);
        }
    }
    out.check("q_max ≈ 0.687", (t.q_max - 0.687).abs() < 5e-4)
        .check("c' > 0", c_prime > 0.0)
        .check("library c' agrees", rel(library_c_prime, c_prime) <= 1e-12)
        .check("measured >= c' - 1e-9", measured >= c_prime - 1e-9)
        .check("library floor agrees", rel(section.sine_floor, measured) <= 1e-12)
        .check("perturbation bound", bound_holds)
        .note(format!(
            "q_max = {:.6}, c' = {c_prime:.6}, measured {measured:.6}, max gap/bound {worst_ratio:.9}",
            t.q_max
        ));
    Ok(out)
}

fn beam() -> Result<Outcome> {
    let mut out = Outcome::new();
    let cert = certify_beam(&golden(), 2.0, 1000)?;
    out.check(">= 1/3", cert.observed_lower_bound >= 1.0 / 3.0)
        .check("certified-all-k", cert.verdict == Verdict::CertifiedAllK)
        .note(format!("min k²‖k²ξ‖ = {:.9} at k = {}, {}", cert.observed_floor, cert.argmin, cert.verdict));
    Ok(out)
}

fn plate() -> Result<Outcome> {
    let mut out = Outcome::new();
    let sqrt2: ExactReal = "quad:(0+1*sqrt(2))/1".parse()?;
    let reduced = PlateGap::from_geometry(&golden(), &ExactReal::integer(1), &sqrt2)?;
    let r = certify_plate(&reduced, 1.0, 50, 50)?;
    let floor = r.theoretical_floor.unwrap_or(f64::NAN);

    let general = PlateGap::new("root:3:2".parse()?, "root:3:4".parse()?);
    let g = certify_plate(&general, 2.0, 100, 100)?;
    out.check("reduced: reduction used", r.reduction.is_some())
        .check("reduced: floor >= 1/(N(K+2))", r.observed_lower_bound >= floor)
        .check("reduced: certified-all-k", r.verdict == Verdict::CertifiedAllK)
        .check("reduced: baseline", rel(r.observed_floor, PLATE_REDUCED_BASELINE) <= 1e-12)
        .check("general: c* > 0", g.observed_lower_bound > 0.0)
        .check("general: baseline", rel(g.observed_floor, PLATE_GENERAL_BASELINE) <= 1e-12)
        .note(format!(
            "reduced c* = {:.9} at {} (floor {}), general c* = {:.9} at {}",
            r.observed_floor,
            r.argmin,
            r.theoretical_floor_exact.as_deref().unwrap_or("-"),
            g.observed_floor,
            g.argmin
        ));
    Ok(out)
}

fn multi_time() -> Result<Outcome> {
    let mut out = Outcome::new();
    let two = BigRational::from_integer(2.into());
    let four = BigRational::from_integer(4.into());
    let mut values = Vec::new();
    for bits in [128, 192] {
        let taus = [ExactReal::root(&two, 3, bits)?, ExactReal::root(&four, 3, bits)?];
        let m = multi_time_floor_taus(&taus, 10_000)?;
        values.push((m.c_star, m.lower_bound, m.argmin));
    }
    let sig3 = |x: f64| format!("{x:.2e}");
    out.check("c* > 0", values.iter().all(|v| v.1 > 0.0))
        .check("3 significant digits stable", sig3(values[0].0) == sig3(values[1].0))
        .check("baseline", rel(values[1].0, MULTI_TIME_BASELINE) <= 1e-12)
        .note(format!(
            "128 bits {:.12} at k = {}, 192 bits {:.12} at k = {}",
            values[0].0, values[0].2, values[1].0, values[1].2
        ));
    Ok(out)
}

fn construction() -> Result<Outcome> {
    let mut out = Outcome::new();
    let c = construct_rational_gap(1.0, 0.01, &ExactReal::integer(5))?;
    let v = c.verify();
    let hits: Vec<(u64, String)> = c.hits.iter().map(|h| (h.k, h.x.to_string())).collect();
    let (min_sin, k) = c.spot_check(10_000);
    out.check("independent verification", v.passed)
        .check("square set {k=2, x=3}", hits == [(2, "3".to_string())])
        .check("divisibility conditions", v.prime_conditions && v.non_integer.iter().all(|(_, ok)| *ok))
        .check("spot check > 0", min_sin > 0.0)
        .check("spot check oracle", rel(min_sin, CONSTRUCT_SPOT_CHECK) <= 1e-6)
        .note(format!(
            "τ'/π = {}, τ' = {:.12}, min |sin| = {min_sin:.6e} at k = {k}",
            c.tau_prime_over_pi, c.tau_prime
        ));
    Ok(out)
}

/// With weights `k^s` on the modal side the per-mode ratio is
/// `(|a+b|² + (1 + q/k²)|a-b|²)/(|a|²+|b|²)`, which ranges over
/// `[2, 2(1 + q/k²)]`. The stated interval `[2/(1+q), 2]` is the range of
/// the reciprocal scaling and fails for every mode with `a ≠ b`.
fn conservation() -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let mut drift = 0.0f64;
    for system in [WaveSystem::string(0.0)?, WaveSystem::string(5.0)?, WaveSystem::Beam] {
        let state = random_real_state(system, Truncation::Line(64), 1.0, 0.0, &mut rng)?;
        let e0 = modal_energy(&state, 1.0);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-50.0..50.0);
            let at_t = to_modal(&evolve(&state, t), &evolve_velocity(&state, t), 1.0)?;
            drift = drift.max(rel(modal_energy(&at_t, 1.0), e0));
        }
    }

    let mut identity = 0.0f64;
    let free = WaveSystem::string(0.0)?;
    for s in [0.0, 1.0, 2.5] {
        let state = random_real_state(free, Truncation::Line(64), s, 0.0, &mut rng)?;
        let (y0, y1) = from_modal(&state);
        identity = identity.max(rel(data_norm_sq(&y0, &y1, s), 2.0 * modal_energy(&state, s)));
        let t: f64 = rng.gen_range(0.0..10.0);
        let lhs = sobolev_norm(&evolve(&state, t), s).powi(2) + sobolev_norm(&evolve_velocity(&state, t), s - 1.0).powi(2);
        identity = identity.max(rel(lhs, 2.0 * modal_energy(&state, s)));
    }

    let q = 5.0;
    let loaded = WaveSystem::string(q)?;
    let state = random_real_state(loaded, Truncation::Line(64), 1.0, 0.0, &mut rng)?;
    let (y0, y1) = from_modal(&state);
    let (mut stated_ok, mut derived_ok) = (true, true);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (i, idx) in state.truncation.modes().enumerate() {
        let k = match idx {
            ModeIndex::Line(k) => k as f64,
            _ => unreachable!(),
        };
        let num = k.powi(2) * y0.coefficients[i].norm_sqr() + y1.coefficients[i].norm_sqr();
        let den = k.powi(2) * (state.a[i].norm_sqr() + state.b[i].norm_sqr());
        let ratio = num / den;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        let tol = 1e-12 * ratio;
        stated_ok &= ratio >= 2.0 / (1.0 + q) - tol && ratio <= 2.0 + tol;
        let (blo, bhi) = energy_ratio_bounds(&loaded, idx)?;
        derived_ok &= ratio >= blo - tol && ratio <= bhi + tol;
    }
    out.check("energy drift <= 1e-12", drift <= 1e-12)
        .check("norm identity to 1e-12", identity <= 1e-12)
        .check("per-mode [2/(1+q), 2]", stated_ok)
        .check("per-mode [2, 2(1+q/k²)]", derived_ok)
        .note(format!(
            "drift {drift:.1e}, identity {identity:.1e}, q = 5 per-mode ratio in [{lo:.6}, {hi:.6}]"
        ));
    Ok(out)
}

fn noise() -> Result<Outcome> {
    let mut out = Outcome::new();
    let xi = golden();
    let system = WaveSystem::string(0.0)?;
    let mut rows = Vec::new();
    for n in [64, 256, 1024] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let state = random_real_state(system, Truncation::Line(n), 0.0, 0.0, &mut rng)?;
        let s = noise_experiment(&state, &xi, 1e-6, 20, 11)?;
        rows.push((n, s));
    }
    let within = rows.iter().all(|(_, s)| (0.1..=10.0).contains(&s.ratio));
    let growing = rows.windows(2).all(|w| w[1].1.rms_error > w[0].1.rms_error && w[1].1.prediction > w[0].1.prediction);
    let enveloped = rows
        .iter()
        .all(|(_, s)| s.certificate_envelope.is_some_and(|e| s.rms_error <= e));
    out.check("within [0.1, 10] of prediction", within)
        .check("monotone in N", growing)
        .check("below certificate envelope", enveloped)
        .note(
            rows.iter()
                .map(|(n, s)| {
                    format!(
                        "N={n}: {:.3e} / {:.3e} = {:.3} (envelope {:.3e})",
                        s.rms_error,
                        s.prediction,
                        s.ratio,
                        s.certificate_envelope.unwrap_or(f64::NAN)
                    )
                })
                .collect::<Vec<_>>()
                .join(", "),
        );
    Ok(out)
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "round-trip reconstruction", round_trip),
        (2, "closed-form inverse norm", closed_form_norm),
        (3, "golden floor window", floor_window),
        (4, "Dirichlet witnesses", dirichlet),
        (5, "rational-gap refutation", rational_refutation),
        (6, "loaded-string chain", loaded_chain),
        (7, "beam certification", beam),
        (8, "plate reduced and general", plate),
        (9, "multi-time floor", multi_time),
        (10, "rational-gap construction", construction),
        (11, "conservation and norm identity", conservation),
        (12, "noise amplification", noise),
    ];
    let mut unexpected = Vec::new();
    let mut failed = 0;
    for (id, name, run) in criteria {
        match run() {
            Ok(o) => {
                let ok = o.parts.iter().all(|p| p.ok);
                let bad: Vec<&str> = o.parts.iter().filter(|p| !p.ok).map(|p| p.label).collect();
                println!(
                    "{} criterion {id:>2} {name}: {}{}",
                    if ok { "PASS" } else { "FAIL" },
                    o.detail,
                    if bad.is_empty() { String::new() } else { format!(" [failed: {}]", bad.join(", ")) }
                );
                if !ok {
                    failed += 1;
                }
                for label in bad {
                    if !KNOWN_FALSE.contains(&(id, label)) {
                        unexpected.push(format!("{id}: {label}"));
                    }
                }
            }
            Err(e) => {
                println!("FAIL criterion {id:>2} {name}: error {e}");
                failed += 1;
                unexpected.push(format!("{id}: {e}"));
            }
        }
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if !unexpected.is_empty() {
        println!("unexpected failures: {}", unexpected.join("; "));
        std::process::exit(1);
    }
}
