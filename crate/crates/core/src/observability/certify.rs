//! Strategic-pair certificates for the string, beam and plate.
//!
//! All floors are on the nearest-integer scale `‖·‖`; the matching sine-scale
//! constant follows from `|sin πx| >= 2‖x‖`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::loaded::LoadedSection;
use crate::diophantine::{
    badly_approx_floor, box_scan, dirichlet_witnesses, linear_form_floor, partial_quotient_sup,
    scan_with_multiplier, theoretical_floor_from_k, ExactReal, FloorScan, LinearFormScan,
};
use crate::spectral::ModeIndex;
use crate::{Error, Result};

/// Outcome of a certification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A partial-quotient bound covers every index.
    CertifiedAllK,
    /// Positive floor on the scanned range only.
    CertifiedUpToScan,
    /// An exact zero distance exists.
    Refuted,
    /// Enclosures could not exclude a zero distance.
    InconclusiveFloat,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedAllK => "certified-all-k",
            Verdict::CertifiedUpToScan => "certified-up-to-scan",
            Verdict::Refuted => "refuted",
            Verdict::InconclusiveFloat => "inconclusive-float",
        })
    }
}

/// Range covered by the scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ScanExtent {
    Line { k_max: u64 },
    Box { m_max: u64, n_max: u64 },
}

/// Everything a certification run established.
#[derive(Clone, Debug, Serialize)]
pub struct StrategicCertificate {
    pub system: String,
    /// `(t0 - t1)/π`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_over_pi: Option<ExactReal>,
    /// Plate phases `(θ1, θ2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<[ExactReal; 2]>,
    /// `r - s`.
    pub orders_gap: f64,
    /// Exponent of the scan weight (`r - s`, or `(r - s)/2` for the plate).
    pub exponent: f64,
    pub scan: ScanExtent,
    /// Smallest scanned value of the weighted distance.
    pub observed_floor: f64,
    /// Rigorous lower bound for the scanned range.
    pub observed_lower_bound: f64,
    pub argmin: ModeIndex,
    pub exact_arithmetic: bool,
    /// `K` of the relevant number when its expansion is fully known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_quotient_sup: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theoretical_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theoretical_floor_exact: Option<String>,
    /// Constant proven for the range the verdict covers.
    pub guaranteed_floor: f64,
    /// Same constant on the `k^α |sin|` scale.
    pub sine_scale_floor: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dirichlet_witnesses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loaded: Option<LoadedSection>,
    pub notes: Vec<String>,
}

impl StrategicCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    fn base(system: &str, orders_gap: f64, exponent: f64, scan: ScanExtent) -> Self {
        Self {
            system: system.into(),
            gap_over_pi: None,
            thetas: None,
            orders_gap,
            exponent,
            scan,
            observed_floor: 0.0,
            observed_lower_bound: 0.0,
            argmin: ModeIndex::Line(1),
            exact_arithmetic: false,
            partial_quotient_sup: None,
            theoretical_floor: None,
            theoretical_floor_exact: None,
            guaranteed_floor: 0.0,
            sine_scale_floor: 0.0,
            verdict: Verdict::CertifiedUpToScan,
            reduction: None,
            dirichlet_witnesses: Vec::new(),
            loaded: None,
            notes: Vec::new(),
        }
    }

    fn set_guaranteed(&mut self, g: f64) {
        self.guaranteed_floor = g;
        self.sine_scale_floor = 2.0 * g;
    }
}

fn check_exponent(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("exponent must be finite and >= 0, got {alpha}")))
    }
}

/// Exact rational value, including dyadic point enclosures.
pub(crate) fn exact_rational(x: &ExactReal) -> Option<BigRational> {
    match x {
        ExactReal::Rational(r) => Some(r.clone()),
        ExactReal::Float(e) if e.is_point() => Some(e.lo()),
        _ => None,
    }
}

/// Smallest `K` over the two expansions of `±ξ` (both bound `k‖kξ‖`), when
/// the expansion is fully known and `ξ` is irrational.
pub(crate) fn certain_k(xi: &ExactReal) -> Option<BigInt> {
    if !matches!(xi, ExactReal::Quadratic(_)) {
        return None;
    }
    let a = partial_quotient_sup(xi, 64).ok()?;
    let b = partial_quotient_sup(&xi.neg(), 64).ok()?;
    match (a.certain, b.certain) {
        (true, true) => Some(a.value.min(b.value)),
        (true, false) => Some(a.value),
        (false, true) => Some(b.value),
        _ => None,
    }
}

/// Smallest `k >= 1` with `q | k²`.
fn smallest_square_multiple_root(q: &BigInt) -> BigInt {
    let mut rest = q.abs();
    let mut k = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1u64 << 20);
    while &p * &p <= rest && p < limit {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            k *= num_traits::pow(p.clone(), e.div_ceil(2) as usize);
        }
        p += 1;
    }
    if rest > BigInt::one() {
        // remaining factor is prime (or unfactored; then this overshoots
        // but still satisfies q | k²)
        k *= rest;
    }
    k
}

fn ratio_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn finish_line(
    mut cert: StrategicCertificate,
    xi: &ExactReal,
    scan: FloorScan,
    all_k_exponent: f64,
    zero_beyond: impl Fn(&BigInt) -> BigInt,
) -> StrategicCertificate {
    cert.gap_over_pi = Some(xi.clone());
    cert.observed_floor = scan.c_star;
    cert.observed_lower_bound = scan.lower_bound;
    cert.argmin = ModeIndex::Line(scan.argmin);
    cert.exact_arithmetic = scan.exact;
    if scan.exact_zero {
        cert.verdict = Verdict::Refuted;
        cert.notes.push(format!("exact zero distance at k = {}", scan.argmin));
        return cert;
    }
    if let Some(r) = exact_rational(xi) {
        let k = zero_beyond(r.denom());
        cert.verdict = Verdict::Refuted;
        cert.notes.push(format!(
            "rational gap: the distance vanishes at k = {k}, beyond the scanned range"
        ));
        if let Some(k) = k.to_u64() {
            cert.argmin = ModeIndex::Line(k);
        }
        return cert;
    }
    if !xi.is_exact() {
        if scan.zero_not_excluded {
            cert.verdict = Verdict::InconclusiveFloat;
            cert.notes.push("an enclosure could not exclude a zero distance".into());
        } else {
            cert.set_guaranteed(scan.lower_bound);
            cert.notes
                .push("enclosure input: the floor holds on the scanned range only".into());
        }
        return cert;
    }
    match certain_k(xi) {
        Some(k) => {
            let floor = theoretical_floor_from_k(&k).expect("K >= 1");
            cert.partial_quotient_sup = Some(k.to_string());
            cert.theoretical_floor = floor.to_f64();
            cert.theoretical_floor_exact = Some(ratio_text(&floor));
            if cert.exponent >= all_k_exponent {
                cert.verdict = Verdict::CertifiedAllK;
                cert.set_guaranteed(floor.to_f64().expect("small"));
            } else {
                cert.set_guaranteed(scan.lower_bound);
                cert.notes.push(format!(
                    "exponent below {all_k_exponent}: the partial-quotient bound does not extend past the scan"
                ));
            }
        }
        None => {
            cert.set_guaranteed(scan.lower_bound);
            cert.notes.push("partial quotients not fully known".into());
        }
    }
    cert
}

/// Certificate for the string: `min_k k^α ‖kξ‖`, extended to every `k` by
/// `k‖kξ‖ >= 1/(K+2)` when `α >= 1` and `K(ξ)` is known.
pub fn certify_string(xi: &ExactReal, alpha: f64, k_max: u64) -> Result<StrategicCertificate> {
    check_exponent(alpha)?;
    let scan = badly_approx_floor(xi, alpha, k_max)?;
    let base = StrategicCertificate::base("string", alpha, alpha, ScanExtent::Line { k_max });
    let mut cert = finish_line(base, xi, scan, 1.0, |q| q.clone());
    if alpha < 1.0 && xi.is_known_irrational() {
        if let Ok(w) = dirichlet_witnesses(xi, 5) {
            cert.dirichlet_witnesses = w.iter().map(ToString::to_string).collect();
        }
        cert.notes.push(
            "exponent below 1: infinitely many k have ‖kξ‖ < 1/k, so k^α‖kξ‖ has no positive lower bound"
                .into(),
        );
    }
    Ok(cert)
}

/// Certificate for the hinged beam: `min_k k^α ‖k²ξ‖`, extended to every `k`
/// when `α >= 2` via `k²‖k²ξ‖ >= 1/(K+2)`.
pub fn certify_beam(xi: &ExactReal, alpha: f64, k_max: u64) -> Result<StrategicCertificate> {
    check_exponent(alpha)?;
    let scan = scan_with_multiplier(xi, alpha, k_max, |k| BigInt::from(k) * k)?;
    let base = StrategicCertificate::base("beam", alpha, alpha, ScanExtent::Line { k_max });
    Ok(finish_line(base, xi, scan, 2.0, smallest_square_multiple_root))
}

/// Plate phases `θ1 = π(t0-t1)/a²`, `θ2 = π(t0-t1)/b²`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlateGap {
    pub theta1: ExactReal,
    pub theta2: ExactReal,
}

impl PlateGap {
    pub fn new(theta1: ExactReal, theta2: ExactReal) -> Self {
        Self { theta1, theta2 }
    }

    /// From `ξ = (t0-t1)/π` and the sides in units of `π`: `θ1 = ξ/(a/π)²`.
    pub fn from_geometry(xi: &ExactReal, a_over_pi: &ExactReal, b_over_pi: &ExactReal) -> Result<Self> {
        let t1 = xi.div(&a_over_pi.mul(a_over_pi))?;
        let t2 = xi.div(&b_over_pi.mul(b_over_pi))?;
        Ok(Self::new(t1, t2))
    }

    /// `Some((N, θ, swapped))` when `θ1 = Nθ2` (or `θ2 = Nθ1` if swapped)
    /// for a positive integer `N`, decided exactly.
    pub fn reduction(&self) -> Option<(BigInt, ExactReal, bool)> {
        let integer_ratio = |x: &ExactReal, y: &ExactReal| -> Option<BigInt> {
            if !x.is_exact() || !y.is_exact() || y.is_zero() {
                return None;
            }
            let r = x.div(y).ok()?;
            let r = r.as_rational()?;
            (r.is_integer() && r.is_positive()).then(|| r.to_integer())
        };
        if let Some(n) = integer_ratio(&self.theta1, &self.theta2) {
            return Some((n, self.theta2.clone(), false));
        }
        integer_ratio(&self.theta2, &self.theta1).map(|n| (n, self.theta1.clone(), true))
    }
}

/// Certificate for the hinged plate:
/// `min (m²+n²)^α ‖m²θ1 + n²θ2‖` over the box, with `α = (r-s)/2`.
///
/// When `θ1 = Nθ2` the scan runs on the single number `θ2` with index
/// `Nm² + n²`; then `(m²+n²)^α ‖(Nm²+n²)θ‖ >= 1/(N(K+2))` for `α >= 1`.
pub fn certify_plate(gap: &PlateGap, alpha: f64, m_max: u64, n_max: u64) -> Result<StrategicCertificate> {
    check_exponent(alpha)?;
    let mut cert =
        StrategicCertificate::base("plate", 2.0 * alpha, alpha, ScanExtent::Box { m_max, n_max });
    cert.thetas = Some([gap.theta1.clone(), gap.theta2.clone()]);
    let reduction = gap.reduction();
    let scan: LinearFormScan = match &reduction {
        Some((n, theta, swapped)) => {
            cert.reduction = Some(if *swapped {
                format!("theta2 = {n}*theta1")
            } else {
                format!("theta1 = {n}*theta2")
            });
            let mut s = box_scan(m_max, n_max, alpha, |m, k| {
                let (mm, kk) = (BigInt::from(m * m), BigInt::from(k * k));
                let j = if *swapped { mm + n * kk } else { n * mm + kk };
                theta.mul_int(&j)
            })?;
            s.exact = theta.is_exact();
            s.precision_bits = theta.precision_bits();
            s
        }
        None => linear_form_floor(&gap.theta1, &gap.theta2, alpha, m_max, n_max)?,
    };
    cert.observed_floor = scan.c_star;
    cert.observed_lower_bound = scan.lower_bound;
    cert.argmin = ModeIndex::Grid(scan.argmin.0, scan.argmin.1);
    cert.exact_arithmetic = scan.exact;
    if scan.exact_zero {
        cert.verdict = Verdict::Refuted;
        cert.notes.push(format!("exact zero distance at {}", cert.argmin));
        return Ok(cert);
    }
    if let (Some(r1), Some(r2)) = (exact_rational(&gap.theta1), exact_rational(&gap.theta2)) {
        let l = r1.denom().lcm(r2.denom());
        cert.verdict = Verdict::Refuted;
        cert.notes.push(format!(
            "rational phases: the distance vanishes at (m, n) = ({l}, {l}), beyond the box"
        ));
        if let Some(l) = l.to_u64() {
            cert.argmin = ModeIndex::Grid(l, l);
        }
        return Ok(cert);
    }
    if scan.zero_not_excluded {
        cert.verdict = Verdict::InconclusiveFloat;
        cert.notes.push("an enclosure could not exclude a zero distance".into());
        return Ok(cert);
    }
    cert.set_guaranteed(scan.lower_bound);
    match reduction {
        Some((n, theta, _)) => match certain_k(&theta) {
            Some(k) => {
                let floor = BigRational::new(BigInt::one(), &n * (&k + 2));
                cert.partial_quotient_sup = Some(k.to_string());
                cert.theoretical_floor = floor.to_f64();
                cert.theoretical_floor_exact = Some(ratio_text(&floor));
                if alpha >= 1.0 {
                    cert.verdict = Verdict::CertifiedAllK;
                    cert.set_guaranteed(floor.to_f64().expect("small"));
                } else {
                    cert.notes
                        .push("r - s below 2: no bound beyond the box for the reduced form".into());
                }
            }
            None => cert.notes.push("reduced phase without a known partial-quotient bound".into()),
        },
        None => cert.notes.push(
            "general linear form: positivity is established on the box only".into(),
        ),
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> ExactReal {
        ExactReal::golden_fraction()
    }

    #[test]
    fn string_examples() {
        let c = certify_string(&golden(), 1.0, 10_000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedAllK);
        assert_eq!(c.theoretical_floor_exact.as_deref(), Some("1/3"));
        assert!((c.observed_floor - 0.381_966_011_250_105).abs() < 1e-12);

        let c = certify_string(&ExactReal::ratio(1, 3).unwrap(), 1.0, 100).unwrap();
        assert_eq!((c.verdict, c.argmin), (Verdict::Refuted, ModeIndex::Line(3)));

        let c = certify_string(&"float:0.718281828459045".parse().unwrap(), 1.0, 1000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedUpToScan);
        assert!(c.guaranteed_floor > 0.0);
    }

    #[test]
    fn rational_beyond_scan_is_refuted() {
        let c = certify_string(&ExactReal::ratio(1, 1000).unwrap(), 1.0, 10).unwrap();
        assert_eq!((c.verdict, c.argmin), (Verdict::Refuted, ModeIndex::Line(1000)));
    }

    #[test]
    fn small_exponent_records_obstruction() {
        let c = certify_string(&golden(), 0.5, 1000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedUpToScan);
        assert_eq!(c.dirichlet_witnesses.len(), 5);
    }

    #[test]
    fn verdict_invariant_under_shift_and_sign() {
        let xi = ExactReal::sqrt_of(2).unwrap();
        let base = certify_string(&xi, 1.0, 500).unwrap();
        for other in [xi.neg(), xi.add(&ExactReal::integer(7)), xi.neg().sub(&ExactReal::integer(3))] {
            let c = certify_string(&other, 1.0, 500).unwrap();
            assert_eq!(c.verdict, base.verdict);
            assert_eq!(c.argmin, base.argmin);
            assert!((c.observed_floor - base.observed_floor).abs() < 1e-15);
        }
    }

    #[test]
    fn beam_examples() {
        let c = certify_beam(&golden(), 2.0, 1000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedAllK);
        assert!(c.observed_floor >= 1.0 / 3.0);
        let c = certify_beam(&ExactReal::ratio(1, 5).unwrap(), 2.0, 100).unwrap();
        assert_eq!((c.verdict, c.argmin), (Verdict::Refuted, ModeIndex::Line(5)));
        let c = certify_beam(&ExactReal::ratio(1, 12).unwrap(), 2.0, 3).unwrap();
        assert_eq!((c.verdict, c.argmin), (Verdict::Refuted, ModeIndex::Line(6)));
        let c = certify_beam(&golden(), 1.5, 1000).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedUpToScan);
    }

    #[test]
    fn plate_examples() {
        // b² = 2a²: θ1 = 2θ2
        let theta = golden();
        let gap = PlateGap::new(theta.mul_int(&2.into()), theta.clone());
        let c = certify_plate(&gap, 1.0, 50, 50).unwrap();
        assert_eq!(c.reduction.as_deref(), Some("theta1 = 2*theta2"));
        assert_eq!(c.verdict, Verdict::CertifiedAllK);
        assert!(c.observed_floor >= 1.0 / 6.0);
        let direct = linear_form_floor(&gap.theta1, &gap.theta2, 1.0, 50, 50).unwrap();
        assert_eq!(direct.c_star, c.observed_floor);

        let half = ExactReal::ratio(1, 2).unwrap();
        let c = certify_plate(&PlateGap::new(half.clone(), half), 2.0, 10, 10).unwrap();
        assert_eq!((c.verdict, c.argmin), (Verdict::Refuted, ModeIndex::Grid(1, 1)));

        let gap = PlateGap::new("root:3:2".parse().unwrap(), "root:3:4".parse().unwrap());
        assert!(gap.reduction().is_none());
        let c = certify_plate(&gap, 2.0, 20, 20).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedUpToScan);
        assert!(c.observed_floor > 0.0);
    }

    #[test]
    fn plate_geometry() {
        let xi = ExactReal::ratio(1, 3).unwrap();
        let a = ExactReal::integer(1);
        let b = ExactReal::sqrt_of(2).unwrap();
        let g = PlateGap::from_geometry(&xi, &a, &b).unwrap();
        assert_eq!(g.theta1, xi);
        assert_eq!(g.theta2, ExactReal::ratio(1, 6).unwrap());
        assert_eq!(g.reduction().unwrap().0, 2.into());
    }

    #[test]
    fn square_multiple_roots() {
        for (q, k) in [(1, 1), (5, 5), (12, 6), (8, 4), (36, 6), (49, 7), (50, 10)] {
            assert_eq!(smallest_square_multiple_root(&q.into()), k.into(), "{q}");
        }
    }
}
