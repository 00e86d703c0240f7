//! The loaded string: the small-load threshold, the perfect-square
//! hypothesis for rational gaps, and a shifted gap for a heavy load.

use std::f64::consts::PI;

use strategic_pairs::constructions::loaded_gap_search;
use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::observability::{certify_loaded, loaded_q_threshold, perturbation_gap};

fn main() -> strategic_pairs::Result<()> {
    let golden = ExactReal::golden_fraction();
    let delta = PI * golden.to_f64();
    let t = loaded_q_threshold(2.0 / 3.0, delta, None)?;
    println!("Δ = π ξ = {delta:.6}: loads q < {:.6} keep the string bound", t.q_max);

    for q in ["1/10", "1", "5"] {
        let qv = ExactReal::parse_lenient(q)?;
        let cert = certify_loaded(&golden, &qv, 10_000)?;
        let l = cert.loaded.as_ref().expect("loaded section");
        println!(
            "q = {q:>4}: {}, min k|sin ω_kΔ| = {:.6} at k = {}, threshold route {}",
            cert.verdict, l.sine_floor, l.sine_floor_argmin, l.threshold_route_applies
        );
        let worst = (1..=10_000u64)
            .map(|k| perturbation_gap(k, qv.to_f64(), delta).map(|(b, m)| m.abs() / b))
            .collect::<strategic_pairs::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("          max_k |sin ω_kΔ - sin kΔ| / (Δq/(2k)) = {worst:.6}");
    }

    for (xi, q) in [("rat:1/2", 5), ("rat:1/3", 5)] {
        let cert = certify_loaded(&xi.parse()?, &ExactReal::integer(q), 1000)?;
        let h = &cert.loaded.as_ref().expect("loaded").hypothesis;
        println!("ξ = {xi}, q = {q}: {:?}, squares {:?}, {}", h.status, h.perfect_square_hits, cert.verdict);
    }

    let found = loaded_gap_search(10.0, &golden, 100, 10_000)?;
    println!(
        "q = 10: shift n = {}, ξ_n = {} ≈ {:.6}, margin 2ν - ξ_nπq/2 = {:.5}, min k|sin| = {:.5}",
        found.n, found.xi_n, found.xi_n.to_f64(), found.margin, found.sine_floor
    );
    Ok(())
}
