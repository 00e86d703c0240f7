//! Build rational gaps near a target that avoid every sine zero of the
//! loaded string, and check them independently.

use strategic_pairs::constructions::construct_rational_gap;
use strategic_pairs::diophantine::ExactReal;

fn main() -> strategic_pairs::Result<()> {
    let cases = [
        (1.0, 0.01, ExactReal::integer(5)),
        (2.0, 0.1, ExactReal::ratio(7, 2)?),
        (1.0, 0.01, ExactReal::ratio(5, 4)?),
        (-3.0, 0.001, ExactReal::integer(15)),
        (2.5, 0.05, ExactReal::sqrt_of(2)?),
    ];
    for (tau, delta, q) in cases {
        let c = construct_rational_gap(tau, delta, &q)?;
        let v = c.verify();
        let (min_sin, k) = c.spot_check(10_000);
        let hits: Vec<String> = c.hits.iter().map(|h| format!("k={} x={}", h.k, h.x)).collect();
        println!("τ = {tau}, δ = {delta}, q = {q}");
        println!("  branch     {:?}", c.branch);
        println!("  τ'/π       {}  (τ' = {:.12}, |τ-τ'| <= {:.3e})", c.tau_prime_over_pi, c.tau_prime, c.distance_bound);
        println!("  squares    [{}]", hits.join(", "));
        if let (Some(p), Some(n)) = (c.prime, c.power) {
            println!("  p^n        {p}^{n}, from a/b = {}", c.base_fraction);
        }
        println!("  verified   {}  (min |sin| = {min_sin:.3e} at k = {k})", v.passed);
    }
    match construct_rational_gap(1.0, 0.1, &ExactReal::integer(0)) {
        Err(e) => println!("q = 0: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
