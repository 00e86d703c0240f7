//! Three observation instants: the floor drops to exponent 1/2.

use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::observability::{multi_time_floor, multi_time_floor_taus};

fn main() -> strategic_pairs::Result<()> {
    let two = num_rational::BigRational::from_integer(2.into());
    let four = num_rational::BigRational::from_integer(4.into());
    for bits in [128, 192] {
        let taus = [ExactReal::root(&two, 3, bits)?, ExactReal::root(&four, 3, bits)?];
        let m = multi_time_floor_taus(&taus, 10_000)?;
        println!(
            "{bits} bits: min k^(1/2) max_p ‖kτ_p‖ = {:.15} at k = {} (zero excluded: {})",
            m.c_star, m.argmin, !m.zero_not_excluded
        );
    }

    // times t1 = 0, t2 = -π/2, t3 = -π·φ: one rational difference is rescued by the other
    let times = [ExactReal::integer(0), ExactReal::ratio(-1, 2)?, "quad:(-1-1*sqrt(5))/2".parse()?];
    let m = multi_time_floor(&times, 2000)?;
    println!("τ = (1/2, φ): c* = {:.12} at k = {}", m.c_star, m.argmin);
    Ok(())
}
