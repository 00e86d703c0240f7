//! Certify the golden gap for the string, then watch a rational gap fail.

use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::observability::certify_string;

fn main() -> strategic_pairs::Result<()> {
    let golden = ExactReal::golden_fraction();
    let cert = certify_string(&golden, 1.0, 100_000)?;
    println!("ξ = {golden}");
    println!("  verdict          {}", cert.verdict);
    println!("  min k‖kξ‖        {:.15} at k = {}", cert.observed_floor, cert.argmin);
    println!("  K(ξ)             {}", cert.partial_quotient_sup.as_deref().unwrap_or("?"));
    println!("  1/(K+2)          {}", cert.theoretical_floor_exact.as_deref().unwrap_or("?"));
    println!("  |sin kΔ| >= {:.6}/k for every k", cert.sine_scale_floor);

    let third = ExactReal::ratio(1, 3)?;
    let cert = certify_string(&third, 1.0, 100)?;
    println!("ξ = {third}: {} at k = {}", cert.verdict, cert.argmin);

    // below the critical exponent only Dirichlet witnesses remain
    let cert = certify_string(&"quad:(-1+1*sqrt(2))/1".parse()?, 0.5, 1000)?;
    println!("√2 - 1 with α = 1/2: {}, witnesses {:?}", cert.verdict, cert.dirichlet_witnesses);
    Ok(())
}
