//! Continued fractions, convergents and the ν estimate of a few gaps.

use strategic_pairs::constructions::{cf_shift_identity, cf_shift_sequence};
use strategic_pairs::diophantine::{
    cf_expand, convergents, dirichlet_witnesses, nu_liminf_estimate, partial_quotient_sup, ExactReal,
};

fn main() -> strategic_pairs::Result<()> {
    for text in ["quad:(-1+1*sqrt(5))/2", "quad:(-1+1*sqrt(2))/1", "quad:(0+1*sqrt(7))/1", "rat:355/113", "root:3:2"] {
        let x: ExactReal = text.parse()?;
        let cf = cf_expand(&x, 16)?;
        let terms: Vec<String> = cf.prefix(16).iter().map(|t| t.to_string()).collect();
        println!("{text}");
        println!("  terms       [{}]  ({:?})", terms.join(", "), cf.termination());
        if !x.is_rational() {
            let k = partial_quotient_sup(&x, 64)?;
            let nu = nu_liminf_estimate(&x, 24)?;
            println!("  K           {} (certain: {})", k.value, k.certain);
            println!("  ν estimate  {:.9} (drift {:.1e})", nu.estimate, nu.drift);
        }
        let conv = convergents(&cf, cf.available().map_or(6, |a| a.min(6)))?;
        let c: Vec<String> = conv.iter().map(|c| format!("{}/{}", c.p, c.q)).collect();
        println!("  convergents {}", c.join(", "));
    }

    let w = dirichlet_witnesses(&"quad:(-1+1*sqrt(2))/1".parse()?, 8)?;
    println!("‖kξ‖ < 1/k for √2 - 1 at k = {w:?}");

    let g = ExactReal::golden_fraction();
    for (n, x) in cf_shift_sequence(&g, 4)?.iter().enumerate() {
        let head: Vec<String> = cf_expand(x, 5)?.prefix(5).iter().map(|t| t.to_string()).collect();
        println!(
            "ξ_{n} = {x} ≈ {:.12}  [{}]  shift identity {}",
            x.to_f64(),
            head.join(", "),
            cf_shift_identity(&g, x, n, 10)?
        );
    }
    Ok(())
}
