//! Beam and plate certificates, and the mode-map norms they control.

use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::observability::{certify_beam, certify_plate, mode_map, PlateGap};
use strategic_pairs::spectral::{ModeIndex, Role, WaveSystem};

fn main() -> strategic_pairs::Result<()> {
    let golden = ExactReal::golden_fraction();
    let beam = certify_beam(&golden, 2.0, 1000)?;
    println!(
        "beam, α = 2: {} — min k²‖k²ξ‖ = {:.12} at k = {}, guaranteed {:.6}",
        beam.verdict, beam.observed_floor, beam.argmin, beam.guaranteed_floor
    );
    let refuted = certify_beam(&ExactReal::ratio(1, 8)?, 2.0, 100)?;
    println!("beam, ξ = 1/8: {} at k = {}", refuted.verdict, refuted.argmin);

    // b² = 2a²: the two phases are commensurable, θ1 = 2θ2
    let sqrt2: ExactReal = "quad:(0+1*sqrt(2))/1".parse()?;
    let reduced = PlateGap::from_geometry(&golden, &ExactReal::integer(1), &sqrt2)?;
    let cert = certify_plate(&reduced, 1.0, 50, 50)?;
    println!(
        "plate b² = 2a², r - s = 2: {} via {}, c* = {:.12} at {}, floor {}",
        cert.verdict,
        cert.reduction.as_deref().unwrap_or("-"),
        cert.observed_floor,
        cert.argmin,
        cert.theoretical_floor_exact.as_deref().unwrap_or("-")
    );

    let general = PlateGap::new("root:3:2".parse()?, "root:3:4".parse()?);
    let cert = certify_plate(&general, 2.0, 100, 100)?;
    println!(
        "plate θ = (2^(1/3), 2^(2/3)), r - s = 4: {}, c* = {:.12} at {}",
        cert.verdict, cert.observed_floor, cert.argmin
    );

    let plate = WaveSystem::plate(std::f64::consts::PI, std::f64::consts::PI * 2f64.sqrt())?;
    let t0 = std::f64::consts::PI * golden.to_f64();
    for idx in [ModeIndex::Grid(1, 1), ModeIndex::Grid(3, 2), ModeIndex::Grid(7, 5)] {
        let m = mode_map(&plate, idx, &[t0, 0.0], &[Role::Position, Role::Position])?;
        println!("  T_{idx}: |det| = {:.4e}, ‖T⁻¹‖ = {:.4}", m.det()?.norm(), m.inverse_norm()?);
    }
    Ok(())
}
