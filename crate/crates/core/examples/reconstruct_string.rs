//! Recover string initial data from two snapshots, from a position/velocity
//! pair, and by least squares from three; then show a resonant gap.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::reconstruction::{mixed_reconstruct, reconstruct, relative_data_error, SnapshotSet};
use strategic_pairs::spectral::{evolve, evolve_velocity, random_real_state, Truncation, WaveSystem};

fn main() -> strategic_pairs::Result<()> {
    let system = WaveSystem::string(0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let truth = random_real_state(system, Truncation::Line(256), 1.0, 1.0, &mut rng)?;

    let xi = ExactReal::golden_fraction();
    let t0 = PI * xi.to_f64();
    let set = SnapshotSet::new(vec![evolve(&truth, t0), evolve(&truth, 0.0)])?.with_gap(xi.clone());
    let report = reconstruct(&set)?;
    let (worst, cond) = report.worst_mode().expect("modes");
    println!("two positions, N = 256");
    println!("  relative D¹×D⁰ error  {:.3e}", relative_data_error(&truth, &report.state, 1.0));
    println!("  worst condition       {cond:.2} at mode {worst}");

    let set = SnapshotSet::new(vec![evolve(&truth, 0.7), evolve_velocity(&truth, 0.0)])?;
    let report = mixed_reconstruct(&set)?;
    println!("position at 0.7, velocity at 0");
    println!("  relative error        {:.3e}", relative_data_error(&truth, &report.state, 1.0));
    println!("  singular modes        {:?}", report.singular_modes());

    let set = SnapshotSet::new(vec![evolve(&truth, t0), evolve(&truth, 0.0), evolve(&truth, 2.1)])?;
    let report = reconstruct(&set)?;
    println!("three positions (least squares)");
    println!("  relative error        {:.3e}, max residual {:.1e}", relative_data_error(&truth, &report.state, 1.0), report.max_residual());

    let third = ExactReal::ratio(1, 3)?;
    let small = random_real_state(system, Truncation::Line(12), 1.0, 0.0, &mut rng)?;
    let set = SnapshotSet::new(vec![evolve(&small, PI / 3.0), evolve(&small, 0.0)])?.with_gap(third);
    let report = reconstruct(&set)?;
    println!("gap π/3: singular modes {:?}", report.singular_modes().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("{}", report.to_csv(Some(&small))?.lines().take(5).collect::<Vec<_>>().join("\n"));
    Ok(())
}
