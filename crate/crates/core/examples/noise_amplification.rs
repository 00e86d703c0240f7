//! How snapshot noise is amplified as the truncation grows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::reconstruction::{noise_experiment, sensitivity_profile};
use strategic_pairs::spectral::{random_real_state, Truncation, WaveSystem};

fn main() -> strategic_pairs::Result<()> {
    let golden = ExactReal::golden_fraction();
    let system = WaveSystem::string(0.0)?;
    println!("{:>6} {:>12} {:>12} {:>7} {:>12}", "N", "rms error", "prediction", "ratio", "envelope");
    for n in [64, 256, 1024] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let state = random_real_state(system, Truncation::Line(n), 0.0, 0.0, &mut rng)?;
        let s = noise_experiment(&state, &golden, 1e-6, 20, 11)?;
        println!(
            "{n:>6} {:>12.4e} {:>12.4e} {:>7.3} {:>12.4e}",
            s.rms_error,
            s.prediction,
            s.ratio,
            s.certificate_envelope.unwrap_or(f64::NAN)
        );
    }
    let rows = sensitivity_profile(&golden, &system, 1.0, 10)?;
    for r in rows {
        println!("  ‖T_{}⁻¹‖ = {:.4} <= {:.4}", r.index, r.inverse_norm, r.bound.unwrap_or(f64::NAN));
    }
    Ok(())
}
