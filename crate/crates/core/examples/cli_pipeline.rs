//! The experiment runner driven from code: simulate, reconstruct, certify.

use strategic_pairs::cli::{run, CommandKind, ExperimentConfig};
use strategic_pairs::diophantine::ExactReal;
use strategic_pairs::spectral::Truncation;

fn main() -> strategic_pairs::Result<()> {
    let out = std::env::temp_dir().join("strategic-pipeline");
    let mut sim = ExperimentConfig::new(CommandKind::Simulate);
    sim.gap = Some(ExactReal::golden_fraction());
    sim.modes = Truncation::Line(32);
    sim.seed = 42;
    sim.out_dir = out.clone();
    println!("{}", run(&sim)?.summary);

    let mut rec = ExperimentConfig::new(CommandKind::Reconstruct);
    rec.out_dir = out.clone();
    rec.truth = vec![out.join("initial_y0.json"), out.join("initial_y1.json")];
    let r = run(&rec)?;
    println!("{} (exit {})", r.summary, r.code);

    let mut cert = ExperimentConfig::new(CommandKind::Certify);
    cert.gap = Some(ExactReal::golden_fraction());
    cert.out_dir = out.clone();
    let c = run(&cert)?;
    println!("{}", c.summary);
    for f in c.files {
        println!("  {}", f.display());
    }
    Ok(())
}
