//! Perturb a feasible equilibrium by 10% and watch the system relax back.

use lvphase::experiments::{relaxation_campaign, RelaxationConfig};

fn main() -> lvphase::Result<()> {
    let cfg = RelaxationConfig {
        n: 100,
        trials: 4,
        stride: 500,
        ..RelaxationConfig::default()
    };
    for t in relaxation_campaign(&cfg)? {
        println!("trial {} (alpha = {:.3}):", t.trial, t.alpha);
        for (time, lo, hi, d) in &t.samples {
            println!("  t = {time:>5.1}  x in [{lo:.4}, {hi:.4}]  |x - x*| = {d:.2e}");
        }
        println!("  returned within {:.0e}: {}", cfg.tolerance, t.returned);
    }
    Ok(())
}
