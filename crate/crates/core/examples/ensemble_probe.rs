//! The transition is universal: Bernoulli ±1 and log-concave entries behave
//! like Gaussian ones.

use lvphase::ensembles::EnsembleKind;
use lvphase::experiments::{feasibility_curve, CampaignConfig};

fn main() -> lvphase::Result<()> {
    let grid = vec![0.8, 1.2, 1.6, 2.2];
    print!("{:>12}", "ensemble");
    for k in &grid {
        print!(" {:>7}", format!("k={k}"));
    }
    println!();
    for kind in [EnsembleKind::Gaussian, EnsembleKind::BernoulliPm1, EnsembleKind::LogConcave] {
        let cfg = CampaignConfig {
            ensemble: kind,
            n_list: vec![400],
            kappa_grid: grid.clone(),
            trials: 150,
            coupled: true,
            smoothing: None,
            ..CampaignConfig::default()
        };
        let out = feasibility_curve(&cfg)?;
        print!("{:>12}", kind.as_str());
        for p in &out.curves[0].points {
            print!(" {:>7.3}", p.proportion);
        }
        println!();
    }
    Ok(())
}
