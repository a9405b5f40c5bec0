//! Non-homogeneous growth r_i = 1 + 2i/n: infeasible below t1, feasible above
//! t2, undecided in between.

use lvphase::ensembles::uniform_growth_vector;
use lvphase::experiments::{grid_range, nh_feasibility_curve, uniform13_threshold_limits, CampaignConfig, GrowthSpec};

fn main() -> lvphase::Result<()> {
    let (l1, l2) = uniform13_threshold_limits();
    println!("limits: t1 = {l1:.5}, t2 = {l2:.5}");
    let s = uniform_growth_vector(500).stats();
    println!("n = 500: r_min = {:.4}, r_max = {:.4}, sigma_r = {:.4}", s.r_min, s.r_max, s.sigma_r);

    let cfg = CampaignConfig {
        n_list: vec![500],
        kappa_grid: grid_range(0.5, 3.5, 0.25)?,
        trials: 150,
        growth: GrowthSpec::Uniform13,
        coupled: true,
        ..CampaignConfig::default()
    };
    let out = nh_feasibility_curve(&cfg)?;
    let th = out.thresholds[0];
    for p in &out.curves[0].points {
        let zone = if p.abscissa < th.t1 {
            "below t1"
        } else if p.abscissa > th.t2 {
            "above t2"
        } else {
            "buffer"
        };
        println!("kappa {:>5.2}  proportion {:>6.3}  {zone}", p.abscissa, p.proportion);
    }
    Ok(())
}
