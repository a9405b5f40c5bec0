//! Feasibility phase transition in κ = α/√(log n), at two dimensions.
//!
//! ```text
//! cargo run --release --example phase_transition -- [trials] [svg path]
//! ```

use lvphase::experiments::{feasibility_curve, grid_range, CampaignConfig};
use lvphase::plot::{curves_svg, VerticalRule};

fn main() -> lvphase::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map_or(200, |s| s.parse().expect("trials must be an integer"));
    let svg = args.next();

    // one matrix per trial shared across the grid keeps the curves smooth
    let cfg = CampaignConfig {
        n_list: vec![100, 400],
        kappa_grid: grid_range(0.5, 2.5, 0.1)?,
        trials,
        coupled: true,
        ..CampaignConfig::default()
    };
    let out = feasibility_curve(&cfg)?;

    println!("{:>6} {:>8} {:>8}", "kappa", "n=100", "n=400");
    for (i, k) in cfg.kappa_grid.iter().enumerate() {
        println!(
            "{k:>6.2} {:>8.3} {:>8.3}",
            out.curves[0].points[i].proportion, out.curves[1].points[i].proportion
        );
    }
    for c in &out.curves {
        match c.band_width(0.1, 0.9) {
            Some(w) => println!("n = {}: proportion climbs from 0.1 to 0.9 over Δκ = {w:.3}", c.n),
            None => println!("n = {}: band not resolved on this grid", c.n),
        }
    }

    if let Some(path) = svg {
        let rules = [VerticalRule::new(std::f64::consts::SQRT_2, "κ = √2")];
        std::fs::write(&path, curves_svg(&out.curves, &rules, "Transition toward feasibility", "κ"))
            .expect("cannot write svg");
        println!("wrote {path}");
    }
    Ok(())
}
