//! Feasibility exactly at α = √(2 log n), against the two finite-n heuristics.

use lvphase::ensembles::EnsembleKind;
use lvphase::experiments::critical_scan;

fn main() -> lvphase::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map_or(200, |s| s.parse().expect("trials must be an integer"));
    let n_list: Vec<usize> = (100..=1600).step_by(300).collect();
    let scan = critical_scan(&n_list, trials, EnsembleKind::Gaussian, 11)?;

    println!("{:>6} {:>10} {:>8} {:>8}", "n", "empirical", "H1", "H2");
    for (i, p) in scan.curve.points.iter().enumerate() {
        println!(
            "{:>6} {:>6.3}±{:.3} {:>8.4} {:>8.4}",
            n_list[i], p.proportion, p.half_width, scan.h1[i], scan.h2[i]
        );
    }
    let (d1, d2) = scan.mean_abs_deviation();
    println!("mean |p - H1| = {d1:.4}, mean |p - H2| = {d2:.4}");
    Ok(())
}
