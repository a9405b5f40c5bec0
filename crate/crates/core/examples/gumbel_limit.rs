//! Extreme-value constants and the Gumbel limit of Gaussian maxima.

use lvphase::evt::{alpha_star, empirical_gumbel_check, gumbel_constants, h1, h2, ldp_tail, ExtremeKind};

fn main() -> lvphase::Result<()> {
    println!("{:>9} {:>8} {:>8} {:>8}", "n", "1/a*", "a*", "b*");
    for e in 2..=6 {
        let n = 10usize.pow(e);
        let c = gumbel_constants(n)?;
        println!("{n:>9} {:>8.4} {:>8.4} {:>8.4}", 1.0 / alpha_star(n), c.alpha_star, c.beta_star);
    }

    println!("\nKS distance to exp(-e^-x), 2000 maxima:");
    for e in [2, 4, 6] {
        let n = 10usize.pow(e);
        let max = empirical_gumbel_check(n, 2000, ExtremeKind::Max, 5)?;
        let min = empirical_gumbel_check(n, 2000, ExtremeKind::Min, 5)?;
        println!("n = 10^{e}: max {max:.4}, min {min:.4}");
    }

    println!("\nH1(1000) = {:.4}, H2(1000) = {:.4}", h1(1000), h2(1000));
    println!("P(max > 1.1 a*) ~ {:.3e} at n = 10^4", ldp_tail(1.1, 10_000)?);
    Ok(())
}
