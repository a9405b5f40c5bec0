//! Jacobian spectrum at a feasible equilibrium: eigenvalues sit near -x_k.

use lvphase::ensembles::{sample_matrix, EnsembleKind, EnsembleSpec, GrowthVector};
use lvphase::equilibrium::{solve_equilibrium, AlphaRule};
use lvphase::plot::spectrum_svg;
use lvphase::seed::SeedScheme;
use lvphase::stability::{perturbation_norm, stability_metrics};

fn main() -> lvphase::Result<()> {
    let n = 400;
    let alpha = AlphaRule::MultipleOfCritical(2.0).resolve(n)?;
    let a = sample_matrix(EnsembleSpec::new(EnsembleKind::Gaussian, n), SeedScheme::new(3, 0))?;
    let r = GrowthVector::ones(n);
    let sol = solve_equilibrium(a.as_ref(), alpha, &r)?;
    println!("alpha = {alpha:.4}, feasible = {}, x in [{:.4}, {:.4}]", sol.feasible, sol.min_x, sol.max_x);

    let rep = stability_metrics(&sol.x, a.as_ref(), alpha, &r)?;
    let radius = perturbation_norm(&sol.x, a.as_ref(), alpha)?;
    println!("max Re(lambda)        = {:.4}", rep.max_re);
    println!("rho_plus              = {:.4}", rep.rho_plus);
    println!("max_l min_k |l + x_k| = {:.4}", rep.match_dist);
    println!("Bauer-Fike radius     = {radius:.4}");
    println!("stable: {}", rep.stable);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, spectrum_svg(&rep.eigenvalues, "Jacobian spectrum")).expect("cannot write svg");
        println!("wrote {path}");
    }
    Ok(())
}
