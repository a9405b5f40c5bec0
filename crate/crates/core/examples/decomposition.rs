//! The equilibrium splits as x = r + Z/α + R/α² with Z = A r/√n Gaussian.

use lvphase::ensembles::{sample_matrix, EnsembleKind, EnsembleSpec, GrowthVector};
use lvphase::equilibrium::{solve_equilibrium, AlphaRule};
use lvphase::seed::SeedScheme;

fn main() -> lvphase::Result<()> {
    let r = GrowthVector::ones(300);
    for kappa in [1.0, 1.5, 2.5] {
        let alpha = AlphaRule::KappaSqrtLog(kappa).resolve(300)?;
        let a = sample_matrix(EnsembleSpec::new(EnsembleKind::Gaussian, 300), SeedScheme::new(8, 0))?;
        let sol = solve_equilibrium(a.as_ref(), alpha, &r)?;
        let argmin = (0..300).min_by(|&i, &j| sol.x[i].total_cmp(&sol.x[j])).unwrap();
        let z_min = sol.z.iter().copied().fold(f64::INFINITY, f64::min);
        let r_max = sol.r_resid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        println!(
            "kappa {kappa}: min x = {:+.4} = 1 {:+.4} {:+.4}  (min Z = {z_min:.3}, max |R| = {r_max:.3}, reconstruction error {:.1e})",
            sol.min_x,
            sol.z[argmin] / alpha,
            sol.r_resid[argmin] / (alpha * alpha),
            sol.reconstruction_error(&r)
        );
    }
    Ok(())
}
