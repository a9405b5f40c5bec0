use lvphase::ensembles::{sample_matrix, uniform_growth_vector, EnsembleKind, EnsembleSpec, GrowthVector};
use lvphase::equilibrium::{
    decompose_with, solve_equilibrium, solve_equilibrium_with, AlphaRule, GuardPolicy, SolveOptions, RESIDUAL_TOL,
};
use lvphase::evt::alpha_star;
use lvphase::linalg::largest_singular_value;
use lvphase::seed::SeedScheme;
use proptest::prelude::*;

fn gaussian(n: usize, master: u64, trial: u64) -> faer::Mat<f64> {
    sample_matrix(EnsembleSpec::new(EnsembleKind::Gaussian, n), SeedScheme::new(master, trial)).unwrap()
}

#[test]
fn z_has_unit_variance_at_ten_thousand() {
    // Z = A 1/√n from the same column-major stream as sample_matrix, without
    // holding the 10⁴ × 10⁴ matrix
    let n = 10_000;
    let seed = SeedScheme::new(4, 0);
    let mut rng = seed.rng();
    let mut z = vec![0.0f64; n];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi += EnsembleKind::Gaussian.draw(&mut rng);
        }
    }
    let sqrt_n = (n as f64).sqrt();
    let mean = z.iter().sum::<f64>() / (n as f64 * sqrt_n);
    let var = z.iter().map(|v| (v / sqrt_n - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    assert!((var - 1.0).abs() <= 0.05, "variance {var}");

    // the streamed row sums agree with the solver's Z on a small case
    let small = 64;
    let a = sample_matrix(EnsembleSpec::new(EnsembleKind::Gaussian, small), seed).unwrap();
    let mut rng = seed.rng();
    let mut zs = vec![0.0f64; small];
    for _ in 0..small {
        for zi in zs.iter_mut() {
            *zi += EnsembleKind::Gaussian.draw(&mut rng);
        }
    }
    let sol = solve_equilibrium(a.as_ref(), 5.0, &GrowthVector::ones(small)).unwrap();
    for (x, y) in sol.z.iter().zip(&zs) {
        assert!((x - y / (small as f64).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn gaussian_operator_norm_near_two() {
    let n = 2000;
    let a = gaussian(n, 6, 0);
    let s = largest_singular_value(a.as_ref(), 1e-5, 5000).unwrap() / (n as f64).sqrt();
    assert!((1.9..=2.1).contains(&s), "s(A/√n) = {s}");
}

#[test]
fn feasible_at_kappa_two_point_two() {
    // ≥ 95% of seeded trials; 120 trials keep the runtime modest
    let n = 2000;
    let alpha = AlphaRule::KappaSqrtLog(2.2).resolve(n).unwrap();
    let r = GrowthVector::ones(n);
    let trials = 120;
    let feasible = (0..trials)
        .filter(|&t| {
            let a = gaussian(n, 12, t);
            solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::Certificate))
                .unwrap()
                .feasible
        })
        .count();
    assert!(feasible * 100 >= 95 * trials as usize, "{feasible}/{trials}");
}

#[test]
fn remainder_extremes_shrink_with_n() {
    // mean over trials of max_k R_k and |min_k R_k|, scaled by α√(2 log n), at α = α*
    let trials = 200;
    let stats: Vec<(f64, f64)> = [500usize, 1000, 2000]
        .iter()
        .map(|&n| {
            let alpha = alpha_star(n);
            let scale = alpha * (2.0 * (n as f64).ln()).sqrt();
            let r = GrowthVector::ones(n);
            let (mut hi, mut lo) = (0.0, 0.0);
            for t in 0..trials {
                let a = gaussian(n, 21, t);
                let sol = solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::Certificate))
                    .unwrap();
                hi += sol.r_resid.iter().copied().fold(f64::NEG_INFINITY, f64::max) / scale;
                lo += sol.r_resid.iter().copied().fold(f64::INFINITY, f64::min).abs() / scale;
            }
            (hi / trials as f64, lo / trials as f64)
        })
        .collect();
    for w in stats.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1, "{stats:?}");
    }
}

#[test]
fn nh_minimum_is_sandwiched() {
    // r_min - σ_r α*/α (1 + ε) ≤ min_k x_k ≤ r_max with ε = 0.5
    let n = 2000;
    let r = uniform_growth_vector(n);
    let s = r.stats();
    for (t, kappa) in [(0u64, 1.5), (1, 2.5), (2, 3.5), (3, 5.0)] {
        let alpha = AlphaRule::KappaSqrtLog(kappa).resolve(n).unwrap();
        let a = gaussian(n, 31, t);
        let sol = solve_equilibrium(a.as_ref(), alpha, &r).unwrap();
        let lower = s.r_min - s.sigma_r * alpha_star(n) / alpha * 1.5;
        assert!(sol.min_x >= lower && sol.min_x <= s.r_max, "kappa {kappa}: {} not in [{lower}, {}]", sol.min_x, s.r_max);
    }
}

#[test]
fn decomposition_routes_agree_at_500() {
    let n = 500;
    let r = GrowthVector::ones(n);
    let a = gaussian(n, 40, 0);
    let alpha = AlphaRule::KappaSqrtLog(1.8).resolve(n).unwrap();
    let sol = solve_equilibrium(a.as_ref(), alpha, &r).unwrap();
    let (z, rem) = decompose_with(a.as_ref(), alpha, &r).unwrap();
    let scale = sol.max_x.abs().max(1.0);
    for k in 0..n {
        let rebuilt = 1.0 + z[k] / alpha + rem[k] / (alpha * alpha);
        assert!((rebuilt - sol.x[k]).abs() / scale <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn accepted_solves_are_certified(n in 2usize..120, kappa in 0.3f64..4.0, seed in any::<u64>(), nh in any::<bool>()) {
        let a = gaussian(n, seed, 0);
        let r = if nh { uniform_growth_vector(n) } else { GrowthVector::ones(n) };
        let alpha = AlphaRule::KappaSqrtLog(kappa).resolve(n).unwrap();
        let opts = SolveOptions { cross_check_remainder: Some(true), ..SolveOptions::default() };
        match solve_equilibrium_with(a.as_ref(), alpha, &r, &opts) {
            Ok(sol) => {
                prop_assert!(sol.residual <= RESIDUAL_TOL);
                prop_assert!(sol.remainder_gap.unwrap() <= 1e-10);
                prop_assert!(sol.reconstruction_error(&r) <= 1e-10);
                prop_assert_eq!(sol.feasible, sol.x.iter().all(|&v| v > 0.0));
                prop_assert!(sol.guard_sigma.unwrap() > 0.0);
            }
            Err(e) => prop_assert!(e.is_degenerate(), "unexpected error {e}"),
        }
    }

    #[test]
    fn singular_value_policy_is_stricter(n in 2usize..80, kappa in 0.3f64..3.0, seed in any::<u64>()) {
        let a = gaussian(n, seed, 1);
        let r = GrowthVector::ones(n);
        let alpha = AlphaRule::KappaSqrtLog(kappa).resolve(n).unwrap();
        let strict = solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::SingularValue));
        let loose = solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::Certificate));
        if strict.is_ok() {
            prop_assert!(loose.is_ok());
        }
    }
}
