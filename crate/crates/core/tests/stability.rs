use faer::Mat;
use lvphase::ensembles::{sample_matrix, EnsembleKind, EnsembleSpec, GrowthVector};
use lvphase::equilibrium::{solve_equilibrium, solve_equilibrium_with, AlphaRule, GuardPolicy, SolveOptions};
use lvphase::experiments::{stability_campaign, GrowthSpec, StabilityConfig};
use lvphase::seed::SeedScheme;
use lvphase::stability::{
    jacobian, lv_integrate, match_distance, perturbation_norm, rho_plus, spectrum, spectrum_verified,
    stability_metrics, IntegrationSettings, DEFAULT_MAX_EIGEN_DIM,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn gaussian(n: usize, master: u64, trial: u64) -> Mat<f64> {
    sample_matrix(EnsembleSpec::new(EnsembleKind::Gaussian, n), SeedScheme::new(master, trial)).unwrap()
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn eigenvalues_of_an_eight_by_eight_sum_to_the_trace() {
    let m = gaussian(8, 2, 0);
    let ev = spectrum(m.as_ref()).unwrap();
    assert_eq!(ev.len(), 8);
    let trace: f64 = (0..8).map(|i| m[(i, i)]).sum();
    let sum: Complex64 = ev.iter().sum();
    assert!((sum.re - trace).abs() < 1e-8 && sum.im.abs() < 1e-8);
}

#[test]
fn triangular_spectrum_is_the_diagonal() {
    let m = Mat::from_fn(5, 5, |i, j| if j >= i { (i + 1) as f64 + j as f64 * 0.1 } else { 0.0 });
    let ev = sorted(spectrum_verified(m.as_ref()).unwrap());
    for (k, l) in ev.iter().enumerate() {
        assert!((l.re - (k as f64 + 1.0 + k as f64 * 0.1)).abs() < 1e-10 && l.im.abs() < 1e-10);
    }
}

#[test]
fn jacobian_matches_its_definition() {
    let n = 6;
    let a = gaussian(n, 3, 0);
    let x: Vec<f64> = (0..n).map(|k| 0.5 + k as f64 * 0.25).collect();
    let alpha = 2.5;
    let j = jacobian(&x, a.as_ref(), alpha).unwrap();
    let c = 1.0 / (alpha * (n as f64).sqrt());
    for k in 0..n {
        for l in 0..n {
            let want = x[k] * a[(k, l)] * c - if k == l { x[k] } else { 0.0 };
            assert!((j[(k, l)] - want).abs() < 1e-15);
        }
    }
    assert!(jacobian(&x[..3], a.as_ref(), alpha).is_err());
    assert!(jacobian(&x, a.as_ref(), 0.0).is_err());
}

#[test]
fn bauer_fike_holds_per_trial() {
    let n = 300;
    let r = GrowthVector::ones(n);
    for (t, kappa) in [(0u64, 1.6), (1, 2.0), (2, 3.0), (3, 4.0)] {
        let a = gaussian(n, 11, t);
        let alpha = AlphaRule::KappaSqrtLog(kappa).resolve(n).unwrap();
        let sol = solve_equilibrium(a.as_ref(), alpha, &r).unwrap();
        let report = stability_metrics(&sol.x, a.as_ref(), alpha, &r).unwrap();
        let radius = perturbation_norm(&sol.x, a.as_ref(), alpha).unwrap();
        assert!(report.match_dist <= radius * (1.0 + 1e-9), "kappa {kappa}: {} > {radius}", report.match_dist);
    }
}

#[test]
fn equilibria_stay_inside_the_estimate() {
    let n = 2000;
    let r = GrowthVector::ones(n);
    let alpha = AlphaRule::MultipleOfCritical(2.0).resolve(n).unwrap();
    let rho = rho_plus(n, alpha, &r);
    assert!((rho - 0.5).abs() < 1e-12);
    for t in 0..60 {
        let a = gaussian(n, 13, t);
        let sol = solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::Certificate)).unwrap();
        assert!(sol.min_x >= 1.0 - rho - 0.15, "trial {t}: min {}", sol.min_x);
        assert!(sol.max_x <= 1.0 + rho + 0.15, "trial {t}: max {}", sol.max_x);
    }
}

#[test]
fn spectrum_hugs_the_abundances() {
    let cfg = StabilityConfig {
        ensemble: EnsembleKind::Gaussian,
        n: 1000,
        trials: 20,
        alpha_rule: AlphaRule::MultipleOfCritical(2.0),
        growth: GrowthSpec::Ones,
        master_seed: 17,
        bauer_fike: false,
        max_dim: DEFAULT_MAX_EIGEN_DIM,
        workers: 0,
    };
    let campaign = stability_campaign(&cfg).unwrap();
    assert_eq!(campaign.degenerate, 0);
    let alpha = campaign.trials[0].alpha;
    let rho = campaign.trials[0].report.rho_plus;
    let mut dists: Vec<f64> = campaign.trials.iter().map(|t| t.report.match_dist).collect();
    dists.sort_by(f64::total_cmp);
    let median = 0.5 * (dists[9] + dists[10]);
    assert!(median <= (1.0 + rho) / alpha * 2.5, "median {median}");
    assert!(campaign.trials.iter().all(|t| t.report.stable && t.feasible));
}

#[test]
fn eigensolver_dimension_is_capped() {
    let cfg = StabilityConfig {
        ensemble: EnsembleKind::Gaussian,
        n: 50,
        trials: 2,
        alpha_rule: AlphaRule::MultipleOfCritical(2.0),
        growth: GrowthSpec::Ones,
        master_seed: 1,
        bauer_fike: true,
        max_dim: 40,
        workers: 1,
    };
    assert!(stability_campaign(&cfg).is_err());
    let cfg = StabilityConfig { max_dim: 50, ..cfg };
    let out = stability_campaign(&cfg).unwrap();
    assert!(out.trials.iter().all(|t| t.bauer_fike_radius.unwrap() >= t.report.match_dist));
}

#[test]
fn match_distance_uses_nearest_abundance() {
    let ev = [Complex64::new(-1.0, 0.5), Complex64::new(-3.2, 0.0)];
    let d = match_distance(&ev, &[3.0, 1.0, 2.0]);
    assert!((d - 0.5).abs() < 1e-15);
}

/// `x' = x(1 - x)`, solved exactly.
fn logistic(x0: f64, t: f64) -> f64 {
    x0 * t.exp() / (1.0 - x0 + x0 * t.exp())
}

#[test]
fn rk4_is_fourth_order_on_the_logistic() {
    let a = Mat::<f64>::zeros(1, 1);
    let r = GrowthVector::ones(1);
    let err = |dt: f64| {
        let s = IntegrationSettings { t_end: 4.0, dt, stride: 1 };
        let tr = lv_integrate(a.as_ref(), 1.0, &r, &[0.1], &s).unwrap();
        (tr.final_state()[0] - logistic(0.1, 4.0)).abs()
    };
    let ratio = err(0.2) / err(0.1);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn equilibrium_is_a_fixed_point() {
    let n = 60;
    let r = GrowthVector::ones(n);
    let a = gaussian(n, 19, 0);
    let alpha = AlphaRule::MultipleOfCritical(2.0).resolve(n).unwrap();
    let sol = solve_equilibrium(a.as_ref(), alpha, &r).unwrap();
    let s = IntegrationSettings { t_end: 5.0, dt: 0.01, stride: 50 };
    let tr = lv_integrate(a.as_ref(), alpha, &r, &sol.x, &s).unwrap();
    for state in &tr.states {
        let gap = state.iter().zip(&sol.x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-8, "drift {gap}");
    }
    assert_eq!(tr.times.len(), 11);
}

#[test]
fn halving_the_step_agrees() {
    let n = 40;
    let r = GrowthVector::ones(n);
    let a = gaussian(n, 23, 0);
    let alpha = AlphaRule::MultipleOfCritical(2.0).resolve(n).unwrap();
    let x0: Vec<f64> = (0..n).map(|k| 0.8 + 0.01 * k as f64).collect();
    let run = |dt: f64| {
        let s = IntegrationSettings { t_end: 3.0, dt, stride: 1000 };
        lv_integrate(a.as_ref(), alpha, &r, &x0, &s).unwrap().final_state().to_vec()
    };
    let gap = run(0.005).iter().zip(run(0.0025)).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-8, "gap {gap}");
}

#[test]
fn integration_rejects_bad_input() {
    let a = Mat::<f64>::zeros(2, 2);
    let r = GrowthVector::ones(2);
    let s = IntegrationSettings::default();
    assert!(lv_integrate(a.as_ref(), 1.0, &r, &[1.0, 0.0], &s).is_err());
    assert!(lv_integrate(a.as_ref(), 1.0, &r, &[1.0], &s).is_err());
    assert!(lv_integrate(a.as_ref(), -1.0, &r, &[1.0, 1.0], &s).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn real_spectra_come_in_conjugate_pairs(n in 1usize..40, seed in any::<u64>()) {
        let m = gaussian(n, seed, 0);
        let ev = sorted(spectrum(m.as_ref()).unwrap());
        let conj = sorted(ev.iter().map(|l| l.conj()).collect());
        prop_assert_eq!(ev.len(), n);
        for (u, v) in ev.iter().zip(&conj) {
            prop_assert!((u - v).norm() < 1e-10, "{} vs {}", u, v);
        }
    }

    #[test]
    fn bauer_fike_radius_bounds_matching(n in 2usize..40, kappa in 1.5f64..4.0, seed in any::<u64>()) {
        let a = gaussian(n, seed, 1);
        let r = GrowthVector::ones(n);
        let alpha = AlphaRule::KappaSqrtLog(kappa).resolve(n).unwrap();
        if let Ok(sol) = solve_equilibrium(a.as_ref(), alpha, &r) {
            let report = stability_metrics(&sol.x, a.as_ref(), alpha, &r).unwrap();
            let radius = perturbation_norm(&sol.x, a.as_ref(), alpha).unwrap();
            prop_assert!(report.match_dist <= radius * (1.0 + 1e-9) + 1e-12);
        }
    }
}
