use lvphase::ensembles::{
    sample_matrix, uniform_growth_vector, vector_stats, EnsembleKind, EnsembleSpec, GrowthVector, LOGCONCAVE_RAW_VARIANCE,
};
use lvphase::seed::SeedScheme;
use proptest::prelude::*;

const KINDS: [EnsembleKind; 3] = [EnsembleKind::Gaussian, EnsembleKind::BernoulliPm1, EnsembleKind::LogConcave];

/// Mean, raw second moment, raw fourth moment and kurtosis of one sample.
fn moments(kind: EnsembleKind, n: usize, seed: u64) -> (f64, f64, f64, f64) {
    let a = sample_matrix(EnsembleSpec::new(kind, n), SeedScheme::new(seed, 0)).unwrap();
    let m = (n * n) as f64;
    let mut s = [0.0f64; 4];
    for j in 0..n {
        for i in 0..n {
            let v = a[(i, j)];
            s[0] += v;
            s[1] += v * v;
            s[2] += v * v * v;
            s[3] += v * v * v * v;
        }
    }
    let mean = s[0] / m;
    let var = s[1] / m - mean * mean;
    (mean, s[1] / m, s[3] / m, (s[3] / m) / (var * var))
}

#[test]
fn standardized_within_three_standard_errors() {
    let n = 1000;
    let m = (n * n) as f64;
    for kind in KINDS {
        let (mean, m2, m4, _) = moments(kind, n, 17);
        let se_m2 = ((m4 - m2 * m2) / m).sqrt();
        assert!(mean.abs() <= 3.0 / m.sqrt(), "{kind}: mean {mean}");
        assert!((m2 - 1.0).abs() <= 3.0 * se_m2 + 1e-12, "{kind}: second moment {m2}");
        assert!((m2 - mean * mean - 1.0).abs() <= 0.01, "{kind}: variance");
    }
}

#[test]
fn bernoulli_entries_are_signs() {
    let a = sample_matrix(EnsembleSpec::new(EnsembleKind::BernoulliPm1, 700), SeedScheme::new(3, 1)).unwrap();
    let mut plus = 0usize;
    for j in 0..700 {
        for i in 0..700 {
            let v = a[(i, j)];
            assert!(v == 1.0 || v == -1.0);
            plus += (v > 0.0) as usize;
        }
    }
    let frac = plus as f64 / 490_000.0;
    assert!((frac - 0.5).abs() < 3.0 * 0.5 / 700.0);
}

#[test]
fn logconcave_kurtosis_is_stable_across_seeds() {
    // density ∝ exp(-y²/2 - |y|), standardized; kurtosis from the exact moments
    // E|Y|^k = ∫ y^k e^{-y²/2 - y} dy / ∫ e^{-y²/2 - y} dy on y > 0
    let moment = |k: i32| -> f64 {
        let h = 1e-4;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..200_000 {
            let y = (i as f64 + 0.5) * h;
            let w = (-0.5 * y * y - y).exp();
            num += y.powi(k) * w;
            den += w;
        }
        num / den
    };
    let m2 = moment(2);
    let exact_kurtosis = moment(4) / (m2 * m2);
    assert!((m2 - LOGCONCAVE_RAW_VARIANCE).abs() < 1e-6);
    for seed in [1, 2, 3] {
        let (_, _, _, k) = moments(EnsembleKind::LogConcave, 600, seed);
        assert!(k.is_finite() && (k - exact_kurtosis).abs() < 0.05, "seed {seed}: kurtosis {k} vs {exact_kurtosis}");
    }
    assert!(exact_kurtosis > 3.0 && exact_kurtosis < 4.0);
}

#[test]
fn uniform13_sigma_matches_integral() {
    // ∫₀¹ (1 + 2x)² dx = 13/3
    let target = (13.0f64 / 3.0).sqrt();
    for n in [10_000, 100_000] {
        let s = vector_stats(&uniform_growth_vector(n));
        assert!((s.sigma_r - target).abs() < 1e-3, "n = {n}: {}", s.sigma_r);
    }
}

#[test]
fn homogeneous_stats() {
    let s = GrowthVector::ones(37).stats();
    assert_eq!((s.r_min, s.r_max, s.sigma_r), (1.0, 1.0, 1.0));
    let s = GrowthVector::new(vec![2.0, 3.0]).unwrap().stats();
    assert_eq!((s.r_min, s.r_max), (2.0, 3.0));
    assert!((s.sigma_r - 6.5f64.sqrt()).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_is_a_pure_function_of_the_seed(master in any::<u64>(), trial in 0u64..1000, n in 1usize..40, k in 0usize..3) {
        let spec = EnsembleSpec::new(KINDS[k], n);
        let a = sample_matrix(spec, SeedScheme::new(master, trial)).unwrap();
        let b = sample_matrix(spec, SeedScheme::new(master, trial)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn growth_stats_are_ordered(values in prop::collection::vec(0.01f64..100.0, 1..60)) {
        let s = GrowthVector::new(values).unwrap().stats();
        prop_assert!(s.r_min > 0.0 && s.r_min <= s.r_max);
        // root mean square lies between the extremes
        prop_assert!(s.sigma_r >= s.r_min * (1.0 - 1e-12) && s.sigma_r <= s.r_max * (1.0 + 1e-12));
    }
}
