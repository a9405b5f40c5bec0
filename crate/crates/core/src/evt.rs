//! Extreme values of Gaussian samples and the critical-scaling heuristics.
//!
//! With `α*_n = √(2 log n)` and `β*_n = α*_n - log(4π log n) / (2 α*_n)`, the
//! maximum `M_n` of `n` standard Gaussians satisfies
//! `P{α*_n (M_n - β*_n) ≤ x} → exp(-e^{-x})`, and symmetrically for the minimum.
//! Convergence is only `O(1/log n)`, which is why the feasibility probability at
//! the critical scaling stays visibly below one at any simulated size.
//!
//! The tail rule of thumb: the Gumbel approximation
//! `P{M_n > x/α*_n + β*_n} ≈ 1 - G(x)` may be used for `1 ≪ x ≪ log n`, the range
//! where it agrees with the large-deviation estimate [`ldp_tail`]. No API
//! enforces this; the Monte Carlo tests only check both at the order-of-magnitude
//! level.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::seed::{derive_stream, SeedScheme, TrialRng};

/// `√(2 log n)`.
pub fn alpha_star(n: usize) -> f64 {
    (2.0 * (n as f64).ln()).sqrt()
}

/// Normalization pair `(α*_n, β*_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvtConstants {
    pub n: usize,
    pub alpha_star: f64,
    pub beta_star: f64,
}

impl EvtConstants {
    /// `α*(M_n - β*)`, asymptotically Gumbel.
    pub fn normalize_max(&self, max: f64) -> f64 {
        self.alpha_star * (max - self.beta_star)
    }

    /// `-α*(M̌_n + β*)`, asymptotically Gumbel.
    pub fn normalize_min(&self, min: f64) -> f64 {
        -self.alpha_star * (min + self.beta_star)
    }
}

pub fn gumbel_constants(n: usize) -> Result<EvtConstants> {
    if n < 2 {
        return Err(Error::Domain(format!("extreme-value constants need n >= 2, got {n}")));
    }
    let log_n = (n as f64).ln();
    let alpha_star = (2.0 * log_n).sqrt();
    let beta_star = alpha_star - (4.0 * std::f64::consts::PI * log_n).ln() / (2.0 * alpha_star);
    Ok(EvtConstants {
        n,
        alpha_star,
        beta_star,
    })
}

/// Gumbel distribution function `exp(-exp(-x))`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Feasibility probability at `α = α*_n` predicted when the remainder term is
/// kept as an independent unit-variance Gaussian:
/// `1 - √(e / (4π log n)) + e / (8π log n)`. Requires `n ≥ 2`.
pub fn h1(n: usize) -> f64 {
    let log_n = (n as f64).ln();
    let e = std::f64::consts::E;
    let pi = std::f64::consts::PI;
    1.0 - (e / (4.0 * pi * log_n)).sqrt() + e / (8.0 * pi * log_n)
}

/// Cruder prediction that drops the remainder term:
/// `1 - (4π log n)^{-1/2} + (8π log n)^{-1}`. Requires `n ≥ 2`.
pub fn h2(n: usize) -> f64 {
    let log_n = (n as f64).ln();
    let pi = std::f64::consts::PI;
    1.0 - (4.0 * pi * log_n).powf(-0.5) + (8.0 * pi * log_n).recip()
}

/// Large-deviation approximation of `P{M_n ≥ ξ β*_n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailApprox {
    pub xi: f64,
    pub n: usize,
}

impl TailApprox {
    pub fn new(xi: f64, n: usize) -> Result<Self> {
        if !(xi >= 1.0) {
            return Err(Error::Domain(format!("tail estimate holds for xi >= 1, got {xi}")));
        }
        if n < 2 {
            return Err(Error::Domain(format!("tail estimate needs n >= 2, got {n}")));
        }
        Ok(Self { xi, n })
    }

    pub fn value(&self) -> f64 {
        (-(self.n as f64).ln() * (self.xi * self.xi - 1.0)).exp()
    }
}

/// `exp(-(log n)(ξ² - 1))`.
pub fn ldp_tail(xi: f64, n: usize) -> Result<f64> {
    TailApprox::new(xi, n).map(|t| t.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremeKind {
    Max,
    Min,
}

impl ExtremeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremeKind::Max => "max",
            ExtremeKind::Min => "min",
        }
    }
}

impl std::str::FromStr for ExtremeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "max" => Ok(ExtremeKind::Max),
            "min" => Ok(ExtremeKind::Min),
            other => Err(Error::Config(format!("expected max|min, got '{other}'"))),
        }
    }
}

/// How the extreme of `n` Gaussians is drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ExtremeSampler {
    /// Draw all `n` variables and take the extreme. `O(n)` per sample.
    Direct,
    /// Exact in law: the maximum of `n` uniforms is `U^{1/n}`, pushed through the
    /// Gaussian quantile function. `O(1)` per sample.
    #[default]
    OrderStatistic,
}

/// Upper Gaussian quantile `Φ^{-1}(1 - q)`, accurate for tiny `q`.
fn upper_quantile(q: f64) -> f64 {
    std::f64::consts::SQRT_2 * erfc_inv(2.0 * q)
}

fn max_by_order_statistic(n: usize, rng: &mut TrialRng) -> f64 {
    // U in (0, 1]; 1 - U^{1/n} computed without cancellation
    let u = 1.0 - rng.gen::<f64>();
    let q = -(u.ln() / n as f64).exp_m1();
    upper_quantile(q)
}

/// One draw of the maximum or minimum of `n` standard Gaussians.
pub fn sample_extreme(n: usize, which: ExtremeKind, sampler: ExtremeSampler, rng: &mut TrialRng) -> f64 {
    match sampler {
        ExtremeSampler::Direct => {
            let draws = (0..n).map(|_| -> f64 { StandardNormal.sample(rng) });
            match which {
                ExtremeKind::Max => draws.fold(f64::NEG_INFINITY, f64::max),
                ExtremeKind::Min => draws.fold(f64::INFINITY, f64::min),
            }
        }
        ExtremeSampler::OrderStatistic => {
            let m = max_by_order_statistic(n, rng);
            match which {
                ExtremeKind::Max => m,
                ExtremeKind::Min => -m,
            }
        }
    }
}

/// `trials` normalized extremes; trial `t` uses sub-seed `(seed, t)`.
pub fn normalized_extremes(
    n: usize,
    trials: usize,
    which: ExtremeKind,
    sampler: ExtremeSampler,
    seed: u64,
) -> Result<Vec<f64>> {
    let c = gumbel_constants(n)?;
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeedScheme::new(seed, t).rng();
            let m = sample_extreme(n, which, sampler, &mut rng);
            match which {
                ExtremeKind::Max => c.normalize_max(m),
                ExtremeKind::Min => c.normalize_min(m),
            }
        })
        .collect())
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

pub const MIN_GUMBEL_TRIALS: usize = 100;

/// KS distance between normalized Gaussian extremes and the Gumbel law.
pub fn empirical_gumbel_check(n: usize, trials: usize, which: ExtremeKind, seed: u64) -> Result<f64> {
    empirical_gumbel_check_with(n, trials, which, ExtremeSampler::default(), seed)
}

pub fn empirical_gumbel_check_with(
    n: usize,
    trials: usize,
    which: ExtremeKind,
    sampler: ExtremeSampler,
    seed: u64,
) -> Result<f64> {
    if trials < MIN_GUMBEL_TRIALS {
        return Err(Error::Config(format!(
            "Gumbel check needs at least {MIN_GUMBEL_TRIALS} trials, got {trials}"
        )));
    }
    let samples = normalized_extremes(n, trials, which, sampler, seed)?;
    Ok(ks_distance(&samples, gumbel_cdf))
}

/// Median KS distance over `reps` independent repetitions.
pub fn median_gumbel_ks(n: usize, trials: usize, which: ExtremeKind, seed: u64, reps: usize) -> Result<f64> {
    let mut ks = (0..reps as u64)
        .map(|rep| empirical_gumbel_check(n, trials, which, derive_stream(seed, &[n as u64, rep])))
        .collect::<Result<Vec<_>>>()?;
    ks.sort_by(f64::total_cmp);
    Ok(match ks.len() {
        0 => f64::NAN,
        l if l % 2 == 1 => ks[l / 2],
        l => 0.5 * (ks[l / 2 - 1] + ks[l / 2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_at_100() {
        let c = gumbel_constants(100).unwrap();
        assert!((1.0 / c.alpha_star - 0.33).abs() < 0.005);
        assert!((c.beta_star - 2.3662).abs() < 1e-4);
        assert!(c.beta_star < c.alpha_star);
        assert!(gumbel_constants(1).is_err());
    }

    #[test]
    fn constants_at_million() {
        let c = gumbel_constants(1_000_000).unwrap();
        assert!((1.0 / c.alpha_star - 0.19).abs() < 0.005);
    }

    #[test]
    fn gumbel_cdf_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(gumbel_cdf(f64::INFINITY), 1.0);
        assert_eq!(gumbel_cdf(800.0), 1.0);
        assert!((gumbel_cdf(-(2f64.ln().ln())) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn heuristics_at_1000() {
        assert!((h1(1000) - 0.838_69).abs() < 1e-5);
        assert!((h2(1000) - 0.898_42).abs() < 1e-5);
        let h = h1(14_050);
        assert!(h > 0.85 && h < 0.90);
        // slow approach to 1
        assert!(h1(usize::MAX) > 0.93 && h1(usize::MAX) < 0.94 && h2(usize::MAX) > h1(usize::MAX));
        assert!((2..40).all(|k| h1(1 << (k + 1)) > h1(1 << k)));
    }

    #[test]
    fn ldp_boundaries() {
        assert_eq!(ldp_tail(1.0, 12345).unwrap(), 1.0);
        assert!((ldp_tail(2f64.sqrt(), 100).unwrap() - 0.01).abs() < 1e-12);
        assert!(matches!(ldp_tail(0.99, 100), Err(Error::Domain(_))));
        assert!(ldp_tail(1.5, 1).is_err());
    }

    #[test]
    fn upper_quantile_tail_accuracy() {
        // reference values of Φ^{-1}(1 - q)
        for (q, z) in [(0.5, 0.0), (0.025, 1.959_963_984_540_054), (1e-10, 6.361_340_902_404_056)] {
            assert!((upper_quantile(q) - z).abs() < 1e-9, "q = {q}");
        }
    }

    #[test]
    fn ks_of_perfect_grid_is_half_step() {
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn too_few_trials() {
        assert!(empirical_gumbel_check(100, 99, ExtremeKind::Max, 0).is_err());
    }
}
