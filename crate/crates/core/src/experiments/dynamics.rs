//! Return to equilibrium after a random relative perturbation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_matrix, EnsembleKind, EnsembleSpec};
use crate::equilibrium::{solve_equilibrium_with, AlphaRule, GuardPolicy, SolveOptions};
use crate::error::{Error, Result};
use crate::seed::{derive_stream, SeedScheme};
use crate::stability::{lv_integrate, IntegrationSettings};

use super::{scaled_trial_seed, thread_pool, GrowthSpec};

const PERTURBATION_TAG: u64 = 0x7065_7274_7572_6221;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationConfig {
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub alpha_rule: AlphaRule,
    pub growth: GrowthSpec,
    pub master_seed: u64,
    pub trials: usize,
    /// Relative amplitude `ε` of the start `x*_k (1 + ε u_k)`, `u_k ~ U(-1, 1)`.
    pub perturbation: f64,
    pub t_end: f64,
    pub dt: f64,
    pub stride: usize,
    /// Sup-norm distance to `x*` counted as returned.
    pub tolerance: f64,
    pub workers: usize,
}

impl Default for RelaxationConfig {
    fn default() -> Self {
        let s = IntegrationSettings::default();
        Self {
            ensemble: EnsembleKind::Gaussian,
            n: 200,
            alpha_rule: AlphaRule::MultipleOfCritical(2.0),
            growth: GrowthSpec::Ones,
            master_seed: 0,
            trials: 50,
            perturbation: 0.1,
            t_end: s.t_end,
            dt: s.dt,
            stride: s.stride,
            tolerance: 1e-6,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationTrial {
    pub trial: usize,
    pub alpha: f64,
    /// Whether the perturbed equilibrium was feasible; infeasible ones are not integrated.
    pub feasible: bool,
    /// `(t, min x, max x, ‖x(t) - x*‖∞)` at the recorded times.
    pub samples: Vec<(f64, f64, f64, f64)>,
    /// Integrator failure (divergence or negative abundance), if any.
    pub failure: Option<String>,
    pub returned: bool,
}

impl RelaxationTrial {
    pub fn final_distance(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.3)
    }
}

/// Integrates each trial from a perturbed feasible equilibrium and records the
/// distance to it over time.
pub fn relaxation_campaign(cfg: &RelaxationConfig) -> Result<Vec<RelaxationTrial>> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if !(cfg.perturbation >= 0.0 && cfg.perturbation < 1.0) {
        return Err(Error::Config(format!(
            "perturbation {} must lie in [0, 1)",
            cfg.perturbation
        )));
    }
    let n = cfg.n;
    let alpha = cfg.alpha_rule.resolve(n)?;
    let r = cfg.growth.build(n)?;
    let settings = IntegrationSettings {
        t_end: cfg.t_end,
        dt: cfg.dt,
        stride: cfg.stride,
    };
    let pool = thread_pool(cfg.workers)?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let a = sample_matrix(
                    EnsembleSpec::new(cfg.ensemble, n),
                    scaled_trial_seed(cfg.master_seed, n, alpha, t),
                )?;
                let sol = solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::Certificate))?;
                let mut out = RelaxationTrial {
                    trial: t,
                    alpha,
                    feasible: sol.feasible,
                    samples: Vec::new(),
                    failure: None,
                    returned: false,
                };
                if !sol.feasible {
                    return Ok(out);
                }
                let mut rng = SeedScheme::new(derive_stream(cfg.master_seed, &[n as u64, PERTURBATION_TAG]), t as u64).rng();
                let x0: Vec<f64> = sol
                    .x
                    .iter()
                    .map(|&v| v * (1.0 + cfg.perturbation * rng.gen_range(-1.0..1.0)))
                    .collect();
                match lv_integrate(a.as_ref(), alpha, &r, &x0, &settings) {
                    Ok(traj) => {
                        out.samples = traj
                            .times
                            .iter()
                            .zip(&traj.states)
                            .map(|(&time, s)| {
                                let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                                let d = s.iter().zip(&sol.x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                                (time, lo, hi, d)
                            })
                            .collect();
                        out.returned = out.final_distance() <= cfg.tolerance;
                    }
                    Err(e @ (Error::Divergence { .. } | Error::NegativeAbundance { .. })) => {
                        out.failure = Some(e.to_string());
                    }
                    Err(e) => return Err(e),
                }
                Ok(out)
            })
            .collect()
    })
}
