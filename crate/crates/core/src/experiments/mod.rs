//! Monte Carlo campaigns over `(n, grid value, trial)`.
//!
//! Each trial derives its own generator from the campaign's master seed, the
//! dimension and the grid value, so the counts never depend on the number of
//! workers or on scheduling. Reduction is by integer counting in job order.
//!
//! Two sampling schemes are supported:
//!
//! * independent (default): a fresh matrix for every `(n, grid value, trial)`,
//!   solved by LU;
//! * coupled: one matrix per `(n, trial)` shared by every grid value (common
//!   random numbers). The whole column of scalings is then solved from a single
//!   [`ResolventSeries`], with LU as the fallback below its convergence radius.

mod dynamics;
mod output;
mod savgol;

pub use dynamics::{relaxation_campaign, RelaxationConfig, RelaxationTrial};
pub use output::{fmt_num, write_csv, CsvTable};
pub use savgol::{savgol_weights, savitzky_golay};

use std::path::PathBuf;
use std::str::FromStr;

use faer::MatRef;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_matrix, uniform_growth_vector, EnsembleKind, EnsembleSpec, GrowthVector};
use crate::equilibrium::{
    solve_equilibrium_with, AlphaRule, GuardPolicy, ResolventSeries, SolveOptions, DEGENERACY_DELTA,
};
use crate::error::{Error, Result};
use crate::evt::{h1, h2};
use crate::linalg::largest_singular_value;
use crate::seed::{derive_stream, SeedScheme};
use crate::stability::{perturbation_norm, stability_metrics, StabilityReport};

/// 97.5% standard normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;
const COUPLED_MAX_TERMS: usize = 400;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthSpec {
    Ones,
    /// `r_i = 1 + 2i/n`.
    Uniform13,
    File(PathBuf),
}

impl GrowthSpec {
    pub fn build(&self, n: usize) -> Result<GrowthVector> {
        match self {
            GrowthSpec::Ones => Ok(GrowthVector::ones(n)),
            GrowthSpec::Uniform13 => Ok(uniform_growth_vector(n)),
            GrowthSpec::File(path) => {
                let r = GrowthVector::from_file(path)?;
                if r.len() != n {
                    return Err(Error::Config(format!(
                        "growth file {} has {} entries but n = {n}",
                        path.display(),
                        r.len()
                    )));
                }
                Ok(r)
            }
        }
    }
}

impl FromStr for GrowthSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ones" | "homogeneous" => Ok(GrowthSpec::Ones),
            "uniform13" => Ok(GrowthSpec::Uniform13),
            other => match other.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(GrowthSpec::File(PathBuf::from(p))),
                _ => Err(Error::Config(format!(
                    "unknown growth '{other}' (expected ones|uniform13|file:<path>)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoothing {
    pub window: usize,
    pub degree: usize,
}

impl Default for Smoothing {
    fn default() -> Self {
        Self { window: 11, degree: 3 }
    }
}

impl Smoothing {
    /// Smooths for display. Short series get the largest odd window that fits;
    /// when none exceeds the degree, or the series has gaps, the raw values are
    /// returned unchanged.
    pub fn apply(&self, series: &[f64]) -> Vec<f64> {
        let mut window = self.window.min(series.len());
        if window.is_multiple_of(2) {
            window = window.saturating_sub(1);
        }
        if window <= self.degree || series.iter().any(|v| !v.is_finite()) {
            return series.to_vec();
        }
        savitzky_golay(series, window, self.degree).unwrap_or_else(|_| series.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub ensemble: EnsembleKind,
    pub n_list: Vec<usize>,
    /// Grid values substituted into `alpha_rule` (κ for the default rule).
    pub kappa_grid: Vec<f64>,
    pub trials: usize,
    pub alpha_rule: AlphaRule,
    pub growth: GrowthSpec,
    pub master_seed: u64,
    pub smoothing: Option<Smoothing>,
    /// Reuse one matrix per `(n, trial)` across the whole grid.
    pub coupled: bool,
    pub guard: GuardPolicy,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            ensemble: EnsembleKind::Gaussian,
            n_list: vec![500, 2000, 5000],
            kappa_grid: grid_range(0.5, 2.5, 0.05).expect("static grid"),
            trials: 500,
            alpha_rule: AlphaRule::KappaSqrtLog(1.0),
            growth: GrowthSpec::Ones,
            master_seed: 0,
            smoothing: Some(Smoothing::default()),
            coupled: false,
            guard: GuardPolicy::Certificate,
            workers: 0,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::Config("n list is empty".into()));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("dimension {n} is below 2")));
        }
        if self.kappa_grid.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if self.kappa_grid.iter().any(|k| !k.is_finite()) || self.kappa_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("grid must be finite and strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(s) = self.smoothing {
            if s.window % 2 == 0 || s.window <= s.degree {
                return Err(Error::Config(format!(
                    "smoothing window {} must be odd and exceed degree {}",
                    s.window, s.degree
                )));
            }
        }
        Ok(())
    }

    fn alpha_at(&self, n: usize, grid_value: f64) -> Result<f64> {
        let rule = match self.alpha_rule {
            AlphaRule::KappaSqrtLog(_) => AlphaRule::KappaSqrtLog(grid_value),
            AlphaRule::Absolute(_) => AlphaRule::Absolute(grid_value),
            AlphaRule::MultipleOfCritical(_) => AlphaRule::MultipleOfCritical(grid_value),
            AlphaRule::Critical => AlphaRule::Critical,
        };
        rule.resolve(n)
    }
}

/// Inclusive grid `start, start + step, …` up to `stop` (within 1e-9), with
/// values rounded to 12 decimals so that textual grids compare exactly.
pub fn grid_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::Config(format!("invalid range {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| round12(start + k as f64 * step)).collect())
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

/// Parses `start:stop:step` or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| -> Result<f64> {
        p.trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad number '{p}' in '{s}': {e}")))
    };
    match parts.as_slice() {
        [a, b, c] => grid_range(num(a)?, num(b)?, num(c)?),
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Config(format!("expected start:stop:step or a list, got '{s}'"))),
    }
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list of dimensions.
pub fn parse_dimensions(s: &str) -> Result<Vec<usize>> {
    let num = |p: &str| -> Result<usize> {
        p.trim()
            .parse::<usize>()
            .map_err(|e| Error::Config(format!("bad dimension '{p}' in '{s}': {e}")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, c] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
            if step == 0 || stop < start {
                return Err(Error::Config(format!("invalid range '{s}'")));
            }
            Ok((start..=stop).step_by(step).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Config(format!("expected start:stop:step or a list, got '{s}'"))),
    }
}

/// One point of a feasibility curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// κ, or `n` for critical scans.
    pub abscissa: f64,
    /// Feasible fraction of the non-degenerate trials.
    pub proportion: f64,
    /// Half-width of the 95% Wilson score interval.
    pub half_width: f64,
    pub trials: usize,
    pub degenerate: usize,
    pub feasible_count: usize,
}

impl CurvePoint {
    pub fn from_tally(abscissa: f64, tally: Tally) -> Self {
        let valid = tally.feasible + tally.infeasible;
        let (proportion, half_width) = if valid == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let p = tally.feasible as f64 / valid as f64;
            (p, wilson_half_width(tally.feasible, valid))
        };
        Self {
            abscissa,
            proportion,
            half_width,
            trials: tally.total(),
            degenerate: tally.degenerate,
            feasible_count: tally.feasible,
        }
    }
}

pub fn wilson_half_width(successes: usize, total: usize) -> f64 {
    let m = total as f64;
    let p = successes as f64 / m;
    let z2 = Z_95 * Z_95;
    Z_95 / (1.0 + z2 / m) * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub feasible: usize,
    pub infeasible: usize,
    pub degenerate: usize,
}

impl Tally {
    pub fn total(&self) -> usize {
        self.feasible + self.infeasible + self.degenerate
    }

    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Feasible => self.feasible += 1,
            Outcome::Infeasible => self.infeasible += 1,
            Outcome::Degenerate => self.degenerate += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Feasible,
    Infeasible,
    Degenerate,
}

fn classify(res: Result<bool>) -> Result<Outcome> {
    match res {
        Ok(true) => Ok(Outcome::Feasible),
        Ok(false) => Ok(Outcome::Infeasible),
        Err(e) if e.is_degenerate() => Ok(Outcome::Degenerate),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub n: usize,
    pub points: Vec<CurvePoint>,
    /// Smoothed proportions clamped to `[0, 1]` (the raw ones without smoothing).
    pub smoothed: Vec<f64>,
}

impl Curve {
    pub fn new(n: usize, points: Vec<CurvePoint>, smoothing: Option<Smoothing>) -> Self {
        let raw: Vec<f64> = points.iter().map(|p| p.proportion).collect();
        // polynomial fits overshoot at sharp steps; keep the display a probability
        let smoothed = smoothing.map_or_else(
            || raw.clone(),
            |s| s.apply(&raw).into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        );
        Self { n, points, smoothed }
    }

    pub fn proportions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.proportion).collect()
    }

    pub fn degenerate(&self) -> usize {
        self.points.iter().map(|p| p.degenerate).sum()
    }

    /// Width in abscissa of the band where the raw proportion climbs from `lo`
    /// to `hi`, using linear interpolation at the first upward crossings.
    pub fn band_width(&self, lo: f64, hi: f64) -> Option<f64> {
        Some(self.crossing(hi)? - self.crossing(lo)?)
    }

    /// First abscissa at which the raw proportion reaches `level`.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let pts = &self.points;
        let first = pts.iter().position(|p| p.proportion >= level)?;
        if first == 0 {
            return Some(pts[0].abscissa);
        }
        let (a, b) = (pts[first - 1], pts[first]);
        let f = (level - a.proportion) / (b.proportion - a.proportion);
        Some(a.abscissa + f * (b.abscissa - a.abscissa))
    }
}

/// One `(n, grid)` block of work.
struct GridSpec {
    n: usize,
    r: GrowthVector,
    alphas: Vec<f64>,
    /// Stream tags identifying each grid value.
    keys: Vec<u64>,
}

fn grid_key(value: f64) -> u64 {
    round12(value).to_bits()
}

/// Generator of trial `t` for single-scaling studies at `(n, α)`; the stability
/// and relaxation campaigns share it, so their trial `t` sees the same matrix.
pub fn scaled_trial_seed(master: u64, n: usize, alpha: f64, t: usize) -> SeedScheme {
    SeedScheme::new(derive_stream(master, &[n as u64, grid_key(alpha)]), t as u64)
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        b = b.num_threads(workers);
    }
    b.build().map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

struct Engine {
    kind: EnsembleKind,
    trials: usize,
    master: u64,
    guard: GuardPolicy,
}

impl Engine {
    fn independent_trial(&self, spec: &GridSpec, g: usize, t: usize) -> Result<Outcome> {
        let seed = SeedScheme::new(derive_stream(self.master, &[spec.n as u64, spec.keys[g]]), t as u64);
        let a = sample_matrix(EnsembleSpec::new(self.kind, spec.n), seed)?;
        classify(
            solve_equilibrium_with(a.as_ref(), spec.alphas[g], &spec.r, &SolveOptions::fast(self.guard))
                .map(|s| s.feasible),
        )
    }

    fn coupled_trial(&self, spec: &GridSpec, t: usize) -> Result<Vec<Outcome>> {
        let seed = SeedScheme::new(derive_stream(self.master, &[spec.n as u64]), t as u64);
        let a = sample_matrix(EnsembleSpec::new(self.kind, spec.n), seed)?;
        let a = a.as_ref();
        let s_unscaled = match self.guard {
            GuardPolicy::SingularValue => Some(singular_value_or_last(a)? / (spec.n as f64).sqrt()),
            GuardPolicy::Certificate => None,
        };
        let alpha_min = spec.alphas.iter().copied().fold(f64::INFINITY, f64::min);
        let series = ResolventSeries::new(a, &spec.r, alpha_min, COUPLED_MAX_TERMS)?;
        spec.alphas
            .iter()
            .map(|&alpha| {
                if let Some(s) = s_unscaled {
                    if s / alpha >= 1.0 - DEGENERACY_DELTA {
                        return Ok(Outcome::Degenerate);
                    }
                }
                let res = match series.solve(alpha) {
                    Some(r) => r.map(|s| s.feasible),
                    None => solve_equilibrium_with(a, alpha, &spec.r, &SolveOptions::fast(GuardPolicy::Certificate))
                        .map(|s| s.feasible),
                };
                classify(res)
            })
            .collect()
    }

    fn run(&self, specs: &[GridSpec], coupled: bool, workers: usize) -> Result<Vec<Vec<Tally>>> {
        let pool = thread_pool(workers)?;
        let mut tallies: Vec<Vec<Tally>> = specs.iter().map(|s| vec![Tally::default(); s.alphas.len()]).collect();
        if coupled {
            let jobs: Vec<(usize, usize)> = (0..specs.len())
                .flat_map(|s| (0..self.trials).map(move |t| (s, t)))
                .collect();
            let outcomes: Vec<Vec<Outcome>> = pool.install(|| {
                jobs.par_iter()
                    .map(|&(s, t)| self.coupled_trial(&specs[s], t))
                    .collect::<Result<_>>()
            })?;
            for (&(s, _), row) in jobs.iter().zip(outcomes) {
                for (g, o) in row.into_iter().enumerate() {
                    tallies[s][g].add(o);
                }
            }
        } else {
            let jobs: Vec<(usize, usize, usize)> = specs
                .iter()
                .enumerate()
                .flat_map(|(s, spec)| {
                    (0..spec.alphas.len()).flat_map(move |g| (0..self.trials).map(move |t| (s, g, t)))
                })
                .collect();
            let outcomes: Vec<Outcome> = pool.install(|| {
                jobs.par_iter()
                    .map(|&(s, g, t)| self.independent_trial(&specs[s], g, t))
                    .collect::<Result<_>>()
            })?;
            for (&(s, g, _), o) in jobs.iter().zip(outcomes) {
                tallies[s][g].add(o);
            }
        }
        Ok(tallies)
    }
}

fn singular_value_or_last(a: MatRef<'_, f64>) -> Result<f64> {
    match largest_singular_value(a, 1e-7, 20_000) {
        Err(Error::NonConvergence { last_estimate, .. }) => Ok(last_estimate),
        other => other,
    }
}

fn build_specs(cfg: &CampaignConfig) -> Result<Vec<GridSpec>> {
    cfg.n_list
        .iter()
        .map(|&n| {
            Ok(GridSpec {
                n,
                r: cfg.growth.build(n)?,
                alphas: cfg
                    .kappa_grid
                    .iter()
                    .map(|&g| cfg.alpha_at(n, g))
                    .collect::<Result<_>>()?,
                keys: cfg.kappa_grid.iter().map(|&g| grid_key(g)).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCurves {
    pub curves: Vec<Curve>,
}

/// Proportion of feasible equilibria over the grid, for each `n`.
pub fn feasibility_curve(cfg: &CampaignConfig) -> Result<FeasibilityCurves> {
    cfg.validate()?;
    let specs = build_specs(cfg)?;
    let engine = Engine {
        kind: cfg.ensemble,
        trials: cfg.trials,
        master: cfg.master_seed,
        guard: cfg.guard,
    };
    let tallies = engine.run(&specs, cfg.coupled, cfg.workers)?;
    let curves = specs
        .iter()
        .zip(tallies)
        .map(|(spec, row)| {
            let points = cfg
                .kappa_grid
                .iter()
                .zip(row)
                .map(|(&g, t)| CurvePoint::from_tally(g, t))
                .collect();
            Curve::new(spec.n, points, cfg.smoothing)
        })
        .collect();
    Ok(FeasibilityCurves { curves })
}

impl FeasibilityCurves {
    pub fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&[]);
        for c in &self.curves {
            for (p, s) in c.points.iter().zip(&c.smoothed) {
                t.push(c.n, p, *s, vec![]);
            }
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub workers: usize,
    pub smoothing: Option<Smoothing>,
    pub guard: GuardPolicy,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            workers: 0,
            smoothing: Some(Smoothing::default()),
            guard: GuardPolicy::Certificate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalScan {
    /// One point per `n`, abscissa = `n`.
    pub curve: Curve,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

/// Feasible proportion at exactly `α = √(2 log n)` for each `n`.
pub fn critical_scan(n_list: &[usize], trials: usize, ensemble: EnsembleKind, seed: u64) -> Result<CriticalScan> {
    critical_scan_with(n_list, trials, ensemble, seed, &ScanOptions::default())
}

pub fn critical_scan_with(
    n_list: &[usize],
    trials: usize,
    ensemble: EnsembleKind,
    seed: u64,
    opts: &ScanOptions,
) -> Result<CriticalScan> {
    let cfg = CampaignConfig {
        ensemble,
        n_list: n_list.to_vec(),
        kappa_grid: vec![0.0],
        trials,
        alpha_rule: AlphaRule::Critical,
        growth: GrowthSpec::Ones,
        master_seed: seed,
        smoothing: None,
        coupled: false,
        guard: opts.guard,
        workers: opts.workers,
    };
    cfg.validate()?;
    let specs = build_specs(&cfg)?;
    let engine = Engine {
        kind: ensemble,
        trials,
        master: seed,
        guard: opts.guard,
    };
    let tallies = engine.run(&specs, false, opts.workers)?;
    let points = n_list
        .iter()
        .zip(tallies)
        .map(|(&n, row)| CurvePoint::from_tally(n as f64, row[0]))
        .collect();
    Ok(CriticalScan {
        curve: Curve::new(0, points, opts.smoothing),
        h1: n_list.iter().map(|&n| h1(n)).collect(),
        h2: n_list.iter().map(|&n| h2(n)).collect(),
    })
}

impl CriticalScan {
    /// Mean absolute deviations of the raw proportions from `(H1, H2)`.
    pub fn mean_abs_deviation(&self) -> (f64, f64) {
        let m = self.curve.points.len() as f64;
        let (d1, d2) = self
            .curve
            .points
            .iter()
            .zip(self.h1.iter().zip(&self.h2))
            .fold((0.0, 0.0), |(a, b), (p, (x, y))| {
                (a + (p.proportion - x).abs(), b + (p.proportion - y).abs())
            });
        (d1 / m, d2 / m)
    }

    /// Same, on the smoothed proportions.
    pub fn smoothed_mean_abs_deviation(&self) -> (f64, f64) {
        let m = self.curve.smoothed.len() as f64;
        let (d1, d2) = self
            .curve
            .smoothed
            .iter()
            .zip(self.h1.iter().zip(&self.h2))
            .fold((0.0, 0.0), |(a, b), (p, (x, y))| (a + (p - x).abs(), b + (p - y).abs()));
        (d1 / m, d2 / m)
    }

    pub fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["h1", "h2"]);
        for (i, (p, s)) in self.curve.points.iter().zip(&self.curve.smoothed).enumerate() {
            t.push(p.abscissa as usize, p, *s, vec![self.h1[i], self.h2[i]]);
        }
        t
    }
}

/// Feasibility thresholds of a non-homogeneous system, in units of `√(log n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NhThresholds {
    pub n: usize,
    /// `√2 σ_r / r_max`: infeasible below.
    pub t1: f64,
    /// `√2 σ_r / r_min`: feasible above.
    pub t2: f64,
}

impl NhThresholds {
    pub fn of(r: &GrowthVector) -> Self {
        let s = r.stats();
        Self {
            n: r.len(),
            t1: std::f64::consts::SQRT_2 * s.sigma_r / s.r_max,
            t2: std::f64::consts::SQRT_2 * s.sigma_r / s.r_min,
        }
    }
}

/// Large-`n` limits of the thresholds for `r_i = 1 + 2i/n`:
/// `σ_r → √(13/3)`, `r_max → 3`, `r_min → 1`.
pub fn uniform13_threshold_limits() -> (f64, f64) {
    let t2 = (2.0 * 13.0 / 3.0f64).sqrt();
    (t2 / 3.0, t2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NhCurves {
    pub curves: Vec<Curve>,
    pub thresholds: Vec<NhThresholds>,
}

/// [`feasibility_curve`] for a non-homogeneous growth vector, with the
/// thresholds `t1`, `t2` of each dimension.
pub fn nh_feasibility_curve(cfg: &CampaignConfig) -> Result<NhCurves> {
    cfg.validate()?;
    let thresholds = cfg
        .n_list
        .iter()
        .map(|&n| Ok(NhThresholds::of(&cfg.growth.build(n)?)))
        .collect::<Result<Vec<_>>>()?;
    let FeasibilityCurves { curves } = feasibility_curve(cfg)?;
    Ok(NhCurves { curves, thresholds })
}

impl NhCurves {
    pub fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t1", "t2"]);
        for (c, th) in self.curves.iter().zip(&self.thresholds) {
            for (p, s) in c.points.iter().zip(&c.smoothed) {
                t.push(c.n, p, *s, vec![th.t1, th.t2]);
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub trials: usize,
    pub alpha_rule: AlphaRule,
    pub growth: GrowthSpec,
    pub master_seed: u64,
    /// Also estimate the Bauer-Fike radius `‖diag(x)A/(α√n)‖` per trial.
    pub bauer_fike: bool,
    /// Largest `n` the dense eigensolver accepts.
    pub max_dim: usize,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityTrial {
    pub trial: usize,
    pub n: usize,
    pub alpha: f64,
    pub min_x: f64,
    pub max_x: f64,
    pub feasible: bool,
    pub report: StabilityReport,
    pub bauer_fike_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCampaign {
    pub trials: Vec<StabilityTrial>,
    pub degenerate: usize,
}

/// Solves, then analyses the Jacobian spectrum, for each trial.
pub fn stability_campaign(cfg: &StabilityConfig) -> Result<StabilityCampaign> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let n = cfg.n;
    if n > cfg.max_dim {
        return Err(Error::Config(format!(
            "n = {n} exceeds the eigensolver cap {} (raise max_dim to allow it)",
            cfg.max_dim
        )));
    }
    let alpha = cfg.alpha_rule.resolve(n)?;
    let r = cfg.growth.build(n)?;
    let pool = thread_pool(cfg.workers)?;
    let results: Vec<Option<StabilityTrial>> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let a = sample_matrix(EnsembleSpec::new(cfg.ensemble, n), scaled_trial_seed(cfg.master_seed, n, alpha, t))?;
                let sol = match solve_equilibrium_with(a.as_ref(), alpha, &r, &SolveOptions::fast(GuardPolicy::Certificate)) {
                    Ok(s) => s,
                    Err(e) if e.is_degenerate() => return Ok(None),
                    Err(e) => return Err(e),
                };
                let report = stability_metrics(&sol.x, a.as_ref(), alpha, &r)?;
                let bauer_fike_radius = if cfg.bauer_fike {
                    Some(perturbation_norm(&sol.x, a.as_ref(), alpha)?)
                } else {
                    None
                };
                Ok(Some(StabilityTrial {
                    trial: t,
                    n,
                    alpha,
                    min_x: sol.min_x,
                    max_x: sol.max_x,
                    feasible: sol.feasible,
                    report,
                    bauer_fike_radius,
                }))
            })
            .collect::<Result<_>>()
    })?;
    let degenerate = results.iter().filter(|r| r.is_none()).count();
    Ok(StabilityCampaign {
        trials: results.into_iter().flatten().collect(),
        degenerate,
    })
}
