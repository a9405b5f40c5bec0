//! Equilibria of the linear system `x = r + A x / (α √n)`.
//!
//! The solution is written `x = r + z/α + R/α²` where `z = A r / √n` and
//! `R = (A/√n)² x`. For `r = 1` the `z_k` are the normalized row sums of `A`,
//! exact standard Gaussians for the Gaussian ensemble. `R` is recovered from the
//! solved `x` through the identity `R = α² (x - r - z/α)`; for small systems the
//! direct product `(A/√n)² x` is evaluated as well and the two are compared.

use std::fmt;
use std::str::FromStr;

use faer::linalg::solvers::Solve;
use faer::{Col, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::ensembles::GrowthVector;
use crate::error::{Error, Result};
use crate::evt;
use crate::linalg::{col_from_slice, col_to_vec, largest_singular_value};

/// Margin `δ` of the degeneracy guard.
pub const DEGENERACY_DELTA: f64 = 1e-6;
/// Accepted solves satisfy `‖(I - M)x - r‖ ≤ RESIDUAL_TOL · ‖r‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest `n` for which the remainder is also formed by the direct product.
pub const REMAINDER_CROSS_CHECK_MAX_N: usize = 512;

const GUARD_SIGMA_TOL: f64 = 1e-7;
const GUARD_SIGMA_MAX_ITER: usize = 20_000;

/// How the scaling `α` is chosen for a system of dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "parameter", rename_all = "snake_case")]
pub enum AlphaRule {
    /// `α = κ √(log n)`
    KappaSqrtLog(f64),
    Absolute(f64),
    /// `α = √(2 log n)`
    Critical,
    /// `α = c √(2 log n)`
    MultipleOfCritical(f64),
}

impl AlphaRule {
    pub fn resolve(&self, n: usize) -> Result<f64> {
        let log_n = (n as f64).ln();
        let alpha = match *self {
            AlphaRule::KappaSqrtLog(kappa) => kappa * log_n.sqrt(),
            AlphaRule::Absolute(a) => a,
            AlphaRule::Critical => evt::alpha_star(n),
            AlphaRule::MultipleOfCritical(c) => c * evt::alpha_star(n),
        };
        if alpha.is_finite() && alpha > 0.0 {
            Ok(alpha)
        } else {
            Err(Error::Config(format!("{self} resolves to non-positive alpha {alpha} at n = {n}")))
        }
    }
}

impl fmt::Display for AlphaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaRule::KappaSqrtLog(k) => write!(f, "kappa:{k}"),
            AlphaRule::Absolute(a) => write!(f, "absolute:{a}"),
            AlphaRule::Critical => f.write_str("critical"),
            AlphaRule::MultipleOfCritical(c) => write!(f, "critical-multiple:{c}"),
        }
    }
}

impl FromStr for AlphaRule {
    type Err = Error;

    /// Accepts `kappa:<κ>`, `absolute:<α>`, `critical` and `critical-multiple:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (mode, param) = match s.split_once(':') {
            Some((m, p)) => (m, Some(p)),
            None => (s, None),
        };
        let value = |p: Option<&str>| -> Result<f64> {
            let p = p.ok_or_else(|| Error::Config(format!("alpha rule '{s}' needs a parameter")))?;
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("alpha rule '{s}': {e}")))
        };
        match mode {
            "kappa" | "kappa_sqrt_log" => Ok(AlphaRule::KappaSqrtLog(value(param)?)),
            "absolute" => Ok(AlphaRule::Absolute(value(param)?)),
            "critical" if param.is_none() => Ok(AlphaRule::Critical),
            "critical-multiple" | "multiple_of_critical" => {
                Ok(AlphaRule::MultipleOfCritical(value(param)?))
            }
            _ => Err(Error::Config(format!(
                "unknown alpha rule '{s}' (expected kappa:<k>|absolute:<a>|critical|critical-multiple:<c>)"
            ))),
        }
    }
}

/// Which test marks a trial as degenerate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardPolicy {
    /// Reject when the factorized solve is not certified: non-finite output,
    /// residual above [`RESIDUAL_TOL`], or amplification `‖x‖∞/‖r‖∞ ≥ 1/δ`.
    #[default]
    Certificate,
    /// Additionally reject whenever `s(A/(α√n)) ≥ 1 - δ`, i.e. whenever the
    /// Neumann expansion of the resolvent is not norm-convergent.
    SingularValue,
}

impl FromStr for GuardPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "certificate" => Ok(GuardPolicy::Certificate),
            "singular-value" | "singular_value" => Ok(GuardPolicy::SingularValue),
            other => Err(Error::Config(format!("unknown guard policy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub guard: GuardPolicy,
    /// Estimate `s(A/(α√n))` even when the policy does not need it.
    pub compute_guard_sigma: bool,
    /// `None` cross-checks the remainder only for `n ≤ 512`.
    pub cross_check_remainder: Option<bool>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            guard: GuardPolicy::Certificate,
            compute_guard_sigma: true,
            cross_check_remainder: None,
        }
    }
}

impl SolveOptions {
    /// Minimal diagnostics, for Monte Carlo campaigns.
    pub fn fast(guard: GuardPolicy) -> Self {
        Self {
            guard,
            compute_guard_sigma: false,
            cross_check_remainder: Some(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    /// Abundances.
    pub x: Vec<f64>,
    /// First-order term `A r / √n`.
    pub z: Vec<f64>,
    /// Remainder `(A/√n)² x`.
    pub r_resid: Vec<f64>,
    pub alpha: f64,
    pub min_x: f64,
    pub max_x: f64,
    pub feasible: bool,
    /// `s(A/(α√n))`, when it was estimated.
    pub guard_sigma: Option<f64>,
    /// `‖(I - A/(α√n))x - r‖ / ‖r‖`.
    pub residual: f64,
    /// Relative disagreement between `x` and `r + z/α + R/α²` with `R` formed
    /// by the direct product, when that was computed.
    pub remainder_gap: Option<f64>,
}

impl EquilibriumSolution {
    /// `max_k |x_k - (r_k + z_k/α + R_k/α²)| / max(1, ‖x‖∞)`.
    pub fn reconstruction_error(&self, r: &GrowthVector) -> f64 {
        reconstruction_error(&self.x, r.values(), &self.z, &self.r_resid, self.alpha)
    }
}

pub(crate) fn reconstruction_error(x: &[f64], r: &[f64], z: &[f64], rem: &[f64], alpha: f64) -> f64 {
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    x.iter()
        .zip(r)
        .zip(z.iter().zip(rem))
        .map(|((&xk, &rk), (&zk, &rk2))| (xk - (rk + zk / alpha + rk2 / (alpha * alpha))).abs())
        .fold(0.0, f64::max)
        / scale
}

pub fn is_feasible(x: &[f64]) -> bool {
    !x.is_empty() && x.iter().all(|&v| v > 0.0)
}

fn check_inputs(a: MatRef<'_, f64>, alpha: f64, r: &GrowthVector) -> Result<usize> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: a.ncols(),
        });
    }
    if r.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: r.len(),
        });
    }
    Ok(n)
}

/// `I - A/(α√n)`.
fn system_matrix(a: MatRef<'_, f64>, alpha: f64) -> Mat<f64> {
    let n = a.nrows();
    let c = 1.0 / (alpha * (n as f64).sqrt());
    Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - c * a[(i, j)])
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Checks a candidate solution against the acceptance certificate.
fn certify(x: &[f64], r: &[f64], residual: f64, guard_sigma: Option<f64>) -> Result<()> {
    let degenerate = |reason: String| Error::Degenerate { reason, guard_sigma };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(degenerate("non-finite solution".into()));
    }
    if max_abs(x) * DEGENERACY_DELTA >= max_abs(r) {
        return Err(degenerate(format!(
            "resolvent amplification ‖x‖∞/‖r‖∞ = {:.3e} exceeds 1/δ",
            max_abs(x) / max_abs(r)
        )));
    }
    if !(residual <= RESIDUAL_TOL) {
        return Err(degenerate(format!("relative residual {residual:.3e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(())
}

fn guard_sigma_estimate(a: MatRef<'_, f64>, alpha: f64) -> f64 {
    let n = a.nrows() as f64;
    let s = match largest_singular_value(a, GUARD_SIGMA_TOL, GUARD_SIGMA_MAX_ITER) {
        Ok(s) => s,
        Err(Error::NonConvergence { last_estimate, .. }) => last_estimate,
        Err(_) => f64::NAN,
    };
    s / (alpha * n.sqrt())
}

fn check_guard(policy: GuardPolicy, guard_sigma: Option<f64>) -> Result<()> {
    if policy == GuardPolicy::SingularValue {
        let s = guard_sigma.unwrap_or(f64::NAN);
        if !(s < 1.0 - DEGENERACY_DELTA) {
            return Err(Error::Degenerate {
                reason: format!("guard sigma {s:.6} is not below 1 - δ"),
                guard_sigma,
            });
        }
    }
    Ok(())
}

/// Solves `(I - A/(α√n)) x = r` by LU with partial pivoting and fills in the
/// decomposition diagnostics.
pub fn solve_equilibrium(a: MatRef<'_, f64>, alpha: f64, r: &GrowthVector) -> Result<EquilibriumSolution> {
    solve_equilibrium_with(a, alpha, r, &SolveOptions::default())
}

pub fn solve_equilibrium_with(
    a: MatRef<'_, f64>,
    alpha: f64,
    r: &GrowthVector,
    opts: &SolveOptions,
) -> Result<EquilibriumSolution> {
    let n = check_inputs(a, alpha, r)?;
    let guard_sigma = (opts.compute_guard_sigma || opts.guard == GuardPolicy::SingularValue)
        .then(|| guard_sigma_estimate(a, alpha));
    check_guard(opts.guard, guard_sigma)?;

    let rc = col_from_slice(r.values());
    let b = system_matrix(a, alpha);
    let xc = b.partial_piv_lu().solve(&rc);
    let res = &b * &xc - &rc;
    let residual = res.norm_l2() / rc.norm_l2();
    let x = col_to_vec(xc.as_ref());
    certify(&x, r.values(), residual, guard_sigma)?;

    let sqrt_n = (n as f64).sqrt();
    let z: Vec<f64> = col_to_vec((a * &rc).as_ref()).into_iter().map(|v| v / sqrt_n).collect();
    let r_resid = remainder_from_identity(&x, r.values(), &z, alpha);

    let cross = opts.cross_check_remainder.unwrap_or(n <= REMAINDER_CROSS_CHECK_MAX_N);
    let remainder_gap = cross.then(|| {
        let direct = remainder_direct(a, &xc);
        reconstruction_error(&x, r.values(), &z, &direct, alpha)
    });

    Ok(assemble(x, z, r_resid, alpha, guard_sigma, residual, remainder_gap))
}

fn assemble(
    x: Vec<f64>,
    z: Vec<f64>,
    r_resid: Vec<f64>,
    alpha: f64,
    guard_sigma: Option<f64>,
    residual: f64,
    remainder_gap: Option<f64>,
) -> EquilibriumSolution {
    let min_x = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max_x = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EquilibriumSolution {
        feasible: is_feasible(&x),
        x,
        z,
        r_resid,
        alpha,
        min_x,
        max_x,
        guard_sigma,
        residual,
        remainder_gap,
    }
}

fn remainder_from_identity(x: &[f64], r: &[f64], z: &[f64], alpha: f64) -> Vec<f64> {
    x.iter()
        .zip(r)
        .zip(z)
        .map(|((&xk, &rk), &zk)| alpha * alpha * (xk - rk - zk / alpha))
        .collect()
}

/// `(A/√n)² x`.
fn remainder_direct(a: MatRef<'_, f64>, x: &Col<f64>) -> Vec<f64> {
    let n = a.nrows() as f64;
    let ax = a * x;
    let aax = a * &ax;
    col_to_vec(aax.as_ref()).into_iter().map(|v| v / n).collect()
}

/// Homogeneous split `(Z, R)` with `Z_k = Σ_i A_ki / √n` and `R = (A/√n)² Q 1`,
/// both formed directly from `A` (no use of the algebraic identity).
pub fn decompose(a: MatRef<'_, f64>, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    decompose_with(a, alpha, &GrowthVector::ones(a.nrows()))
}

pub fn decompose_with(a: MatRef<'_, f64>, alpha: f64, r: &GrowthVector) -> Result<(Vec<f64>, Vec<f64>)> {
    check_inputs(a, alpha, r)?;
    let sqrt_n = (a.nrows() as f64).sqrt();
    let rc = col_from_slice(r.values());
    let b = system_matrix(a, alpha);
    let xc = b.partial_piv_lu().solve(&rc);
    let residual = (&b * &xc - &rc).norm_l2() / rc.norm_l2();
    certify(&col_to_vec(xc.as_ref()), r.values(), residual, None)?;
    let z = col_to_vec((a * &rc).as_ref()).into_iter().map(|v| v / sqrt_n).collect();
    Ok((z, remainder_direct(a, &xc)))
}

/// Equilibria of one matrix at many scalings from a single Krylov sequence.
///
/// With `M = A/√n` and `v_j = M^j r`, the resolvent solution at scaling `α` is
/// `x(α) = Σ_j v_j α^{-j}`. Truncating after `J` terms leaves the exact residual
/// `(I - M/α) x_J - r = -v_{J+1} α^{-(J+1)}`, so one sequence of `J + 1`
/// matrix-vector products serves every `α` above the convergence radius. Each
/// returned solution is still checked against the true residual.
pub struct ResolventSeries<'a> {
    a: MatRef<'a, f64>,
    r: Vec<f64>,
    terms: Vec<Col<f64>>,
    norms: Vec<f64>,
}

impl<'a> ResolventSeries<'a> {
    pub const TRUNCATION_TOL: f64 = 1e-13;

    /// Builds terms until the tail bound at `alpha_min` drops below
    /// [`Self::TRUNCATION_TOL`] or `max_terms` is reached.
    pub fn new(a: MatRef<'a, f64>, r: &GrowthVector, alpha_min: f64, max_terms: usize) -> Result<Self> {
        check_inputs(a, alpha_min, r)?;
        let inv_sqrt_n = 1.0 / (a.nrows() as f64).sqrt();
        let rc = col_from_slice(r.values());
        let r_norm = rc.norm_l2();
        let mut terms = vec![rc];
        let mut norms = vec![r_norm];
        let mut weight = 1.0;
        while terms.len() <= max_terms {
            let mut next = a * terms.last().unwrap();
            next *= faer::Scale(inv_sqrt_n);
            let nn = next.norm_l2();
            weight /= alpha_min;
            terms.push(next);
            norms.push(nn);
            if nn * weight <= Self::TRUNCATION_TOL * r_norm || !nn.is_finite() {
                break;
            }
        }
        Ok(Self {
            a,
            r: r.values().to_vec(),
            terms,
            norms,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Bound on the relative truncation residual at `alpha`.
    pub fn tail_bound(&self, alpha: f64) -> f64 {
        let j = self.terms.len() - 1;
        self.norms[j] * alpha.powi(-(j as i32)) / self.norms[0]
    }

    /// Solution at `alpha`, or `None` when the series has not converged there.
    pub fn solve(&self, alpha: f64) -> Option<Result<EquilibriumSolution>> {
        if !(alpha > 0.0) || !(self.tail_bound(alpha) <= Self::TRUNCATION_TOL) {
            return None;
        }
        let n = self.r.len();
        // Horner over all but the last term, which only bounds the tail
        let last = self.terms.len() - 2;
        let inv_alpha = 1.0 / alpha;
        let mut acc = self.terms[last].clone();
        for term in self.terms[..last].iter().rev() {
            acc *= faer::Scale(inv_alpha);
            acc += term;
        }
        let rc = col_from_slice(&self.r);
        let c = 1.0 / (alpha * (n as f64).sqrt());
        let mut res = self.a * &acc;
        res *= faer::Scale(-c);
        res += &acc;
        res -= &rc;
        let residual = res.norm_l2() / rc.norm_l2();
        let x = col_to_vec(acc.as_ref());
        if let Err(e) = certify(&x, &self.r, residual, None) {
            return Some(Err(e));
        }
        let z = col_to_vec(self.terms[1].as_ref());
        let r_resid = remainder_from_identity(&x, &self.r, &z, alpha);
        Some(Ok(assemble(x, z, r_resid, alpha, None, residual, None)))
    }
}
