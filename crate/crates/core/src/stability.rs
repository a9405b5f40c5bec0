//! Local stability of Lotka-Volterra equilibria.
//!
//! The Jacobian at an equilibrium `x` is `J = diag(x)(-I + A/(α√n))`. Its
//! spectrum sits close to `{-x_k}`: by the Bauer-Fike theorem every eigenvalue
//! `λ` has some `k` with `|λ + x_k| ≤ ‖diag(x) A/(α√n)‖`.

use faer::{Col, Mat, MatRef};
use num_complex::Complex64;

use crate::ensembles::GrowthVector;
use crate::error::{Error, Result};
use crate::evt::alpha_star;
use crate::linalg::{col_from_slice, col_to_vec, scaled_interaction};

pub const BLOWUP_THRESHOLD: f64 = 1e12;
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;
/// Relative residual accepted by [`spectrum_verified`].
pub const EIGENPAIR_TOL: f64 = 1e-6;
/// Default cap on the dimension handed to the dense eigensolver.
pub const DEFAULT_MAX_EIGEN_DIM: usize = 4000;

/// `diag(x)(-I + A/(α√n))`.
pub fn jacobian(x: &[f64], a: MatRef<'_, f64>, alpha: f64) -> Result<Mat<f64>> {
    let n = a.nrows();
    if a.ncols() != n || x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if a.ncols() != n { a.ncols() } else { x.len() },
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let c = 1.0 / (alpha * (n as f64).sqrt());
    Ok(Mat::from_fn(n, n, |k, l| {
        x[k] * (c * a[(k, l)] - if k == l { 1.0 } else { 0.0 })
    }))
}

fn check_finite(m: MatRef<'_, f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::Eigensolver(format!("non-finite entry at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// All `n` eigenvalues of a real matrix, counted with multiplicity.
pub fn spectrum(m: MatRef<'_, f64>) -> Result<Vec<Complex64>> {
    check_finite(m)?;
    let ev = m
        .eigenvalues()
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    Ok(ev.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
}

/// Like [`spectrum`], but also computes eigenvectors and rejects the result
/// unless every pair satisfies `‖Mv - λv‖ ≤ 1e-6 ‖M‖_F ‖v‖`.
pub fn spectrum_verified(m: MatRef<'_, f64>) -> Result<Vec<Complex64>> {
    check_finite(m)?;
    let eig = m.eigen().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let n = m.nrows();
    let s = eig.S();
    let u = eig.U();
    let m_norm = m.norm_l2();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let lambda = Complex64::new(s[j].re, s[j].im);
        let v: Vec<Complex64> = (0..n).map(|i| Complex64::new(u[(i, j)].re, u[(i, j)].im)).collect();
        let v_norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let res = (0..n)
            .map(|i| {
                let mv: Complex64 = (0..n).map(|k| v[k] * m[(i, k)]).sum();
                (mv - lambda * v[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        if res > EIGENPAIR_TOL * m_norm * v_norm {
            return Err(Error::Eigensolver(format!(
                "eigenpair {j} residual {res:.3e} exceeds tolerance"
            )));
        }
        out.push(lambda);
    }
    Ok(out)
}

/// Per-instance surrogate of `limsup α*σ_r / (α r_min)`; equals `√(2 log n)/α`
/// for `r = 1`.
pub fn rho_plus(n: usize, alpha: f64, r: &GrowthVector) -> f64 {
    let s = r.stats();
    alpha_star(n) * s.sigma_r / (alpha * s.r_min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_re: f64,
    /// `max_λ min_k |λ + x_k|`.
    pub match_dist: f64,
    pub rho_plus: f64,
    pub stable: bool,
}

/// `max_λ min_k |λ + x_k|`. Sorting `x` reduces the inner minimum to a
/// nearest-neighbour lookup on `-Re λ`.
pub fn match_distance(eigenvalues: &[Complex64], x: &[f64]) -> f64 {
    let mut neg: Vec<f64> = x.iter().map(|v| -v).collect();
    neg.sort_by(f64::total_cmp);
    eigenvalues
        .iter()
        .map(|lambda| {
            let idx = neg.partition_point(|&v| v < lambda.re);
            let mut best = f64::INFINITY;
            for k in [idx.wrapping_sub(1), idx] {
                if let Some(&p) = neg.get(k) {
                    best = best.min((lambda - p).norm());
                }
            }
            best
        })
        .fold(0.0, f64::max)
}

pub fn stability_metrics(x: &[f64], a: MatRef<'_, f64>, alpha: f64, r: &GrowthVector) -> Result<StabilityReport> {
    let j = jacobian(x, a, alpha)?;
    let eigenvalues = spectrum(j.as_ref())?;
    let max_re = eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        match_dist: match_distance(&eigenvalues, x),
        max_re,
        rho_plus: rho_plus(a.nrows(), alpha, r),
        stable: max_re < 0.0,
        eigenvalues,
    })
}

/// `‖diag(x) A/(α√n)‖₂`, the Bauer-Fike radius, from a dense singular value
/// decomposition.
pub fn perturbation_norm(x: &[f64], a: MatRef<'_, f64>, alpha: f64) -> Result<f64> {
    let n = a.nrows();
    if x.len() != n {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    let c = 1.0 / (alpha * (n as f64).sqrt());
    let m = Mat::from_fn(n, a.ncols(), |k, l| x[k] * c * a[(k, l)]);
    let sv = m
        .singular_values()
        .map_err(|e| Error::Eigensolver(format!("singular values: {e:?}")))?;
    Ok(sv.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub t_end: f64,
    /// Requested step; rounded so that a whole number of steps reaches `t_end`.
    pub dt: f64,
    /// Record every `stride`-th step (the initial and final states are always kept).
    pub stride: usize,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            t_end: 50.0,
            dt: 1e-2,
            stride: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

struct LvField {
    m: Mat<f64>,
    r: Col<f64>,
}

impl LvField {
    /// `x ∘ (r - x + M x)`
    fn eval(&self, x: &Col<f64>) -> Col<f64> {
        let mx = &self.m * x;
        Col::from_fn(x.nrows(), |k| x[k] * (self.r[k] - x[k] + mx[k]))
    }
}

fn axpy(x: &Col<f64>, h: f64, k: &Col<f64>) -> Col<f64> {
    Col::from_fn(x.nrows(), |i| x[i] + h * k[i])
}

/// Classical fourth-order Runge-Kutta integration of
/// `dx_k/dt = x_k (r_k - x_k + Σ_l A_kl x_l / (α√n))`.
pub fn lv_integrate(
    a: MatRef<'_, f64>,
    alpha: f64,
    r: &GrowthVector,
    x0: &[f64],
    settings: &IntegrationSettings,
) -> Result<Trajectory> {
    let n = a.nrows();
    if a.ncols() != n || r.len() != n || x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    if !(alpha > 0.0) || !(settings.dt > 0.0) || !(settings.t_end > 0.0) {
        return Err(Error::Domain("alpha, dt and t_end must be positive".into()));
    }
    if let Some(v) = x0.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("initial state must be positive, found {v}")));
    }
    let stride = settings.stride.max(1);
    let steps = ((settings.t_end / settings.dt).round() as usize).max(1);
    let h = settings.t_end / steps as f64;

    let field = LvField {
        m: scaled_interaction(a, alpha),
        r: col_from_slice(r.values()),
    };
    let mut x = col_from_slice(x0);
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];

    for step in 1..=steps {
        let k1 = field.eval(&x);
        let k2 = field.eval(&axpy(&x, 0.5 * h, &k1));
        let k3 = field.eval(&axpy(&x, 0.5 * h, &k2));
        let k4 = field.eval(&axpy(&x, h, &k3));
        x = Col::from_fn(n, |i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));

        let t = step as f64 * h;
        for i in 0..n {
            let v = x[i];
            if !v.is_finite() || v.abs() > BLOWUP_THRESHOLD {
                return Err(Error::Divergence { time: t });
            }
            if v < 0.0 {
                if v > -NEGATIVE_TOLERANCE {
                    x[i] = 0.0;
                } else {
                    return Err(Error::NegativeAbundance { time: t, value: v });
                }
            }
        }
        if step % stride == 0 || step == steps {
            times.push(t);
            states.push(col_to_vec(x.as_ref()));
        }
    }
    Ok(Trajectory { times, states })
}
