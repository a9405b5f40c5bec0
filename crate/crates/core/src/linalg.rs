//! Small dense linear-algebra helpers on top of `faer`.

use faer::{Col, ColRef, Mat, MatRef};

use crate::error::{Error, Result};
use crate::seed::mix64;

pub fn col_from_slice(v: &[f64]) -> Col<f64> {
    Col::from_fn(v.len(), |i| v[i])
}

pub fn col_to_vec(v: ColRef<'_, f64>) -> Vec<f64> {
    (0..v.nrows()).map(|i| v[i]).collect()
}

/// `M v`.
pub fn matvec(m: MatRef<'_, f64>, v: ColRef<'_, f64>) -> Col<f64> {
    m * v
}

/// `M / (α √n)`, the scaled interaction matrix appearing in the resolvent.
pub fn scaled_interaction(a: MatRef<'_, f64>, alpha: f64) -> Mat<f64> {
    let n = a.nrows();
    let c = 1.0 / (alpha * (n as f64).sqrt());
    Mat::from_fn(n, a.ncols(), |i, j| c * a[(i, j)])
}

fn start_vector(n: usize) -> Col<f64> {
    // fixed pseudo-random start, never orthogonal to a structured singular vector
    let mut v = Col::from_fn(n, |i| {
        let h = mix64(0x5eed ^ i as u64);
        0.5 + (h >> 11) as f64 / (1u64 << 53) as f64
    });
    let norm = v.norm_l2();
    v /= faer::Scale(norm);
    v
}

/// Largest singular value of `m` by power iteration on `MᵀM`.
///
/// Each sweep reports `σ = ‖M v‖` for the current unit vector `v`, which never
/// exceeds the true largest singular value. Iteration stops once two successive
/// estimates agree to relative tolerance `tol`.
pub fn largest_singular_value(m: MatRef<'_, f64>, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let mut v = start_vector(n);
    let mut sigma = 0.0f64;
    for _ in 0..max_iter {
        let mv = m * &v;
        let next = mv.norm_l2();
        if next == 0.0 {
            return Ok(0.0);
        }
        let mut w = m.transpose() * &mv;
        let wn = w.norm_l2();
        if wn == 0.0 {
            return Ok(next);
        }
        w /= faer::Scale(wn);
        v = w;
        if (next - sigma).abs() <= tol * next {
            return Ok(next);
        }
        sigma = next;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_estimate: sigma,
    })
}
