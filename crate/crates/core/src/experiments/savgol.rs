//! Savitzky-Golay smoothing by local least-squares polynomial fits.
//!
//! Interior points use the full centred window. Near the ends the window is
//! truncated to the available samples and the polynomial is refitted on that
//! shorter, off-centre window (degree capped at `points - 1`); there is no
//! mirror padding. Polynomials up to `degree` are therefore reproduced exactly
//! everywhere, endpoints included.

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;

use crate::error::{Error, Result};

fn validate(window: usize, degree: usize) -> Result<()> {
    if window.is_multiple_of(2) {
        return Err(Error::Config(format!("Savitzky-Golay window must be odd, got {window}")));
    }
    if window <= degree {
        return Err(Error::Config(format!(
            "Savitzky-Golay window {window} must exceed the degree {degree}"
        )));
    }
    Ok(())
}

/// Value at offset 0 of the least-squares polynomial through `(offsets, ys)`.
fn fit_at_origin(offsets: &[f64], ys: &[f64], degree: usize) -> f64 {
    let m = offsets.len();
    let degree = degree.min(m - 1);
    let scale = offsets.iter().fold(1.0f64, |s, t| s.max(t.abs()));
    let v = Mat::from_fn(m, degree + 1, |i, p| (offsets[i] / scale).powi(p as i32));
    let y = Mat::from_fn(m, 1, |i, _| ys[i]);
    let coef = v.qr().solve_lstsq(&y);
    coef[(0, 0)]
}

pub fn savitzky_golay(series: &[f64], window: usize, degree: usize) -> Result<Vec<f64>> {
    validate(window, degree)?;
    if series.len() < window {
        return Err(Error::Config(format!(
            "series of length {} is shorter than the window {window}",
            series.len()
        )));
    }
    let half = window / 2;
    let len = series.len();
    let mut out = Vec::with_capacity(len);
    let mut offsets = Vec::with_capacity(window);
    for i in 0..len {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(len - 1);
        offsets.clear();
        offsets.extend((lo..=hi).map(|j| j as f64 - i as f64));
        out.push(fit_at_origin(&offsets, &series[lo..=hi], degree));
    }
    Ok(out)
}

/// Convolution weights applied at interior points.
pub fn savgol_weights(window: usize, degree: usize) -> Result<Vec<f64>> {
    validate(window, degree)?;
    let half = (window / 2) as f64;
    let offsets: Vec<f64> = (0..window).map(|j| j as f64 - half).collect();
    Ok((0..window)
        .map(|j| {
            let mut e = vec![0.0; window];
            e[j] = 1.0;
            fit_at_origin(&offsets, &e, degree)
        })
        .collect())
}
