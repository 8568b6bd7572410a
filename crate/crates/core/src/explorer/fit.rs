//! Least-squares fits of `v(ε) = c0 + c1 / |ln ε|`.

use alloc::vec::Vec;

use crate::math::{ln, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    pub intercept: f64,
    pub slope: f64,
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
    /// The window half-widths used, ascending.
    pub epsilons: Vec<f64>,
}

impl AsymptoticFit {
    pub fn evaluate(&self, epsilon: f64) -> f64 {
        self.intercept + self.slope / ln(epsilon).abs()
    }
}

/// `v(ε) = c0 + c1 / |ln ε| + c2 / ln²ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub intercept: f64,
    pub slope: f64,
    pub curvature: f64,
    pub residual_norm: f64,
}

impl QuadraticFit {
    pub fn evaluate(&self, epsilon: f64) -> f64 {
        let x = 1.0 / ln(epsilon).abs();
        self.intercept + x * (self.slope + x * self.curvature)
    }
}

fn checked(points: &[(f64, f64)], min: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points.len() < min {
        return Err(Error::InsufficientFitData { points: points.len() });
    }
    for &(e, v) in points {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::LogScaleOutOfRange { epsilon: e });
        }
        if !v.is_finite() {
            return Err(Error::InsufficientFitData { points: points.len() });
        }
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok((pts.iter().map(|&(e, _)| 1.0 / ln(e).abs()).collect(), pts.iter().map(|p| p.1).collect()))
}

/// Least squares with the next term of the expansion; needs four points.
/// Solved on centered, scaled abscissae through the normal equations.
pub fn fit_inverse_log_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    let (xs, ys) = checked(points, 4)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sx = xs.iter().map(|x| (x - mx).abs()).fold(0.0, f64::max);
    if !(sx > 1e-7 * mx.abs().max(1e-300)) {
        return Err(Error::DegenerateFit);
    }
    let t: Vec<f64> = xs.iter().map(|x| (x - mx) / sx).collect();
    let mut g = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for (ti, yi) in t.iter().zip(&ys) {
        let row = [1.0, *ti, ti * ti];
        for a in 0..3 {
            r[a] += row[a] * yi;
            for b in 0..3 {
                g[a][b] += row[a] * row[b];
            }
        }
    }
    let c = solve3(g, r).ok_or(Error::DegenerateFit)?;
    // Back from t = (x - mx) / sx to x.
    let curvature = c[2] / (sx * sx);
    let slope = c[1] / sx - 2.0 * mx * curvature;
    let intercept = c[0] - c[1] * mx / sx + curvature * mx * mx;
    let residual_norm = sqrt(
        t.iter()
            .zip(&ys)
            .map(|(ti, yi)| {
                let e = yi - (c[0] + ti * (c[1] + ti * c[2]));
                e * e
            })
            .sum(),
    );
    Ok(QuadraticFit { intercept, slope, curvature, residual_norm })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut g: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    let scale = g.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let p = (col..3).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))?;
        if !(g[p][col].abs() > 1e-12 * scale) {
            return None;
        }
        g.swap(col, p);
        r.swap(col, p);
        for row in col + 1..3 {
            let f = g[row][col] / g[col][col];
            for k in col..3 {
                g[row][k] -= f * g[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut c = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| g[row][k] * c[k]).sum();
        c[row] = (r[row] - tail) / g[row][row];
    }
    Some(c)
}

/// Fit `(ε, v)` pairs. Points are sorted by `ε` first, so the result does not
/// depend on the input order.
pub fn fit_inverse_log(points: &[(f64, f64)]) -> Result<AsymptoticFit> {
    let mut eps: Vec<f64> = points.iter().map(|p| p.0).collect();
    let (xs, ys) = checked(points, 3)?;
    eps.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 1e-14 * (mx * mx).max(1e-300)) {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = sqrt(
        xs.iter()
            .zip(&ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum(),
    );
    Ok(AsymptoticFit { intercept, slope, residual_norm, epsilons: eps })
}
