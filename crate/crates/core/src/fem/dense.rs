//! Small dense Hermitian eigenproblems.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::sqrt;
use crate::{Error, Result};

/// Eigenpairs of a Hermitian matrix (row-major `n x n`) by cyclic Jacobi
/// rotations. Eigenvalues ascending; eigenvectors are the columns of the
/// returned row-major matrix.
pub(crate) fn hermitian_eigen(a: &[Complex64], n: usize) -> (Vec<f64>, Vec<Complex64>) {
    let mut a = a.to_vec();
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum();
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[p * n + q];
                let nb = b.norm();
                if nb == 0.0 || nb * nb <= 1e-36 * scale {
                    continue;
                }
                let u = b / nb;
                let theta = (a[q * n + q].re - a[p * n + p].re) / (2.0 * nb);
                let t = if theta >= 0.0 { 1.0 } else { -1.0 } / (theta.abs() + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                let uc = u.conj();
                for r in 0..n {
                    let (xp, xq) = (a[r * n + p], a[r * n + q]);
                    a[r * n + p] = xp * c - xq * (uc * s);
                    a[r * n + q] = xp * s + xq * (uc * c);
                    let (yp, yq) = (v[r * n + p], v[r * n + q]);
                    v[r * n + p] = yp * c - yq * (uc * s);
                    v[r * n + q] = yp * s + yq * (uc * c);
                }
                for col in 0..n {
                    let (xp, xq) = (a[p * n + col], a[q * n + col]);
                    a[p * n + col] = xp * c - xq * (u * s);
                    a[q * n + col] = xp * s + xq * (u * c);
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new] = v[r * n + old];
        }
    }
    (values, vectors)
}

/// All eigenpairs of `A x = λ B x` with `A` Hermitian and `B` real symmetric
/// positive definite; eigenvectors are `B`-orthonormal columns.
pub(crate) fn generalized_eigen(a: &[Complex64], b: &[f64], n: usize) -> Result<(Vec<f64>, Vec<Complex64>)> {
    // B = L L^T
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = b[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // C = L^{-1} A L^{-T}: solve column-wise, then row-wise.
    let mut c = a.to_vec();
    for col in 0..n {
        for i in 0..n {
            let mut s = c[i * n + col];
            for k in 0..i {
                s -= c[k * n + col] * l[i * n + k];
            }
            c[i * n + col] = s / l[i * n + i];
        }
    }
    for row in 0..n {
        for i in 0..n {
            let mut s = c[row * n + i];
            for k in 0..i {
                s -= c[row * n + k] * l[i * n + k];
            }
            c[row * n + i] = s / l[i * n + i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i * n + j] + c[j * n + i].conj());
            c[i * n + j] = avg;
            c[j * n + i] = avg.conj();
        }
    }
    let (values, mut y) = hermitian_eigen(&c, n);
    // x = L^{-T} y
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = y[i * n + col];
            for k in i + 1..n {
                s -= y[k * n + col] * l[k * n + i];
            }
            y[i * n + col] = s / l[i * n + i];
        }
    }
    Ok((values, y))
}
