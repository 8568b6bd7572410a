//! Row-envelope Cholesky factorization `L L^H` of `A(k) - σ B`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::assembly::DiscreteBlochForm;
use crate::math::sqrt;
use crate::{Error, Result};

/// Lower factor stored row by row from the first structural non-zero to the
/// diagonal. RCM numbering keeps these rows short.
#[derive(Debug, Clone)]
pub(crate) struct EnvelopeFactor {
    first: Vec<usize>,
    ptr: Vec<usize>,
    vals: Vec<Complex64>,
    diag: Vec<f64>,
}

impl EnvelopeFactor {
    pub fn factor(form: &DiscreteBlochForm, shift: f64) -> Result<Self> {
        let ops = form.operators();
        let n = ops.dof_count();
        let mut first = Vec::with_capacity(n);
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for i in 0..n {
            let f = ops.row(i).map(|at| ops.col(at)).min().unwrap_or(i).min(i);
            first.push(f);
            ptr.push(ptr[i] + (i - f + 1));
        }
        let mut vals = vec![Complex64::new(0.0, 0.0); ptr[n]];
        for i in 0..n {
            for at in ops.row(i) {
                let j = ops.col(at);
                if j <= i {
                    vals[ptr[i] + j - first[i]] = form.shifted_entry(at, shift);
                }
            }
        }

        let mut diag = vec![0.0; n];
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = vals.split_at_mut(ptr[i]);
            let row = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let lj = &done[ptr[j] + start - fj..ptr[j] + j - fj];
                let li = &row[start - fi..j - fi];
                let acc = dot_conj_right(li, lj);
                row[j - fi] = (row[j - fi] - acc) / diag[j];
            }
            let norm: f64 = row[..i - fi].iter().map(|z| z.norm_sqr()).sum();
            let pivot = row[i - fi].re - norm;
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite { row: i, pivot });
            }
            let d = sqrt(pivot);
            row[i - fi] = Complex64::new(d, 0.0);
            diag[i] = d;
        }
        Ok(Self { first, ptr, vals, diag })
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    /// Overwrite every right-hand side in `xs` with `(L L^H)^{-1} x`.
    pub fn solve_many(&self, xs: &mut [Vec<Complex64>]) {
        let n = self.first.len();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1] - 1];
            let inv = 1.0 / self.diag[i];
            for x in xs.iter_mut() {
                let (head, tail) = x.split_at_mut(i);
                let acc = dot_plain(row, &head[fi..]);
                tail[0] = (tail[0] - acc) * inv;
            }
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1] - 1];
            let inv = 1.0 / self.diag[i];
            for x in xs.iter_mut() {
                let (head, tail) = x.split_at_mut(i);
                let xi = tail[0] * inv;
                tail[0] = xi;
                // head[fi..i] -= conj(row) * xi
                for (v, l) in head[fi..].iter_mut().zip(row) {
                    v.re -= l.re * xi.re + l.im * xi.im;
                    v.im -= l.re * xi.im - l.im * xi.re;
                }
            }
        }
    }
}

/// `sum_j a_j b_j` without conjugation, with four independent accumulators.
#[inline]
fn dot_plain(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for t in 0..4 {
            re[t] += x[t].re * y[t].re - x[t].im * y[t].im;
            im[t] += x[t].re * y[t].im + x[t].im * y[t].re;
        }
    }
    let mut acc = Complex64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
    for (x, y) in ra.iter().zip(rb) {
        acc += x * y;
    }
    acc
}

/// `sum_j a_j conj(b_j)`.
#[inline]
fn dot_conj_right(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for t in 0..4 {
            re[t] += x[t].re * y[t].re + x[t].im * y[t].im;
            im[t] += x[t].im * y[t].re - x[t].re * y[t].im;
        }
    }
    let mut acc = Complex64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
    for (x, y) in ra.iter().zip(rb) {
        acc += x * y.conj();
    }
    acc
}
