//! Lowest eigenpairs of `A(k) x = λ B x`.
//!
//! Large problems use a shift-and-invert block Krylov expansion with the
//! operator `(A - σB)^{-1} B`, which is self-adjoint in the `B` inner product.
//! The basis is kept `B`-orthonormal, the projected matrix is formed
//! explicitly, and the basis is thick-restarted from the leading Ritz vectors
//! once it reaches its size limit. Small problems are solved densely.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assembly::DiscreteBlochForm;
use super::dense::{generalized_eigen, hermitian_eigen};
use super::envelope::EnvelopeFactor;
use crate::math::sqrt;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative residual target `‖Ax - λBx‖ <= tol λ ‖x‖_B`.
    pub tol: f64,
    /// Spectral shift; `None` picks `0.9` times the spectrum floor.
    pub shift: Option<f64>,
    pub block: usize,
    pub max_basis: usize,
    pub max_iterations: usize,
    /// Problems with at most this many unknowns are solved densely.
    pub dense_threshold: usize,
    pub seed: u64,
    pub keep_vectors: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            shift: None,
            block: 3,
            max_basis: 48,
            max_iterations: 400,
            dense_threshold: 300,
            seed: 0x5eed_2b1c,
            keep_vectors: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Dense,
    ShiftInvertKrylov,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolveResult {
    pub eigenvalues: Vec<f64>,
    /// `B`-normalized eigenvectors, when requested.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub residuals: Vec<f64>,
    pub method: SolveMethod,
    pub shift: f64,
    /// Rayleigh-Ritz steps taken.
    pub iterations: usize,
    /// Applications of the inverse operator.
    pub solves: usize,
    pub dof_count: usize,
    pub factor_size: usize,
}

impl EigenSolveResult {
    pub fn worst_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// The `count` smallest eigenvalues of the form, nondecreasing.
pub fn solve_lowest(form: &DiscreteBlochForm, count: usize, config: &SolverConfig) -> Result<EigenSolveResult> {
    let n = form.dof_count();
    if count == 0 {
        return Err(Error::InvalidSolveRequest("count must be at least 1".into()));
    }
    if !(config.tol > 1e-14 && config.tol < 1e-2) {
        return Err(Error::InvalidSolveRequest(format!("tolerance {} outside (1e-14, 1e-2)", config.tol)));
    }
    if n <= config.dense_threshold {
        if count > n {
            return Err(Error::InvalidSolveRequest(format!("{count} eigenvalues requested from {n} unknowns")));
        }
        return solve_dense(form, count, config);
    }
    let block = config.block.max(1);
    if 4 * count > n || config.max_basis < count + 3 * block {
        return Err(Error::InvalidSolveRequest(format!(
            "{count} eigenvalues from {n} unknowns with a basis limit of {}",
            config.max_basis
        )));
    }
    solve_krylov(form, count, block, config)
}

fn residual_of(form: &DiscreteBlochForm, x: &[Complex64], bx: &[Complex64], scratch: &mut [Complex64]) -> (f64, f64) {
    form.apply_a(x, scratch);
    let xax: f64 = x.iter().zip(scratch.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let xbx: f64 = x.iter().zip(bx).map(|(a, b)| (a.conj() * b).re).sum();
    let lambda = xax / xbx;
    let r: f64 = scratch
        .iter()
        .zip(bx)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum();
    (lambda, sqrt(r) / (lambda.abs() * sqrt(xbx)))
}

fn solve_dense(form: &DiscreteBlochForm, count: usize, config: &SolverConfig) -> Result<EigenSolveResult> {
    let n = form.dof_count();
    let (a, b) = form.to_dense();
    let (values, vecs) = generalized_eigen(&a, &b, n)?;
    let mut eigenvalues = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut vectors = Vec::new();
    let mut scratch = vec![Complex64::new(0.0, 0.0); n];
    let mut bx = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..count {
        let x: Vec<Complex64> = (0..n).map(|r| vecs[r * n + j]).collect();
        form.apply_b(&x, &mut bx);
        let (_, res) = residual_of(form, &x, &bx, &mut scratch);
        eigenvalues.push(values[j]);
        residuals.push(res);
        if config.keep_vectors {
            vectors.push(x);
        }
    }
    Ok(EigenSolveResult {
        eigenvalues,
        eigenvectors: config.keep_vectors.then_some(vectors),
        residuals,
        method: SolveMethod::Dense,
        shift: 0.0,
        iterations: 1,
        solves: 0,
        dof_count: n,
        factor_size: n * n,
    })
}

fn factor_with_retry(form: &DiscreteBlochForm, config: &SolverConfig) -> Result<(EnvelopeFactor, f64)> {
    let floor = form.operators().spectrum_floor();
    let mut shift = config.shift.unwrap_or(0.9 * floor);
    let mut last = None;
    for _ in 0..4 {
        match EnvelopeFactor::factor(form, shift) {
            Ok(f) => return Ok((f, shift)),
            Err(e) => last = Some(e),
        }
        shift = if shift > 0.0 { 0.5 * shift } else { shift - floor };
    }
    Err(last.expect("at least one attempt"))
}

#[inline]
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for t in 0..4 {
            re[t] += x[t].re * y[t].re + x[t].im * y[t].im;
            im[t] += x[t].re * y[t].im - x[t].im * y[t].re;
        }
    }
    let mut acc = Complex64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
    for (x, y) in ra.iter().zip(rb) {
        acc += x.conj() * y;
    }
    acc
}

#[inline]
fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        yi.re += alpha.re * xi.re - alpha.im * xi.im;
        yi.im += alpha.re * xi.im + alpha.im * xi.re;
    }
}

/// Rows per cache block in the tall-skinny kernels below.
const CHUNK: usize = 256;

/// `c[j * zs.len() + t] = <vs_j, zs_t>` (conjugate-linear in `vs_j`).
fn inner_products(vs: &[Vec<Complex64>], zs: &[Vec<Complex64>]) -> Vec<Complex64> {
    let nz = zs.len();
    let mut c = vec![Complex64::new(0.0, 0.0); vs.len() * nz];
    let Some(n) = zs.first().map(Vec::len) else { return c };
    let mut start = 0;
    while start < n {
        let end = (start + CHUNK).min(n);
        for (j, v) in vs.iter().enumerate() {
            let v = &v[start..end];
            for (t, z) in zs.iter().enumerate() {
                c[j * nz + t] += dot(v, &z[start..end]);
            }
        }
        start = end;
    }
    c
}

/// `outs_t += sum_j coef[j * outs.len() + t] vs_j`.
fn accumulate(vs: &[Vec<Complex64>], coef: &[Complex64], outs: &mut [Vec<Complex64>]) {
    let nt = outs.len();
    let Some(n) = outs.first().map(Vec::len) else { return };
    let mut start = 0;
    while start < n {
        let end = (start + CHUNK).min(n);
        for (j, v) in vs.iter().enumerate() {
            let v = &v[start..end];
            for (t, out) in outs.iter_mut().enumerate() {
                let a = coef[j * nt + t];
                if a != Complex64::new(0.0, 0.0) {
                    axpy(a, v, &mut out[start..end]);
                }
            }
        }
        start = end;
    }
}

/// Columns `cols` of the row-major `m x m` matrix `y`, as a row-major
/// `m x cols.len()` coefficient block, each scaled by `scale(col)`.
fn select(y: &[Complex64], m: usize, cols: &[usize], scale: impl Fn(usize) -> f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m * cols.len());
    for j in 0..m {
        for &c in cols {
            out.push(y[j * m + c] * scale(c));
        }
    }
    out
}

fn zeros(n: usize, count: usize) -> Vec<Vec<Complex64>> {
    (0..count).map(|_| vec![Complex64::new(0.0, 0.0); n]).collect()
}

struct Basis {
    q: Vec<Vec<Complex64>>,
    bq: Vec<Vec<Complex64>>,
    w: Vec<Vec<Complex64>>,
    /// Projected operator `H_ij = <q_i, W_j>_B`, row-major with stride `cap`.
    h: Vec<Complex64>,
    cap: usize,
}

impl Basis {
    fn len(&self) -> usize {
        self.q.len()
    }

    fn projected(&self) -> Vec<Complex64> {
        let m = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                out[i * m + j] = if i <= j {
                    self.h[i * self.cap + j]
                } else {
                    self.h[j * self.cap + i].conj()
                };
            }
            out[i * m + i].im = 0.0;
        }
        out
    }
}

/// Remove the `B`-projection onto the basis from every vector of `zs`, twice.
fn project_out(basis: &Basis, zs: &mut [Vec<Complex64>]) {
    if basis.len() == 0 {
        return;
    }
    for _pass in 0..2 {
        let c = inner_products(&basis.bq, zs);
        let neg: Vec<Complex64> = c.iter().map(|v| -v).collect();
        accumulate(&basis.q, &neg, zs);
    }
}

fn solve_krylov(form: &DiscreteBlochForm, count: usize, block: usize, config: &SolverConfig) -> Result<EigenSolveResult> {
    let n = form.dof_count();
    let (factor, shift) = factor_with_retry(form, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let random_vector = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    };

    let cap = config.max_basis;
    let mut basis = Basis {
        q: Vec::with_capacity(cap),
        bq: Vec::with_capacity(cap),
        w: Vec::with_capacity(cap),
        h: vec![Complex64::new(0.0, 0.0); cap * cap],
        cap,
    };
    let mut solves = 0usize;
    let mut scratch = vec![Complex64::new(0.0, 0.0); n];

    let mut pending: Vec<Vec<Complex64>> = (0..block).map(|_| random_vector(&mut rng)).collect();
    let mut iterations = 0usize;
    let mut best_worst = f64::INFINITY;
    let mut previous: Option<Vec<f64>> = None;

    loop {
        // B-orthonormalize the pending block against the basis, then within
        // itself; vectors that cancel out are replaced by random ones.
        let norms: Vec<f64> = pending
            .iter()
            .map(|z| {
                form.apply_b(z, &mut scratch);
                sqrt(dot(z, &scratch).re.max(0.0))
            })
            .collect();
        project_out(&basis, &mut pending);
        let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(pending.len());
        let mut accepted_b: Vec<Vec<Complex64>> = Vec::with_capacity(pending.len());
        for (mut z, before) in pending.drain(..).zip(norms) {
            let mut before = before;
            let mut ok = false;
            for attempt in 0..4 {
                if attempt > 0 {
                    z = random_vector(&mut rng);
                    form.apply_b(&z, &mut scratch);
                    before = sqrt(dot(&z, &scratch).re.max(0.0));
                    project_out(&basis, core::slice::from_mut(&mut z));
                }
                for _pass in 0..2 {
                    for (a, ba) in accepted.iter().zip(&accepted_b) {
                        let c = dot(ba, &z);
                        axpy(-c, a, &mut z);
                    }
                }
                form.apply_b(&z, &mut scratch);
                let after = sqrt(dot(&z, &scratch).re.max(0.0));
                if after > 1e-8 * before && after > 0.0 {
                    let inv = 1.0 / after;
                    z.iter_mut().for_each(|v| *v *= inv);
                    accepted_b.push(scratch.iter().map(|v| v * inv).collect());
                    accepted.push(z);
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::NotConverged { iterations, worst_residual: best_worst });
            }
        }

        // W = (A - σB)^{-1} B Z for the whole block at once.
        let r = accepted.len();
        let mut w_new = accepted_b.clone();
        factor.solve_many(&mut w_new);
        solves += r;
        basis.q.extend(accepted);
        basis.bq.extend(accepted_b);
        let m = basis.len();
        let hcols = inner_products(&basis.bq, &w_new);
        for i in 0..m {
            for t in 0..r {
                let j = m - r + t;
                if i <= j {
                    basis.h[i * cap + j] = hcols[i * r + t];
                }
            }
        }
        basis.w.extend(w_new);
        if m < count + block {
            pending = basis.w[m - r..].to_vec();
            continue;
        }

        // Rayleigh-Ritz. Largest θ first ↔ smallest λ first.
        iterations += 1;
        let (theta, y) = hermitian_eigen(&basis.projected(), m);
        let order: Vec<usize> = (0..m).rev().collect();
        let wanted = &order[..count];
        let ritz: Vec<f64> = wanted.iter().map(|&c| shift + 1.0 / theta[c]).collect();
        // True residuals cost a Ritz vector each; only form them once the
        // Ritz values have settled.
        let settled = previous
            .as_ref()
            .is_some_and(|p: &Vec<f64>| p.iter().zip(&ritz).all(|(a, b)| (a - b).abs() <= 1e-11 * b.abs()));
        previous = Some(ritz.clone());
        let mut values = ritz;
        let mut residuals = vec![f64::INFINITY; count];
        let mut xs = Vec::new();
        if settled {
            xs = zeros(n, count);
            accumulate(&basis.q, &select(&y, m, wanted, |_| 1.0), &mut xs);
            let mut bx = vec![Complex64::new(0.0, 0.0); n];
            for (j, x) in xs.iter().enumerate() {
                form.apply_b(x, &mut bx);
                let (lambda, res) = residual_of(form, x, &bx, &mut scratch);
                values[j] = lambda;
                residuals[j] = res;
            }
        }
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        best_worst = best_worst.min(worst);
        if worst <= config.tol {
            let mut idx: Vec<usize> = (0..count).collect();
            idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            return Ok(EigenSolveResult {
                eigenvalues: idx.iter().map(|&i| values[i]).collect(),
                eigenvectors: config.keep_vectors.then(|| idx.iter().map(|&i| xs[i].clone()).collect()),
                residuals: idx.iter().map(|&i| residuals[i]).collect(),
                method: SolveMethod::ShiftInvertKrylov,
                shift,
                iterations,
                solves,
                dof_count: n,
                factor_size: factor.len(),
            });
        }
        if iterations >= config.max_iterations {
            return Err(Error::NotConverged { iterations, worst_residual: worst });
        }

        // Expansion directions: Op-residuals W y - θ Q y of the leading
        // unconverged Ritz pairs, topped up with the next ones.
        let mut chosen: Vec<usize> = (0..count).filter(|&j| residuals[j] > config.tol).map(|j| order[j]).collect();
        chosen.truncate(block);
        for &c in order.iter().skip(count) {
            if chosen.len() >= block {
                break;
            }
            chosen.push(c);
        }
        let mut next = zeros(n, chosen.len());
        accumulate(&basis.w, &select(&y, m, &chosen, |_| 1.0), &mut next);
        accumulate(&basis.q, &select(&y, m, &chosen, |c| -theta[c]), &mut next);

        if m + block > cap {
            let keep = (count + 2 * block).min(m);
            let kept = &order[..keep];
            let coef = select(&y, m, kept, |_| 1.0);
            let restart = |vs: &[Vec<Complex64>]| {
                let mut out = zeros(n, keep);
                accumulate(vs, &coef, &mut out);
                out
            };
            basis.q = restart(&basis.q);
            basis.bq = restart(&basis.bq);
            basis.w = restart(&basis.w);
            basis.h.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (i, &c) in kept.iter().enumerate() {
                basis.h[i * cap + i] = Complex64::new(theta[c], 0.0);
            }
        }
        pending = next;
    }
}
