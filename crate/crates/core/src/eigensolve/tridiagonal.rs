//! Householder reduction to tridiagonal form, implicit-shift QL for the
//! eigenvalues, and inverse iteration for a single eigenvector.

use crate::error::{BackflowError, Result};

const QL_MAX_SWEEPS: usize = 60;

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` coupling `i` and `i + 1`.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Householder reflectors `H_k = I − β v vᵀ` acting on indices `k+1..n`.
#[derive(Debug, Clone)]
pub(crate) struct Reflectors {
    vectors: Vec<Vec<f64>>,
    betas: Vec<f64>,
}

impl Reflectors {
    /// Maps an eigenvector of the tridiagonal matrix back to the original basis.
    pub fn back_transform(&self, x: &mut [f64]) {
        for (k, (v, &beta)) in self.vectors.iter().zip(&self.betas).enumerate().rev() {
            if beta == 0.0 {
                continue;
            }
            let tail = &mut x[k + 1..];
            let s: f64 = v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum();
            let s = beta * s;
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }
}

/// Reduces the dense symmetric row-major matrix `a` (consumed) to tridiagonal
/// form. Only the lower triangle is read and updated.
pub(crate) fn tridiagonalize(mut a: Vec<f64>, n: usize) -> (Tridiagonal, Reflectors) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut vectors = Vec::with_capacity(n.saturating_sub(2));
    let mut betas = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<f64> = (0..len).map(|i| a[(k + 1 + i) * n + k]).collect();
        let (v, beta, mu) = householder(&x);
        diag[k] = a[k * n + k];
        off[k] = mu;

        if beta != 0.0 {
            // p = β A₂₂ v using the lower triangle of the trailing block
            let p = &mut p[..len];
            p.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..len {
                let row = (k + 1 + i) * n + k + 1;
                let mut acc = a[row + i] * v[i];
                for j in 0..i {
                    let aij = a[row + j];
                    acc += aij * v[j];
                    p[j] += aij * v[i];
                }
                p[i] += acc;
            }
            p.iter_mut().for_each(|x| *x *= beta);
            let pv: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
            let half = 0.5 * beta * pv;
            let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - half * vi).collect();
            for i in 0..len {
                let row = (k + 1 + i) * n + k + 1;
                let (vi, wi) = (v[i], w[i]);
                for j in 0..=i {
                    a[row + j] -= vi * w[j] + wi * v[j];
                }
            }
        }
        vectors.push(v);
        betas.push(beta);
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    if n >= 1 {
        diag[n - 1] = a[(n - 1) * n + n - 1];
    }
    (Tridiagonal { diag, off }, Reflectors { vectors, betas })
}

/// Returns `(v, β, μ)` with `v[0] = 1` such that `(I − β v vᵀ) x = μ e₁`.
fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let x0 = x[0];
    let sigma: f64 = x[1..].iter().map(|t| t * t).sum();
    let mut v = x.to_vec();
    v[0] = 1.0;
    if sigma == 0.0 {
        return (v, 0.0, x0);
    }
    let mu = (x0 * x0 + sigma).sqrt();
    let v0 = if x0 <= 0.0 { x0 - mu } else { -sigma / (x0 + mu) };
    let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for t in v[1..].iter_mut() {
        *t /= v0;
    }
    (v, beta, mu)
}

/// All eigenvalues of `t` (unsorted) by the implicit-shift QL iteration.
pub(crate) fn ql_eigenvalues(t: &Tridiagonal) -> Result<Vec<f64>> {
    let n = t.diag.len();
    let mut d = t.diag.clone();
    let mut e = t.off.clone();
    e.push(0.0);
    // absolute floor so clusters of near-zero eigenvalues still deflate
    let scale = d.iter().chain(&e).fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = f64::EPSILON * scale;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(BackflowError::NoConvergence {
                    iterations: sweeps,
                    residual: e[l].abs(),
                    target: f64::EPSILON,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Eigenvector of `t` for the (converged) eigenvalue `lambda`, by inverse
/// iteration with a pivoted tridiagonal LU factorization.
pub(crate) fn inverse_iteration(t: &Tridiagonal, lambda: f64) -> Vec<f64> {
    let n = t.diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = t
        .diag
        .iter()
        .chain(&t.off)
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let lu = TridiagonalLu::factor(t, lambda, tiny);

    // deterministic start with no special alignment to the eigenbasis
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).fract())
        .collect();
    for _ in 0..3 {
        lu.solve(&mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(t: &Tridiagonal, shift: f64, tiny: f64) -> Self {
        let n = t.diag.len();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = tiny.copysign(*v);
            }
        }
        TridiagonalLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}
