#![allow(dead_code)]

use std::f64::consts::PI;

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut a = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let total: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Kernel entry straight from the defining formula, without the library's
/// sinc branch.
pub fn kernel_entry(alpha: f64, m: usize, n: usize) -> f64 {
    let z = alpha * ((m * m) as f64 - (n * n) as f64);
    let s = if m == n { 1.0 } else { z.sin() / z };
    alpha / PI * (m + n) as f64 * s
}

/// Dense `(N+1)² × (N+1)²` operator `I ⊗ K` in the block layout `c_{m + k(N+1)}`.
pub fn dense_block_kernel(alpha: f64, n_max: usize) -> Vec<f64> {
    let d = n_max + 1;
    let rows = d * d;
    let mut out = vec![0.0; rows * rows];
    for k in 0..d {
        for m in 0..d {
            for n in 0..d {
                out[(m + k * d) * rows + n + k * d] = kernel_entry(alpha, m, n);
            }
        }
    }
    out
}

/// Literal triple sum `2 Σ_mnk c_mk K_mn c_nk` with `c[m][k]` row-major.
pub fn delta2_triple_sum(alpha: f64, n_max: usize, rows: &[f64]) -> f64 {
    let d = n_max + 1;
    let mut s = 0.0;
    for m in 0..d {
        for n in 0..d {
            for k in 0..d {
                s += rows[m * d + k] * kernel_entry(alpha, m, n) * rows[n * d + k];
            }
        }
    }
    2.0 * s
}

/// Two-particle wavefunction `Ψ(θ₁, θ₂, t)` from row-major `c[m][k]`, as (re, im).
pub fn psi(rows: &[f64], n_max: usize, th1: f64, th2: f64, t: f64) -> (f64, f64, f64, f64) {
    // returns Ψ and ∂Ψ/∂θ₁
    let d = n_max + 1;
    let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
    for m in 0..d {
        for k in 0..d {
            let c = rows[m * d + k];
            if c == 0.0 {
                continue;
            }
            let e = 0.5 * ((m * m + k * k) as f64);
            let ph = m as f64 * th1 + k as f64 * th2 - e * t;
            let (s, co) = ph.sin_cos();
            re += c * co / (2.0 * PI);
            im += c * s / (2.0 * PI);
            dre -= m as f64 * c * s / (2.0 * PI);
            dim += m as f64 * c * co / (2.0 * PI);
        }
    }
    (re, im, dre, dim)
}

/// `ρ(θ)` and `J(θ)` by a uniform φ-quadrature of the wavefunction:
/// `ρ = 2 ∫|Ψ(θ,φ)|² dφ`, `J = 2 ∫ Im(Ψ* ∂θ₁Ψ)(θ,φ) dφ`.
pub fn wavefunction_observables(rows: &[f64], n_max: usize, theta: f64, t: f64) -> (f64, f64) {
    let points = 4 * (n_max + 1) + 8;
    let h = 2.0 * PI / points as f64;
    let (mut rho, mut j) = (0.0, 0.0);
    for i in 0..points {
        let phi = i as f64 * h;
        let (re, im, dre, dim) = psi(rows, n_max, theta, phi, t);
        rho += re * re + im * im;
        j += re * dim - im * dre;
    }
    (2.0 * rho * h, 2.0 * j * h)
}

pub fn dense_antisymmetrizer(n_max: usize) -> (Vec<f64>, usize) {
    let d = n_max + 1;
    let rows = d * d;
    let mut pairs = Vec::new();
    for k in 0..n_max {
        for m in k + 1..=n_max {
            pairs.push((m, k));
        }
    }
    let p = pairs.len();
    let mut out = vec![0.0; rows * p];
    for (j, &(m, k)) in pairs.iter().enumerate() {
        out[(m + k * d) * p + j] = 1.0;
        out[(k + m * d) * p + j] = -1.0;
    }
    (out, p)
}

/// `Aᵀ B A` for dense row-major `A` (`r × c`) and `B` (`r × r`).
pub fn congruence(a: &[f64], b: &[f64], r: usize, c: usize) -> Vec<f64> {
    let mut ba = vec![0.0; r * c];
    for i in 0..r {
        for l in 0..r {
            let bil = b[i * r + l];
            if bil == 0.0 {
                continue;
            }
            for j in 0..c {
                ba[i * c + j] += bil * a[l * c + j];
            }
        }
    }
    let mut out = vec![0.0; c * c];
    for i in 0..c {
        for j in 0..c {
            out[i * c + j] = (0..r).map(|l| a[l * c + i] * ba[l * c + j]).sum();
        }
    }
    out
}
