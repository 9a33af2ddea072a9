//! Lanczos iteration with full reorthogonalization for the smallest
//! eigenpair of a large symmetric operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tridiagonal::{inverse_iteration, ql_eigenvalues, Tridiagonal};
use super::{finalize, EigenPair, SolverConfig, SymmetricOperator};
use crate::error::{BackflowError, Result};
use crate::kernel::dot;

pub fn lanczos_smallest<O: SymmetricOperator + ?Sized>(
    op: &O,
    cfg: &SolverConfig,
) -> Result<EigenPair> {
    let n = op.dim();
    let target = cfg.tol * op.frobenius_norm();
    let cap = cfg.max_iterations(n);
    let max_basis = cfg.max_basis.clamp(2, n.max(2)).min(n);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    normalize(&mut start);

    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;
    let mut w = vec![0.0; n];

    loop {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut ritz: Option<Vec<f64>> = None;

        for j in 0..max_basis {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&basis[j], &w);
            alphas.push(a);
            axpy(&mut w, -a, &basis[j]);
            if j > 0 {
                axpy(&mut w, -betas[j - 1], &basis[j - 1]);
            }
            // classical Gram–Schmidt, applied twice
            for _ in 0..2 {
                for q in &basis {
                    let h = dot(q, &w);
                    axpy(&mut w, -h, q);
                }
            }
            let b = norm(&w);
            let size = j + 1;
            let breakdown = b <= f64::EPSILON * target.max(f64::MIN_POSITIVE) || size == n;
            let due = size % cfg.check_every == 0 || size == max_basis || breakdown || matvecs + 1 >= cap;

            if due {
                let t = Tridiagonal {
                    diag: alphas.clone(),
                    off: betas.clone(),
                };
                let theta = ql_eigenvalues(&t)?
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                let s = inverse_iteration(&t, theta);
                let estimate = (b * s[size - 1]).abs();
                if estimate <= target || breakdown || size == max_basis || matvecs + 1 >= cap {
                    let mut y = vec![0.0; n];
                    for (q, &coef) in basis.iter().zip(&s) {
                        axpy(&mut y, coef, q);
                    }
                    normalize(&mut y);
                    let pair = finalize(op, theta, y);
                    matvecs += 1;
                    best_residual = best_residual.min(pair.residual);
                    if pair.residual <= target {
                        return Ok(pair);
                    }
                    ritz = Some(pair.vector);
                    if breakdown || size == max_basis {
                        break;
                    }
                }
            }
            if breakdown {
                break;
            }
            if matvecs >= cap {
                break;
            }
            betas.push(b);
            let next: Vec<f64> = w.iter().map(|x| x / b).collect();
            basis.push(next);
        }

        if matvecs >= cap {
            return Err(BackflowError::NoConvergence {
                iterations: matvecs,
                residual: best_residual,
                target,
            });
        }
        // restart from the current Ritz vector, nudged so an exactly
        // invariant start cannot stall the iteration
        if let Some(y) = ritz {
            start = y;
        }
        for x in start.iter_mut() {
            *x += 1e-3 * rng.gen_range(-0.5..0.5);
        }
        normalize(&mut start);
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn normalize(x: &mut [f64]) {
    let nrm = norm(x);
    if nrm > 0.0 {
        x.iter_mut().for_each(|v| *v /= nrm);
    }
}
