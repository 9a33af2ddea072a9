//! Smallest eigenpair of a dense real symmetric matrix or of a matrix-free
//! symmetric operator.
//!
//! Dense inputs up to [`SolverConfig::dense_limit`] are reduced to tridiagonal
//! form, the spectrum of the tridiagonal matrix is found with the
//! implicit-shift QL iteration, and the eigenvector of the smallest
//! eigenvalue is recovered by inverse iteration and back-transformation.
//! Larger inputs go through a seeded Lanczos iteration with full
//! reorthogonalization.
//!
//! Every returned [`EigenPair`] carries its true residual
//! `‖A v − λ v‖₂`, recomputed against the original operator.

mod lanczos;
mod tridiagonal;

pub use lanczos::lanczos_smallest;

use serde::{Deserialize, Serialize};

use crate::error::{BackflowError, Result};
use crate::kernel::{check_len, dot};

const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real symmetric matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    /// Validates squareness and symmetry (within 1e−12 relative to the
    /// largest entry).
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(BackflowError::InvalidArgument(
                "matrix dimension must be at least 1".into(),
            ));
        }
        check_len(dim * dim, entries.len())?;
        let scale = entries.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                let defect = (entries[i * dim + j] - entries[j * dim + i]).abs();
                if defect > SYMMETRY_TOL * scale || defect.is_nan() {
                    return Err(BackflowError::NotSymmetric {
                        row: i,
                        col: j,
                        defect,
                    });
                }
            }
        }
        Ok(SymmetricMatrix { dim, entries })
    }

    /// Builds from an entry function evaluated on the lower triangle and mirrored.
    pub fn from_lower_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        SymmetricMatrix { dim, entries }
    }

    pub(crate) fn from_parts_unchecked(dim: usize, entries: Vec<f64>) -> Self {
        SymmetricMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        let mut y = vec![0.0; self.dim];
        self.apply(x, &mut y);
        Ok(y)
    }

    /// Returns `self + s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim {
            entries[i * self.dim + i] += s;
        }
        SymmetricMatrix {
            dim: self.dim,
            entries,
        }
    }
}

/// A symmetric linear map known only through its action.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `y ← A x`. Both slices have length [`dim`](Self::dim).
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Frobenius norm, used to scale the convergence tolerance.
    fn frobenius_norm(&self) -> f64;
}

impl SymmetricOperator for SymmetricMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (row, yi) in self.entries.chunks_exact(self.dim).zip(y.iter_mut()) {
            *yi = dot(row, x);
        }
    }

    fn frobenius_norm(&self) -> f64 {
        SymmetricMatrix::frobenius_norm(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Residual target relative to the Frobenius norm.
    pub tol: f64,
    /// Largest dimension handled by the dense tridiagonal path.
    pub dense_limit: usize,
    /// Seed of the Lanczos starting vector.
    pub seed: u64,
    /// Krylov basis size before a restart.
    pub max_basis: usize,
    /// Lanczos steps between convergence checks.
    pub check_every: usize,
    /// Matrix-vector products allowed per unit of dimension.
    pub iterations_per_dim: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            dense_limit: 512,
            seed: 0,
            max_basis: 400,
            check_every: 10,
            iterations_per_dim: 50,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        SolverConfig {
            tol,
            ..Default::default()
        }
    }

    pub(crate) fn max_iterations(&self, dim: usize) -> usize {
        self.iterations_per_dim.saturating_mul(dim).max(1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(BackflowError::InvalidArgument(format!(
                "solver tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.check_every == 0 {
            return Err(BackflowError::InvalidArgument(
                "check_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest eigenpair with the default configuration and residual target
/// `tol · ‖a‖_F`.
pub fn smallest_eigenpair(a: &SymmetricMatrix, tol: f64) -> Result<EigenPair> {
    smallest_eigenpair_with(a, &SolverConfig::with_tol(tol))
}

pub fn smallest_eigenpair_with(a: &SymmetricMatrix, cfg: &SolverConfig) -> Result<EigenPair> {
    cfg.validate()?;
    if a.dim <= cfg.dense_limit {
        dense_smallest(a, cfg)
    } else {
        lanczos_smallest(a, cfg)
    }
}

/// Smallest eigenpair of a matrix-free operator. Dispatches on
/// `cfg.dense_limit` only through `densify`, which must return the dense
/// form of `op` when called.
pub fn smallest_eigenpair_operator<O, F>(op: &O, cfg: &SolverConfig, densify: F) -> Result<EigenPair>
where
    O: SymmetricOperator + ?Sized,
    F: FnOnce() -> SymmetricMatrix,
{
    cfg.validate()?;
    if op.dim() <= cfg.dense_limit {
        dense_smallest(&densify(), cfg)
    } else {
        lanczos_smallest(op, cfg)
    }
}

fn dense_smallest(a: &SymmetricMatrix, cfg: &SolverConfig) -> Result<EigenPair> {
    let n = a.dim;
    let target = cfg.tol * a.frobenius_norm();
    let (t, reflectors) = tridiagonal::tridiagonalize(a.entries.clone(), n);
    let lambda = tridiagonal::ql_eigenvalues(&t)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut x = tridiagonal::inverse_iteration(&t, lambda);
    reflectors.back_transform(&mut x);
    let nrm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
    let pair = finalize(a, lambda, x);
    if pair.residual <= target {
        Ok(pair)
    } else {
        Err(BackflowError::NoConvergence {
            iterations: 1,
            residual: pair.residual,
            target,
        })
    }
}

/// Sign-normalizes (largest-magnitude entry positive) and attaches the true residual.
pub(crate) fn finalize<O: SymmetricOperator + ?Sized>(op: &O, value: f64, mut vector: Vec<f64>) -> EigenPair {
    let pivot = vector
        .iter()
        .copied()
        .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
    if pivot < 0.0 {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
    let residual = residual_of(op, value, &vector);
    EigenPair {
        value,
        vector,
        residual,
    }
}

fn residual_of<O: SymmetricOperator + ?Sized>(op: &O, value: f64, v: &[f64]) -> f64 {
    let mut av = vec![0.0; v.len()];
    op.apply(v, &mut av);
    av.iter()
        .zip(v)
        .map(|(a, x)| {
            let r = a - value * x;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// `‖A v − λ v‖₂`.
pub fn eigen_residual(a: &SymmetricMatrix, p: &EigenPair) -> Result<f64> {
    check_len(a.dim, p.vector.len())?;
    Ok(residual_of(a, p.value, &p.vector))
}
