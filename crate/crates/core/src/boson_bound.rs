//! Two identical bosons.
//!
//! Minimizing Δ2 under normalization alone decouples into one single-particle
//! problem per second index, so the minimum is `2 λ_ring^(N)`. The product of
//! the single-particle minimizer with itself is symmetric and attains it, so
//! the bosonic minimum is the same value and the minimizing state is
//! `c_mk = c̃_m c̃_k`.

use serde::{Deserialize, Serialize};

use crate::eigensolve::SolverConfig;
use crate::error::Result;
use crate::kernel::{build_kernel, Alpha};
use crate::single_particle::lambda_ring_with;
use crate::two_particle::{delta2_quadratic, CoefficientMatrix, SymmetryTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BosonResult {
    pub alpha: Alpha,
    pub n_max: usize,
    pub q_b: f64,
    pub state: CoefficientMatrix,
    /// Eigen-residual of the single-particle solve.
    pub residual: f64,
}

pub fn boson_bound(alpha: Alpha, n_max: usize) -> Result<BosonResult> {
    boson_bound_with(alpha, n_max, &SolverConfig::default())
}

pub fn boson_bound_with(alpha: Alpha, n_max: usize, cfg: &SolverConfig) -> Result<BosonResult> {
    let single = lambda_ring_with(alpha, n_max, cfg)?;
    let state = CoefficientMatrix::product(single.minimizer.values())?;
    Ok(BosonResult {
        alpha,
        n_max,
        q_b: 2.0 * single.lambda_ring,
        state,
        residual: single.residual,
    })
}

/// Normalization, bosonic tag, rank-one structure (every 2×2 minor below
/// 1e−10) and `Δ2(state) = q_b` within 1e−11.
pub fn boson_state_check(result: &BosonResult) -> bool {
    let c = &result.state;
    if c.tag() != SymmetryTag::Boson || c.n_max() != result.n_max {
        return false;
    }
    if (c.norm_squared() - 1.0).abs() > 1e-12 {
        return false;
    }
    let d = c.dim();
    for m in 0..d {
        for k in 0..d {
            if c.get(k, m) != c.get(m, k) {
                return false;
            }
            for n in m + 1..d {
                for l in k + 1..d {
                    let minor = c.get(m, k) * c.get(n, l) - c.get(m, l) * c.get(n, k);
                    if minor.abs() > 1e-10 {
                        return false;
                    }
                }
            }
        }
    }
    let k = build_kernel(result.alpha, result.n_max);
    match delta2_quadratic(c, &k) {
        Ok(d2) => (d2 - result.q_b).abs() <= 1e-11,
        Err(_) => false,
    }
}
