//! One particle on the ring: the truncated bound `λ_ring^(N)(α)` and the
//! time-integrated current Δ1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::eigensolve::{smallest_eigenpair_with, SolverConfig, SymmetricMatrix};
use crate::error::{BackflowError, Result};
use crate::kernel::{build_kernel, Alpha, KernelMatrix, ModeIndex};
use crate::quadrature::GaussLegendre;

const NORM_TOL: f64 = 1e-12;

/// Real expansion coefficients `c_0 … c_N` with `Σ c_m² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    values: Vec<f64>,
}

impl CoefficientVector {
    /// Accepts an already normalized vector.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(BackflowError::InvalidArgument(
                "coefficient vector must have at least one mode".into(),
            ));
        }
        let norm2: f64 = values.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(BackflowError::InvalidArgument(format!(
                "coefficients are not normalized: sum of squares = {norm2}"
            )));
        }
        Ok(CoefficientVector { values })
    }

    /// Rescales `values` to unit norm.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(BackflowError::InvalidArgument(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(CoefficientVector { values })
    }

    /// All weight on mode `m` of an `n_max` truncation.
    pub fn basis(n_max: usize, m: usize) -> Self {
        let mut values = vec![0.0; n_max + 1];
        values[m] = 1.0;
        CoefficientVector { values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleBound {
    pub alpha: Alpha,
    pub n_max: usize,
    pub lambda_ring: f64,
    pub minimizer: CoefficientVector,
    pub residual: f64,
}

pub fn lambda_ring(alpha: Alpha, n_max: usize) -> Result<SingleBound> {
    lambda_ring_with(alpha, n_max, &SolverConfig::default())
}

/// Smallest eigenvalue of the kernel and its unit eigenvector.
pub fn lambda_ring_with(alpha: Alpha, n_max: usize, cfg: &SolverConfig) -> Result<SingleBound> {
    if n_max < 1 {
        return Err(BackflowError::InvalidArgument(
            "single-particle bound needs n_max >= 1".into(),
        ));
    }
    let k = build_kernel(alpha, n_max);
    let a = SymmetricMatrix::from_parts_unchecked(k.dim(), k.as_slice().to_vec());
    let pair = smallest_eigenpair_with(&a, cfg)?;
    Ok(SingleBound {
        alpha,
        n_max,
        lambda_ring: pair.value,
        minimizer: CoefficientVector { values: pair.vector },
        residual: pair.residual,
    })
}

/// Δ1 = cᵀKc.
pub fn delta1_quadratic(c: &CoefficientVector, k: &KernelMatrix) -> Result<f64> {
    k.quadratic_form(c.values())
}

/// Probability current `j(θ, t)` in units of ħ/(μR²).
pub fn current_j(c: &CoefficientVector, theta: f64, t: f64) -> f64 {
    let v = c.values();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (m, &cm) in v.iter().enumerate() {
        if cm == 0.0 {
            continue;
        }
        let em = ModeIndex(m).energy();
        for (n, &cn) in v.iter().enumerate() {
            let w = (m + n) as f64 * cm * cn;
            if w == 0.0 {
                continue;
            }
            let phase = (n as f64 - m as f64) * theta + (em - ModeIndex(n).energy()) * t;
            sum += Complex64::from_polar(w, phase);
            scale += w.abs();
        }
    }
    let j = sum / (4.0 * PI);
    debug_assert!(
        j.im.abs() <= 1e-12 * scale.max(1.0),
        "imaginary part {} did not cancel",
        j.im
    );
    j.re
}

/// Δ1 by Gauss–Legendre integration of `j(0, t)` over `[−T/2, T/2]`.
///
/// The window is split into panels so each carries a bounded number of
/// oscillations of the fastest Bohr frequency `N²/2`.
pub fn delta1_quadrature(c: &CoefficientVector, alpha: Alpha, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(BackflowError::InvalidArgument(format!(
            "quadrature needs at least 64 points, got {quad_points}"
        )));
    }
    let half = 0.5 * alpha.window();
    let omega = ModeIndex(c.n_max()).energy();
    let panels = panels_for(omega, alpha.window(), quad_points);
    let rule = GaussLegendre::new(quad_points);
    Ok(rule.integrate_composite(-half, half, panels, |t| current_j(c, 0.0, t)))
}

pub(crate) fn panels_for(omega: f64, window: f64, quad_points: usize) -> usize {
    // ≤ quad_points/8 radians of phase per panel node budget
    let phase = omega * window;
    ((phase / (quad_points as f64 / 8.0)).ceil() as usize).max(1)
}
