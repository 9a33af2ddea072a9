//! The dimensionless sinc kernel of the time-integrated current.
//!
//! All quantities use reduced units with ħ = μ = R = 1. In these units the
//! single-particle energies are `E_m = m²/2`, the measurement window is
//! `T = 4α`, and currents are expressed in units of ħ/(μR²).
//!
//! For a window `[-T/2, T/2]` at θ = 0 the charge transfer of a state with
//! real non-negative-momentum coefficients `c_m` is `cᵀKc` with
//!
//! ```text
//! K_mn = (α/π) (m + n) sinc(α (m² − n²))
//! ```

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{BackflowError, Result};

/// Window parameter α = ħT / (4μR²).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Alpha(value))
        } else {
            Err(BackflowError::InvalidAlpha(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Length of the time window in reduced units.
    #[inline]
    pub fn window(self) -> f64 {
        4.0 * self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = BackflowError;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Non-negative angular-momentum quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(pub usize);

impl ModeIndex {
    /// `E_m = m²/2`.
    #[inline]
    pub fn energy(self) -> f64 {
        let m = self.0 as f64;
        0.5 * m * m
    }

    /// Eigenvalue of `L_z` in units of ħ.
    #[inline]
    pub fn angular_momentum(self) -> f64 {
        self.0 as f64
    }
}

/// `sin(z)/z`, continuous through the removable singularity at zero.
pub fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Dense `(N+1)×(N+1)` kernel at a fixed α.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    alpha: Alpha,
    n_max: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of modes, `N + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[m * self.dim() + n]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, m: usize) -> &[f64] {
        let d = self.dim();
        &self.entries[m * d..(m + 1) * d]
    }

    /// `K x` for a vector of length `N + 1`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|m| dot(self.row(m), x)).collect()
    }

    /// `xᵀ K x`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        check_len(self.dim(), x.len())?;
        Ok(dot(x, &self.apply_unchecked(x)))
    }
}

/// Assembles `K_mn` for `0 ≤ m, n ≤ n_max`. Each unordered pair is evaluated
/// once and mirrored, so the result is bitwise symmetric.
pub fn build_kernel(alpha: Alpha, n_max: usize) -> KernelMatrix {
    let d = n_max + 1;
    let a = alpha.value();
    let pref = a / PI;
    let mut entries = vec![0.0; d * d];
    for m in 0..d {
        for n in 0..=m {
            let diff = (m * m - n * n) as f64;
            let v = pref * (m + n) as f64 * sinc(a * diff);
            entries[m * d + n] = v;
            entries[n * d + m] = v;
        }
    }
    KernelMatrix {
        alpha,
        n_max,
        entries,
    }
}

/// Action of the block-diagonal two-particle kernel `K̂ = diag(K, …, K)`.
///
/// `c` is a flattened coefficient array laid out as `N + 1` contiguous blocks
/// of length `N + 1`, where block `k` holds `c_{0k}, c_{1k}, …, c_{Nk}`. The
/// result is `(K̂c)_{mk} = Σ_n K_mn c_{nk}` in the same layout.
pub fn block_kernel_apply(k: &KernelMatrix, c: &[f64]) -> Result<Vec<f64>> {
    let d = k.dim();
    check_len(d * d, c.len())?;
    let mut out = vec![0.0; d * d];
    block_kernel_apply_into(k, c, &mut out);
    Ok(out)
}

pub(crate) fn block_kernel_apply_into(k: &KernelMatrix, c: &[f64], out: &mut [f64]) {
    let d = k.dim();
    for (block, dst) in c.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
        for (m, o) in dst.iter_mut().enumerate() {
            *o = dot(k.row(m), block);
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(BackflowError::DimensionMismatch { expected, found })
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sinc_special_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert_abs_diff_eq!(sinc(PI), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(sinc(PI / 2.0), 2.0 / PI, epsilon = 1e-16);
        // Taylor branch stays continuous with the direct formula
        assert_abs_diff_eq!(sinc(1e-9), 1.0, epsilon = 1e-17);
        assert_abs_diff_eq!(sinc(2e-8), (2e-8f64).sin() / 2e-8, epsilon = 1e-16);
    }

    #[test]
    fn alpha_rejects_nonpositive() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(-1.0).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(f64::INFINITY).is_err());
        assert_eq!(Alpha::new(0.25).unwrap().window(), 1.0);
    }

    #[test]
    fn kernel_at_alpha_pi() {
        let k = build_kernel(Alpha::new(PI).unwrap(), 1);
        assert_eq!(k.get(0, 0), 0.0);
        assert_abs_diff_eq!(k.get(0, 1), 0.0, epsilon = 1e-16);
        assert_eq!(k.get(1, 0), k.get(0, 1));
        assert_abs_diff_eq!(k.get(1, 1), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn kernel_diagonal_and_origin() {
        let alpha = Alpha::new(0.731).unwrap();
        let k = build_kernel(alpha, 12);
        assert_eq!(k.get(0, 0), 0.0);
        for m in 0..=12 {
            let expected = 2.0 * m as f64 * 0.731 / PI;
            assert!((k.get(m, m) - expected).abs() <= f64::EPSILON * expected.max(1.0));
        }
    }

    #[test]
    fn mode_energies() {
        assert_eq!(ModeIndex(0).energy(), 0.0);
        assert_eq!(ModeIndex(3).energy(), 4.5);
        assert_eq!(ModeIndex(3).angular_momentum(), 3.0);
    }

    #[test]
    fn block_apply_diagonal_kernel_scales_rows() {
        // α = π makes every off-diagonal sinc vanish
        let k = build_kernel(Alpha::new(PI).unwrap(), 2);
        let c: Vec<f64> = (0..9).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        let out = block_kernel_apply(&k, &c).unwrap();
        for kk in 0..3 {
            for m in 0..3 {
                let idx = m + 3 * kk;
                assert_abs_diff_eq!(out[idx], k.get(m, m) * c[idx], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn block_apply_product_state() {
        let k = build_kernel(Alpha::new(0.4).unwrap(), 3);
        let v = [0.3, -0.5, 0.7, 0.1];
        let mut c = vec![0.0; 16];
        for kk in 0..4 {
            for m in 0..4 {
                c[m + 4 * kk] = v[m] * v[kk];
            }
        }
        let out = block_kernel_apply(&k, &c).unwrap();
        let kv = k.apply(&v).unwrap();
        for kk in 0..4 {
            for m in 0..4 {
                assert_abs_diff_eq!(out[m + 4 * kk], kv[m] * v[kk], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let k = build_kernel(Alpha::new(0.4).unwrap(), 2);
        assert_eq!(
            block_kernel_apply(&k, &[0.0; 8]),
            Err(BackflowError::DimensionMismatch {
                expected: 9,
                found: 8
            })
        );
        assert!(k.apply(&[1.0, 2.0]).is_err());
    }
}
