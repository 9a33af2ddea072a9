use serde::{Deserialize, Serialize};

use crate::error::{BackflowError, Result};

/// Least-squares `y ≈ c0 + c1 x + c2 x²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationFit {
    pub points: Vec<(f64, f64)>,
    pub coefficients: [f64; 3],
    /// Value at `x = 0`.
    pub intercept: f64,
    pub rms_residual: f64,
}

impl ExtrapolationFit {
    pub fn eval(&self, x: f64) -> f64 {
        let [c0, c1, c2] = self.coefficients;
        c0 + x * (c1 + x * c2)
    }
}

/// Unweighted quadratic least squares. The abscissae are centred and scaled
/// before a Householder QR of the 3-column design matrix.
pub fn polyfit_quadratic(points: &[(f64, f64)]) -> Result<ExtrapolationFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 || points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(BackflowError::RankDeficient { distinct: xs.len() });
    }

    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let scale = points
        .iter()
        .map(|p| (p.0 - mean).abs())
        .fold(0.0f64, f64::max);

    // columns of the design matrix in z = (x − mean)/scale
    let rows = points.len();
    let mut a: Vec<[f64; 3]> = points
        .iter()
        .map(|p| {
            let z = (p.0 - mean) / scale;
            [1.0, z, z * z]
        })
        .collect();
    let mut y: Vec<f64> = points.iter().map(|p| p.1).collect();

    let mut r = [[0.0; 3]; 3];
    for col in 0..3 {
        let norm = (col..rows).map(|i| a[i][col] * a[i][col]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(BackflowError::RankDeficient { distinct: xs.len() });
        }
        let alpha = if a[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..rows).map(|i| a[i][col]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for c in col..3 {
                let s: f64 = (col..rows).map(|i| v[i - col] * a[i][c]).sum::<f64>() * 2.0 / vnorm2;
                for i in col..rows {
                    a[i][c] -= s * v[i - col];
                }
            }
            let s: f64 = (col..rows).map(|i| v[i - col] * y[i]).sum::<f64>() * 2.0 / vnorm2;
            for i in col..rows {
                y[i] -= s * v[i - col];
            }
        }
        for c in col..3 {
            r[col][c] = a[col][c];
        }
    }
    let mut b = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = y[i];
        for j in i + 1..3 {
            s -= r[i][j] * b[j];
        }
        if r[i][i].abs() <= 1e-14 * r[0][0].abs() {
            return Err(BackflowError::RankDeficient { distinct: xs.len() });
        }
        b[i] = s / r[i][i];
    }

    // back to powers of x
    let (m, s) = (mean, scale);
    let c2 = b[2] / (s * s);
    let c1 = b[1] / s - 2.0 * b[2] * m / (s * s);
    let c0 = b[0] - b[1] * m / s + b[2] * m * m / (s * s);
    let mut fit = ExtrapolationFit {
        points: points.to_vec(),
        coefficients: [c0, c1, c2],
        intercept: c0,
        rms_residual: 0.0,
    };
    let sse: f64 = points
        .iter()
        .map(|p| {
            let z = (p.0 - m) / s;
            let e = p.1 - (b[0] + z * (b[1] + z * b[2]));
            e * e
        })
        .sum();
    fit.rms_residual = (sse / n).sqrt();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_quadratic() {
        let pts: Vec<(f64, f64)> = (20..=70)
            .map(|n| {
                let x = 1.0 / n as f64;
                (x, 1.0 - 2.0 * x + 3.0 * x * x)
            })
            .collect();
        let f = polyfit_quadratic(&pts).unwrap();
        assert_abs_diff_eq!(f.coefficients[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.coefficients[1], -2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(f.coefficients[2], 3.0, epsilon = 1e-7);
        assert!(f.rms_residual < 1e-12);
        assert_eq!(f.intercept, f.coefficients[0]);
    }

    #[test]
    fn three_points_interpolate() {
        let pts = [(0.0, 1.0), (1.0, 0.0), (2.0, 3.0)];
        let f = polyfit_quadratic(&pts).unwrap();
        for (x, y) in pts {
            assert_abs_diff_eq!(f.eval(x), y, epsilon = 1e-13);
        }
        assert!(f.rms_residual < 1e-13);
    }

    #[test]
    fn rank_deficiency() {
        assert_eq!(
            polyfit_quadratic(&[(1.0, 0.0), (1.0, 1.0), (2.0, 0.0)]),
            Err(BackflowError::RankDeficient { distinct: 2 })
        );
        assert!(polyfit_quadratic(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn least_squares_against_normal_equations() {
        let pts: Vec<(f64, f64)> = (0..9)
            .map(|i| {
                let x = i as f64 * 0.25;
                (x, (x * 1.7).sin())
            })
            .collect();
        let f = polyfit_quadratic(&pts).unwrap();
        // gradient of the squared error vanishes at the optimum
        for p in 0..3 {
            let g: f64 = pts
                .iter()
                .map(|&(x, y)| (f.eval(x) - y) * x.powi(p))
                .sum();
            assert!(g.abs() < 1e-12, "gradient component {p}: {g}");
        }
    }
}
