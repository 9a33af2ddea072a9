//! Two identical particles on the ring.
//!
//! A two-particle state with non-negative angular momenta is a real matrix
//! of coefficients `c_mk` (mode `m` for the first particle, `k` for the
//! second). Observables are evaluated directly from the coefficient series
//! through the one-body matrix `G = c cᵀ`:
//!
//! ```text
//! J(θ,t) = (1/2π) Σ_mn (m+n) G_mn cos((n−m)θ + (E_m−E_n)t)
//! ρ(θ,t) = (1/π)  Σ_mn        G_mn cos((n−m)θ + (E_m−E_n)t)
//! Δ2     = 2 Σ_mnk c_mk K_mn c_nk
//! ```

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::boson_bound::boson_bound;
use crate::error::{BackflowError, Result};
use crate::fermion_bound::fermion_bound;
use crate::kernel::{block_kernel_apply, build_kernel, check_len, dot, Alpha, KernelMatrix, ModeIndex};
use crate::quadrature::GaussLegendre;
use crate::single_particle::{lambda_ring, panels_for};

const NORM_TOL: f64 = 1e-12;

/// Exchange symmetry `c_nm = σ c_mn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryTag {
    Boson,
    Fermion,
    Unconstrained,
}

impl SymmetryTag {
    pub fn sigma(self) -> Option<f64> {
        match self {
            SymmetryTag::Boson => Some(1.0),
            SymmetryTag::Fermion => Some(-1.0),
            SymmetryTag::Unconstrained => None,
        }
    }

    /// Parses `+1`, `1`, `-1`, `boson`, `fermion`, `none`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+1" | "1" | "boson" | "bosons" => Ok(SymmetryTag::Boson),
            "-1" | "fermion" | "fermions" => Ok(SymmetryTag::Fermion),
            "none" | "0" | "unconstrained" => Ok(SymmetryTag::Unconstrained),
            other => Err(BackflowError::InvalidArgument(format!(
                "unknown symmetry tag `{other}`"
            ))),
        }
    }
}

/// Real two-particle coefficients, unit-normalized, with exchange symmetry.
///
/// Stored as `N + 1` contiguous blocks: block `k` holds `c_{0k} … c_{Nk}`,
/// i.e. the flattening `(c_00, c_10, …, c_N0, c_01, …, c_NN)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMatrix {
    n_max: usize,
    values: Vec<f64>,
    tag: SymmetryTag,
}

impl CoefficientMatrix {
    /// Validates normalization, exact σ-symmetry, and the zero diagonal of
    /// fermionic states. `values` uses the block layout.
    pub fn new(n_max: usize, values: Vec<f64>, tag: SymmetryTag) -> Result<Self> {
        let d = n_max + 1;
        check_len(d * d, values.len())?;
        let norm2: f64 = values.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(BackflowError::InvalidArgument(format!(
                "coefficients are not normalized: sum of squares = {norm2}"
            )));
        }
        if let Some(sigma) = tag.sigma() {
            for m in 0..d {
                for k in 0..d {
                    if values[k + m * d] != sigma * values[m + k * d] {
                        return Err(BackflowError::InvalidArgument(format!(
                            "c[{k}][{m}] != {sigma} * c[{m}][{k}]"
                        )));
                    }
                }
            }
        }
        Ok(CoefficientMatrix { n_max, values, tag })
    }

    /// From `rows[m][k] = c_mk` in row-major order.
    pub fn from_row_major(n_max: usize, rows: &[f64], tag: SymmetryTag) -> Result<Self> {
        let d = n_max + 1;
        check_len(d * d, rows.len())?;
        let mut values = vec![0.0; d * d];
        for m in 0..d {
            for k in 0..d {
                values[m + k * d] = rows[m * d + k];
            }
        }
        Self::new(n_max, values, tag)
    }

    /// Symmetrizes according to `tag`, zeroes the diagonal for fermions, and
    /// normalizes. `values` uses the block layout.
    pub fn projected(n_max: usize, mut values: Vec<f64>, tag: SymmetryTag) -> Result<Self> {
        let d = n_max + 1;
        check_len(d * d, values.len())?;
        project(&mut values, d, tag);
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(BackflowError::InvalidArgument(
                "state vanishes after symmetrization".into(),
            ));
        }
        values.iter_mut().for_each(|v| *v /= norm);
        // exact symmetry after the division
        project(&mut values, d, tag);
        Ok(CoefficientMatrix { n_max, values, tag })
    }

    /// Product state `c_mk = c̃_m c̃_k`.
    pub fn product(single: &[f64]) -> Result<Self> {
        let d = single.len();
        if d == 0 {
            return Err(BackflowError::InvalidArgument("empty single-particle state".into()));
        }
        let mut values = vec![0.0; d * d];
        for k in 0..d {
            for m in 0..d {
                values[m + k * d] = single[m] * single[k];
            }
        }
        Self::projected(d - 1, values, SymmetryTag::Boson)
    }

    /// Properly symmetrized state occupying modes `m1` and `m2`.
    pub fn basis(n_max: usize, m1: usize, m2: usize, tag: SymmetryTag) -> Result<Self> {
        let d = n_max + 1;
        if m1 >= d || m2 >= d {
            return Err(BackflowError::InvalidArgument(format!(
                "modes ({m1}, {m2}) exceed n_max = {n_max}"
            )));
        }
        let mut values = vec![0.0; d * d];
        values[m1 + m2 * d] = 1.0;
        Self::projected(n_max, values, tag)
    }

    /// Random state: standard-normal entries, σ-symmetrized, fermionic
    /// diagonal zeroed, normalized.
    pub fn random<R: Rng + ?Sized>(n_max: usize, tag: SymmetryTag, rng: &mut R) -> Result<Self> {
        let d = n_max + 1;
        let values: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
        Self::projected(n_max, values, tag)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn tag(&self) -> SymmetryTag {
        self.tag
    }

    #[inline]
    pub fn get(&self, m: usize, k: usize) -> f64 {
        self.values[m + k * self.dim()]
    }

    /// Block layout (see type docs).
    pub fn as_blocks(&self) -> &[f64] {
        &self.values
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let d = self.dim();
        let mut rows = vec![0.0; d * d];
        for m in 0..d {
            for k in 0..d {
                rows[m * d + k] = self.get(m, k);
            }
        }
        rows
    }

    pub fn norm_squared(&self) -> f64 {
        dot(&self.values, &self.values)
    }

    /// One-body matrix `G_mn = Σ_k c_mk c_nk`, row-major.
    pub fn one_body(&self) -> Vec<f64> {
        let d = self.dim();
        let mut g = vec![0.0; d * d];
        for block in self.values.chunks_exact(d) {
            for m in 0..d {
                let cm = block[m];
                if cm == 0.0 {
                    continue;
                }
                for n in 0..d {
                    g[m * d + n] += cm * block[n];
                }
            }
        }
        g
    }
}

fn project(values: &mut [f64], d: usize, tag: SymmetryTag) {
    let Some(sigma) = tag.sigma() else {
        return;
    };
    for m in 0..d {
        for k in 0..m {
            let a = values[m + k * d];
            let b = values[k + m * d];
            let s = 0.5 * (a + sigma * b);
            values[m + k * d] = s;
            values[k + m * d] = sigma * s;
        }
        if sigma < 0.0 {
            values[m + m * d] = 0.0;
        }
    }
}

/// Δ2 = 2 Σ_mnk c_mk K_mn c_nk.
pub fn delta2_quadratic(c: &CoefficientMatrix, k: &KernelMatrix) -> Result<f64> {
    check_len(k.dim(), c.dim())?;
    let kc = block_kernel_apply(k, c.as_blocks())?;
    Ok(2.0 * dot(c.as_blocks(), &kc))
}

fn require_symmetric(c: &CoefficientMatrix) -> Result<()> {
    if c.tag() == SymmetryTag::Unconstrained {
        Err(BackflowError::InvalidArgument(
            "current and density need a bosonic or fermionic state".into(),
        ))
    } else {
        Ok(())
    }
}

/// Series `Σ_mn w(m,n) G_mn cos((n−m)θ + (E_m−E_n)t)` and its θ/t derivatives.
fn one_body_series(g: &[f64], d: usize, theta: f64, t: f64, weight: impl Fn(usize, usize) -> f64) -> f64 {
    let mut sum = 0.0;
    for m in 0..d {
        let em = ModeIndex(m).energy();
        for n in 0..d {
            let gmn = g[m * d + n];
            if gmn == 0.0 {
                continue;
            }
            let phase = (n as f64 - m as f64) * theta + (em - ModeIndex(n).energy()) * t;
            sum += weight(m, n) * gmn * phase.cos();
        }
    }
    sum
}

/// Particle-number current `J(θ, t)` in units of ħ/(μR²).
pub fn current_number(c: &CoefficientMatrix, theta: f64, t: f64) -> Result<f64> {
    require_symmetric(c)?;
    let g = c.one_body();
    Ok(current_from_one_body(&g, c.dim(), theta, t))
}

fn current_from_one_body(g: &[f64], d: usize, theta: f64, t: f64) -> f64 {
    one_body_series(g, d, theta, t, |m, n| (m + n) as f64) / (2.0 * PI)
}

fn density_from_one_body(g: &[f64], d: usize, theta: f64, t: f64) -> f64 {
    one_body_series(g, d, theta, t, |_, _| 1.0) / PI
}

/// Particle-number density `ρ(θ, t)`.
pub fn density_rho(c: &CoefficientMatrix, theta: f64, t: f64) -> Result<f64> {
    require_symmetric(c)?;
    let g = c.one_body();
    Ok(density_from_one_body(&g, c.dim(), theta, t))
}

/// `J` and `ρ` on the tensor grid `thetas × times`, row order θ-major.
pub fn observables_grid(c: &CoefficientMatrix, thetas: &[f64], times: &[f64]) -> Result<Vec<(f64, f64, f64, f64)>> {
    require_symmetric(c)?;
    let g = c.one_body();
    let d = c.dim();
    let mut rows = Vec::with_capacity(thetas.len() * times.len());
    for &th in thetas {
        for &t in times {
            rows.push((
                th,
                t,
                current_from_one_body(&g, d, th, t),
                density_from_one_body(&g, d, th, t),
            ));
        }
    }
    Ok(rows)
}

/// Largest `|∂ρ/∂t + ∂J/∂θ|` over the grid, with both derivatives taken by
/// central differences of step `h`.
pub fn continuity_check(c: &CoefficientMatrix, thetas: &[f64], times: &[f64], h: f64) -> Result<f64> {
    require_symmetric(c)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(BackflowError::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let g = c.one_body();
    let d = c.dim();
    let mut worst = 0.0f64;
    for &th in thetas {
        for &t in times {
            let drho = (density_from_one_body(&g, d, th, t + h) - density_from_one_body(&g, d, th, t - h)) / (2.0 * h);
            let dj = (current_from_one_body(&g, d, th + h, t) - current_from_one_body(&g, d, th - h, t)) / (2.0 * h);
            worst = worst.max((drho + dj).abs());
        }
    }
    Ok(worst)
}

/// Δ2 by Gauss–Legendre integration of `J(0, t)` over `[−T/2, T/2]`.
pub fn delta2_quadrature(c: &CoefficientMatrix, alpha: Alpha, quad_points: usize) -> Result<f64> {
    require_symmetric(c)?;
    if quad_points < 64 {
        return Err(BackflowError::InvalidArgument(format!(
            "quadrature needs at least 64 points, got {quad_points}"
        )));
    }
    let g = c.one_body();
    let d = c.dim();
    let half = 0.5 * alpha.window();
    let panels = panels_for(ModeIndex(c.n_max()).energy(), alpha.window(), quad_points);
    let rule = GaussLegendre::new(quad_points);
    Ok(rule.integrate_composite(-half, half, panels, |t| current_from_one_body(&g, d, 0.0, t)))
}

/// Outcome of [`appendix_a_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealCoefficientReport {
    pub trials: usize,
    pub failures: usize,
    /// Real-coefficient minimum for the sector.
    pub real_minimum: f64,
    /// Smallest Δ2 among the complex trial states.
    pub min_delta2: f64,
    /// Largest `|Im Δ2|`.
    pub max_imaginary: f64,
    /// Largest `|Δ2 − (Δ2[a] + Δ2[b])|`.
    pub max_split_defect: f64,
}

impl RealCoefficientReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Real minimum of Δ2 within a symmetry sector at fixed `(α, N)`.
pub fn real_minimum(alpha: Alpha, n_max: usize, tag: SymmetryTag) -> Result<f64> {
    match tag {
        SymmetryTag::Boson => Ok(boson_bound(alpha, n_max)?.q_b),
        SymmetryTag::Fermion => Ok(fermion_bound(alpha, n_max)?.q_f),
        SymmetryTag::Unconstrained => Ok(2.0 * lambda_ring(alpha, n_max)?.lambda_ring),
    }
}

/// Draws complex states `c = a + ib` in the σ-sector and checks that Δ2 is
/// real, splits into the real forms on `a` and `b`, and never undercuts the
/// real-coefficient minimum by more than 1e−10.
pub fn appendix_a_check<R: Rng + ?Sized>(
    trials: usize,
    n_max: usize,
    alpha: Alpha,
    tag: SymmetryTag,
    rng: &mut R,
) -> Result<RealCoefficientReport> {
    if trials == 0 {
        return Err(BackflowError::InvalidArgument("trials must be at least 1".into()));
    }
    let k = build_kernel(alpha, n_max);
    let real_min = real_minimum(alpha, n_max, tag)?;
    let d = n_max + 1;
    let mut report = RealCoefficientReport {
        trials,
        failures: 0,
        real_minimum: real_min,
        min_delta2: f64::INFINITY,
        max_imaginary: 0.0,
        max_split_defect: 0.0,
    };
    for _ in 0..trials {
        let mut a: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
        let mut b: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
        project(&mut a, d, tag);
        project(&mut b, d, tag);
        let norm = (dot(&a, &a) + dot(&b, &b)).sqrt();
        a.iter_mut().for_each(|x| *x /= norm);
        b.iter_mut().for_each(|x| *x /= norm);
        let outcome = complex_trial(&k, &a, &b);
        report.max_imaginary = report.max_imaginary.max(outcome.imaginary.abs());
        report.max_split_defect = report.max_split_defect.max(outcome.split_defect);
        report.min_delta2 = report.min_delta2.min(outcome.value);
        if outcome.imaginary.abs() > 1e-12
            || outcome.split_defect > 1e-12
            || outcome.value < real_min - 1e-10
        {
            report.failures += 1;
        }
    }
    Ok(report)
}

struct ComplexTrial {
    value: f64,
    imaginary: f64,
    split_defect: f64,
}

/// Evaluates `2 Σ c*_mk K_mn c_nk` in complex arithmetic alongside the real
/// forms on the real and imaginary parts. Inputs use the block layout.
fn complex_trial(k: &KernelMatrix, a: &[f64], b: &[f64]) -> ComplexTrial {
    let d = k.dim();
    let c: Vec<Complex64> = a.iter().zip(b).map(|(&re, &im)| Complex64::new(re, im)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for block in c.chunks_exact(d) {
        for m in 0..d {
            let row = k.row(m);
            let kc: Complex64 = row.iter().zip(block).map(|(&kmn, &cn)| cn * kmn).sum();
            total += block[m].conj() * kc;
        }
    }
    total *= 2.0;
    let real_form = |x: &[f64]| -> f64 {
        let kx = block_kernel_apply(k, x).expect("dimensions checked");
        2.0 * dot(x, &kx)
    };
    let split = real_form(a) + real_form(b);
    ComplexTrial {
        value: total.re,
        imaginary: total.im,
        split_defect: (total.re - split).abs(),
    }
}
