//! Global minimization over α, N-sweeps, and 1/N extrapolation.
//!
//! A scan evaluates a bound on a uniform coarse α grid, refines every coarse
//! local minimum (and a descending endpoint) by golden-section search, and
//! keeps the best value found. Bounds at large N develop many shallow local
//! minima, so refining a single bracket is not enough.

mod figures;
mod fit;

pub use figures::{emit_figure_data, fig1_table, fig2_tables, FigureConfig, FigureId};
pub use fit::{polyfit_quadratic, ExtrapolationFit};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigensolve::SolverConfig;
use crate::error::{BackflowError, Result};
use crate::fermion_bound::fermion_bound_with;
use crate::kernel::Alpha;
use crate::single_particle::lambda_ring_with;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub lo: f64,
    pub hi: f64,
    pub coarse_step: f64,
    /// Final bracket width of the golden-section refinement.
    pub refine_tol: f64,
}

impl ScanConfig {
    /// `(0.01, 1.0]`, step 0.005: the window where two-fermion backflow lives.
    pub fn fermion() -> Self {
        ScanConfig {
            lo: 0.01,
            hi: 1.0,
            coarse_step: 0.005,
            refine_tol: 1e-6,
        }
    }

    /// `(0.01, 2.0]`, step 0.005: the single-particle optimum sits near α ≈ 1.16.
    pub fn single() -> Self {
        ScanConfig {
            hi: 2.0,
            ..Self::fermion()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lo.is_finite()
            && self.hi.is_finite()
            && self.lo > 0.0
            && self.lo < self.hi
            && self.coarse_step > 0.0
            && self.refine_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(BackflowError::InvalidArgument(format!(
                "invalid scan configuration: need 0 < lo < hi and positive steps, got {self:?}"
            )))
        }
    }

    /// Coarse grid `lo, lo + step, …` up to and including `hi` (to 1e−9 steps).
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.coarse_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.lo + i as f64 * self.coarse_step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub n_max: usize,
    /// Coarse grid `(α, bound)`.
    pub grid: Vec<(f64, f64)>,
    pub alpha_star: f64,
    pub q_min: f64,
    pub refinement_tolerance: f64,
}

/// Global minimum over α of `bound_fn(α, n_max)`.
pub fn alpha_scan<F>(bound_fn: F, n_max: usize, cfg: &ScanConfig) -> Result<ScanResult>
where
    F: Fn(Alpha, usize) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let eval = |a: f64| -> Result<f64> {
        let alpha = Alpha::new(a)?;
        bound_fn(alpha, n_max).map_err(|e| BackflowError::ScanPoint {
            alpha: a,
            source: Box::new(e),
        })
    };

    let alphas = cfg.grid();
    let values: Vec<f64> = alphas
        .par_iter()
        .map(|&a| eval(a))
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<(f64, f64)> = alphas.iter().copied().zip(values.iter().copied()).collect();

    let brackets = candidate_brackets(&grid);
    let refined: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|b| golden_section(&eval, *b, cfg.refine_tol))
        .collect::<Result<Vec<_>>>()?;

    let mut best = grid[0];
    for &p in grid.iter().chain(&refined) {
        if p.1 < best.1 {
            best = p;
        }
    }
    Ok(ScanResult {
        n_max,
        grid,
        alpha_star: best.0,
        q_min: best.1,
        refinement_tolerance: cfg.refine_tol,
    })
}

/// Bracket `(lo, best, hi)` around each coarse local minimum.
fn candidate_brackets(grid: &[(f64, f64)]) -> Vec<(f64, (f64, f64), f64)> {
    let n = grid.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if grid[0].1 < grid[1].1 {
        out.push((grid[0].0, grid[0], grid[1].0));
    }
    for i in 1..n - 1 {
        let (prev, here, next) = (grid[i - 1].1, grid[i].1, grid[i + 1].1);
        if here <= prev && here <= next && (here < prev || here < next) {
            out.push((grid[i - 1].0, grid[i], grid[i + 1].0));
        }
    }
    if grid[n - 1].1 < grid[n - 2].1 {
        out.push((grid[n - 2].0, grid[n - 1], grid[n - 1].0));
    }
    out
}

/// Golden-section search on `[lo, hi]` seeded with a known point; returns the
/// best point evaluated.
fn golden_section<F>(f: &F, bracket: (f64, (f64, f64), f64), tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, seed, mut b) = bracket;
    let mut best = seed;
    if b - a <= tol {
        return Ok(best);
    }
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1)?;
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2)?;
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Single-particle bound `λ_ring^(N)` scanned over α.
pub fn single_scan(n_max: usize, cfg: &ScanConfig, solver: &SolverConfig) -> Result<ScanResult> {
    alpha_scan(
        |a, n| lambda_ring_with(a, n, solver).map(|b| b.lambda_ring),
        n_max,
        cfg,
    )
}

/// Two-fermion bound `min λ(MᵀK̂M)` scanned over α.
pub fn fermion_scan(n_max: usize, cfg: &ScanConfig, solver: &SolverConfig) -> Result<ScanResult> {
    alpha_scan(
        |a, n| fermion_bound_with(a, n, solver).map(|r| r.q_f),
        n_max,
        cfg,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionSweep {
    pub scans: Vec<ScanResult>,
    pub q_f_fit: ExtrapolationFit,
    pub alpha_star_fit: ExtrapolationFit,
}

impl FermionSweep {
    /// `(N, Q_F^(N), α_*^(N))` per truncation.
    pub fn points(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.scans.iter().map(|s| (s.n_max, s.q_min, s.alpha_star))
    }
}

/// Scans every `N` in `n_lo..=n_hi` and fits `Q_F^(N)` and `α_*^(N)` against `1/N`.
pub fn fermion_sweep(
    n_lo: usize,
    n_hi: usize,
    cfg: &ScanConfig,
    solver: &SolverConfig,
) -> Result<FermionSweep> {
    if n_lo < 2 || n_hi < n_lo {
        return Err(BackflowError::InvalidArgument(format!(
            "fermion sweep needs 2 <= n_lo <= n_hi, got {n_lo}..{n_hi}"
        )));
    }
    let scans: Vec<ScanResult> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| fermion_scan(n, cfg, solver))
        .collect::<Result<Vec<_>>>()?;
    let q_points: Vec<(f64, f64)> = scans.iter().map(|s| (1.0 / s.n_max as f64, s.q_min)).collect();
    let a_points: Vec<(f64, f64)> = scans
        .iter()
        .map(|s| (1.0 / s.n_max as f64, s.alpha_star))
        .collect();
    Ok(FermionSweep {
        q_f_fit: polyfit_quadratic(&q_points)?,
        alpha_star_fit: polyfit_quadratic(&a_points)?,
        scans,
    })
}
