//! Data behind the α-curves and the 1/N extrapolation plots.
//!
//! Schemas: `n,alpha,min_lambda` for the α-curves, `n,inv_n,q_f` and
//! `n,inv_n,alpha_star` for the extrapolations. Samples of the fitted
//! quadratic follow the data rows with `n = -1`, the first at `inv_n = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::{fermion_sweep, FermionSweep, ScanConfig};
use crate::eigensolve::SolverConfig;
use crate::error::{BackflowError, Result};
use crate::fermion_bound::fermion_bound_with;
use crate::kernel::Alpha;
use crate::output::{Cell, CsvTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig1a, FigureId::Fig1b, FigureId::Fig2a, FigureId::Fig2b];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
        }
    }

    pub fn header(self) -> Vec<&'static str> {
        match self {
            FigureId::Fig1a | FigureId::Fig1b => vec!["n", "alpha", "min_lambda"],
            FigureId::Fig2a => vec!["n", "inv_n", "q_f"],
            FigureId::Fig2b => vec!["n", "inv_n", "alpha_star"],
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = BackflowError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1a" => Ok(FigureId::Fig1a),
            "fig1b" => Ok(FigureId::Fig1b),
            "fig2a" => Ok(FigureId::Fig2a),
            "fig2b" => Ok(FigureId::Fig2b),
            other => Err(BackflowError::InvalidFigure(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureConfig {
    pub fig1a_ns: Vec<usize>,
    pub fig1a_grid: ScanConfig,
    pub fig1b_ns: Vec<usize>,
    pub fig1b_grid: ScanConfig,
    pub n_lo: usize,
    pub n_hi: usize,
    pub scan: ScanConfig,
    /// Number of fit-curve samples on `[0, 1/n_lo]`.
    pub fit_samples: usize,
    pub solver: SolverConfig,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            fig1a_ns: vec![1, 2, 3, 10],
            fig1a_grid: ScanConfig::fermion(),
            fig1b_ns: vec![10, 20, 30, 40, 50],
            fig1b_grid: ScanConfig {
                hi: 0.5,
                ..ScanConfig::fermion()
            },
            n_lo: 20,
            n_hi: 70,
            scan: ScanConfig::fermion(),
            fit_samples: 101,
            solver: SolverConfig::default(),
        }
    }
}

/// Rows `(n, α, min λ)` of the fermionic reduced matrix on a grid.
pub fn fig1_table(id: FigureId, ns: &[usize], grid: &ScanConfig, solver: &SolverConfig) -> Result<CsvTable> {
    grid.validate()?;
    let alphas = grid.grid();
    let mut table = CsvTable::new(id.header());
    for &n in ns {
        let values: Vec<f64> = alphas
            .par_iter()
            .map(|&a| fermion_bound_with(Alpha::new(a)?, n, solver).map(|r| r.q_f))
            .collect::<Result<Vec<_>>>()?;
        for (&a, v) in alphas.iter().zip(values) {
            table.push(vec![Cell::Int(n as i64), Cell::Float(a), Cell::Float(v)]);
        }
    }
    Ok(table)
}

/// Extrapolation tables from a finished sweep.
pub fn fig2_tables(sweep: &FermionSweep, fit_samples: usize) -> (CsvTable, CsvTable) {
    let mut q = CsvTable::new(FigureId::Fig2a.header());
    let mut a = CsvTable::new(FigureId::Fig2b.header());
    for (n, q_f, alpha_star) in sweep.points() {
        let inv = 1.0 / n as f64;
        q.push(vec![Cell::Int(n as i64), Cell::Float(inv), Cell::Float(q_f)]);
        a.push(vec![Cell::Int(n as i64), Cell::Float(inv), Cell::Float(alpha_star)]);
    }
    let n_lo = sweep.scans.first().map_or(1, |s| s.n_max.max(1));
    let x_max = 1.0 / n_lo as f64;
    let samples = fit_samples.max(2);
    for j in 0..samples {
        let x = x_max * j as f64 / (samples - 1) as f64;
        q.push(vec![Cell::Int(-1), Cell::Float(x), Cell::Float(sweep.q_f_fit.eval(x))]);
        a.push(vec![Cell::Int(-1), Cell::Float(x), Cell::Float(sweep.alpha_star_fit.eval(x))]);
    }
    (q, a)
}

pub fn emit_figure_data(id: FigureId, cfg: &FigureConfig) -> Result<CsvTable> {
    match id {
        FigureId::Fig1a => fig1_table(id, &cfg.fig1a_ns, &cfg.fig1a_grid, &cfg.solver),
        FigureId::Fig1b => fig1_table(id, &cfg.fig1b_ns, &cfg.fig1b_grid, &cfg.solver),
        FigureId::Fig2a | FigureId::Fig2b => {
            let sweep = fermion_sweep(cfg.n_lo, cfg.n_hi, &cfg.scan, &cfg.solver)?;
            let (q, a) = fig2_tables(&sweep, cfg.fit_samples);
            Ok(if id == FigureId::Fig2a { q } else { a })
        }
    }
}
