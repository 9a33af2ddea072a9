//! Maximal quantum backflow for one and two particles on a ring.
//!
//! Units are ħ = μ = R = 1, so mode `m` has energy `m²/2` and the
//! measurement window is `T = 4α`. Every bound is the smallest eigenvalue of
//! a real symmetric kernel built from
//! `K_mn = (α/π)(m+n) sinc(α(m² − n²))`.

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod boson_bound;
pub mod eigensolve;
pub mod error;
pub mod fermion_bound;
pub mod kernel;
pub mod output;
pub mod quadrature;
pub mod scan;
pub mod single_particle;
pub mod two_particle;
pub mod verify;

pub use boson_bound::{boson_bound, boson_bound_with, boson_state_check, BosonResult};
pub use eigensolve::{
    smallest_eigenpair, smallest_eigenpair_with, EigenPair, SolverConfig, SymmetricMatrix, SymmetricOperator,
};
pub use error::{BackflowError, Result};
pub use fermion_bound::{
    build_antisymmetrizer, fermion_bound, fermion_bound_with, fermion_state_check, reduced_matrix,
    Antisymmetrizer, FermionResult, ReducedOperator, ReducedVector,
};
pub use kernel::{block_kernel_apply, build_kernel, sinc, Alpha, KernelMatrix, ModeIndex};
pub use output::{fmt_f64, Cell, CsvTable};
pub use scan::{
    alpha_scan, emit_figure_data, fermion_scan, fermion_sweep, fig1_table, fig2_tables, polyfit_quadratic,
    single_scan, ExtrapolationFit, FermionSweep, FigureConfig, FigureId, ScanConfig, ScanResult,
};
pub use single_particle::{
    current_j, delta1_quadratic, delta1_quadrature, lambda_ring, lambda_ring_with, CoefficientVector, SingleBound,
};
pub use two_particle::{
    appendix_a_check, continuity_check, current_number, delta2_quadratic, delta2_quadrature, density_rho,
    observables_grid, real_minimum, CoefficientMatrix, RealCoefficientReport, SymmetryTag,
};
