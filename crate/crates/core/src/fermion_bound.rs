//! Two identical fermions.
//!
//! The independent coefficients of an antisymmetric `c` are `u = (c_10, c_20,
//! …, c_N0, c_21, …, c_{N,N−1})`, and `c = M u` for a sparse embedding `M`
//! with `MᵀM = 2I`. Minimizing `Δ2 = 2 uᵀ MᵀK̂M u` under `2 uᵀu = 1` is the
//! symmetric eigenproblem `MᵀK̂M u = λ u`, and the minimal charge transfer
//! is its smallest eigenvalue.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{smallest_eigenpair_operator, SolverConfig, SymmetricMatrix, SymmetricOperator};
use crate::error::{BackflowError, Result};
use crate::kernel::{block_kernel_apply_into, build_kernel, check_len, Alpha, KernelMatrix};
use crate::two_particle::{delta2_quadratic, CoefficientMatrix, SymmetryTag};

/// Sparse `(N+1)² × N(N+1)/2` embedding of the independent fermionic
/// coefficients. Column `j` belongs to the pair `(m, k)`, `m > k`, and holds
/// `+1` at flat position `m + k(N+1)` and `−1` at `k + m(N+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antisymmetrizer {
    n_max: usize,
    pairs: Vec<(usize, usize)>,
}

impl Antisymmetrizer {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Pairs `(m, k)` in column order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn columns(&self) -> usize {
        self.pairs.len()
    }

    /// Number of rows, `(N+1)²`.
    pub fn rows(&self) -> usize {
        let d = self.n_max + 1;
        d * d
    }

    /// The two `(flat index, sign)` entries of column `j`.
    pub fn column_entries(&self, j: usize) -> [(usize, i8); 2] {
        let d = self.n_max + 1;
        let (m, k) = self.pairs[j];
        [(m + k * d, 1), (k + m * d, -1)]
    }

    /// `c = M u`.
    pub fn embed(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.columns(), u.len())?;
        let mut c = vec![0.0; self.rows()];
        self.embed_into(u, &mut c);
        Ok(c)
    }

    fn embed_into(&self, u: &[f64], c: &mut [f64]) {
        let d = self.n_max + 1;
        for (&(m, k), &x) in self.pairs.iter().zip(u) {
            c[m + k * d] = x;
            c[k + m * d] = -x;
        }
    }

    /// `Mᵀ c`.
    pub fn restrict(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), c.len())?;
        let mut u = vec![0.0; self.columns()];
        self.restrict_into(c, &mut u);
        Ok(u)
    }

    fn restrict_into(&self, c: &[f64], u: &mut [f64]) {
        let d = self.n_max + 1;
        for (&(m, k), x) in self.pairs.iter().zip(u.iter_mut()) {
            *x = c[m + k * d] - c[k + m * d];
        }
    }

    /// `MᵀM` in exact integer arithmetic, row-major.
    pub fn gram(&self) -> Vec<i64> {
        let p = self.columns();
        let cols: Vec<[(usize, i8); 2]> = (0..p).map(|j| self.column_entries(j)).collect();
        let mut g = vec![0i64; p * p];
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0i64;
                for &(ri, si) in &cols[i] {
                    for &(rj, sj) in &cols[j] {
                        if ri == rj {
                            acc += i64::from(si) * i64::from(sj);
                        }
                    }
                }
                g[i * p + j] = acc;
            }
        }
        g
    }
}

pub fn build_antisymmetrizer(n_max: usize) -> Result<Antisymmetrizer> {
    if n_max == 0 {
        return Err(BackflowError::NoAntisymmetricStates);
    }
    let mut pairs = Vec::with_capacity(n_max * (n_max + 1) / 2);
    for k in 0..n_max {
        for m in k + 1..=n_max {
            pairs.push((m, k));
        }
    }
    Ok(Antisymmetrizer { n_max, pairs })
}

/// Independent fermionic coefficients, normalized so that `2 uᵀu = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedVector {
    pub values: Vec<f64>,
}

/// Dense `MᵀK̂M`. Each column is `Mᵀ K̂ M e_j`; since `M e_j` touches only
/// blocks `k` and `m`, `K̂` acts on those two blocks alone.
pub fn reduced_matrix(m: &Antisymmetrizer, k: &KernelMatrix) -> Result<SymmetricMatrix> {
    check_len(m.n_max() + 1, k.dim())?;
    let d = k.dim();
    let p = m.columns();
    let mut entries = vec![0.0; p * p];
    let mut kc = vec![0.0; d * d];
    let mut col = vec![0.0; p];
    for (j, &(mj, kj)) in m.pairs().iter().enumerate() {
        // K̂ M e_j: block kj gets K[:, mj], block mj gets −K[:, kj]
        for r in 0..d {
            kc[r + kj * d] = k.get(r, mj);
            kc[r + mj * d] = -k.get(r, kj);
        }
        m.restrict_into(&kc, &mut col);
        for (i, &v) in col.iter().enumerate() {
            entries[i * p + j] = v;
        }
        for r in 0..d {
            kc[r + kj * d] = 0.0;
            kc[r + mj * d] = 0.0;
        }
    }
    SymmetricMatrix::new(p, entries)
}

/// Matrix-free `MᵀK̂M`.
#[derive(Debug, Clone)]
pub struct ReducedOperator<'a> {
    antisym: &'a Antisymmetrizer,
    kernel: &'a KernelMatrix,
}

impl<'a> ReducedOperator<'a> {
    pub fn new(antisym: &'a Antisymmetrizer, kernel: &'a KernelMatrix) -> Result<Self> {
        check_len(antisym.n_max() + 1, kernel.dim())?;
        Ok(ReducedOperator { antisym, kernel })
    }
}

impl SymmetricOperator for ReducedOperator<'_> {
    fn dim(&self) -> usize {
        self.antisym.columns()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let rows = self.antisym.rows();
        let mut c = vec![0.0; rows];
        let mut kc = vec![0.0; rows];
        self.antisym.embed_into(x, &mut c);
        block_kernel_apply_into(self.kernel, &c, &mut kc);
        self.antisym.restrict_into(&kc, y);
    }

    /// On the antisymmetric sector the operator is `K⊗I + I⊗K`, so
    /// `‖MᵀK̂M‖_F² = (d − 2)‖K‖_F² + (tr K)²` with `d = N + 1`.
    fn frobenius_norm(&self) -> f64 {
        let d = self.kernel.dim();
        let fro2: f64 = self.kernel.as_slice().iter().map(|x| x * x).sum();
        let tr: f64 = (0..d).map(|i| self.kernel.get(i, i)).sum();
        ((d as f64 - 2.0) * fro2 + tr * tr).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionResult {
    pub alpha: Alpha,
    pub n_max: usize,
    pub q_f: f64,
    pub reduced_minimizer: ReducedVector,
    pub full_state: CoefficientMatrix,
    pub residual: f64,
}

pub fn fermion_bound(alpha: Alpha, n_max: usize) -> Result<FermionResult> {
    fermion_bound_with(alpha, n_max, &SolverConfig::default())
}

pub fn fermion_bound_with(alpha: Alpha, n_max: usize, cfg: &SolverConfig) -> Result<FermionResult> {
    let antisym = build_antisymmetrizer(n_max)?;
    let kernel = build_kernel(alpha, n_max);
    let op = ReducedOperator::new(&antisym, &kernel)?;
    let pair = smallest_eigenpair_operator(&op, cfg, || {
        reduced_matrix(&antisym, &kernel).expect("kernel and embedding sizes agree")
    })?;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let u: Vec<f64> = pair.vector.iter().map(|x| x * scale).collect();
    let full = antisym.embed(&u)?;
    let full_state = CoefficientMatrix::new(n_max, full, SymmetryTag::Fermion)?;
    Ok(FermionResult {
        alpha,
        n_max,
        q_f: pair.value,
        reduced_minimizer: ReducedVector { values: u },
        full_state,
        residual: pair.residual,
    })
}

/// Antisymmetry, zero diagonal, normalization, and `Δ2(state) = q_f` within 1e−10.
pub fn fermion_state_check(result: &FermionResult) -> bool {
    let c = &result.full_state;
    if c.tag() != SymmetryTag::Fermion || c.n_max() != result.n_max {
        return false;
    }
    if (c.norm_squared() - 1.0).abs() > 1e-12 {
        return false;
    }
    let u = &result.reduced_minimizer.values;
    if (2.0 * u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() > 1e-12 {
        return false;
    }
    let d = c.dim();
    for m in 0..d {
        if c.get(m, m) != 0.0 {
            return false;
        }
        for k in 0..m {
            if c.get(k, m) != -c.get(m, k) {
                return false;
            }
        }
    }
    let k = build_kernel(result.alpha, result.n_max);
    match delta2_quadratic(c, &k) {
        Ok(d2) => (d2 - result.q_f).abs() <= 1e-10,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn n_one_has_single_column() {
        let m = build_antisymmetrizer(1).unwrap();
        assert_eq!(m.pairs(), &[(1, 0)]);
        assert_eq!(m.column_entries(0), [(1, 1), (2, -1)]);
        assert_eq!(m.embed(&[1.0]).unwrap(), vec![0.0, 1.0, -1.0, 0.0]);
    }

    #[test]
    fn n_zero_is_a_distinct_error() {
        assert_eq!(build_antisymmetrizer(0), Err(BackflowError::NoAntisymmetricStates));
        assert!(matches!(
            fermion_bound(Alpha::new(0.5).unwrap(), 0),
            Err(BackflowError::NoAntisymmetricStates)
        ));
    }

    #[test]
    fn pair_order_follows_column_listing() {
        let m = build_antisymmetrizer(3).unwrap();
        assert_eq!(m.pairs(), &[(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (3, 2)]);
    }

    #[test]
    fn gram_is_twice_identity() {
        for n in 1..=8 {
            let m = build_antisymmetrizer(n).unwrap();
            let p = m.columns();
            assert_eq!(p, n * (n + 1) / 2);
            let g = m.gram();
            for i in 0..p {
                for j in 0..p {
                    assert_eq!(g[i * p + j], if i == j { 2 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn two_mode_reduced_matrix() {
        for a in [0.2, 0.5, 1.7] {
            let alpha = Alpha::new(a).unwrap();
            let m = build_antisymmetrizer(1).unwrap();
            let k = build_kernel(alpha, 1);
            let r = reduced_matrix(&m, &k).unwrap();
            assert_eq!(r.dim(), 1);
            assert_abs_diff_eq!(r.get(0, 0), 2.0 * a / PI, epsilon = 1e-15);
            let f = fermion_bound(alpha, 1).unwrap();
            assert_abs_diff_eq!(f.q_f, 2.0 * a / PI, epsilon = 1e-14);
            assert!(fermion_state_check(&f));
        }
    }

    #[test]
    fn operator_matches_dense_matrix() {
        let alpha = Alpha::new(0.43).unwrap();
        for n in [2, 5, 9] {
            let m = build_antisymmetrizer(n).unwrap();
            let k = build_kernel(alpha, n);
            let dense = reduced_matrix(&m, &k).unwrap();
            let op = ReducedOperator::new(&m, &k).unwrap();
            assert_abs_diff_eq!(op.frobenius_norm(), dense.frobenius_norm(), epsilon = 1e-12);
            let x: Vec<f64> = (0..m.columns()).map(|i| ((i * 7) as f64).sin()).collect();
            let mut y = vec![0.0; m.columns()];
            op.apply(&x, &mut y);
            let yd = dense.matvec(&x).unwrap();
            for (a, b) in y.iter().zip(&yd) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn dense_and_iterative_paths_agree() {
        let alpha = Alpha::new(0.39).unwrap();
        let dense = fermion_bound_with(alpha, 12, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig {
            dense_limit: 0,
            ..Default::default()
        };
        let iter = fermion_bound_with(alpha, 12, &cfg).unwrap();
        assert_abs_diff_eq!(dense.q_f, iter.q_f, epsilon = 1e-11);
        assert!(fermion_state_check(&dense));
        assert!(fermion_state_check(&iter));
    }

    #[test]
    fn symmetrized_copy_leaves_the_sector() {
        let f = fermion_bound(Alpha::new(0.39).unwrap(), 6).unwrap();
        let d = 7;
        let mut sym = f.full_state.as_blocks().to_vec();
        for m in 0..d {
            for k in 0..m {
                sym[k + m * d] = -sym[k + m * d];
            }
        }
        let boson = CoefficientMatrix::new(6, sym, SymmetryTag::Boson).unwrap();
        let k = build_kernel(f.alpha, 6);
        let d2 = delta2_quadratic(&boson, &k).unwrap();
        assert!((d2 - f.q_f).abs() > 1e-6);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = build_antisymmetrizer(3).unwrap();
        let k = build_kernel(Alpha::new(0.4).unwrap(), 4);
        assert!(reduced_matrix(&m, &k).is_err());
        assert!(ReducedOperator::new(&m, &k).is_err());
        assert!(m.embed(&[1.0; 5]).is_err());
        assert!(m.restrict(&[1.0; 5]).is_err());
    }
}
