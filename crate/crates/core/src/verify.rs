//! Invariant and property suite run by `backflow verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boson_bound::{boson_bound, boson_state_check};
use crate::error::Result;
use crate::fermion_bound::{build_antisymmetrizer, fermion_bound, reduced_matrix};
use crate::kernel::{build_kernel, Alpha};
use crate::single_particle::{delta1_quadratic, delta1_quadrature, CoefficientVector};
use crate::two_particle::{
    appendix_a_check, continuity_check, current_number, delta2_quadratic, delta2_quadrature, density_rho,
    CoefficientMatrix, SymmetryTag,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub quad_points: usize,
    pub random_states: usize,
    pub appendix_trials: usize,
    pub appendix_n: usize,
    pub gram_n_max: usize,
    pub monotone_n_max: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            quad_points: 256,
            random_states: 50,
            appendix_trials: 500,
            appendix_n: 5,
            gram_n_max: 70,
            monotone_n_max: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&VerifyConfig) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 12] = [
    ("antisymmetrizer_gram", antisymmetrizer_gram),
    ("reduced_matrix_dense_oracle", reduced_matrix_dense_oracle),
    ("fermion_two_mode_closed_form", fermion_two_mode_closed_form),
    ("fermion_above_boson", fermion_above_boson),
    ("bounds_non_increasing", bounds_non_increasing),
    ("boson_product_state", boson_product_state),
    ("delta1_quadrature", delta1_quadrature_oracle),
    ("delta2_quadrature", delta2_quadrature_oracle),
    ("density_normalization", density_normalization),
    ("continuity_second_order", continuity_second_order),
    ("basis_state_current", basis_state_current),
    ("real_coefficients_suffice", real_coefficients_suffice),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check; a check that errors counts as failed.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = match check(cfg) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome {
                name: (*name).to_string(),
                passed,
                detail,
            }
        })
        .collect()
}

fn alphas() -> [Alpha; 4] {
    [0.1, 0.39, 0.8, 1.7].map(|a| Alpha::new(a).expect("positive"))
}

fn antisymmetrizer_gram(cfg: &VerifyConfig) -> Result<(bool, String)> {
    for n in 1..=cfg.gram_n_max {
        let m = build_antisymmetrizer(n)?;
        let p = m.columns();
        let g = m.gram();
        for i in 0..p {
            for j in 0..p {
                let want = if i == j { 2 } else { 0 };
                if g[i * p + j] != want {
                    return Ok((false, format!("N={n}: (MᵀM)[{i}][{j}] = {}", g[i * p + j])));
                }
            }
        }
    }
    Ok((true, format!("MᵀM = 2I for N = 1..={}", cfg.gram_n_max)))
}

fn reduced_matrix_dense_oracle(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=5 {
        for alpha in alphas() {
            let k = build_kernel(alpha, n);
            let m = build_antisymmetrizer(n)?;
            let sparse = reduced_matrix(&m, &k)?;
            let d = n + 1;
            let rows = d * d;
            let p = m.columns();
            let mut dense_m = vec![0.0; rows * p];
            for j in 0..p {
                for (r, s) in m.column_entries(j) {
                    dense_m[r * p + j] = f64::from(s);
                }
            }
            // K̂ = I ⊗ K acting on the block layout
            let mut kh = vec![0.0; rows * rows];
            for blk in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        kh[(a + blk * d) * rows + b + blk * d] = k.get(a, b);
                    }
                }
            }
            for i in 0..p {
                for j in 0..p {
                    let mut acc = 0.0;
                    for r in 0..rows {
                        let mri = dense_m[r * p + i];
                        if mri == 0.0 {
                            continue;
                        }
                        for s in 0..rows {
                            acc += mri * kh[r * rows + s] * dense_m[s * p + j];
                        }
                    }
                    worst = worst.max((acc - sparse.get(i, j)).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-13, format!("max entry difference {worst:.3e} (tol 1e-13)")))
}

fn fermion_two_mode_closed_form(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for alpha in alphas() {
        let q = fermion_bound(alpha, 1)?.q_f;
        worst = worst.max((q - 2.0 * alpha.value() / PI).abs());
    }
    Ok((worst <= 1e-14, format!("max |q_f − 2α/π| = {worst:.3e} (tol 1e-14)")))
}

fn fermion_above_boson(_: &VerifyConfig) -> Result<(bool, String)> {
    let mut margin = f64::INFINITY;
    for n in 1..=10 {
        for alpha in alphas() {
            let qf = fermion_bound(alpha, n)?.q_f;
            let qb = boson_bound(alpha, n)?.q_b;
            margin = margin.min(qf - qb);
        }
    }
    Ok((margin >= -1e-12, format!("min Q_F − Q_B = {margin:.3e}")))
}

fn bounds_non_increasing(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for alpha in alphas() {
        let mut prev_b = boson_bound(alpha, 1)?.q_b;
        let mut prev_f = fermion_bound(alpha, 1)?.q_f;
        for n in 2..=cfg.monotone_n_max {
            let qb = boson_bound(alpha, n)?.q_b;
            let qf = fermion_bound(alpha, n)?.q_f;
            worst = worst.max(qb - prev_b).max(qf - prev_f);
            prev_b = qb;
            prev_f = qf;
        }
    }
    Ok((worst <= 1e-12, format!("largest increase with N = {worst:.3e}")))
}

fn boson_product_state(_: &VerifyConfig) -> Result<(bool, String)> {
    for n in [1, 3, 8, 20] {
        for alpha in alphas() {
            let r = boson_bound(alpha, n)?;
            if !boson_state_check(&r) {
                return Ok((false, format!("N={n}, α={}", alpha.value())));
            }
        }
    }
    Ok((true, "Δ2(c̃c̃ᵀ) = Q_B within 1e-11".into()))
}

fn random_alpha(rng: &mut ChaCha8Rng) -> Alpha {
    Alpha::new(rng.gen_range(0.05..1.5)).expect("positive")
}

fn delta1_quadrature_oracle(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.random_states {
        let n = rng.gen_range(1..=10);
        let alpha = random_alpha(&mut rng);
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = CoefficientVector::normalized(v)?;
        let quad = delta1_quadrature(&c, alpha, cfg.quad_points)?;
        let form = delta1_quadratic(&c, &build_kernel(alpha, n))?;
        worst = worst.max((quad - form).abs());
    }
    Ok((worst <= 1e-8, format!("max |quadrature − cᵀKc| = {worst:.3e} (tol 1e-8)")))
}

fn delta2_quadrature_oracle(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for i in 0..cfg.random_states {
        let tag = if i % 2 == 0 { SymmetryTag::Boson } else { SymmetryTag::Fermion };
        let n = rng.gen_range(1..=6);
        let alpha = random_alpha(&mut rng);
        let c = CoefficientMatrix::random(n, tag, &mut rng)?;
        let quad = delta2_quadrature(&c, alpha, cfg.quad_points)?;
        let form = delta2_quadratic(&c, &build_kernel(alpha, n))?;
        worst = worst.max((quad - form).abs());
    }
    Ok((worst <= 1e-8, format!("max |quadrature − Δ2| = {worst:.3e} (tol 1e-8)")))
}

fn density_normalization(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let points = 1024;
    let h = 2.0 * PI / points as f64;
    let mut worst = 0.0f64;
    for tag in [SymmetryTag::Boson, SymmetryTag::Fermion] {
        for n in 1..=6 {
            let c = CoefficientMatrix::random(n, tag, &mut rng)?;
            let t = rng.gen_range(-2.0..2.0);
            let mut total = 0.0;
            for i in 0..points {
                total += density_rho(&c, i as f64 * h, t)?;
            }
            worst = worst.max((total * h - 2.0).abs());
        }
    }
    Ok((worst <= 1e-10, format!("max |∫ρ dθ − 2| = {worst:.3e} (tol 1e-10)")))
}

fn continuity_second_order(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let thetas: Vec<f64> = (0..5).map(|i| 0.3 + 1.1 * i as f64).collect();
    let times = [-0.4, 0.0, 0.25, 0.9];
    let h = 1e-3;
    let mut ok = true;
    let mut detail = Vec::new();
    for tag in [SymmetryTag::Boson, SymmetryTag::Fermion] {
        let c = CoefficientMatrix::random(4, tag, &mut rng)?;
        let coarse = continuity_check(&c, &thetas, &times, h)?;
        let fine = continuity_check(&c, &thetas, &times, h / 2.0)?;
        let ratio = coarse / fine;
        ok &= coarse < 1e-4 && (ratio - 4.0).abs() <= 0.2;
        detail.push(format!("{tag:?}: defect {coarse:.3e}, ratio {ratio:.4}"));
    }
    Ok((ok, detail.join("; ")))
}

fn basis_state_current(_: &VerifyConfig) -> Result<(bool, String)> {
    let n = 6;
    let mut worst = 0.0f64;
    for m1 in 0..=n {
        for m2 in m1..=n {
            let mut tags = vec![SymmetryTag::Boson];
            if m1 != m2 {
                tags.push(SymmetryTag::Fermion);
            }
            for tag in tags {
                let c = CoefficientMatrix::basis(n, m1, m2, tag)?;
                for (theta, t) in [(0.0, 0.0), (1.3, -0.7), (4.0, 2.5)] {
                    let j = current_number(&c, theta, t)?;
                    worst = worst.max((j - (m1 + m2) as f64 / (2.0 * PI)).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |J − (m₁+m₂)/2π| = {worst:.3e} (tol 1e-12)")))
}

fn real_coefficients_suffice(cfg: &VerifyConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let alpha = Alpha::new(0.39)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for tag in [SymmetryTag::Boson, SymmetryTag::Fermion] {
        let r = appendix_a_check(cfg.appendix_trials, cfg.appendix_n, alpha, tag, &mut rng)?;
        ok &= r.passed();
        detail.push(format!(
            "{tag:?}: {} failures in {} trials, min Δ2 {:.6} vs real minimum {:.6}",
            r.failures, r.trials, r.min_delta2, r.real_minimum
        ));
    }
    Ok((ok, detail.join("; ")))
}
