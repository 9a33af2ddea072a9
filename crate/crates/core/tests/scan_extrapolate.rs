use std::f64::consts::PI;

use backflow_core::{
    alpha_scan, fermion_bound, fermion_scan, fig1_table, polyfit_quadratic, Alpha, Cell, FigureId, ScanConfig,
    SolverConfig,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn float(c: &Cell) -> f64 {
    match c {
        Cell::Float(x) => *x,
        Cell::Int(i) => *i as f64,
    }
}

#[test]
fn polyfit_is_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut pts: Vec<(f64, f64)> = (20..=70)
        .map(|n| {
            let x = 1.0 / n as f64;
            (x, -0.07 + 0.3 * x - 2.0 * x * x + 1e-4 * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let base = polyfit_quadratic(&pts).unwrap();
    for _ in 0..10 {
        pts.shuffle(&mut rng);
        let f = polyfit_quadratic(&pts).unwrap();
        for i in 0..3 {
            let scale = base.coefficients[i].abs().max(1.0);
            assert!((f.coefficients[i] - base.coefficients[i]).abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn polyfit_exact_quadratic() {
    let pts: Vec<(f64, f64)> = (0..7).map(|i| (i as f64, 1.0 - 2.0 * i as f64 + 3.0 * (i * i) as f64)).collect();
    let f = polyfit_quadratic(&pts).unwrap();
    assert!(f.rms_residual < 1e-12);
    assert!((f.intercept - 1.0).abs() < 1e-12);
}

#[test]
fn refined_minimum_is_locally_optimal() {
    let solver = SolverConfig::default();
    let cfg = ScanConfig::fermion();
    for n in [8, 15] {
        let r = fermion_scan(n, &cfg, &solver).unwrap();
        for s in [-1.0, 1.0] {
            let a = r.alpha_star + s * cfg.refine_tol;
            let v = fermion_bound(Alpha::new(a).unwrap(), n).unwrap().q_f;
            assert!(v >= r.q_min - 1e-12, "N={n}: f({a}) = {v} < {}", r.q_min);
        }
        assert!(r.alpha_star >= cfg.lo && r.alpha_star <= cfg.hi);
        let grid_min = r.grid.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        assert!(r.q_min <= grid_min);
    }
}

#[test]
fn scan_is_deterministic() {
    let cfg = ScanConfig::fermion();
    let a = fermion_scan(12, &cfg, &SolverConfig::default()).unwrap();
    let b = fermion_scan(12, &cfg, &SolverConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn parabola_scan() {
    let cfg = ScanConfig {
        lo: 0.1,
        hi: 0.6,
        coarse_step: 0.005,
        refine_tol: 1e-7,
    };
    let r = alpha_scan(|a, _| Ok((a.value() - 0.3).powi(2)), 0, &cfg).unwrap();
    assert!((r.alpha_star - 0.3).abs() <= 1e-6);
}

#[test]
fn fig1_two_mode_row_is_linear() {
    let t = fig1_table(FigureId::Fig1a, &[1], &ScanConfig::fermion(), &SolverConfig::default()).unwrap();
    assert_eq!(t.rows.len(), 199);
    for row in &t.rows {
        assert_eq!(row[0], Cell::Int(1));
        assert!((float(&row[2]) - 2.0 * float(&row[1]) / PI).abs() <= 1e-14);
    }
}

#[test]
fn fig1_large_n_curves_coincide_above_half() {
    let cfg = ScanConfig::fermion();
    let t = fig1_table(FigureId::Fig1a, &[10, 12], &cfg, &SolverConfig::default()).unwrap();
    let per_n = t.rows.len() / 2;
    let mut gap = 0.0f64;
    for i in 0..per_n {
        let a = float(&t.rows[i][1]);
        if a > 0.5 {
            gap = gap.max((float(&t.rows[i][2]) - float(&t.rows[i + per_n][2])).abs());
        }
    }
    // measured 1.1355e-3 on the default grid
    assert!(gap < 1.2e-3, "max gap {gap}");
}
