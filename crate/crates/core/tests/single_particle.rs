use std::f64::consts::PI;

use backflow_core::{
    build_kernel, current_j, delta1_quadratic, delta1_quadrature, lambda_ring, Alpha, CoefficientVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alpha(a: f64) -> Alpha {
    Alpha::new(a).unwrap()
}

/// Current from the wavefunction `ψ = Σ c_m e^{i(mθ − E_m t)}/√2π`, as `Im(ψ* ∂θψ)`.
fn wavefunction_current(c: &[f64], theta: f64, t: f64) -> f64 {
    let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
    for (m, &cm) in c.iter().enumerate() {
        let ph = m as f64 * theta - 0.5 * (m * m) as f64 * t;
        let (s, co) = ph.sin_cos();
        re += cm * co;
        im += cm * s;
        dre -= m as f64 * cm * s;
        dim += m as f64 * cm * co;
    }
    (re * dim - im * dre) / (2.0 * PI)
}

#[test]
fn two_mode_closed_form() {
    for &a in &[0.1, 0.5, 1.0, 2.5, PI] {
        let s = a.sin() / a;
        let want = a / PI * (1.0 - (1.0 + s * s).sqrt());
        assert!((lambda_ring(alpha(a), 1).unwrap().lambda_ring - want).abs() <= 1e-14);
    }
}

#[test]
fn non_increasing_in_n() {
    for &a in &[0.05, 0.39, 1.16, 1.8] {
        let mut prev = lambda_ring(alpha(a), 1).unwrap().lambda_ring;
        for n in 2..=60 {
            let cur = lambda_ring(alpha(a), n).unwrap().lambda_ring;
            assert!(cur <= prev + 1e-12, "α={a}, N={n}: {cur} > {prev}");
            prev = cur;
        }
    }
}

#[test]
fn never_below_the_ring_constant() {
    for i in 0..40 {
        let a = 0.05 * (i + 1) as f64;
        for n in [5, 50, 150] {
            let l = lambda_ring(alpha(a), n).unwrap().lambda_ring;
            assert!(l >= -0.116817, "α={a}, N={n}: {l}");
        }
    }
}

#[test]
fn minimizer_reproduces_eigenvalue() {
    for &(a, n) in &[(0.4, 10), (1.16, 100), (2.0, 30)] {
        let b = lambda_ring(alpha(a), n).unwrap();
        let d1 = delta1_quadratic(&b.minimizer, &build_kernel(alpha(a), n)).unwrap();
        assert!((d1 - b.lambda_ring).abs() <= 1e-11);
    }
}

#[test]
fn quadrature_matches_quadratic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let n = rng.gen_range(1..=10);
        let a = rng.gen_range(0.05..2.0);
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = CoefficientVector::normalized(v).unwrap();
        let q = delta1_quadrature(&c, alpha(a), 256).unwrap();
        let f = delta1_quadratic(&c, &build_kernel(alpha(a), n)).unwrap();
        assert!((q - f).abs() <= 1e-8, "{q} vs {f}");
    }
}

#[test]
fn single_mode_quadrature() {
    let a = 0.7;
    let e0 = CoefficientVector::basis(4, 0);
    let e1 = CoefficientVector::basis(4, 1);
    assert!(delta1_quadrature(&e0, alpha(a), 64).unwrap().abs() <= 1e-14);
    assert!((delta1_quadrature(&e1, alpha(a), 64).unwrap() - 2.0 * a / PI).abs() <= 1e-12);
}

#[test]
fn current_matches_wavefunction() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..30 {
        let n = rng.gen_range(1..=8);
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = CoefficientVector::normalized(v).unwrap();
        let th = rng.gen_range(0.0..2.0 * PI);
        let t = rng.gen_range(-3.0..3.0);
        assert!((current_j(&c, th, t) - wavefunction_current(c.values(), th, t)).abs() <= 1e-13);
    }
}

#[test]
fn two_mode_current_at_origin() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = CoefficientVector::new(vec![s, s]).unwrap();
    // diagonal terms 0 and 2·½, cross terms 2·1·½
    assert!((current_j(&c, 0.0, 0.0) - 1.0 / (2.0 * PI)).abs() <= 1e-15);
    assert!((wavefunction_current(c.values(), 0.0, 0.0) - 1.0 / (2.0 * PI)).abs() <= 1e-15);
}
