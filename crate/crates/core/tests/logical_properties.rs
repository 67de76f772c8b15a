#![allow(clippy::needless_range_loop)]

use std::f64::consts::{PI, TAU};

use catlep_core::fock::{annihilation, build_full_liouvillian, truncation_dim, CatBasis};
use catlep_core::linalg::{dot, CMat};
use catlep_core::logical::{
    build_matrix, closed_form_spectrum, numeric_spectrum, propagate, spectral_distance, LogicalVector,
};
use catlep_core::params::{derive_cat_manifold, CatManifold};
use catlep_core::Params;
use num_complex::Complex;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params> {
    (1e-3..0.1f64, 0.0..0.1f64, -0.2..0.2f64, 0.2..2.0f64, 0.0..TAU)
        .prop_map(|(k, e, d, e2, th)| Params::normalized(k, e, d, e2, th).unwrap())
}

fn logical_state() -> impl Strategy<Value = LogicalVector<f64>> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..TAU).prop_map(|(w, r, phi)| {
        // Convex mixture keeps the 2×2 matrix positive.
        let c = Complex::from_polar(r * (w * (1.0 - w)).sqrt(), phi);
        LogicalVector::new([Complex::new(w, 0.0), c, c.conj(), Complex::new(1.0 - w, 0.0)])
    })
}

fn scale(e: &[Complex<f64>; 4]) -> f64 {
    e.iter().fold(0.0, |a, z| a.max(z.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn trace_and_hermiticity_are_preserved(p in params(), v0 in logical_state(), t in 0.0..200.0f64) {
        let m = derive_cat_manifold(&p).unwrap();
        let v = propagate(&build_matrix(&p, &m), &v0, t).unwrap();
        prop_assert!((v.trace() - Complex::new(1.0, 0.0)).norm() < 1e-9);
        prop_assert!((v.v[1] - v.v[2].conj()).norm() < 1e-9);
    }

    #[test]
    fn spectrum_is_invariant_under_reciprocal_p(p in params()) {
        let m = derive_cat_manifold(&p).unwrap();
        let a = numeric_spectrum(&build_matrix(&p, &m)).eigenvalues;
        let b = numeric_spectrum(&build_matrix(&p, &m.with_reciprocal_p())).eigenvalues;
        prop_assert!(spectral_distance(&a, &b) <= 1e-10 * scale(&a));
    }

    #[test]
    fn closed_form_matches_eigensolve(p in params()) {
        let m = derive_cat_manifold(&p).unwrap();
        let s = closed_form_spectrum(&p, &m);
        let n = numeric_spectrum(&build_matrix(&p, &m)).eigenvalues;
        prop_assert!(spectral_distance(&s.e, &n) <= 1e-10 * scale(&s.e));
    }

    #[test]
    fn spectrum_is_stable_and_closed_under_conjugation(p in params()) {
        let m = derive_cat_manifold(&p).unwrap();
        let s = closed_form_spectrum(&p, &m);
        let sc = scale(&s.e);
        let n = numeric_spectrum(&build_matrix(&p, &m)).eigenvalues;
        for z in s.e.iter().chain(&n) {
            prop_assert!(z.re <= 1e-12 * sc);
        }
        prop_assert!(spectral_distance(&s.e, &s.e.map(|z| z.conj())) <= 1e-12 * sc);
        prop_assert_eq!(s.e[0], Complex::new(0.0, 0.0));
        prop_assert!(s.e[1].im == 0.0 && s.e[1].re != 0.0);
    }

    #[test]
    fn amplitude_identity(e2 in 1e-3..10.0f64, th in 0.0..TAU) {
        let p = Params::normalized(0.01, 0.0, 0.0, e2, th).unwrap();
        let m = derive_cat_manifold(&p).unwrap();
        prop_assert!((m.alpha.norm_sqr() * p.kappa2() - 2.0 * e2).abs() <= 1e-12 * 2.0 * e2);
        let r = (m.phi_alpha + th / 2.0 - 0.75 * PI).rem_euclid(PI);
        prop_assert!(r.min(PI - r) < 1e-12);
    }
}

#[test]
fn p_increases_with_amplitude() {
    let ps: Vec<f64> = (0..100)
        .map(|i| CatManifold::from_amplitude(0.1 + 3.9 * i as f64 / 99.0, 0.0).unwrap().p)
        .collect();
    assert!(ps.windows(2).all(|w| w[1] > w[0]));
    assert!(ps.iter().all(|&p| p > 0.0 && p < 1.0));
}

#[test]
fn p_matches_fock_ratio() {
    for i in 0..=25 {
        let mag = 0.5 + 2.5 * i as f64 / 25.0;
        let m = CatManifold::from_amplitude(mag, 0.3).unwrap();
        let dim = truncation_dim(mag);
        let b = CatBasis::new(m.alpha, dim).unwrap();
        let a = annihilation::<f64>(dim).unwrap();
        let ratio = dot(&b.minus, &a.m.matvec(&b.plus)) / m.alpha;
        assert!((ratio - m.p).norm() < 1e-8, "|α| = {mag}: {ratio} vs {}", m.p);
    }
}

/// `⟨C^a| 𝓛(|C^c⟩⟨C^d|) |C^b⟩` from the truncated Fock-space generator.
fn projected_generator(p: &Params) -> [[Complex<f64>; 4]; 4] {
    let m = derive_cat_manifold(p).unwrap();
    let dim = truncation_dim(m.alpha_mag);
    let b = CatBasis::new(m.alpha, dim).unwrap();
    let l = build_full_liouvillian(p, dim).unwrap();
    let mut out = [[Complex::new(0.0, 0.0); 4]; 4];
    for col in 0..4 {
        let (c, d) = (col / 2, col % 2);
        let image = l.apply(&CMat::outer(b.get(c), b.get(d)));
        for row in 0..4 {
            let (ra, rb) = (row / 2, row % 2);
            out[row][col] = dot(b.get(ra), &image.matvec(b.get(rb)));
        }
    }
    out
}

#[test]
fn projected_matrix_equals_projection_of_full_generator() {
    for (k, e, d, e2, th) in [
        (6.48e-3, 6.94e-3, 0.05, 0.93, 1.5 * PI),
        (0.02, 0.05, -0.1, 0.6, 0.3),
        (0.05, 0.0, 0.15, 1.8, 2.2),
        (1e-3, 0.08, 0.0, 0.5, 4.0),
    ] {
        let p = Params::normalized(k, e, d, e2, th).unwrap();
        let m = derive_cat_manifold(&p).unwrap();
        let full = projected_generator(&p);
        let l = build_matrix(&p, &m);
        for r in 0..4 {
            for c in 0..4 {
                assert!((full[r][c] - l.m[r][c]).norm() < 1e-8, "({r},{c}): {} vs {}", full[r][c], l.m[r][c]);
            }
        }
    }
}
