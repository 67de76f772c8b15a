use std::f64::consts::{PI, TAU};

use catlep_core::contour::{intersections, zero_contours, Component, GridSpec, Polyline};
use catlep_core::ep::{
    lep2_zero_drive, lep3_locus, lep3_real_alpha, lep3_sweep, SweepReference, SweepSpec, SweepVariable,
};
use catlep_core::logical::{build_matrix, closed_form_spectrum, numeric_spectrum};
use catlep_core::params::{derive_cat_manifold, CatManifold, ParamBox};
use catlep_core::topology::{resultants, trajectory, winding_number, LoopSpec, ResultantField};
use catlep_core::{Dd, Params, ParamsDd, Real};
use num_traits::{Float, Zero};
use rand::{Rng, SeedableRng};

const KAPPA: f64 = 6.48e-3;
const EPS2: f64 = 0.93;

fn base(theta: f64) -> Params {
    Params::normalized(KAPPA, 0.0, 0.0, EPS2, theta).unwrap()
}

fn lep3(theta: f64) -> (f64, f64) {
    let l = lep3_locus(&derive_cat_manifold(&base(theta)).unwrap(), theta, KAPPA);
    assert!(l.exists);
    (l.eps_abs, l.delta_abs)
}

fn draws(n: usize) -> Vec<Params> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let dist = ParamBox::default();
    (0..n).map(|_| dist.sample(std::array::from_fn(|_| rng.gen())).unwrap()).collect()
}

#[test]
fn locus_is_a_triple_coalescence() {
    for k in 0..16 {
        let th = k as f64 * TAU / 16.0;
        let m = derive_cat_manifold(&base(th)).unwrap();
        let l = lep3_locus(&m, th, KAPPA);
        if !l.exists {
            continue;
        }
        // The gap of a triple root is cube-root sensitive to roundoff, so it
        // is checked in double-double.
        let kd = Dd::lit(KAPPA);
        let thd = Dd::lit(th);
        let pd = ParamsDd::normalized(kd, Dd::zero(), Dd::zero(), Dd::lit(EPS2), thd).unwrap();
        let md = derive_cat_manifold(&pd).unwrap();
        let ld = lep3_locus(&md, thd, kd);
        let at = pd.with_eps(ld.eps_abs).unwrap().with_delta(ld.delta_abs).unwrap();
        let s = closed_form_spectrum(&at, &md);
        let gap = [(1, 2), (1, 3), (2, 3)].iter().map(|&(i, j)| (s.e[i] - s.e[j]).norm()).fold(Dd::zero(), |a, g| a.max(g));
        assert!(gap < Dd::lit(1e-6) * kd, "θ = {th}: gap {gap}");

        let at = base(th).with_eps(l.eps_abs).unwrap().with_delta(l.delta_abs).unwrap();
        let n = numeric_spectrum(&build_matrix(&at, &m));
        assert!(n.min_eigvec_angle < 1e-2, "θ = {th}: angle {}", n.min_eigvec_angle);
    }
}

#[test]
fn locus_is_periodic_in_theta() {
    for k in 0..64 {
        let th = k as f64 * TAU / 64.0 + 0.01;
        let m = derive_cat_manifold(&base(th)).unwrap();
        let a = lep3_locus(&m, th, KAPPA);
        let b = lep3_locus(&m, th + TAU, KAPPA);
        assert_eq!(a.exists, b.exists);
        let close = |x: f64, y: f64| x == y || (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
        assert!(close(a.eps_abs, b.eps_abs) && close(a.delta_abs, b.delta_abs), "θ = {th}: {a:?} vs {b:?}");
    }
}

#[test]
fn general_locus_reduces_to_real_amplitude_form() {
    let th = 1.5 * PI;
    for i in 1..100 {
        let p = 0.3 + (0.999 - 0.3) * i as f64 / 100.0;
        let mag = (p * p).atanh().sqrt();
        let m = CatManifold::from_amplitude(mag, 0.0).unwrap();
        let l = lep3_locus(&m, th, KAPPA);
        let (e, d) = lep3_real_alpha(&m, KAPPA).unwrap();
        assert!(((l.eps_abs - e) / e).abs() < 1e-12, "p = {p}: ε {} vs {e}", l.eps_abs);
        assert!(((l.delta_abs - d) / d).abs() < 1e-12, "p = {p}: Δ {} vs {d}", l.delta_abs);
    }
}

#[test]
fn locus_grows_with_drive_strength() {
    let reference = SweepReference { alpha0_mag: (2.0 * EPS2).sqrt(), theta0: 1.5 * PI };
    let spec = SweepSpec { variable: SweepVariable::Eps2Ratio, start: 0.3, end: 2.0, count: 100 };
    let rows = lep3_sweep(&spec, &reference, KAPPA).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].eps_norm > w[0].eps_norm);
        assert!(w[1].delta_norm > w[0].delta_norm);
        assert!(w[1].delta_abs / w[1].eps_abs > w[0].delta_abs / w[0].eps_abs);
    }
}

#[test]
fn resultants_are_real() {
    for p in draws(10_000) {
        let m = derive_cat_manifold(&p).unwrap();
        let r = resultants(&closed_form_spectrum(&p, &m));
        let floor = r.r1.abs().max(r.r2.abs()).max(f64::MIN_POSITIVE);
        assert!(r.imag_residual <= 1e-8 * floor, "{p:?}: {r:?}");
    }
}

#[test]
fn sign_of_r1_classifies_the_spectrum() {
    let mut checked = 0;
    for p in draws(10_000) {
        let m = derive_cat_manifold(&p).unwrap();
        let s = closed_form_spectrum(&p, &m);
        let r = resultants(&s);
        // Skip the neighbourhood of the R₁ = 0 boundary.
        if r.r1.abs() < 1e-6 * 108.0 * (s.q * s.q + s.m_coef.abs().powi(3)) {
            continue;
        }
        let e = numeric_spectrum(&build_matrix(&p, &m)).eigenvalues;
        let scale = e.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let complex = e.iter().any(|z| z.im.abs() > 1e-8 * scale);
        assert_eq!(r.r1 > 0.0, complex, "{p:?}: R₁ = {}, eigenvalues {e:?}", r.r1);
        checked += 1;
    }
    assert!(checked > 9_000);
}

fn w(center: (f64, f64), radii: (f64, f64), field: &ResultantField<f64>) -> i64 {
    winding_number(&LoopSpec::new(center, radii, 64).unwrap(), field).unwrap().w
}

#[test]
fn winding_orientation_and_sample_invariance() {
    let (e, d) = lep3(1.5 * PI);
    let field = ResultantField::new(&base(1.5 * PI)).unwrap();
    for n in [64, 256, 1024, 4096] {
        let l = LoopSpec::new((e, d), (0.4 * e, 0.4 * d), n).unwrap();
        let a = winding_number(&l, &field).unwrap().w;
        let b = winding_number(&l.reversed(), &field).unwrap().w;
        assert_eq!(a, -1);
        assert_eq!(b, 1);
    }
}

#[test]
fn winding_is_additive() {
    let (e, d) = lep3(1.5 * PI);
    let field = ResultantField::new(&base(1.5 * PI)).unwrap();
    let around = w((e, d), (0.4 * e, 0.4 * d), &field);
    let empty = w((2.5 * e, d), (0.4 * e, 0.4 * d), &field);
    let merged = w((1.75 * e, d), (1.35 * e, 0.4 * d), &field);
    assert_eq!((around, empty), (-1, 0));
    assert_eq!(merged, around + empty);

    // Mirror images across either axis.
    let sectors: Vec<i64> =
        [(e, d), (-e, d), (e, -d), (-e, -d)].iter().map(|&c| w(c, (0.4 * e, 0.4 * d), &field)).collect();
    assert!(sectors.iter().all(|s| s.abs() == 1), "{sectors:?}");
    let pair_eps = w((0.0, -d), (1.6 * e, 0.4 * d), &field);
    assert_eq!(pair_eps, sectors[2] + sectors[3]);
}

#[test]
fn trajectory_stays_on_unit_circle() {
    let (e, d) = lep3(1.5 * PI);
    let field = ResultantField::new(&base(1.5 * PI)).unwrap();
    for cx in [1.0, 1.5] {
        let t = trajectory(&LoopSpec::new((cx * e, d), (0.4 * e, 0.4 * d), 256).unwrap(), &field).unwrap();
        assert!(t.iter().all(|p| ((p.n1 * p.n1 + p.n2 * p.n2).sqrt() - 1.0).abs() < 1e-12));
        let turns: f64 = t
            .windows(2)
            .map(|w| {
                let a = w[1].n2.atan2(w[1].n1) - w[0].n2.atan2(w[0].n1);
                (a + PI).rem_euclid(TAU) - PI
            })
            .sum::<f64>()
            / TAU;
        assert_eq!(turns.round().abs(), if cx == 1.0 { 1.0 } else { 0.0 });
    }
}

/// Distinct points where a segment meets the polylines; a shared vertex
/// counts once.
fn crossings(lines: &[Polyline<f64>], from: (f64, f64), to: (f64, f64)) -> usize {
    let mut pts = intersections(lines, &[Polyline { points: vec![from, to], closed: false }]);
    let len = (to.0 - from.0).hypot(to.1 - from.1);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).hypot(a.1 - b.1) < 1e-9 * len);
    pts.len()
}

#[test]
fn drive_splits_the_zero_drive_point() {
    let th = 1.5 * PI;
    let field = ResultantField::new(&base(th)).unwrap();
    let d2 = lep2_zero_drive(KAPPA, field.manifold()).unwrap();
    let (e3, _) = lep3(th);
    let grid = GridSpec::new((-0.5 * e3, 0.5 * e3), 201, (0.9 * d2, 1.1 * d2), 201).unwrap();
    let r1 = zero_contours(&grid, Component::R1, &field).unwrap();
    // One crossing along the Δ axis at zero drive.
    assert_eq!(crossings(&r1, (0.0, 0.9 * d2), (0.0, 1.1 * d2)), 1);
    // Just above Δ₂ the zero curve bends away from the axis on both sides.
    let slice = 1.01 * d2;
    assert_eq!(crossings(&r1, (-0.5 * e3, slice), (0.5 * e3, slice)), 2);
    assert_eq!(crossings(&r1, (-0.5 * e3, 0.99 * d2), (0.5 * e3, 0.99 * d2)), 0);
}
