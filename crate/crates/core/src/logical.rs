//! The Liouvillian projected onto the two-dimensional cat subspace.
//!
//! Density matrices `ρ = Σ v_jk |C^j⟩⟨C^k|` are stacked row-major in the
//! basis `(|C⁺⟩⟨C⁺|, |C⁺⟩⟨C⁻|, |C⁻⟩⟨C⁺|, |C⁻⟩⟨C⁻|)`. The projected operators
//! follow `a|C⁺⟩ = αp|C⁻⟩` and `a|C⁻⟩ = αp⁻¹|C⁺⟩` with `p = N⁺/N⁻ < 1`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{aberth_roots, charpoly4, condition_number, expm, null_space, CMat, Lu};
use crate::params::{CatManifold, SystemParams};
use crate::scalar::Real;

type C<T> = Complex<T>;

/// Condition number of the eigenvector matrix above which propagation
/// switches from the eigen-expansion to the matrix exponential.
pub const EIGENBASIS_COND_LIMIT: f64 = 1e8;

/// The 4×4 projected Liouvillian.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalLiouvillian<T> {
    pub m: [[C<T>; 4]; 4],
    pub params: SystemParams<T>,
    pub manifold: CatManifold<T>,
}

/// Eigenvalues of the projected Liouvillian in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum<T> {
    /// `(E₁, E₂, E₃, E₄)` with `E₁ = 0` exactly.
    pub e: [C<T>; 4],
    pub eta_plus: C<T>,
    pub eta_minus: C<T>,
    pub q: T,
    pub m_coef: T,
}

/// A vectorized 2×2 density matrix on the cat subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalVector<T> {
    pub v: [C<T>; 4],
}

impl<T: Real> LogicalVector<T> {
    pub fn new(v: [C<T>; 4]) -> Self {
        Self { v }
    }

    /// `|C⁺⟩⟨C⁺|`.
    pub fn even_cat() -> Self {
        let mut v = [C::zero(); 4];
        v[0] = C::new(T::one(), T::zero());
        Self { v }
    }

    /// `|C⁻⟩⟨C⁻|`.
    pub fn odd_cat() -> Self {
        let mut v = [C::zero(); 4];
        v[3] = C::new(T::one(), T::zero());
        Self { v }
    }

    /// `(|C⁺⟩⟨C⁺| + |C⁻⟩⟨C⁻|)/2`.
    pub fn maximally_mixed() -> Self {
        let h = C::new(T::lit(0.5), T::zero());
        Self { v: [h, C::zero(), C::zero(), h] }
    }

    /// Pure state `c₊|C⁺⟩ + c₋|C⁻⟩`, normalized.
    pub fn pure(c_plus: C<T>, c_minus: C<T>) -> Self {
        let n = c_plus.norm_sqr() + c_minus.norm_sqr();
        let a = c_plus.unscale(n.sqrt());
        let b = c_minus.unscale(n.sqrt());
        Self { v: [a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj()] }
    }

    pub fn trace(&self) -> C<T> {
        self.v[0] + self.v[3]
    }

    /// Largest deviation from the Hermitian pattern `V₂ = conj V₃`, `V₁, V₄` real.
    pub fn hermiticity_defect(&self) -> T {
        (self.v[1] - self.v[2].conj()).norm().max(self.v[0].im.abs()).max(self.v[3].im.abs())
    }

    /// The 2×2 matrix `[[V₁, V₂], [V₃, V₄]]`.
    pub fn to_matrix(&self) -> CMat<T> {
        CMat::from_vec(2, 2, self.v.to_vec())
    }

    fn check_physical(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > T::lit(1e-10) {
            return Err(Error::invalid("v0", format!("not Hermitian (defect {:e})", herm.to_f64_lossy())));
        }
        let tr = self.trace();
        if (tr - C::new(T::one(), T::zero())).norm() > T::lit(1e-8) {
            return Err(Error::invalid("v0", format!("trace {} != 1", tr.re.to_f64_lossy())));
        }
        Ok(())
    }
}

/// Builds the projected Liouvillian.
pub fn build_matrix<T: Real>(params: &SystemParams<T>, manifold: &CatManifold<T>) -> LogicalLiouvillian<T> {
    let i = C::new(T::zero(), T::one());
    let re = |x: T| C::new(x, T::zero());
    let kappa = params.kappa();
    let eps = params.eps();
    let delta = params.delta();
    let a2 = manifold.alpha_sq();
    let alpha = manifold.alpha;
    let p = manifold.p;
    let psq = manifold.p_sq_effective();
    let p2m = manifold.p_comb.minus[0];
    let p2p = manifold.p_comb.plus[0];
    let u = alpha.scale(p) + alpha.conj().unscale(p);
    let w = alpha.conj().scale(p) + alpha.unscale(p);
    let ka = kappa * a2;
    let half = T::lit(0.5);
    let ieu = i * u.scale(eps);
    let iew = i * w.scale(eps);
    let coh = re(-half * ka * p2p);
    let det = i.scale(delta * a2 * p2m);
    let m = [
        [re(-ka * psq), ieu, -iew, re(ka / psq)],
        [iew, det + coh, re(ka), -iew],
        [-ieu, re(ka), -det + coh, ieu],
        [re(ka * psq), -ieu, iew, re(-ka / psq)],
    ];
    LogicalLiouvillian { m, params: *params, manifold: *manifold }
}

/// The real invariants `(q, m)` of the depressed cubic `y³ + 3my − 2q`
/// whose roots, shifted by `−(2/3)κ|α|²p₂⁺`, are the nonzero eigenvalues.
pub fn cubic_invariants<T: Real>(params: &SystemParams<T>, manifold: &CatManifold<T>) -> (T, T) {
    cubic_invariants_at(manifold, params.kappa(), params.eps(), params.delta(), params.theta())
}

pub(crate) fn cubic_invariants_at<T: Real>(manifold: &CatManifold<T>, kappa: T, eps: T, delta: T, theta: T) -> (T, T) {
    let l = T::lit;
    let a = manifold.alpha_sq();
    let a2 = a * a;
    let k2 = kappa * kappa;
    let d2 = delta * delta;
    let e2 = eps * eps;
    let s = theta.sin();
    let [p2, p4, p6] = manifold.p_comb.plus;
    let q = a * kappa / l(216.0)
        * (-a2 * (l(36.0) * d2 + k2) * p6
            + l(72.0) * a * e2 * p4
            + (l(36.0) * a2 * d2 + l(33.0) * a2 * k2 - l(576.0) * e2 * a * s) * p2
            + l(1008.0) * a * e2);
    let m = (a2 * (l(12.0) * d2 - k2) * p4 + l(48.0) * a * e2 * p2 - l(96.0) * e2 * a * s
        - a2 * (l(24.0) * d2 + l(14.0) * k2))
        / l(36.0);
    (q, m)
}

/// Common real offset `−(2/3)κ|α|²p₂⁺` of the nonzero eigenvalues.
pub fn spectral_offset<T: Real>(params: &SystemParams<T>, manifold: &CatManifold<T>) -> T {
    -T::lit(2.0) / T::lit(3.0) * params.kappa() * manifold.alpha_sq() * manifold.p_comb.plus[0]
}

fn complex_cbrt<T: Real>(z: C<T>) -> C<T> {
    if z.im.is_zero() {
        return C::new(z.re.cbrt(), T::zero());
    }
    let r = z.norm().cbrt();
    let phi = z.im.atan2(z.re) / T::lit(3.0);
    let mut w = C::from_polar(r, phi);
    // One Newton step restores full precision lost in the polar round trip.
    let three = T::lit(3.0);
    w = w - (w * w * w - z) / (w * w).scale(three);
    w
}

/// Closed-form spectrum by Cardano's formula.
///
/// Of the three pairings `(ωᵏη₊, ω⁻ᵏη₋)` compatible with `η₊η₋ = −m`, the one
/// that makes `E₂` closest to real is used. All three give the same
/// eigenvalue multiset; the choice only fixes the labels.
pub fn closed_form_spectrum<T: Real>(params: &SystemParams<T>, manifold: &CatManifold<T>) -> Spectrum<T> {
    let (q, m) = cubic_invariants(params, manifold);
    let c = spectral_offset(params, manifold);
    let disc = q * q + m * m * m;
    let s = if disc >= T::zero() { C::new(disc.sqrt(), T::zero()) } else { C::new(T::zero(), (-disc).sqrt()) };
    let qc = C::new(q, T::zero());
    let (bp, bm) = (qc + s, qc - s);
    let (eta_p, eta_m) = if bp.norm().is_zero() && bm.norm().is_zero() {
        (C::zero(), C::zero())
    } else if bp.norm() >= bm.norm() {
        let ep = complex_cbrt(bp);
        (ep, C::new(-m, T::zero()) / ep)
    } else {
        let em = complex_cbrt(bm);
        (C::new(-m, T::zero()) / em, em)
    };
    let half = T::lit(0.5);
    let h3 = T::lit(3.0).sqrt() * half;
    let omega = C::new(-half, h3);
    let omega_bar = omega.conj();
    let rot = [C::new(T::one(), T::zero()), omega, omega_bar];
    let mut best = 0;
    let mut best_im = T::infinity();
    for (k, r) in rot.iter().enumerate() {
        let im = (*r * eta_p + r.conj() * eta_m).im.abs();
        if im < best_im {
            best_im = im;
            best = k;
        }
    }
    let ep = rot[best] * eta_p;
    let em = rot[best].conj() * eta_m;
    let cc = C::new(c, T::zero());
    let e2 = C::new((cc + ep + em).re, T::zero());
    let mut e3 = cc + omega * ep + omega_bar * em;
    let mut e4 = cc + omega_bar * ep + omega * em;
    if disc > T::zero() {
        // One real root and a conjugate pair.
        let re = (e3.re + e4.re) * half;
        let im = (e3.im - e4.im) * half;
        e3 = C::new(re, im);
        e4 = C::new(re, -im);
    } else {
        e3 = C::new(e3.re, T::zero());
        e4 = C::new(e4.re, T::zero());
    }
    Spectrum { e: [C::zero(), e2, e3, e4], eta_plus: ep, eta_minus: em, q, m_coef: m }
}

/// Eigen-decomposition of the 4×4 matrix by an independent route.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSpectrum<T> {
    pub eigenvalues: [C<T>; 4],
    pub right_eigenvectors: [LogicalVector<T>; 4],
    /// Smallest angle between two normalized eigenvectors; tends to zero
    /// where eigenvectors coalesce.
    pub min_eigvec_angle: T,
    /// Set when the eigenvectors do not span the space.
    pub defective: bool,
}

/// Eigenvalues from the characteristic polynomial (cofactor expansion plus
/// Aberth iteration) and eigenvectors by null-space extraction.
pub fn numeric_spectrum<T: Real>(l: &LogicalLiouvillian<T>) -> NumericSpectrum<T> {
    let coeffs = charpoly4(&l.m);
    let roots = aberth_roots(&coeffs);
    let mut eigenvalues = [C::zero(); 4];
    eigenvalues.copy_from_slice(&roots);
    let mat = CMat::from_array4(&l.m);
    polish_eigenvalues(&mat, &mut eigenvalues);
    let scale = mat.max_abs();
    let cluster_tol = T::lit(1e-10) * scale;
    let rank_tol = T::epsilon().sqrt() * T::lit(1e-2);
    let mut vectors: [Option<Vec<C<T>>>; 4] = Default::default();
    for i in 0..4 {
        if vectors[i].is_some() {
            continue;
        }
        let cluster: Vec<usize> = (i..4)
            .filter(|&j| vectors[j].is_none() && (eigenvalues[j] - eigenvalues[i]).norm() <= cluster_tol)
            .collect();
        let shifted = CMat::from_fn(4, 4, |r, c| {
            if r == c {
                mat[(r, c)] - eigenvalues[i]
            } else {
                mat[(r, c)]
            }
        });
        let ns = null_space(&shifted, rank_tol, 1);
        for (k, &j) in cluster.iter().enumerate() {
            let v = ns.basis.get(k).unwrap_or(&ns.basis[0]).clone();
            vectors[j] = Some(v);
        }
    }
    let vecs: Vec<Vec<C<T>>> = vectors.into_iter().map(|v| normalize_phase(v.expect("assigned"))).collect();
    let mut min_angle = T::FRAC_PI_2();
    for i in 0..4 {
        for j in i + 1..4 {
            let c = crate::linalg::dot(&vecs[i], &vecs[j]);
            let resid: T = vecs[j]
                .iter()
                .zip(&vecs[i])
                .fold(T::zero(), |s, (b, a)| s + (*b - c * *a).norm_sqr())
                .sqrt();
            min_angle = min_angle.min(resid.min(T::one()).asin());
        }
    }
    let vmat = CMat::from_fn(4, 4, |r, c| vecs[c][r]);
    let defective = !null_space(&vmat, T::lit(1e-8), 0).basis.is_empty();
    let right_eigenvectors = [0, 1, 2, 3].map(|k| {
        let mut v = [C::zero(); 4];
        v.copy_from_slice(&vecs[k]);
        LogicalVector::new(v)
    });
    NumericSpectrum { eigenvalues, right_eigenvectors, min_eigvec_angle: min_angle, defective }
}

/// Newton refinement of each eigenvalue on `det(M − λI)`, evaluated through
/// an LU factorization rather than the expanded polynomial, with the other
/// eigenvalues deflated. The expanded coefficients lose absolute accuracy
/// when small and large eigenvalues coexist; the factorization does not.
fn polish_eigenvalues<T: Real>(mat: &CMat<T>, ev: &mut [C<T>; 4]) {
    for i in 0..4 {
        for _ in 0..4 {
            let shifted = CMat::from_fn(4, 4, |r, c| if r == c { mat[(r, c)] - ev[i] } else { mat[(r, c)] });
            let Ok(lu) = Lu::new(&shifted) else { break };
            let inv_trace = lu.inverse().trace();
            let mut g = -inv_trace;
            for j in 0..4 {
                if j != i {
                    let d = ev[i] - ev[j];
                    if !d.is_zero() {
                        g = g - d.inv();
                    }
                }
            }
            if g.is_zero() || !g.re.is_finite() || !g.im.is_finite() {
                break;
            }
            let step = -g.inv();
            ev[i] = ev[i] + step;
            if step.norm() <= T::epsilon() * ev[i].norm() {
                break;
            }
        }
    }
}

fn normalize_phase<T: Real>(mut v: Vec<C<T>>) -> Vec<C<T>> {
    let n = crate::linalg::norm2(&v);
    let big = v.iter().copied().fold(C::zero(), |b: C<T>, x| if x.norm() > b.norm() { x } else { b });
    if n.is_zero() || big.norm().is_zero() {
        return v;
    }
    let ph = big.conj().unscale(big.norm() * n);
    v.iter_mut().for_each(|x| *x = *x * ph);
    v
}

/// Smallest `max_i |a_i − b_π(i)|` over all permutations `π`.
pub fn spectral_distance<T: Real>(a: &[C<T>; 4], b: &[C<T>; 4]) -> T {
    let mut best = T::infinity();
    permute4(&mut |p| {
        let d = (0..4).fold(T::zero(), |m, k| m.max((a[k] - b[p[k]]).norm()));
        best = best.min(d);
    });
    best
}

fn permute4(f: &mut impl FnMut([usize; 4])) {
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        f([a, b, c, d]);
                    }
                }
            }
        }
    }
}

/// Time evolution of logical states under a fixed Liouvillian.
#[derive(Debug, Clone)]
pub struct Propagator<T> {
    generator: CMat<T>,
    method: PropagationMethod<T>,
}

#[derive(Debug, Clone)]
enum PropagationMethod<T> {
    Eigen { values: [C<T>; 4], vectors: CMat<T>, lu: Lu<T> },
    Exponential,
}

impl<T: Real> Propagator<T> {
    /// Diagonalizes `l` unless the eigenvector matrix is too ill-conditioned,
    /// in which case every call uses the matrix exponential.
    pub fn new(l: &LogicalLiouvillian<T>) -> Self {
        let generator = CMat::from_array4(&l.m);
        let ns = numeric_spectrum(l);
        let vectors = CMat::from_fn(4, 4, |r, c| ns.right_eigenvectors[c].v[r]);
        let cond = condition_number(&vectors);
        let method = match Lu::new(&vectors) {
            Ok(lu) if !ns.defective && cond <= T::lit(EIGENBASIS_COND_LIMIT) => {
                PropagationMethod::Eigen { values: ns.eigenvalues, vectors, lu }
            }
            _ => PropagationMethod::Exponential,
        };
        Self { generator, method }
    }

    pub fn uses_exponential(&self) -> bool {
        matches!(self.method, PropagationMethod::Exponential)
    }

    /// `V(t)` for a physical initial state.
    pub fn at(&self, v0: &LogicalVector<T>, t: T) -> Result<LogicalVector<T>> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::invalid("t", "must be finite and >= 0"));
        }
        v0.check_physical()?;
        if t.is_zero() {
            return Ok(*v0);
        }
        let out = match &self.method {
            PropagationMethod::Eigen { values, vectors, lu } => {
                let coef = lu.solve(&v0.v);
                let mut v = [C::zero(); 4];
                for k in 0..4 {
                    let w = coef[k] * (values[k].scale(t)).exp();
                    for r in 0..4 {
                        v[r] = v[r] + w * vectors[(r, k)];
                    }
                }
                v
            }
            PropagationMethod::Exponential => {
                let e = expm(&self.generator.scale(C::new(t, T::zero())))?;
                let r = e.matvec(&v0.v);
                [r[0], r[1], r[2], r[3]]
            }
        };
        Ok(LogicalVector::new(out))
    }
}

/// `V(t) = e^{𝓛t} V(0)`; see [`Propagator`].
pub fn propagate<T: Real>(l: &LogicalLiouvillian<T>, v0: &LogicalVector<T>, t: T) -> Result<LogicalVector<T>> {
    Propagator::new(l).at(v0, t)
}

/// Unit-trace kernel vector of the projected Liouvillian.
pub fn steady_state<T: Real>(l: &LogicalLiouvillian<T>) -> Result<LogicalVector<T>> {
    let mat = CMat::from_array4(&l.m);
    let ns = null_space(&mat, T::lit(1e-12), 1);
    let exact = null_space(&mat, T::lit(1e-12), 0);
    if exact.basis.len() > 1 {
        return Err(Error::DegenerateKernel(exact.basis.len()));
    }
    let v = &ns.basis[0];
    let tr = v[0] + v[3];
    if tr.norm() <= T::epsilon() {
        return Err(Error::Invariant("kernel vector has zero trace".into()));
    }
    let mut out = [C::zero(); 4];
    for k in 0..4 {
        out[k] = v[k] / tr;
    }
    // Enforce the Hermitian pattern exactly.
    let half = T::lit(0.5);
    out[0] = C::new(out[0].re, T::zero());
    out[3] = C::new(out[3].re, T::zero());
    let off = (out[1] + out[2].conj()).scale(half);
    out[1] = off;
    out[2] = off.conj();
    Ok(LogicalVector::new(out))
}

impl<T: Real> LogicalLiouvillian<T> {
    /// `𝓛 V`.
    pub fn apply(&self, v: &LogicalVector<T>) -> LogicalVector<T> {
        let mut out = [C::zero(); 4];
        for r in 0..4 {
            out[r] = (0..4).fold(C::zero(), |s, c| s + self.m[r][c] * v.v[c]);
        }
        LogicalVector::new(out)
    }

    pub fn trace(&self) -> C<T> {
        (0..4).fold(C::zero(), |s, i| s + self.m[i][i])
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |a, v| a.max(v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_cat_manifold;
    use std::f64::consts::PI;

    fn setup(kappa: f64, eps: f64, delta: f64, eps2: f64, theta: f64) -> (SystemParams<f64>, CatManifold<f64>) {
        let p = SystemParams::normalized(kappa, eps, delta, eps2, theta).unwrap();
        let m = derive_cat_manifold(&p).unwrap();
        (p, m)
    }

    #[test]
    fn zero_generators_give_zero_matrix() {
        let (p, m) = setup(0.0, 0.0, 0.0, 0.93, 1.0);
        let l = build_matrix(&p, &m);
        assert_eq!(l.max_abs(), 0.0);
        let ns = numeric_spectrum(&l);
        assert!(ns.eigenvalues.iter().all(|e| e.norm() == 0.0));
        assert!(!ns.defective);
        let v0 = LogicalVector::pure(C::new(0.6, 0.0), C::new(0.0, 0.8));
        let v = propagate(&l, &v0, 3.0).unwrap();
        for k in 0..4 {
            assert!((v.v[k] - v0.v[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn block_structure_without_drive_or_detuning() {
        let (p, m) = setup(0.3, 0.0, 0.0, 0.93, 1.5 * PI);
        let l = build_matrix(&p, &m);
        for &(r, c) in &[(0, 1), (0, 2), (1, 0), (2, 0), (3, 1), (3, 2), (1, 3), (2, 3)] {
            assert_eq!(l.m[r][c].norm(), 0.0, "entry ({r},{c})");
        }
    }

    #[test]
    fn columns_conserve_trace() {
        let (p, m) = setup(0.05, 0.07, -0.11, 0.7, 2.2);
        let l = build_matrix(&p, &m);
        for c in 0..4 {
            assert!((l.m[0][c] + l.m[3][c]).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_form_without_drive() {
        let (p, m) = setup(1.0, 0.0, 0.0, 0.93, 1.5 * PI);
        let s = closed_form_spectrum(&p, &m);
        let a2 = m.alpha_sq();
        let p2p = m.p_comb.plus[0];
        let expect = [
            C::new(0.0, 0.0),
            C::new(-a2 * p2p, 0.0),
            C::new(-a2 * (p2p / 2.0 - 1.0), 0.0),
            C::new(-a2 * (p2p / 2.0 + 1.0), 0.0),
        ];
        assert!(spectral_distance(&s.e, &expect) < 1e-13);
        let ns = numeric_spectrum(&build_matrix(&p, &m));
        assert!(spectral_distance(&ns.eigenvalues, &expect) < 1e-12);
    }

    #[test]
    fn steady_state_without_drive() {
        let (p, m) = setup(0.2, 0.0, 0.0, 0.93, 0.0);
        let l = build_matrix(&p, &m);
        let ss = steady_state(&l).unwrap();
        let psq = m.p_sq();
        let norm = psq + 1.0 / psq;
        assert!((ss.v[0].re - (1.0 / psq) / norm).abs() < 1e-14);
        assert!((ss.v[3].re - psq / norm).abs() < 1e-14);
        assert!(ss.v[1].norm() < 1e-14);
    }

    #[test]
    fn steady_state_of_zero_generator_is_degenerate() {
        let (p, m) = setup(0.0, 0.0, 0.0, 0.93, 0.0);
        assert_eq!(steady_state(&build_matrix(&p, &m)), Err(Error::DegenerateKernel(4)));
    }

    #[test]
    fn propagation_rejects_bad_input() {
        let (p, m) = setup(0.01, 0.01, 0.01, 0.93, 0.0);
        let l = build_matrix(&p, &m);
        assert!(propagate(&l, &LogicalVector::even_cat(), -1.0).is_err());
        let bad = LogicalVector::new([C::new(2.0, 0.0), C::zero(), C::zero(), C::zero()]);
        assert!(propagate(&l, &bad, 1.0).is_err());
        let v = propagate(&l, &LogicalVector::even_cat(), 0.0).unwrap();
        assert_eq!(v, LogicalVector::even_cat());
    }

    #[test]
    fn exponential_and_eigen_paths_agree() {
        let (p, m) = setup(0.02, 0.013, 0.05, 0.6, 0.7);
        let l = build_matrix(&p, &m);
        let prop = Propagator::new(&l);
        assert!(!prop.uses_exponential());
        let v0 = LogicalVector::pure(C::new(1.0, 0.0), C::new(0.3, 0.4));
        for t in [0.5, 5.0, 60.0] {
            let a = prop.at(&v0, t).unwrap();
            let e = expm(&CMat::from_array4(&l.m).scale(C::new(t, 0.0))).unwrap().matvec(&v0.v);
            for k in 0..4 {
                assert!((a.v[k] - e[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_root_branch_is_principal_and_accurate() {
        let z = C::new(-3.0, 4.0);
        let w = complex_cbrt(z);
        assert!((w * w * w - z).norm() < 1e-14);
        assert_eq!(complex_cbrt(C::new(-8.0, 0.0)), C::new(-2.0, 0.0));
    }
}
