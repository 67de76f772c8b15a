//! Analytic loci of second- and third-order exceptional points of the
//! projected Liouvillian, and their numerical refinement.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::CatManifold;
use crate::scalar::Real;
use crate::topology::ResultantField;

/// `𝒟_θ` at or below this is treated as a divergent locus.
pub const D_THETA_THRESHOLD: f64 = 1e-12;

/// Position of the third-order exceptional point in the `(|ε|, |Δ|)`
/// quadrant, in units of `κ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lep3Locus<T> {
    pub eps_abs: T,
    pub delta_abs: T,
    pub d_theta: T,
    pub exists: bool,
}

/// `1 − p²` without cancellation.
fn one_minus_p_sq<T: Real>(manifold: &CatManifold<T>) -> T {
    let two = T::lit(2.0);
    two / ((two * manifold.alpha_sq()).exp() + T::one())
}

/// `|Δ|` of the second-order point on the `ε = 0` axis, `κ/p₂⁻`.
pub fn lep2_zero_drive<T: Real>(kappa: T, manifold: &CatManifold<T>) -> Result<T> {
    let p2m = manifold.p_comb.minus[0].abs();
    if kappa.is_zero() {
        return Ok(T::zero());
    }
    if !(p2m > T::zero()) || !p2m.is_finite() {
        return Err(Error::Divergent("p₂⁻ = 0: no detuning separates the cat states".into()));
    }
    Ok(kappa / p2m)
}

/// Third-order exceptional point for squeezing phase `θ`.
///
/// `𝒟_θ = (1+p⁴)² + 4p⁴ − 4p²(1+p⁴)sin θ` is evaluated as
/// `(1−p²)⁴ + 4p²(1+p⁴)(1−sin θ)`, and likewise the numerator of `Δ²`, so
/// both stay accurate for `p → 1` and `θ → π/2`.
pub fn lep3_locus<T: Real>(manifold: &CatManifold<T>, theta: T, kappa: T) -> Lep3Locus<T> {
    let l = T::lit;
    let a = manifold.alpha_sq();
    let p2 = manifold.p_sq();
    let p4 = p2 * p2;
    let p8 = p4 * p4;
    let d = one_minus_p_sq(manifold);
    let half_angle = T::FRAC_PI_4() - theta / l(2.0);
    let one_minus_sin = l(2.0) * half_angle.sin() * half_angle.sin();
    let d_theta = d.powi(4) + l(4.0) * p2 * (T::one() + p4) * one_minus_sin;
    if d_theta <= l(D_THETA_THRESHOLD) {
        return Lep3Locus { eps_abs: T::infinity(), delta_abs: T::infinity(), d_theta, exists: false };
    }
    let k2 = kappa * kappa;
    let eps_sq = (T::one() + p4).powi(3) * k2 * a / (l(54.0) * p2 * d_theta);
    let cubic = p4 - l(6.0) * p2 + T::one();
    let num = d * d * cubic * cubic * cubic
        + l(4.0) * p2 * (T::one() + p4) * (l(5.0) + l(118.0) * p4 + l(5.0) * p8) * one_minus_sin;
    let one_minus_p4 = d * (T::one() + p2);
    let delta_sq = k2 * num / (l(108.0) * one_minus_p4 * one_minus_p4 * d_theta);
    let eps_abs = eps_sq.sqrt();
    if delta_sq < T::zero() {
        return Lep3Locus { eps_abs, delta_abs: T::zero(), d_theta, exists: false };
    }
    let delta_abs = delta_sq.sqrt();
    let exists = eps_abs.is_finite() && delta_abs.is_finite();
    Lep3Locus { eps_abs, delta_abs, d_theta, exists }
}

/// Closed-form LEP3 coordinates for `θ = 3π/2` (real cat amplitude).
pub fn lep3_real_alpha<T: Real>(manifold: &CatManifold<T>, kappa: T) -> Result<(T, T)> {
    let l = T::lit;
    let d = one_minus_p_sq(manifold);
    if !(d > T::zero()) {
        return Err(Error::Divergent("p = 1: the detuning coordinate is singular".into()));
    }
    let p = manifold.p;
    let p2 = manifold.p_sq();
    let p4 = p2 * p2;
    let s = (T::one() + p2) * (T::one() + p2);
    let eps = l(6.0).sqrt() * kappa * manifold.alpha_mag * (p4 + T::one()).powf(l(1.5)) / (l(18.0) * p * s);
    let delta = l(3.0).sqrt() * kappa * (p4 + l(6.0) * p2 + T::one()).powf(l(1.5)) / (l(18.0) * d * s);
    Ok((eps.abs(), delta.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lep3Refinement<T> {
    pub eps: T,
    pub delta: T,
    /// `max(|R₁|/S₁, |R₂|/S₂)`, with `S_i` the largest `|R_i|` on a ring of
    /// radius 0.4·(|ε|, |Δ|) around the point.
    pub residual: T,
    pub iterations: usize,
    /// The iteration ended in a different `(sign ε, sign Δ)` quadrant.
    pub sector_changed: bool,
}

pub const REFINE_MAX_ITERATIONS: usize = 100;

/// Newton refinement of a third-order exceptional point.
///
/// The common zero of `(R₁, R₂)` is the common zero of the cubic invariants
/// `(q, m)`, and Newton runs on `(q/E³, m/E²)` with `E` the eigenvalue
/// scale: `R₁ ∝ q² + m³` has a vanishing gradient at the solution, while
/// `(q, m)` is regular there. The Jacobian is a central difference with step
/// `1e-7` of the coordinate scale, and each step is halved until the
/// residual decreases.
pub fn refine_lep3<T: Real>(initial: (T, T), field: &ResultantField<T>) -> Result<Lep3Refinement<T>> {
    let l = T::lit;
    let es = field.eigenvalue_scale();
    let f = |e: T, d: T| {
        let (q, m) = field.invariants(e, d);
        [q / (es * es * es), m / (es * es)]
    };
    let inf_norm = |v: [T; 2]| v[0].abs().max(v[1].abs());
    let (mut x, mut y) = initial;
    let scale_x = x.abs().max(es);
    let scale_y = y.abs().max(es);
    let hx = l(1e-7) * scale_x;
    let hy = l(1e-7) * scale_y;
    let mut fx = f(x, y);
    let mut norm = inf_norm(fx);
    let tiny = T::epsilon() * l(64.0);
    let mut iterations = 0;
    while norm > tiny {
        if iterations >= REFINE_MAX_ITERATIONS {
            return Err(Error::NoConvergence { iterations, residual: norm.to_f64_lossy() });
        }
        iterations += 1;
        let fxp = f(x + hx, y);
        let fxm = f(x - hx, y);
        let fyp = f(x, y + hy);
        let fym = f(x, y - hy);
        let j = [
            [(fxp[0] - fxm[0]) / (l(2.0) * hx), (fyp[0] - fym[0]) / (l(2.0) * hy)],
            [(fxp[1] - fxm[1]) / (l(2.0) * hx), (fyp[1] - fym[1]) / (l(2.0) * hy)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.is_zero() || !det.is_finite() {
            return Err(Error::NoConvergence { iterations, residual: norm.to_f64_lossy() });
        }
        let dx = (j[1][1] * fx[0] - j[0][1] * fx[1]) / det;
        let dy = (j[0][0] * fx[1] - j[1][0] * fx[0]) / det;
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let (nx, ny) = (x - step * dx, y - step * dy);
            let nf = f(nx, ny);
            let nn = inf_norm(nf);
            if nn < norm {
                x = nx;
                y = ny;
                fx = nf;
                norm = nn;
                accepted = true;
                break;
            }
            step = step * l(0.5);
        }
        if !accepted {
            // No decrease: either converged to rounding level or stuck.
            let rel = (dx.abs() / scale_x).max(dy.abs() / scale_y);
            if rel <= l(1e3) * T::epsilon() {
                break;
            }
            return Err(Error::NoConvergence { iterations, residual: norm.to_f64_lossy() });
        }
        let rel = (step * dx).abs() / scale_x + (step * dy).abs() / scale_y;
        if rel <= T::epsilon() {
            break;
        }
    }
    let sign_differs = |a: T, b: T| !a.is_zero() && !b.is_zero() && (a > T::zero()) != (b > T::zero());
    let sector_changed = sign_differs(initial.0, x) || sign_differs(initial.1, y);
    Ok(Lep3Refinement { eps: x, delta: y, residual: resultant_residual(field, x, y), iterations, sector_changed })
}

/// `max(|R₁|/S₁, |R₂|/S₂)` at `(ε, Δ)`, with `S_i` the largest `|R_i|` over
/// 16 points on the ellipse of radii 0.4·(|ε|, |Δ|) around it.
pub fn resultant_residual<T: Real>(field: &ResultantField<T>, eps: T, delta: T) -> T {
    let l = T::lit;
    let rx = l(0.4) * eps.abs().max(field.eigenvalue_scale());
    let ry = l(0.4) * delta.abs().max(field.eigenvalue_scale());
    let (mut s1, mut s2) = (T::zero(), T::zero());
    for k in 0..16 {
        let phi = T::TAU() * T::from_usize_lossy(k) / l(16.0);
        let r = field.eval(eps + rx * phi.cos(), delta + ry * phi.sin());
        s1 = s1.max(r.r1.abs());
        s2 = s2.max(r.r2.abs());
    }
    let r = field.eval(eps, delta);
    let norm = |v: T, s: T| if s > T::zero() { v.abs() / s } else { v.abs() };
    norm(r.r1, s1).max(norm(r.r2, s2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Squeezing phase θ at fixed `|α₀|`.
    Theta,
    /// `|ε₂|/κ₂` at fixed `θ₀`.
    Eps2Ratio,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Theta => "theta",
            SweepVariable::Eps2Ratio => "eps2_ratio",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec<T> {
    pub variable: SweepVariable,
    pub start: T,
    pub end: T,
    pub count: usize,
}

/// Normalization point: the LEP3 at amplitude `|α₀|` and phase `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepReference<T> {
    pub alpha0_mag: T,
    pub theta0: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub value: T,
    pub eps_abs: T,
    pub delta_abs: T,
    pub eps_norm: T,
    pub delta_norm: T,
    pub exists: bool,
}

impl<T: Real> SweepSpec<T> {
    pub fn values(&self) -> Vec<T> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = T::from_usize_lossy(self.count - 1);
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.end } else { self.start + (self.end - self.start) * T::from_usize_lossy(i) / n })
            .collect()
    }
}

/// LEP3 coordinates along a sweep of `θ` or `|ε₂|/κ₂`, normalized to the
/// LEP3 at the reference point. `kappa` is `κ/κ₂`.
pub fn lep3_sweep<T: Real>(sweep: &SweepSpec<T>, reference: &SweepReference<T>, kappa: T) -> Result<Vec<SweepRow<T>>> {
    if sweep.count == 0 {
        return Err(Error::invalid("count", "must be positive"));
    }
    if !sweep.start.is_finite() || !sweep.end.is_finite() {
        return Err(Error::invalid("range", "must be finite"));
    }
    if !(kappa > T::zero()) {
        return Err(Error::invalid("kappa", "must be positive"));
    }
    let phase = |theta: T| T::lit(3.0) * T::FRAC_PI_4() - theta / T::lit(2.0);
    let ref_manifold = CatManifold::from_amplitude(reference.alpha0_mag, phase(reference.theta0))?;
    let r = lep3_locus(&ref_manifold, reference.theta0, kappa);
    if !r.exists {
        return Err(Error::invalid("reference", "no LEP3 at the reference point"));
    }
    if sweep.variable == SweepVariable::Eps2Ratio && !(sweep.start > T::zero() && sweep.end > T::zero()) {
        return Err(Error::invalid("range", "|ε₂|/κ₂ must be positive"));
    }
    sweep
        .values()
        .into_par_iter()
        .map(|v| {
            let (alpha_mag, theta) = match sweep.variable {
                SweepVariable::Theta => (reference.alpha0_mag, v),
                SweepVariable::Eps2Ratio => ((T::lit(2.0) * v).sqrt(), reference.theta0),
            };
            let manifold = CatManifold::from_amplitude(alpha_mag, phase(theta))?;
            let loc = lep3_locus(&manifold, theta, kappa);
            Ok(SweepRow {
                value: v,
                eps_abs: loc.eps_abs,
                delta_abs: loc.delta_abs,
                eps_norm: loc.eps_abs / r.eps_abs,
                delta_norm: loc.delta_abs / r.delta_abs,
                exists: loc.exists,
            })
        })
        .collect()
}
