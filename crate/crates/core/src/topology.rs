//! The resultant vector `(R₁, R₂)` of the reduced characteristic cubic and
//! its winding number along closed loops in the `(ε, Δ)` plane.
//!
//! With `E₂, E₃, E₄` the nonzero eigenvalues,
//! `R₁ = −(E₂−E₃)²(E₂−E₄)²(E₃−E₄)²` vanishes at second-order coalescences
//! and `R₂ = −8(E₂+E₃−2E₄)(E₂+E₄−2E₃)(E₃+E₄−2E₂)` vanishes together with it
//! only at a triple point. In terms of the cubic invariants these are
//! `R₁ = 108(q² + m³)` and `R₂ = 432q`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::logical::{closed_form_spectrum, cubic_invariants_at, Spectrum};
use crate::params::{derive_cat_manifold, CatManifold, SystemParams};
use crate::scalar::Real;

/// Evaluation budget for one winding number computation.
pub const MAX_WINDING_EVALUATIONS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultantPair<T> {
    pub r1: T,
    pub r2: T,
    /// Largest imaginary part dropped when forming `r1`, `r2`.
    pub imag_residual: T,
}

impl<T: Real> ResultantPair<T> {
    pub fn norm(&self) -> T {
        self.r1.hypot(self.r2)
    }

    /// `arg(R₁ + iR₂)`.
    pub fn angle(&self) -> T {
        self.r2.atan2(self.r1)
    }

    /// From the invariants of the depressed cubic `y³ + 3my − 2q`.
    pub fn from_invariants(q: T, m: T) -> Self {
        Self { r1: T::lit(108.0) * (q * q + m * m * m), r2: T::lit(432.0) * q, imag_residual: T::zero() }
    }
}

/// Resultant pair from the three nonzero eigenvalues of a spectrum.
pub fn resultants<T: Real>(spectrum: &Spectrum<T>) -> ResultantPair<T> {
    let [_, e2, e3, e4] = spectrum.e;
    let two = T::lit(2.0);
    let sq = |z: Complex<T>| z * z;
    let r1 = -(sq(e2 - e3) * sq(e2 - e4) * sq(e3 - e4));
    let r2 = (e2 + e3 - e4.scale(two)) * (e2 + e4 - e3.scale(two)) * (e3 + e4 - e2.scale(two)) * Complex::new(-T::lit(8.0), T::zero());
    ResultantPair { r1: r1.re, r2: r2.re, imag_residual: r1.im.abs().max(r2.im.abs()) }
}

/// Resultant pair at a parameter point.
///
/// Evaluated through `R₁ = 108(q² + m³)`, `R₂ = 432q`, which equals
/// [`resultants`] of the closed-form spectrum but avoids the cube roots and
/// keeps full relative accuracy next to exceptional points.
pub fn resultants_at<T: Real>(params: &SystemParams<T>) -> Result<ResultantPair<T>> {
    let field = ResultantField::new(params)?;
    Ok(field.eval(params.eps(), params.delta()))
}

/// The resultant pair as a function on the `(ε, Δ)` plane, with every other
/// parameter held fixed.
///
/// The spectrum depends on `ε` only through `ε²` (a sign flip of the drive is
/// a unitary change of frame), so negative `ε` is evaluated at `|ε|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultantField<T> {
    base: SystemParams<T>,
    manifold: CatManifold<T>,
}

impl<T: Real> ResultantField<T> {
    pub fn new(base: &SystemParams<T>) -> Result<Self> {
        Ok(Self { base: *base, manifold: derive_cat_manifold(base)? })
    }

    pub fn base(&self) -> &SystemParams<T> {
        &self.base
    }

    pub fn manifold(&self) -> &CatManifold<T> {
        &self.manifold
    }

    /// `(q, m)` at `(ε, Δ)`.
    pub fn invariants(&self, eps: T, delta: T) -> (T, T) {
        cubic_invariants_at(&self.manifold, self.base.kappa(), eps.abs(), delta, self.base.theta())
    }

    pub fn eval(&self, eps: T, delta: T) -> ResultantPair<T> {
        let (q, m) = self.invariants(eps, delta);
        ResultantPair::from_invariants(q, m)
    }

    pub fn params_at(&self, eps: T, delta: T) -> Result<SystemParams<T>> {
        self.base.with_eps(eps.abs())?.with_delta(delta)
    }

    pub fn spectrum_at(&self, eps: T, delta: T) -> Result<Spectrum<T>> {
        Ok(closed_form_spectrum(&self.params_at(eps, delta)?, &self.manifold))
    }

    /// Magnitude of the nonzero eigenvalues' common offset, `(2/3)κ|α|²p₂⁺`,
    /// or `|α|²` when `κ = 0`.
    pub fn eigenvalue_scale(&self) -> T {
        let s = T::lit(2.0) / T::lit(3.0) * self.base.kappa() * self.manifold.alpha_sq() * self.manifold.p_comb.plus[0];
        if s > T::zero() {
            s
        } else {
            self.manifold.alpha_sq()
        }
    }
}

/// A closed elliptical loop `ε = c_ε + r_ε cos φ`, `Δ = c_Δ + r_Δ sin φ`,
/// traversed counterclockwise unless `clockwise` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec<T> {
    pub center: (T, T),
    pub radii: (T, T),
    pub samples: usize,
    pub clockwise: bool,
}

impl<T: Real> LoopSpec<T> {
    pub fn new(center: (T, T), radii: (T, T), samples: usize) -> Result<Self> {
        let spec = Self { center, radii, samples, clockwise: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn reversed(mut self) -> Self {
        self.clockwise = !self.clockwise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radii.0 > T::zero() && self.radii.1 > T::zero()) || !self.radii.0.is_finite() || !self.radii.1.is_finite() {
            return Err(Error::invalid("radii", "must be positive and finite"));
        }
        if !self.center.0.is_finite() || !self.center.1.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        if self.samples < 16 {
            return Err(Error::invalid("samples", "must be at least 16"));
        }
        Ok(())
    }

    /// `(ε, Δ)` at loop parameter `φ`.
    pub fn point(&self, phi: T) -> (T, T) {
        let phi = if self.clockwise { -phi } else { phi };
        (self.center.0 + self.radii.0 * phi.cos(), self.center.1 + self.radii.1 * phi.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Uniform sampling resolved every angle increment.
    Exact,
    /// Some intervals needed local bisection.
    Refined,
}

impl Confidence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Confidence::Exact => "exact",
            Confidence::Refined => "refined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding<T> {
    pub w: i64,
    /// Total number of resultant evaluations.
    pub samples_used: usize,
    /// `min ‖R‖ / max ‖R‖` over every evaluated point.
    pub min_r_norm: T,
    pub confidence: Confidence,
}

struct WindingPass<T> {
    total: T,
    refined: bool,
    min_norm: T,
    max_norm: T,
}

fn wrap_angle<T: Real>(d: T) -> T {
    let pi = T::PI();
    let tau = T::TAU();
    let mut d = d - tau * (d / tau).round();
    if d <= -pi {
        d = d + tau;
    } else if d > pi {
        d = d - tau;
    }
    d
}

fn winding_pass<T: Real>(
    spec: &LoopSpec<T>,
    field: &ResultantField<T>,
    n: usize,
    evals: &mut usize,
) -> Result<WindingPass<T>> {
    let tau = T::TAU();
    let eval = |phi: T, evals: &mut usize| -> Result<ResultantPair<T>> {
        *evals += 1;
        if *evals > MAX_WINDING_EVALUATIONS {
            return Err(Error::Winding(format!("exceeded {MAX_WINDING_EVALUATIONS} evaluations")));
        }
        let (e, d) = spec.point(phi);
        Ok(field.eval(e, d))
    };
    let half_pi = T::FRAC_PI_2();
    let mut pass = WindingPass { total: T::zero(), refined: false, min_norm: T::infinity(), max_norm: T::zero() };
    let first = eval(T::zero(), evals)?;
    let mut prev = (T::zero(), first);
    pass.min_norm = first.norm();
    pass.max_norm = first.norm();
    for i in 1..=n {
        let phi = if i == n { tau } else { tau * T::from_usize_lossy(i) / T::from_usize_lossy(n) };
        let cur = if i == n { first } else { eval(phi, evals)? };
        let mut stack = vec![(prev, (phi, cur), 0u32)];
        while let Some(((pa, ra), (pb, rb), depth)) = stack.pop() {
            pass.min_norm = pass.min_norm.min(rb.norm());
            pass.max_norm = pass.max_norm.max(rb.norm());
            let d = wrap_angle(rb.angle() - ra.angle());
            if d.abs() <= half_pi {
                pass.total = pass.total + d;
                continue;
            }
            if depth >= 64 || (pb - pa) <= T::epsilon() * T::lit(8.0) * tau {
                return Err(Error::Winding("angle jump unresolved at machine resolution; the loop passes through a zero of R".into()));
            }
            pass.refined = true;
            let pm = (pa + pb) / T::lit(2.0);
            let rm = eval(pm, evals)?;
            // Process the left half first.
            stack.push(((pm, rm), (pb, rb), depth + 1));
            stack.push(((pa, ra), (pm, rm), depth + 1));
        }
        prev = (phi, cur);
    }
    Ok(pass)
}

/// Winding number of `R₁ + iR₂` around the origin along the loop.
///
/// Angle increments between consecutive samples are unwrapped; any
/// increment larger than π/2 is bisected until resolved, and the sample
/// count is doubled until two consecutive passes agree on the integer.
pub fn winding_number<T: Real>(spec: &LoopSpec<T>, field: &ResultantField<T>) -> Result<Winding<T>> {
    spec.validate()?;
    let mut evals = 0usize;
    let mut n = spec.samples;
    let mut previous: Option<i64> = None;
    let mut refined = false;
    let mut min_ratio = T::infinity();
    loop {
        let pass = winding_pass(spec, field, n, &mut evals)?;
        if pass.max_norm.is_zero() {
            return Err(Error::Winding("resultant vanishes identically on the loop".into()));
        }
        let ratio = pass.min_norm / pass.max_norm;
        min_ratio = min_ratio.min(ratio);
        if ratio < T::lit(1e-12) {
            return Err(Error::Winding(format!(
                "|R| drops to {:e} of its loop maximum; the loop grazes an exceptional point",
                ratio.to_f64_lossy()
            )));
        }
        refined |= pass.refined;
        let turns = pass.total / T::TAU();
        let w = turns.round();
        let resid = (turns - w).abs();
        let w = w.to_i64().unwrap_or(0);
        if previous == Some(w) && resid < T::lit(0.05) {
            return Ok(Winding {
                w,
                samples_used: evals,
                min_r_norm: min_ratio,
                confidence: if refined { Confidence::Refined } else { Confidence::Exact },
            });
        }
        previous = Some(w);
        n *= 2;
        if n > MAX_WINDING_EVALUATIONS {
            return Err(Error::Winding("sample doubling did not settle".into()));
        }
    }
}

/// A point of the normalized resultant trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint<T> {
    pub phi: T,
    pub n1: T,
    pub n2: T,
}

/// `(φ, R₁/‖R‖, R₂/‖R‖)` at `samples + 1` uniform points including both
/// ends of the loop.
pub fn trajectory<T: Real>(spec: &LoopSpec<T>, field: &ResultantField<T>) -> Result<Vec<TrajectoryPoint<T>>> {
    spec.validate()?;
    let n = spec.samples;
    let raw: Vec<(T, ResultantPair<T>)> = (0..=n)
        .map(|i| {
            let phi = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            let (e, d) = spec.point(phi);
            (phi, field.eval(e, d))
        })
        .collect();
    let max = raw.iter().fold(T::zero(), |m, (_, r)| m.max(r.norm()));
    let min = raw.iter().fold(T::infinity(), |m, (_, r)| m.min(r.norm()));
    if max.is_zero() || min / max < T::lit(1e-12) {
        return Err(Error::Winding("loop grazes a zero of the resultant vector".into()));
    }
    Ok(raw
        .into_iter()
        .map(|(phi, r)| {
            let n = r.norm();
            TrajectoryPoint { phi, n1: r.r1 / n, n2: r.r2 / n }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logical::closed_form_spectrum;
    use crate::params::derive_cat_manifold;

    fn spec_of(e: [f64; 3]) -> Spectrum<f64> {
        let c = |x: f64| Complex::new(x, 0.0);
        Spectrum { e: [c(0.0), c(e[0]), c(e[1]), c(e[2])], eta_plus: c(0.0), eta_minus: c(0.0), q: 0.0, m_coef: 0.0 }
    }

    #[test]
    fn eigenvalue_form_examples() {
        let r = resultants(&spec_of([-1.0, -1.0, -1.0]));
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
        let r = resultants(&spec_of([-1.0, -2.0, -3.0]));
        assert_eq!((r.r1, r.r2), (-4.0, 0.0));
        let r = resultants(&spec_of([-1.0, -2.0, -4.0]));
        assert_eq!((r.r1, r.r2), (-36.0, -160.0));
    }

    #[test]
    fn invariant_form_matches_eigenvalue_form() {
        let p = SystemParams::<f64>::normalized(0.03, 0.02, 0.05, 0.8, 2.0).unwrap();
        let m = derive_cat_manifold(&p).unwrap();
        let s = closed_form_spectrum(&p, &m);
        let a = resultants(&s);
        let b = resultants_at(&p).unwrap();
        assert!((a.r1 - b.r1).abs() <= 1e-10 * b.r1.abs());
        assert!((a.r2 - b.r2).abs() <= 1e-10 * b.r2.abs());
        assert!(a.imag_residual <= 1e-8 * a.r1.abs().max(a.r2.abs()));
    }

    #[test]
    fn hermitian_limit_is_degenerate() {
        let p = SystemParams::normalized(0.0, 0.0, 0.0, 0.93, 0.0).unwrap();
        let r = resultants_at(&p).unwrap();
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
    }

    #[test]
    fn loop_validation() {
        assert!(LoopSpec::new((0.0, 0.0), (0.0, 1.0), 64).is_err());
        assert!(LoopSpec::new((0.0, 0.0), (1.0, 1.0), 8).is_err());
        assert!(LoopSpec::new((0.0, 0.0), (1.0, 1.0), 16).is_ok());
    }

    #[test]
    fn small_loop_off_the_zero_set_has_no_winding() {
        let p = SystemParams::normalized(6.48e-3, 0.0, 0.0, 0.93, 1.5 * std::f64::consts::PI).unwrap();
        let field = ResultantField::new(&p).unwrap();
        let spec = LoopSpec::new((3e-3, 0.01), (1e-6, 1e-6), 64).unwrap();
        let w = winding_number(&spec, &field).unwrap();
        assert_eq!(w.w, 0);
        assert_eq!(w.confidence, Confidence::Exact);
    }

    #[test]
    fn angle_wrapping() {
        let pi = std::f64::consts::PI;
        assert!((wrap_angle(1.5 * pi) + 0.5 * pi).abs() < 1e-15);
        assert!((wrap_angle(-1.5 * pi) - 0.5 * pi).abs() < 1e-15);
        assert_eq!(wrap_angle(pi), pi);
    }
}
