//! Physical parameters of the driven-dissipative oscillator and the cat
//! manifold they stabilize.
//!
//! All rates are dimensionless, measured in units of the two-photon loss
//! rate. `kappa2` is kept explicit so that inputs given in absolute units
//! can be represented before normalization.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{reduce_angle, Real};

/// Drive, loss and detuning parameters of the master equation.
///
/// The Hamiltonian in the frame of the single-photon drive is
/// `H = Δ a†a + ε₂ a†² + ε₂* a² + ε (a + a†)` with `ε₂ = |ε₂| e^{-iθ}`;
/// dissipation is `κ D[a] + κ₂ D[a²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    kappa: T,
    kappa2: T,
    eps: T,
    delta: T,
    eps2_mag: T,
    theta: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(kappa: T, kappa2: T, eps: T, delta: T, eps2_mag: T, theta: T) -> Result<Self> {
        check_finite("kappa", kappa)?;
        check_finite("kappa2", kappa2)?;
        check_finite("eps", eps)?;
        check_finite("delta", delta)?;
        check_finite("eps2_mag", eps2_mag)?;
        check_finite("theta", theta)?;
        if kappa < T::zero() {
            return Err(Error::invalid("kappa", "must be >= 0"));
        }
        if kappa2 <= T::zero() {
            return Err(Error::invalid("kappa2", "must be > 0"));
        }
        if eps < T::zero() {
            return Err(Error::invalid("eps", "must be >= 0"));
        }
        if eps2_mag < T::zero() {
            return Err(Error::invalid("eps2_mag", "must be >= 0"));
        }
        Ok(Self { kappa, kappa2, eps, delta, eps2_mag, theta: reduce_angle(theta) })
    }

    /// Normalized parameters (`kappa2 = 1`).
    pub fn normalized(kappa: T, eps: T, delta: T, eps2_mag: T, theta: T) -> Result<Self> {
        Self::new(kappa, T::one(), eps, delta, eps2_mag, theta)
    }

    /// Builds normalized parameters from rates and drives given in the
    /// same absolute unit (for example Hz or rad/s), dividing through by
    /// `kappa2`.
    pub fn from_absolute(kappa: T, kappa2: T, eps: T, delta: T, eps2_mag: T, theta: T) -> Result<Self> {
        if !(kappa2 > T::zero()) {
            return Err(Error::invalid("kappa2", "must be > 0"));
        }
        Self::normalized(kappa / kappa2, eps / kappa2, delta / kappa2, eps2_mag / kappa2, theta)
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }
    pub fn kappa2(&self) -> T {
        self.kappa2
    }
    pub fn eps(&self) -> T {
        self.eps
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn eps2_mag(&self) -> T {
        self.eps2_mag
    }
    pub fn theta(&self) -> T {
        self.theta
    }

    /// Complex two-photon drive `ε₂ = |ε₂| e^{-iθ}`.
    pub fn eps2(&self) -> Complex<T> {
        Complex::from_polar(self.eps2_mag, -self.theta)
    }

    pub fn with_eps(self, eps: T) -> Result<Self> {
        Self::new(self.kappa, self.kappa2, eps, self.delta, self.eps2_mag, self.theta)
    }
    pub fn with_delta(self, delta: T) -> Result<Self> {
        Self::new(self.kappa, self.kappa2, self.eps, delta, self.eps2_mag, self.theta)
    }
    pub fn with_kappa(self, kappa: T) -> Result<Self> {
        Self::new(kappa, self.kappa2, self.eps, self.delta, self.eps2_mag, self.theta)
    }
    pub fn with_theta(self, theta: T) -> Result<Self> {
        Self::new(self.kappa, self.kappa2, self.eps, self.delta, self.eps2_mag, theta)
    }
    pub fn with_eps2_mag(self, eps2_mag: T) -> Result<Self> {
        Self::new(self.kappa, self.kappa2, self.eps, self.delta, eps2_mag, self.theta)
    }

    /// Converts every field to another scalar type.
    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: T| U::from_f64(x.to_f64_lossy()).unwrap_or_else(U::nan);
        SystemParams {
            kappa: c(self.kappa),
            kappa2: c(self.kappa2),
            eps: c(self.eps),
            delta: c(self.delta),
            eps2_mag: c(self.eps2_mag),
            theta: c(self.theta),
        }
    }
}

fn check_finite<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite"))
    }
}

/// Sign selector for `p_j^± = p^{-j} ± p^{j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PSign {
    Plus,
    Minus,
}

/// The combinations `p_j^±` for `j = 2, 4, 6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PCombinations<T> {
    pub plus: [T; 3],
    pub minus: [T; 3],
}

impl<T: Real> PCombinations<T> {
    /// `p_j^±` for `j ∈ {2, 4, 6}`.
    pub fn get(&self, j: u32, sign: PSign) -> T {
        let idx = match j {
            2 => 0,
            4 => 1,
            6 => 2,
            _ => panic!("p_j tabulated for j = 2, 4, 6 only"),
        };
        match sign {
            PSign::Plus => self.plus[idx],
            PSign::Minus => self.minus[idx],
        }
    }
}

/// Cat amplitude and the normalization ratio `p` derived from the drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatManifold<T> {
    pub alpha: Complex<T>,
    pub alpha_mag: T,
    pub phi_alpha: T,
    /// `p = N⁺/N⁻`, with `p² = tanh|α|²`.
    pub p: T,
    pub p_comb: PCombinations<T>,
}

impl<T: Real> CatManifold<T> {
    /// Manifold with amplitude `|α|` and phase `φ_α`, computing `p` and the
    /// combinations from `x = |α|²` in a form that stays accurate as `p → 1`.
    pub fn from_amplitude(alpha_mag: T, phi_alpha: T) -> Result<Self> {
        if !(alpha_mag > T::zero()) || !alpha_mag.is_finite() {
            return Err(Error::DegenerateManifold);
        }
        let two = T::lit(2.0);
        let x = alpha_mag * alpha_mag;
        let p = x.tanh().sqrt();
        // p₂⁻ = 2/sinh 2x and p₂⁺ = 2 coth 2x avoid the cancellation in p⁻² − p².
        let p2m = two / (two * x).sinh();
        let p2p = two / (two * x).tanh();
        let p4p = p2p * p2p - two;
        let p4m = p2m * p2p;
        let p6p = p2p * p2p * p2p - T::lit(3.0) * p2p;
        let p6m = p2m * (p4p + T::one());
        Ok(Self {
            alpha: Complex::from_polar(alpha_mag, phi_alpha),
            alpha_mag,
            phi_alpha,
            p,
            p_comb: PCombinations { plus: [p2p, p4p, p6p], minus: [p2m, p4m, p6m] },
        })
    }

    /// `|α|²`.
    pub fn alpha_sq(&self) -> T {
        self.alpha_mag * self.alpha_mag
    }

    /// `p²`, computed without squaring the rounded `p`.
    pub fn p_sq(&self) -> T {
        self.alpha_sq().tanh()
    }

    /// The same manifold with `p` replaced by `1/p`. This swaps the roles of
    /// the two cat states in the projected operators and flips the sign of
    /// every `p_j^-`. Used to check that the spectrum does not depend on the
    /// orientation convention.
    pub fn with_reciprocal_p(&self) -> Self {
        let mut out = *self;
        out.p = self.p.recip();
        out.p_comb.minus = self.p_comb.minus.map(|v| -v);
        out
    }

    /// `p²` as used by the projected operators; equals `1/tanh|α|²` after
    /// [`with_reciprocal_p`](Self::with_reciprocal_p).
    pub(crate) fn p_sq_effective(&self) -> T {
        if self.p > T::one() {
            self.alpha_sq().tanh().recip()
        } else {
            self.p_sq()
        }
    }
}

/// Derives the cat manifold stabilized by the two-photon drive and loss.
pub fn derive_cat_manifold<T: Real>(params: &SystemParams<T>) -> Result<CatManifold<T>> {
    if params.eps2_mag <= T::zero() {
        return Err(Error::DegenerateManifold);
    }
    let alpha_mag = (T::lit(2.0) * params.eps2_mag / params.kappa2).sqrt();
    let phi = T::lit(3.0) * T::FRAC_PI_4() - params.theta / T::lit(2.0);
    CatManifold::from_amplitude(alpha_mag, phi)
}

/// `p^{-j} ± p^{j}` for `0 < p ≤ 1`.
pub fn p_combination<T: Real>(p: T, j: u32, sign: PSign) -> Result<T> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::invalid("p", "must lie in (0, 1]"));
    }
    if j == 0 {
        return Err(Error::invalid("j", "must be positive"));
    }
    let pj = p.powi(j as i32);
    Ok(match sign {
        PSign::Plus => pj.recip() + pj,
        PSign::Minus => pj.recip() - pj,
    })
}

/// Confinement rate `4|α|²κ₂`.
pub fn confinement_rate<T: Real>(params: &SystemParams<T>, manifold: &CatManifold<T>) -> T {
    T::lit(4.0) * manifold.alpha_sq() * params.kappa2
}

/// Effective two-photon drive and loss obtained by eliminating a strongly
/// damped buffer mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticMap<T> {
    pub eps2: Complex<T>,
    pub kappa2: T,
    /// Whether `κ_b ≥ 8 g₂ |α|`, the regime where the elimination holds.
    pub regime_ok: bool,
}

/// Maps buffer coupling `g₂`, buffer drive `ε_d` and buffer loss `κ_b` to
/// `ε₂ = -2i g₂ ε_d / κ_b` and `κ₂ = 4 g₂² / κ_b`.
pub fn adiabatic_elimination<T: Real>(
    g2: T,
    eps_d: Complex<T>,
    kappa_b: T,
    alpha_mag_hint: T,
) -> Result<AdiabaticMap<T>> {
    if !(g2 > T::zero()) || !g2.is_finite() {
        return Err(Error::invalid("g2", "must be > 0"));
    }
    if !(kappa_b > T::zero()) || !kappa_b.is_finite() {
        return Err(Error::invalid("kappa_b", "must be > 0"));
    }
    let two = T::lit(2.0);
    let eps2 = Complex::new(T::zero(), -two * g2 / kappa_b) * eps_d;
    let kappa2 = T::lit(4.0) * g2 * g2 / kappa_b;
    let regime_ok = kappa_b >= T::lit(8.0) * g2 * alpha_mag_hint;
    Ok(AdiabaticMap { eps2, kappa2, regime_ok })
}

/// Axis-aligned box of normalized parameters for randomized checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBox {
    pub kappa: (f64, f64),
    pub eps: (f64, f64),
    pub delta: (f64, f64),
    pub eps2_mag: (f64, f64),
    pub theta: (f64, f64),
}

impl Default for ParamBox {
    /// `κ ∈ [1e-3, 0.1]`, `ε ∈ [0, 0.1]`, `Δ ∈ [−0.2, 0.2]`,
    /// `|ε₂| ∈ [0.2, 2]`, `θ ∈ [0, 2π)`.
    fn default() -> Self {
        Self {
            kappa: (1e-3, 0.1),
            eps: (0.0, 0.1),
            delta: (-0.2, 0.2),
            eps2_mag: (0.2, 2.0),
            theta: (0.0, std::f64::consts::TAU),
        }
    }
}

impl ParamBox {
    /// Maps five uniforms in `[0, 1)` to a parameter point.
    pub fn sample<T: Real>(&self, u: [f64; 5]) -> Result<SystemParams<T>> {
        let at = |r: (f64, f64), x: f64| T::lit(r.0 + (r.1 - r.0) * x);
        SystemParams::normalized(
            at(self.kappa, u[0]),
            at(self.eps, u[1]),
            at(self.delta, u[2]),
            at(self.eps2_mag, u[3]),
            at(self.theta, u[4]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(eps2: f64, theta: f64) -> SystemParams<f64> {
        SystemParams::normalized(6.48e-3, 0.0, 0.0, eps2, theta).unwrap()
    }

    #[test]
    fn reference_manifold_is_real_at_three_half_pi() {
        let m = derive_cat_manifold(&params(0.93, 1.5 * PI)).unwrap();
        assert!((m.alpha_mag - 1.3638181696985856).abs() < 1e-15);
        assert!(m.phi_alpha.abs() < 1e-15);
        assert!(m.alpha.im.abs() < 1e-15);
        assert!((m.p - 0.9760526848941493).abs() < 1e-15);
    }

    #[test]
    fn quarter_phase_gives_imaginary_alpha() {
        let m = derive_cat_manifold(&params(0.4, 0.5 * PI)).unwrap();
        assert!((m.phi_alpha - 0.5 * PI).abs() < 1e-15);
        assert!(m.alpha.re.abs() < 1e-15);
    }

    #[test]
    fn zero_drive_is_rejected() {
        assert_eq!(derive_cat_manifold(&params(0.0, 0.0)), Err(Error::DegenerateManifold));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SystemParams::normalized(-1.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(SystemParams::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(SystemParams::normalized(0.0, -0.1, 0.0, 1.0, 0.0).is_err());
        assert!(SystemParams::normalized(0.0, 0.0, f64::NAN, 1.0, 0.0).is_err());
        let p = SystemParams::normalized(0.0, 0.0, 0.0, 1.0, 7.0).unwrap();
        assert!((p.theta() - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn stable_combinations_match_direct_arithmetic() {
        let m = derive_cat_manifold(&params(0.93, 0.0)).unwrap();
        for (k, j) in [2u32, 4, 6].into_iter().enumerate() {
            let plus = p_combination(m.p, j, PSign::Plus).unwrap();
            let minus = p_combination(m.p, j, PSign::Minus).unwrap();
            assert!((m.p_comb.plus[k] - plus).abs() < 1e-13);
            assert!((m.p_comb.minus[k] - minus).abs() < 1e-13);
        }
        assert!((m.p_comb.get(2, PSign::Minus) - 0.09703).abs() < 5e-5);
    }

    #[test]
    fn p_combination_edge_values() {
        assert_eq!(p_combination(1.0, 2, PSign::Plus).unwrap(), 2.0);
        assert_eq!(p_combination(1.0, 2, PSign::Minus).unwrap(), 0.0);
        assert!(p_combination(1.5, 2, PSign::Plus).is_err());
        assert!(p_combination(0.0, 2, PSign::Plus).is_err());
    }

    #[test]
    fn confinement_rate_values() {
        let m = CatManifold::from_amplitude(1.0, 0.0).unwrap();
        let p = params(0.5, 0.0);
        assert!((confinement_rate(&p, &m) - 4.0).abs() < 1e-15);
        let m = derive_cat_manifold(&params(0.93, 0.0)).unwrap();
        assert!((confinement_rate(&p, &m) - 7.44).abs() < 1e-12);
    }

    #[test]
    fn adiabatic_elimination_examples() {
        let r = adiabatic_elimination(1.0, Complex::new(0.0, 0.0), 4.0, 0.0).unwrap();
        assert_eq!(r.eps2, Complex::new(0.0, 0.0));
        assert_eq!(r.kappa2, 1.0);
        let r = adiabatic_elimination(1.0, Complex::new(0.0, 1.0), 2.0, 1.0).unwrap();
        assert!((r.eps2 - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(r.kappa2, 2.0);
        assert!(!r.regime_ok);
        assert!(adiabatic_elimination(0.0, Complex::new(0.0, 0.0), 2.0, 1.0).is_err());
        assert!(adiabatic_elimination(1.0, Complex::new(0.0, 0.0), -2.0, 1.0).is_err());
    }

    #[test]
    fn absolute_units_are_normalized() {
        let two_pi = 2.0 * PI;
        let p = SystemParams::from_absolute(
            two_pi * 14e3,
            two_pi * 2.16e6,
            two_pi * 15e3,
            0.0,
            two_pi * 2e6,
            1.5 * PI,
        )
        .unwrap();
        assert!((p.kappa() - 6.4815e-3).abs() < 1e-6);
        assert!((p.eps2_mag() - 0.9259).abs() < 1e-4);
        assert_eq!(p.kappa2(), 1.0);
    }
}
