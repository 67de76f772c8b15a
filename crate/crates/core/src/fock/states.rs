use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{norm2, CMat};
use crate::params::SystemParams;
use crate::scalar::Real;

/// Largest coherent-state population allowed beyond the truncation.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Levels kept above the coherent-state cutoff.
pub const GUARD_LEVELS: usize = 10;

/// Dense operator on the first `dim` Fock levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T> {
    pub dim: usize,
    pub m: CMat<T>,
}

impl<T: Real> FockOperator<T> {
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, m: self.m.adjoint() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self { dim: self.dim, m: self.m.matmul(&other.m) }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::invalid("dim", "must be at least 2"));
    }
    Ok(())
}

pub fn annihilation<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    check_dim(dim)?;
    let m = CMat::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex::new(T::from_usize_lossy(j).sqrt(), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(FockOperator { dim, m })
}

/// `a†a`.
pub fn number<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    check_dim(dim)?;
    let m = CMat::from_fn(dim, dim, |i, j| {
        Complex::new(if i == j { T::from_usize_lossy(i) } else { T::zero() }, T::zero())
    });
    Ok(FockOperator { dim, m })
}

/// `exp(iπ a†a)`.
pub fn parity<T: Real>(dim: usize) -> Result<FockOperator<T>> {
    check_dim(dim)?;
    let m = CMat::from_fn(dim, dim, |i, j| {
        let v = if i != j {
            T::zero()
        } else if i % 2 == 0 {
            T::one()
        } else {
            -T::one()
        };
        Complex::new(v, T::zero())
    });
    Ok(FockOperator { dim, m })
}

/// `Δa†a + ε₂a†² + ε₂*a² + ε(a + a†)`.
pub fn hamiltonian<T: Real>(params: &SystemParams<T>, dim: usize) -> Result<FockOperator<T>> {
    let a = annihilation::<T>(dim)?;
    let ad = a.adjoint();
    let e2 = params.eps2();
    let re = |x: T| Complex::new(x, T::zero());
    let n = ad.m.matmul(&a.m);
    let a2 = a.m.matmul(&a.m);
    let ad2 = ad.m.matmul(&ad.m);
    let m = n
        .scale(re(params.delta()))
        .add(&ad2.scale(e2))
        .add(&a2.scale(e2.conj()))
        .add(&a.m.add(&ad.m).scale(re(params.eps())));
    Ok(FockOperator { dim, m })
}

/// Population of `|α⟩` on levels `n ≥ dim`.
pub fn coherent_tail<T: Real>(alpha_mag: T, dim: usize) -> T {
    let x = alpha_mag * alpha_mag;
    // Poisson weights from n = 0 in log space, then summed from `dim` on.
    let mut log_w = -x;
    let log_x = if x > T::zero() { x.ln() } else { T::neg_infinity() };
    for n in 1..=dim {
        log_w = log_w + log_x - T::from_usize_lossy(n).ln();
    }
    if dim == 0 {
        return T::one();
    }
    let mut tail = T::zero();
    let mut n = dim;
    loop {
        let w = log_w.exp();
        tail = tail + w;
        if w <= tail * T::epsilon() || w.is_zero() || n > dim + 10_000 {
            break;
        }
        n += 1;
        log_w = log_w + log_x - T::from_usize_lossy(n).ln();
    }
    tail
}

/// Smallest dimension whose coherent-state tail is below
/// [`TAIL_TOLERANCE`], plus [`GUARD_LEVELS`].
pub fn truncation_dim<T: Real>(alpha_mag: T) -> usize {
    let mut n = 1;
    while coherent_tail(alpha_mag, n) >= T::lit(TAIL_TOLERANCE) {
        n += 1;
    }
    n + GUARD_LEVELS
}

fn check_tail<T: Real>(alpha_mag: T, dim: usize) -> Result<()> {
    check_dim(dim)?;
    let tail = coherent_tail(alpha_mag, dim);
    if tail >= T::lit(TAIL_TOLERANCE) {
        return Err(Error::Truncation { dim, tail: tail.to_f64_lossy() });
    }
    Ok(())
}

fn coherent_amplitudes<T: Real>(alpha: Complex<T>, dim: usize) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(dim);
    let mut c = Complex::new((-alpha.norm_sqr() / T::lit(2.0)).exp(), T::zero());
    for n in 0..dim {
        out.push(c);
        c = c * alpha.unscale(T::from_usize_lossy(n + 1).sqrt());
    }
    out
}

fn normalized<T: Real>(mut v: Vec<Complex<T>>) -> Result<Vec<Complex<T>>> {
    let n = norm2(&v);
    if !(n > T::zero()) {
        return Err(Error::DegenerateManifold);
    }
    v.iter_mut().for_each(|c| *c = c.unscale(n));
    Ok(v)
}

/// `|α⟩` truncated to `dim` levels and renormalized.
pub fn coherent_state<T: Real>(alpha: Complex<T>, dim: usize) -> Result<Vec<Complex<T>>> {
    check_tail(alpha.norm(), dim)?;
    normalized(coherent_amplitudes(alpha, dim))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// `|C^±_α⟩ ∝ |α⟩ ± |−α⟩`, built from the even or odd Fock components.
pub fn cat_state<T: Real>(alpha: Complex<T>, parity: Parity, dim: usize) -> Result<Vec<Complex<T>>> {
    check_tail(alpha.norm(), dim)?;
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let v = coherent_amplitudes(alpha, dim)
        .into_iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == keep { c } else { Complex::new(T::zero(), T::zero()) })
        .collect();
    normalized(v)
}

/// The pair `(|C⁺_α⟩, |C⁻_α⟩)` in a fixed truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct CatBasis<T> {
    pub alpha: Complex<T>,
    pub plus: Vec<Complex<T>>,
    pub minus: Vec<Complex<T>>,
}

impl<T: Real> CatBasis<T> {
    pub fn new(alpha: Complex<T>, dim: usize) -> Result<Self> {
        Ok(Self { alpha, plus: cat_state(alpha, Parity::Even, dim)?, minus: cat_state(alpha, Parity::Odd, dim)? })
    }

    pub fn dim(&self) -> usize {
        self.plus.len()
    }

    /// Basis vector `|C^j⟩` with `j = 0` for `+` and `1` for `−`.
    pub fn get(&self, j: usize) -> &[Complex<T>] {
        if j == 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    #[test]
    fn vacuum_and_tail() {
        let v = coherent_state(Complex::new(0.0f64, 0.0), 4).unwrap();
        assert_eq!(v[0], Complex::new(1.0, 0.0));
        assert!(v[1..].iter().all(|c| c.norm() == 0.0));
        assert!(matches!(coherent_state(Complex::new(3.0f64, 0.0), 8), Err(Error::Truncation { .. })));
        assert_eq!(truncation_dim(0.0f64), 11);
    }

    #[test]
    fn tail_matches_direct_sum() {
        let x: f64 = 1.86;
        let mut w = (-x).exp();
        let mut head = 0.0;
        for n in 0..10 {
            head += w;
            w *= x / (n + 1) as f64;
        }
        assert!((coherent_tail(x.sqrt(), 10) - (1.0 - head)).abs() < 1e-15);
    }

    #[test]
    fn cat_pair_is_orthonormal() {
        let alpha = Complex::new(1.3638181696985856f64, 0.0);
        let b = CatBasis::new(alpha, 27).unwrap();
        assert!((norm2(&b.plus) - 1.0).abs() < 1e-15);
        assert!(dot(&b.plus, &b.minus).norm() < 1e-15);
    }

    #[test]
    fn parity_operator() {
        let p = parity::<f64>(3).unwrap();
        assert_eq!(p.m[(1, 1)].re, -1.0);
        assert_eq!(p.m[(2, 2)].re, 1.0);
    }
}
