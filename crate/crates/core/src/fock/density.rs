use num_complex::Complex;
use num_traits::Zero;

use super::states::CatBasis;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigendecomposition, CMat};
use crate::logical::LogicalVector;
use crate::scalar::Real;

/// Largest allowed `|ρ − ρ†|` entry.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Largest allowed `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues down to `−POSITIVITY_FLOOR` count as roundoff.
pub const POSITIVITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    rho: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: CMat<T>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimensionMismatch(rho.rows(), rho.cols()));
        }
        let d = Self { rho };
        d.check()?;
        Ok(d)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn from_pure(psi: &[Complex<T>]) -> Result<Self> {
        Self::new(CMat::outer(psi, psi))
    }

    pub fn check(&self) -> Result<()> {
        let herm = self.rho.hermiticity_defect();
        if herm > T::lit(HERMITICITY_TOL) {
            return Err(Error::NotHermitian(herm.to_f64_lossy()));
        }
        let tr = self.rho.trace();
        if (tr.re - T::one()).abs().max(tr.im.abs()) > T::lit(TRACE_TOL) {
            return Err(Error::Invariant(format!("trace {} differs from 1", tr.re.to_f64_lossy())));
        }
        if !self.is_positive(T::lit(POSITIVITY_FLOOR)) {
            return Err(Error::Invariant(format!("eigenvalue below -{POSITIVITY_FLOOR:e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.rho
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.rho
    }

    pub fn trace(&self) -> Complex<T> {
        self.rho.trace()
    }

    /// `Tr(Oρ)`.
    pub fn expectation(&self, op: &CMat<T>) -> Complex<T> {
        let n = self.dim();
        let mut s = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for k in 0..n {
                s = s + op[(i, k)] * self.rho[(k, i)];
            }
        }
        s
    }

    /// True when `ρ + floor·𝟙` admits a Cholesky factorization, i.e. every
    /// eigenvalue exceeds `−floor`.
    pub fn is_positive(&self, floor: T) -> bool {
        let n = self.dim();
        let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
        for j in 0..n {
            let mut d = self.rho[(j, j)].re + floor;
            for k in 0..j {
                d = d - l[j * n + k].norm_sqr();
            }
            if !(d > T::zero()) {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex::new(d, T::zero());
            for i in j + 1..n {
                let mut s = self.rho[(i, j)];
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s.unscale(d);
            }
        }
        true
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(hermitian_eigendecomposition(&self.rho)?.values[0])
    }
}

/// Negative eigenvalues down to the positivity floor, and positive ones at
/// roundoff level relative to the largest, are set to zero; their square
/// roots would otherwise add `O(√ε)` to fidelities.
fn clamp_spectrum<T: Real>(values: &[T]) -> Result<Vec<T>> {
    let top = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let noise = T::lit(4.0) * T::from_usize_lossy(values.len()) * T::epsilon() * top;
    values
        .iter()
        .map(|&v| {
            if v > noise {
                Ok(v)
            } else if v >= -T::lit(POSITIVITY_FLOOR) {
                Ok(T::zero())
            } else {
                Err(Error::Invariant(format!("eigenvalue {:e} below the positivity floor", v.to_f64_lossy())))
            }
        })
        .collect()
}

fn psd_sqrt<T: Real>(m: &CMat<T>) -> Result<CMat<T>> {
    let e = hermitian_eigendecomposition(&m.hermitian_part())?;
    let clamped = clamp_spectrum(&e.values)?;
    let cut = clamped.iter().zip(&e.values).filter(|(c, _)| c.is_zero()).fold(T::zero(), |m, (_, v)| m.max(*v));
    Ok(e.map(|v| if v <= cut { T::zero() } else { v.sqrt() }))
}

/// Sum of square roots of the clamped eigenvalues of a PSD matrix.
fn trace_sqrt<T: Real>(m: &CMat<T>) -> Result<T> {
    let e = hermitian_eigendecomposition(&m.hermitian_part())?;
    Ok(clamp_spectrum(&e.values)?.into_iter().map(|v| v.sqrt()).sum())
}

/// Uhlmann fidelity `(Tr√(√ρ₁ ρ₂ √ρ₁))²`, clamped to `[0, 1]`.
pub fn fidelity<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    let s = psd_sqrt(rho1.matrix())?;
    let t = trace_sqrt(&s.matmul(rho2.matrix()).matmul(&s))?;
    Ok((t * t).max(T::zero()).min(T::one()))
}

/// Fidelity between a Fock-space state and the embedding of a logical
/// state, reduced to 2×2 algebra: with `U = [C⁺, C⁻]` orthonormal and
/// `ρ_L = U V U†`, `F = (Tr√(√V U†ρU √V))²`.
pub fn fidelity_with_logical<T: Real>(rho: &DensityMatrix<T>, v: &LogicalVector<T>, basis: &CatBasis<T>) -> Result<T> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), basis.dim()));
    }
    let sv = psd_sqrt(&v.to_matrix())?;
    let n = rho.dim();
    let m = rho.matrix();
    let mut proj = CMat::zeros(2, 2);
    for j in 0..2 {
        let cj = basis.get(j);
        for k in 0..2 {
            let ck = basis.get(k);
            let mut s = Complex::new(T::zero(), T::zero());
            for r in 0..n {
                if cj[r].is_zero() {
                    continue;
                }
                let mut row = Complex::new(T::zero(), T::zero());
                for c in 0..n {
                    row = row + m[(r, c)] * ck[c];
                }
                s = s + cj[r].conj() * row;
            }
            proj[(j, k)] = s;
        }
    }
    let t = trace_sqrt(&sv.matmul(&proj).matmul(&sv))?;
    Ok((t * t).max(T::zero()).min(T::one()))
}

/// `ρ_L = Σ_{jk} V_{jk} |C^j_α⟩⟨C^k_α|`.
pub fn embed_logical<T: Real>(v: &LogicalVector<T>, alpha: Complex<T>, dim: usize) -> Result<DensityMatrix<T>> {
    let basis = CatBasis::new(alpha, dim)?;
    let mut rho = CMat::zeros(dim, dim);
    for j in 0..2 {
        for k in 0..2 {
            let w = v.v[2 * j + k];
            rho = rho.add(&CMat::outer(basis.get(j), basis.get(k)).scale(w));
        }
    }
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_state(n: usize, k: usize) -> Vec<Complex<f64>> {
        (0..n).map(|i| Complex::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn orthogonal_and_identical_states() {
        let a = DensityMatrix::from_pure(&basis_state(3, 0)).unwrap();
        let b = DensityMatrix::from_pure(&basis_state(3, 1)).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_unphysical_input() {
        let c = |x: f64| Complex::new(x, 0.0);
        let bad = CMat::from_vec(2, 2, vec![c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(bad).is_err());
        let skew = CMat::from_vec(2, 2, vec![c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(matches!(DensityMatrix::new(skew), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn logical_fast_path_matches_general_fidelity() {
        let alpha = Complex::new(1.2f64, 0.3);
        let basis = CatBasis::new(alpha, 24).unwrap();
        let v = LogicalVector::pure(Complex::new(0.8, 0.1), Complex::new(0.3, -0.4));
        let rho_l = embed_logical(&v, alpha, 24).unwrap();
        let mixed = LogicalVector::maximally_mixed();
        let rho_m = embed_logical(&mixed, alpha, 24).unwrap();
        let f_general = fidelity(&rho_m, &rho_l).unwrap();
        let f_fast = fidelity_with_logical(&rho_m, &v, &basis).unwrap();
        assert!((f_general - 0.5).abs() < 1e-10, "{f_general} {f_fast}");
        assert!((f_fast - f_general).abs() < 1e-10);
    }
}
