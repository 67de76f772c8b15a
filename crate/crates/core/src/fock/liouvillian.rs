use num_complex::Complex;
use num_traits::Zero;

use super::density::DensityMatrix;
use super::sparse::{Csr, Dia};
use super::states::{annihilation, hamiltonian, FockOperator};
use crate::error::{Error, Result};
use crate::linalg::{CMat, Lu};
use crate::params::SystemParams;
use crate::scalar::Real;

/// Vectorized Lindblad generator acting on row-major `vec(ρ)`, so that
/// `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullLiouvillian<T> {
    pub dim: usize,
    pub l: Csr<T>,
    pub params: SystemParams<T>,
    dia: Option<Dia<T>>,
}

type Triplets<T> = Vec<(usize, usize, Complex<T>)>;

fn nonzeros<T: Real>(m: &CMat<T>) -> Triplets<T> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m[(i, j)].is_zero() {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// Appends `s·(A ⊗ B)`.
fn push_kron<T: Real>(out: &mut Triplets<T>, a: &CMat<T>, b: &CMat<T>, s: Complex<T>) {
    let n = b.rows();
    let (na, nb) = (nonzeros(a), nonzeros(b));
    for &(i, k, x) in &na {
        for &(j, l, y) in &nb {
            out.push((i * n + j, k * n + l, s * x * y));
        }
    }
}

/// `−i(H⊗𝟙 − 𝟙⊗Hᵀ) + Σ_O [O⊗O* − ½O†O⊗𝟙 − ½𝟙⊗(OᵀO*)]` with
/// `O ∈ {√κ a, √κ₂ a²}`.
pub fn build_full_liouvillian<T: Real>(params: &SystemParams<T>, dim: usize) -> Result<FullLiouvillian<T>> {
    let h = hamiltonian(params, dim)?;
    let a: FockOperator<T> = annihilation(dim)?;
    let id = CMat::identity(dim);
    let one = Complex::new(T::one(), T::zero());
    let half = Complex::new(T::lit(0.5), T::zero());
    let mi = Complex::new(T::zero(), -T::one());
    let mut trip = Vec::new();
    push_kron(&mut trip, &h.m, &id, mi);
    push_kron(&mut trip, &id, &h.m.transpose(), -mi);
    let a2 = a.m.matmul(&a.m);
    for (op, rate) in [(a.m.clone(), params.kappa()), (a2, params.kappa2())] {
        if rate.is_zero() {
            continue;
        }
        let o = op.scale(Complex::new(rate.sqrt(), T::zero()));
        let oc = CMat::from_fn(dim, dim, |i, j| o[(i, j)].conj());
        let od_o = o.adjoint().matmul(&o);
        push_kron(&mut trip, &o, &oc, one);
        push_kron(&mut trip, &od_o, &id, -half);
        push_kron(&mut trip, &id, &od_o.transpose(), -half);
    }
    let n2 = dim * dim;
    let l = Csr::from_triplets(n2, n2, trip);
    let dia = Dia::from_csr(&l, 64);
    let full = FullLiouvillian { dim, l, params: *params, dia };
    full.check_trace_preserving()?;
    Ok(full)
}

impl<T: Real> FullLiouvillian<T> {
    /// Largest `|Σ_i L[(i,i), c]|` over columns `c`, which vanishes for a
    /// trace-preserving generator.
    pub fn trace_defect(&self) -> T {
        let n = self.dim;
        let mut col = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for (c, v) in self.l.row(i * n + i) {
                col[c] = col[c] + v;
            }
        }
        col.into_iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    fn check_trace_preserving(&self) -> Result<()> {
        let d = self.trace_defect();
        if d > T::lit(1e-10) * T::one().max(self.l.max_abs()) {
            return Err(Error::Invariant(format!("generator does not preserve the trace (defect {:e})", d.to_f64_lossy())));
        }
        Ok(())
    }

    /// `out = 𝓛 x` on vectorized states.
    pub fn apply_vec(&self, x: &[Complex<T>], out: &mut [Complex<T>]) {
        match &self.dia {
            Some(d) => d.matvec_into(x, out),
            None => self.l.matvec_into(x, out),
        }
    }

    pub fn apply(&self, rho: &CMat<T>) -> CMat<T> {
        CMat::from_vec(self.dim, self.dim, self.l.matvec(rho.as_slice()))
    }
}

/// Steady state from the bordered system: one balance equation is
/// replaced by `Tr ρ = 1` and the resulting dense system solved by LU.
pub fn steady_state_full<T: Real>(l: &FullLiouvillian<T>) -> Result<DensityMatrix<T>> {
    let n = l.dim;
    let mut m = l.l.to_dense();
    let zero = Complex::new(T::zero(), T::zero());
    for c in 0..n * n {
        m[(0, c)] = zero;
    }
    for i in 0..n {
        m[(0, i * n + i)] = Complex::new(T::one(), T::zero());
    }
    let mut rhs = vec![zero; n * n];
    rhs[0] = Complex::new(T::one(), T::zero());
    let x = Lu::new(&m)?.solve(&rhs);
    let resid = l.l.matvec(&x).iter().fold(T::zero(), |s, v| s + v.norm());
    let scale = T::one().max(l.l.norm1());
    if resid > T::lit(1e-10) * scale {
        return Err(Error::NoConvergence { iterations: 1, residual: resid.to_f64_lossy() });
    }
    let rho = CMat::from_vec(n, n, x).hermitian_part();
    let tr = rho.trace().re;
    DensityMatrix::new(rho.scale(Complex::new(tr.recip(), T::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_photon_loss_alone_fixes_vacuum_and_one_photon() {
        let p = SystemParams::<f64>::normalized(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let l = build_full_liouvillian(&p, 5).unwrap();
        for k in 0..2 {
            let rho = CMat::from_fn(5, 5, |i, j| Complex::new(if i == k && j == k { 1.0 } else { 0.0 }, 0.0));
            assert_eq!(l.apply(&rho).max_abs(), 0.0);
        }
        let rho = CMat::from_fn(5, 5, |i, j| Complex::new(if i == 2 && j == 2 { 1.0 } else { 0.0 }, 0.0));
        assert!((l.apply(&rho)[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kron_index_convention() {
        // vec(AρB) = (A ⊗ Bᵀ) vec ρ for a small example.
        let c = |x: f64| Complex::new(x, 0.0);
        let a = CMat::from_vec(2, 2, vec![c(1.), c(2.), c(3.), c(4.)]);
        let b = CMat::from_vec(2, 2, vec![c(0.), c(1.), c(5.), c(2.)]);
        let rho = CMat::from_vec(2, 2, vec![c(1.), c(-1.), c(2.), c(0.5)]);
        let mut t = Vec::new();
        push_kron(&mut t, &a, &b.transpose(), c(1.0));
        let k = Csr::from_triplets(4, 4, t);
        let lhs = a.matmul(&rho).matmul(&b);
        assert_eq!(k.matvec(rho.as_slice()), lhs.as_slice().to_vec());
    }
}
