use num_complex::Complex;

use super::CMat;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(T) -> T) -> CMat<T> {
        let n = self.values.len();
        let mut out = CMat::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)].scale(w);
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `max(1e-12, 64 ε)·‖H‖_F`. Inputs whose Hermiticity defect exceeds
/// `1e-8·max(1, max|H|)` are rejected.
pub fn hermitian_eigendecomposition<T: Real>(h: &CMat<T>) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(h.rows(), h.cols()));
    }
    let n = h.rows();
    let defect = h.hermiticity_defect();
    if defect > T::lit(1e-8) * T::one().max(h.max_abs()) {
        return Err(Error::NotHermitian(defect.to_f64_lossy()));
    }
    let mut a = h.hermitian_part();
    let mut v = CMat::identity(n);
    let total = a.norm_fro();
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * total;
    let off = |a: &CMat<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > tol {
        sweeps += 1;
        if sweeps > 100 {
            return Err(Error::NoConvergence { iterations: sweeps, residual: off(&a).to_f64_lossy() });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag.is_zero() || mag <= T::epsilon() * T::lit(1e-3) * total {
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());
                    continue;
                }
                let phase = apq.unscale(mag);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (T::lit(2.0) * mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // J = diag phase fix on q, then a real rotation:
                // J_pp = c, J_pq = s, J_qp = -s e^{-iφ}, J_qq = c e^{-iφ}
                let jpp = Complex::new(c, T::zero());
                let jpq = Complex::new(s, T::zero());
                let jqp = -phase.conj().scale(s);
                let jqq = phase.conj().scale(c);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_and_diagonal() {
        let e = hermitian_eigendecomposition(&CMat::<f64>::identity(4)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let d = CMat::from_fn(3, 3, |i, j| if i == j { c([3.0, 1.0, 2.0][i], 0.0) } else { c(0.0, 0.0) });
        let e = hermitian_eigendecomposition(&d).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let h = CMat::from_vec(2, 2, vec![c(1., 0.), c(0., 1.), c(0., -1.), c(1., 0.)]);
        let e = hermitian_eigendecomposition(&h).unwrap();
        assert!(e.values[0].abs() < 1e-15 && (e.values[1] - 2.0).abs() < 1e-15);
        let r = e.map(|x| x);
        assert!(r.sub(&h).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = CMat::from_vec(2, 2, vec![c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(hermitian_eigendecomposition(&h), Err(Error::NotHermitian(_))));
    }
}
