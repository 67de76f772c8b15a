//! Small dense complex linear algebra.
//!
//! Everything here works on row-major [`CMat`] and is generic over the
//! scalar type, so the same code runs in `f64` and in double-double.

mod expm;
mod jacobi;
mod poly;

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use expm::expm;
pub use jacobi::{hermitian_eigendecomposition, HermitianEigen};
pub use poly::{aberth_roots, charpoly4};

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_array4(a: &[[Complex<T>; 4]; 4]) -> Self {
        Self::from_fn(4, 4, |i, j| a[i][j])
    }

    /// Rank-one matrix `u v†`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(Complex::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| *v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Maximum column sum norm.
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |s, i| s + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn norm_fro(&self) -> T {
        self.data.iter().fold(T::zero(), |s, v| s + v.norm_sqr()).sqrt()
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut d = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(half))
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Inner product `⟨u, v⟩ = Σ conj(u_i) v_i`.
pub fn dot<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter().zip(v).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
}

pub fn norm2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt()
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: CMat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &CMat<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(a.rows(), a.cols()));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (piv, pmax) =
                (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -T::one()), |b, c| if c.1 > b.1 { c } else { b });
            if !(pmax > T::epsilon() * T::lit(1e-3) * scale) || pmax.is_zero() {
                return Err(Error::Singular);
            }
            if piv != k {
                perm.swap(piv, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.rows();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMat<T> {
        let n = self.lu.rows();
        let mut inv = CMat::zeros(n, n);
        let mut e = vec![Complex::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex::zero());
            e[j] = Complex::new(T::one(), T::zero());
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// 1-norm condition number; infinite for singular matrices.
pub fn condition_number<T: Real>(a: &CMat<T>) -> T {
    match Lu::new(a) {
        Ok(lu) => a.norm1() * lu.inverse().norm1(),
        Err(_) => T::infinity(),
    }
}

/// Result of a rank-revealing elimination.
#[derive(Debug, Clone)]
pub struct NullSpace<T> {
    /// Orthonormal basis of the numerical kernel.
    pub basis: Vec<Vec<Complex<T>>>,
    /// Magnitudes of the pivots in elimination order.
    pub pivots: Vec<T>,
}

/// Numerical kernel of a square matrix by Gaussian elimination with
/// complete pivoting. Pivots below `tol * max|a|` end the elimination; the
/// remaining columns span the kernel. When `min_dim` exceeds the detected
/// kernel dimension, the smallest pivots are treated as zero anyway, which
/// is what eigenvector extraction from an inexact eigenvalue needs.
pub fn null_space<T: Real>(a: &CMat<T>, tol: T, min_dim: usize) -> NullSpace<T> {
    let n = a.rows();
    assert!(a.is_square());
    let mut m = a.clone();
    let mut colperm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs();
    let mut pivots = Vec::with_capacity(n);
    let mut rank = 0;
    let max_rank = n.saturating_sub(min_dim);
    for k in 0..n {
        let mut best = (k, k, -T::one());
        for i in k..n {
            for j in k..n {
                let v = m[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (pi, pj, pv) = best;
        if k >= max_rank || !(pv > tol * scale) || pv.is_zero() {
            break;
        }
        pivots.push(pv);
        if pi != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(pi, j)];
                m[(pi, j)] = t;
            }
        }
        if pj != k {
            colperm.swap(pj, k);
            for i in 0..n {
                let t = m[(i, k)];
                m[(i, k)] = m[(i, pj)];
                m[(i, pj)] = t;
            }
        }
        let d = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / d;
            m[(i, k)] = Complex::zero();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let u = m[(k, j)];
                m[(i, j)] = m[(i, j)] - f * u;
            }
        }
        rank += 1;
    }
    // Back substitution for each free column: U[:r,:r] y = -U[:r, free].
    let mut basis = Vec::with_capacity(n - rank);
    for free in rank..n {
        let mut y = vec![Complex::zero(); n];
        y[free] = Complex::new(T::one(), T::zero());
        for i in (0..rank).rev() {
            let mut s = -m[(i, free)];
            for j in i + 1..rank {
                s = s - m[(i, j)] * y[j];
            }
            y[i] = s / m[(i, i)];
        }
        let mut v = vec![Complex::zero(); n];
        for (k, &c) in colperm.iter().enumerate() {
            v[c] = y[k];
        }
        basis.push(v);
    }
    gram_schmidt(&mut basis);
    NullSpace { basis, pivots }
}

/// Orthonormalizes in place (modified Gram-Schmidt, applied twice).
pub fn gram_schmidt<T: Real>(vs: &mut [Vec<Complex<T>>]) {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let c = dot(&vs[j], &vs[i]);
                let (head, tail) = vs.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x = *x - c * *y;
                }
            }
        }
        let nrm = norm2(&vs[i]);
        if nrm > T::zero() {
            vs[i].iter_mut().for_each(|x| *x = x.unscale(nrm));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn lu_solves_and_inverts() {
        let a = CMat::from_vec(3, 3, vec![c(2., 1.), c(1., 0.), c(0., 0.), c(1., 0.), c(3., 0.), c(1., -1.), c(0., 0.), c(1., 1.), c(4., 0.)]);
        let lu = Lu::new(&a).unwrap();
        let b = vec![c(1., 0.), c(0., 2.), c(-1., 1.)];
        let x = lu.solve(&b);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-14);
        }
        let id = a.matmul(&lu.inverse());
        assert!(id.sub(&CMat::identity(3)).max_abs() < 1e-14);
        assert!(condition_number(&a) < 10.0);
    }

    #[test]
    fn singular_matrix_is_detected() {
        let a = CMat::from_vec(2, 2, vec![c(1., 0.), c(2., 0.), c(2., 0.), c(4., 0.)]);
        assert!(Lu::new(&a).is_err());
        assert!(condition_number(&a).is_infinite());
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let a = CMat::from_vec(3, 3, vec![c(1., 0.), c(2., 0.), c(3., 0.), c(2., 0.), c(4., 0.), c(6., 0.), c(0., 1.), c(1., 0.), c(0., 0.)]);
        let ns = null_space(&a, 1e-12, 0);
        assert_eq!(ns.basis.len(), 1);
        let r = a.matvec(&ns.basis[0]);
        assert!(norm2(&r) < 1e-14);
        let z = CMat::<f64>::zeros(4, 4);
        assert_eq!(null_space(&z, 1e-12, 0).basis.len(), 4);
        let id = CMat::<f64>::identity(3);
        assert_eq!(null_space(&id, 1e-12, 0).basis.len(), 0);
        assert_eq!(null_space(&id, 1e-12, 1).basis.len(), 1);
    }
}
