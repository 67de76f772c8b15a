use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::CMat;
use crate::scalar::Real;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Real> Csr<T> {
    /// Assembles from coordinate triplets; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut trip: Vec<(usize, usize, Complex<T>)>) -> Self {
        trip.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut vals: Vec<Complex<T>> = Vec::with_capacity(trip.len());
        let mut rows = Vec::with_capacity(trip.len());
        for (r, c, v) in trip {
            assert!(r < n_rows && c < n_cols, "triplet ({r}, {c}) out of bounds");
            if rows.last() == Some(&r) && col_idx.last() == Some(&c) {
                let last = vals.len() - 1;
                vals[last] = vals[last] + v;
            } else {
                rows.push(r);
                col_idx.push(c);
                vals.push(v);
            }
        }
        let keep: Vec<bool> = vals.iter().map(|v| !v.is_zero()).collect();
        let mut ci = Vec::new();
        let mut vs = Vec::new();
        for k in 0..vals.len() {
            if keep[k] {
                row_ptr[rows[k] + 1] += 1;
                ci.push(col_idx[k]);
                vs.push(vals[k]);
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { n_rows, n_cols, row_ptr, col_idx: ci, vals: vs }
    }

    pub fn rows(&self) -> usize {
        self.n_rows
    }

    pub fn cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(column, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[Complex<T>], out: &mut [Complex<T>]) {
        assert_eq!(x.len(), self.n_cols);
        for (o, w) in out.iter_mut().zip(self.row_ptr.windows(2)) {
            let cols = &self.col_idx[w[0]..w[1]];
            let vals = &self.vals[w[0]..w[1]];
            let (mut re, mut im) = (T::zero(), T::zero());
            for (&c, v) in cols.iter().zip(vals) {
                let xv = x[c];
                re = re + v.re * xv.re - v.im * xv.im;
                im = im + v.re * xv.im + v.im * xv.re;
            }
            *o = Complex::new(re, im);
        }
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.n_rows];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest column sum of magnitudes.
    pub fn norm1(&self) -> T {
        let mut col = vec![T::zero(); self.n_cols];
        for (c, v) in self.col_idx.iter().zip(&self.vals) {
            col[*c] = col[*c] + v.norm();
        }
        col.into_iter().fold(T::zero(), T::max)
    }

    pub fn to_dense(&self) -> CMat<T> {
        let mut m = CMat::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Diagonal storage: `a[r][r + off]` for each stored offset. Efficient when
/// a matrix has few distinct diagonals, as Liouvillians of a single mode do.
#[derive(Debug, Clone, PartialEq)]
pub struct Dia<T> {
    n: usize,
    offsets: Vec<isize>,
    diags: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Dia<T> {
    /// Converts a square matrix with at most `max_diags` distinct diagonals.
    pub fn from_csr(m: &Csr<T>, max_diags: usize) -> Option<Self> {
        if m.rows() != m.cols() {
            return None;
        }
        let n = m.rows();
        let mut offsets: Vec<isize> = Vec::new();
        for r in 0..n {
            for (c, _) in m.row(r) {
                let off = c as isize - r as isize;
                if let Err(pos) = offsets.binary_search(&off) {
                    offsets.insert(pos, off);
                    if offsets.len() > max_diags {
                        return None;
                    }
                }
            }
        }
        let mut diags = vec![vec![Complex::new(T::zero(), T::zero()); n]; offsets.len()];
        for r in 0..n {
            for (c, v) in m.row(r) {
                let k = offsets.binary_search(&(c as isize - r as isize)).expect("offset recorded");
                diags[k][r] = v;
            }
        }
        Some(Self { n, offsets, diags })
    }

    pub fn matvec_into(&self, x: &[Complex<T>], out: &mut [Complex<T>]) {
        assert!(x.len() == self.n && out.len() == self.n);
        out.iter_mut().for_each(|o| *o = Complex::new(T::zero(), T::zero()));
        for (&off, d) in self.offsets.iter().zip(&self.diags) {
            let (r0, r1) = if off >= 0 { (0, self.n - off as usize) } else { ((-off) as usize, self.n) };
            let c0 = (r0 as isize + off) as usize;
            let xs = &x[c0..c0 + (r1 - r0)];
            for ((o, v), xv) in out[r0..r1].iter_mut().zip(&d[r0..r1]).zip(xs) {
                o.re = o.re + v.re * xv.re - v.im * xv.im;
                o.im = o.im + v.re * xv.im + v.im * xv.re;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let c = |x: f64| Complex::new(x, 0.0);
        let m = Csr::from_triplets(2, 2, vec![(1, 0, c(1.0)), (0, 1, c(2.0)), (1, 0, c(3.0)), (0, 0, c(1.0)), (0, 0, c(-1.0))]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.matvec(&[c(1.0), c(1.0)]), vec![c(2.0), c(4.0)]);
        assert_eq!(m.norm1(), 4.0);
        let d = Dia::from_csr(&m, 4).unwrap();
        let mut out = vec![c(0.0); 2];
        d.matvec_into(&[c(1.0), c(-2.0)], &mut out);
        assert_eq!(out, m.matvec(&[c(1.0), c(-2.0)]));
        assert!(Dia::from_csr(&m, 1).is_none());
    }
}
