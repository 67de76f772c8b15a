use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

type C<T> = Complex<T>;

fn det2<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    a * d - b * c
}

fn det3<T: Real>(m: &[[C<T>; 4]; 4], r: [usize; 3], c: [usize; 3]) -> C<T> {
    let e = |i: usize, j: usize| m[r[i]][c[j]];
    e(0, 0) * det2(e(1, 1), e(1, 2), e(2, 1), e(2, 2)) - e(0, 1) * det2(e(1, 0), e(1, 2), e(2, 0), e(2, 2))
        + e(0, 2) * det2(e(1, 0), e(1, 1), e(2, 0), e(2, 1))
}

fn det4<T: Real>(m: &[[C<T>; 4]; 4]) -> C<T> {
    let mut acc = C::zero();
    for j in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != j).collect();
        let minor = det3(m, [1, 2, 3], [cols[0], cols[1], cols[2]]);
        let term = m[0][j] * minor;
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Coefficients `[c₀, c₁, c₂, c₃, 1]` of `det(λI - M) = λ⁴ + c₃λ³ + c₂λ² + c₁λ + c₀`,
/// from sums of principal minors expanded by cofactors.
pub fn charpoly4<T: Real>(m: &[[C<T>; 4]; 4]) -> [C<T>; 5] {
    let tr = (0..4).fold(C::zero(), |s, i| s + m[i][i]);
    let mut s2 = C::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            s2 = s2 + det2(m[i][i], m[i][j], m[j][i], m[j][j]);
        }
    }
    let mut s3 = C::zero();
    for skip in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
        let ix = [idx[0], idx[1], idx[2]];
        s3 = s3 + det3(m, ix, ix);
    }
    let d = det4(m);
    [d, -s3, s2, -tr, C::new(T::one(), T::zero())]
}

/// All roots of the polynomial `Σ coeffs[k] zᵏ` by the Aberth-Ehrlich
/// simultaneous iteration. The leading coefficient must be nonzero.
pub fn aberth_roots<T: Real>(coeffs: &[C<T>]) -> Vec<C<T>> {
    let n = coeffs.len() - 1;
    assert!(n >= 1 && !coeffs[n].is_zero(), "leading coefficient must be nonzero");
    let lead = coeffs[n];
    let a: Vec<C<T>> = coeffs.iter().map(|c| *c / lead).collect();
    if n == 1 {
        return vec![-a[0]];
    }
    // Fujiwara bound on the root moduli.
    let mut bound = T::zero();
    for k in 0..n {
        let v = a[k].norm().powf(T::one() / T::from_usize_lossy(n - k));
        let v = if k == 0 { v * T::lit(0.5f64.powf(1.0 / n as f64)) } else { v };
        bound = bound.max(v);
    }
    let bound = T::lit(2.0) * bound;
    if bound.is_zero() {
        return vec![C::zero(); n];
    }
    let offset = T::lit(0.4);
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let ang = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n) + offset;
            C::from_polar(bound * T::lit(0.5), ang)
        })
        .collect();
    let eval = |x: C<T>| {
        let mut p = a[n];
        let mut dp = C::zero();
        for k in (0..n).rev() {
            dp = dp * x + p;
            p = p * x + a[k];
        }
        (p, dp)
    };
    let tiny = T::epsilon() * T::lit(4.0);
    for _ in 0..500 {
        let mut max_rel = T::zero();
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = C::zero();
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if !d.is_zero() {
                        s = s + d.inv();
                    }
                }
            }
            let w = ratio / (C::new(T::one(), T::zero()) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = z[i] - w;
            let rel = w.norm() / z[i].norm().max(bound * tiny);
            max_rel = max_rel.max(rel);
        }
        if max_rel <= tiny {
            break;
        }
    }
    z
}
