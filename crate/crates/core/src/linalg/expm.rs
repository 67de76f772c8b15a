use num_complex::Complex;

use super::{CMat, Lu};
use crate::error::Result;
use crate::scalar::Real;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the degree-13 Padé approximant meets double
/// precision without scaling.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant. Valid for defective matrices.
pub fn expm<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    let n = a.rows();
    let norm = a.norm1();
    let s = if norm.to_f64_lossy() > THETA13 {
        (norm.to_f64_lossy() / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a.scale(Complex::new(T::lit(2.0).powi(-s), T::zero()));
    let id = CMat::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = |k: usize| Complex::new(T::lit(PADE13[k]), T::zero());
    let u_inner = a6.scale(b(13)).add(&a4.scale(b(11))).add(&a2.scale(b(9)));
    let u = a.matmul(
        &a6.matmul(&u_inner)
            .add(&a6.scale(b(7)))
            .add(&a4.scale(b(5)))
            .add(&a2.scale(b(3)))
            .add(&id.scale(b(1))),
    );
    let v_inner = a6.scale(b(12)).add(&a4.scale(b(10))).add(&a2.scale(b(8)));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(b(6)))
        .add(&a4.scale(b(4)))
        .add(&a2.scale(b(2)))
        .add(&id.scale(b(0)));
    let p = v.add(&u);
    let q = v.sub(&u);
    let lu = Lu::new(&q)?;
    let mut r = CMat::zeros(n, n);
    for j in 0..n {
        let col = lu.solve(&p.column(j));
        for i in 0..n {
            r[(i, j)] = col[i];
        }
    }
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_of_diagonal_and_nilpotent() {
        let c = |x: f64| Complex::new(x, 0.0);
        let d = CMat::from_vec(2, 2, vec![c(1.0), c(0.0), c(0.0), c(-30.0)]);
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-30f64).exp()).abs() < 1e-25);
        // Jordan block: exp([[λ,1],[0,λ]]) = e^λ [[1,1],[0,1]]
        let j = CMat::from_vec(2, 2, vec![c(-2.0), c(1.0), c(0.0), c(-2.0)]);
        let e = expm(&j).unwrap();
        let el = (-2f64).exp();
        assert!((e[(0, 1)].re - el).abs() < 1e-15);
        assert!((e[(0, 0)].re - el).abs() < 1e-15);
        assert!(e[(1, 0)].norm() < 1e-16);
    }

    #[test]
    fn rotation_generator() {
        let t: f64 = 7.5;
        let g = CMat::from_vec(2, 2, vec![Complex::new(0.0, 0.0), Complex::new(-t, 0.0), Complex::new(t, 0.0), Complex::new(0.0, 0.0)]);
        let e = expm(&g).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-13);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-13);
    }
}
