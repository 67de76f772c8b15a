use num_complex::Complex;

use super::density::DensityMatrix;
use super::liouvillian::FullLiouvillian;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::Real;

/// Re-Hermitization or trace corrections above this fail the run.
pub const MAX_OUTPUT_CORRECTION: f64 = 1e-7;

const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rel: T,
    pub abs: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self { rel: T::lit(1e-9), abs: T::lit(1e-12) }
    }
}

/// Corrections applied to one output before it was accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputCorrection<T> {
    pub t: T,
    /// `max |ρ − (ρ+ρ†)/2|` entry.
    pub hermiticity: T,
    /// `|Tr ρ − 1|`.
    pub trace: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution<T> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
    pub corrections: Vec<OutputCorrection<T>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

// Dormand–Prince 5(4) tableau.
const A: [&[f64]; 7] = [
    &[],
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
// Dense output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

type V<T> = Vec<Complex<T>>;

struct Stepper<'a, T> {
    l: &'a FullLiouvillian<T>,
    tol: Tolerances<T>,
    k: [V<T>; 7],
    tmp: V<T>,
    y_new: V<T>,
    err: V<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn new(l: &'a FullLiouvillian<T>, tol: Tolerances<T>, n: usize) -> Self {
        let z = vec![Complex::new(T::zero(), T::zero()); n];
        Self {
            l,
            tol,
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            y_new: z.clone(),
            err: z,
        }
    }

    fn scaled_norm(&self, y: &[Complex<T>], y2: &[Complex<T>], e: &[Complex<T>]) -> T {
        let n = T::from_usize_lossy(y.len());
        let s: T = y
            .iter()
            .zip(y2)
            .zip(e)
            .map(|((a, b), e)| {
                let sk = self.tol.abs + self.tol.rel * a.norm_sqr().max(b.norm_sqr()).sqrt();
                e.norm_sqr() / (sk * sk)
            })
            .sum();
        (s / n).sqrt()
    }

    /// One trial step of size `h` from `y`, with `k[0] = f(y)` already set.
    /// Leaves the candidate in `y_new`, `f(y_new)` in `k[6]`, and returns
    /// the scaled error estimate.
    fn trial(&mut self, y: &[Complex<T>], h: T) -> T {
        for s in 1..7 {
            self.tmp.copy_from_slice(y);
            for (j, &a) in A[s].iter().enumerate() {
                if a != 0.0 {
                    axpy(&mut self.tmp, h * T::lit(a), &self.k[j]);
                }
            }
            let (_, tail) = self.k.split_at_mut(s);
            self.l.apply_vec(&self.tmp, &mut tail[0]);
        }
        // The last stage is evaluated at the 5th-order solution itself.
        self.y_new.copy_from_slice(&self.tmp);
        self.err.iter_mut().for_each(|e| *e = Complex::new(T::zero(), T::zero()));
        for (j, &e) in E.iter().enumerate() {
            if e != 0.0 {
                axpy(&mut self.err, h * T::lit(e), &self.k[j]);
            }
        }
        self.scaled_norm(y, &self.y_new, &self.err)
    }

    /// Continuous extension on `[t, t+h]` at fraction `s`.
    fn dense(&self, y: &[Complex<T>], h: T, s: T, out: &mut [Complex<T>]) {
        let s1 = T::one() - s;
        let d: Vec<T> = D.iter().map(|&d| h * T::lit(d)).collect();
        for i in 0..y.len() {
            let r2 = self.y_new[i] - y[i];
            let r3 = self.k[0][i].scale(h) - r2;
            let r4 = r2 - self.k[6][i].scale(h) - r3;
            let mut r5 = Complex::new(T::zero(), T::zero());
            for (j, &dj) in d.iter().enumerate() {
                if j != 1 {
                    r5 = r5 + self.k[j][i].scale(dj);
                }
            }
            out[i] = y[i] + (r2 + (r3 + (r4 + r5.scale(s1)).scale(s)).scale(s1)).scale(s);
        }
    }
}

fn axpy<T: Real>(y: &mut [Complex<T>], a: T, x: &[Complex<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        yi.re = yi.re + a * xi.re;
        yi.im = yi.im + a * xi.im;
    }
}

fn accept_output<T: Real>(t: T, v: &[Complex<T>], dim: usize) -> Result<(DensityMatrix<T>, OutputCorrection<T>)> {
    let m = CMat::from_vec(dim, dim, v.to_vec());
    let herm = m.hermiticity_defect() / T::lit(2.0);
    let h = m.hermitian_part();
    let tr = h.trace().re;
    let tr_dev = (tr - T::one()).abs();
    let limit = T::lit(MAX_OUTPUT_CORRECTION);
    if herm > limit || tr_dev > limit || !tr.is_finite() {
        return Err(Error::Integration {
            t: t.to_f64_lossy(),
            reason: format!(
                "output correction too large (hermiticity {:e}, trace {:e})",
                herm.to_f64_lossy(),
                tr_dev.to_f64_lossy()
            ),
        });
    }
    let rho = DensityMatrix::new(h.scale(Complex::new(tr.recip(), T::zero())))
        .map_err(|e| Error::Integration { t: t.to_f64_lossy(), reason: e.to_string() })?;
    Ok((rho, OutputCorrection { t, hermiticity: herm, trace: tr_dev }))
}

/// Integrates `dρ/dt = 𝓛ρ` with the Dormand–Prince 5(4) pair, PI step
/// control and 5th-order dense output at the requested times.
///
/// Each output is Hermitized, renormalized to unit trace and validated as
/// a density matrix; corrections above [`MAX_OUTPUT_CORRECTION`] are
/// errors.
pub fn evolve<T: Real>(
    l: &FullLiouvillian<T>,
    rho0: &DensityMatrix<T>,
    t_grid: &[T],
    tol: Tolerances<T>,
) -> Result<Evolution<T>> {
    if rho0.dim() != l.dim {
        return Err(Error::DimensionMismatch(rho0.dim(), l.dim));
    }
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid", "empty"));
    }
    if t_grid[0] < T::zero() || t_grid.windows(2).any(|w| !(w[1] >= w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("t_grid", "must be finite, non-negative and ascending"));
    }
    if !(tol.rel > T::zero() && tol.abs > T::zero()) {
        return Err(Error::invalid("tolerances", "must be positive"));
    }
    let dim = l.dim;
    let n = dim * dim;
    let mut y: V<T> = rho0.matrix().as_slice().to_vec();
    let mut st = Stepper::new(l, tol, n);
    let mut out = Evolution {
        times: Vec::with_capacity(t_grid.len()),
        states: Vec::with_capacity(t_grid.len()),
        corrections: Vec::with_capacity(t_grid.len()),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut next = 0;
    let mut t = T::zero();
    while next < t_grid.len() && t_grid[next] <= t {
        out.times.push(t_grid[next]);
        out.states.push(rho0.clone());
        out.corrections.push(OutputCorrection { t: t_grid[next], hermiticity: T::zero(), trace: T::zero() });
        next += 1;
    }
    if next == t_grid.len() {
        return Ok(out);
    }
    let t_end = t_grid[t_grid.len() - 1];
    l.apply_vec(&y, &mut st.k[0]);
    let mut h = initial_step(&mut st, &y, t_end);
    let (beta, safe, fac_min, fac_max) = (T::lit(0.04), T::lit(0.9), T::lit(0.2), T::lit(10.0));
    let expo = T::lit(0.2) - beta * T::lit(0.75);
    let mut fac_old = T::lit(1e-4);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    let mut last_reject = false;
    loop {
        if out.accepted_steps + out.rejected_steps > MAX_STEPS {
            return Err(Error::Integration { t: t.to_f64_lossy(), reason: "step budget exhausted".into() });
        }
        if h < T::lit(16.0) * T::epsilon() * t.abs().max(T::min_positive_value()) {
            return Err(Error::StepUnderflow { t: t.to_f64_lossy() });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let err = st.trial(&y, h);
        if !err.is_finite() {
            out.rejected_steps += 1;
            h = h * fac_min;
            last_reject = true;
            continue;
        }
        let fac11 = err.powf(expo);
        if err <= T::one() {
            let t_new = if t + h >= t_end { t_end } else { t + h };
            while next < t_grid.len() && t_grid[next] <= t_new {
                let s = (t_grid[next] - t) / h;
                st.dense(&y, h, s, &mut buf);
                let (rho, c) = accept_output(t_grid[next], &buf, dim)?;
                out.times.push(t_grid[next]);
                out.states.push(rho);
                out.corrections.push(c);
                next += 1;
            }
            out.accepted_steps += 1;
            y.copy_from_slice(&st.y_new);
            let (k0, k6) = st.k.split_at_mut(6);
            k0[0].copy_from_slice(&k6[0]);
            t = t_new;
            if next == t_grid.len() {
                return Ok(out);
            }
            let fac = (fac11 / fac_old.powf(beta) / safe).max(fac_max.recip()).min(fac_min.recip());
            fac_old = err.max(T::lit(1e-4));
            let mut h_new = h / fac;
            if last_reject {
                h_new = h_new.min(h);
            }
            last_reject = false;
            h = h_new;
        } else {
            out.rejected_steps += 1;
            h = h / (fac11 / safe).min(fac_min.recip());
            last_reject = true;
        }
    }
}

fn initial_step<T: Real>(st: &mut Stepper<'_, T>, y: &[Complex<T>], t_end: T) -> T {
    let zero = vec![Complex::new(T::zero(), T::zero()); y.len()];
    let d0 = st.scaled_norm(y, y, y);
    let d1 = st.scaled_norm(y, y, &st.k[0]);
    let h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
    let h0 = h0.min(t_end);
    let y1: V<T> = y.iter().zip(&st.k[0]).map(|(a, k)| *a + k.scale(h0)).collect();
    let mut f1 = zero;
    st.l.apply_vec(&y1, &mut f1);
    let diff: V<T> = f1.iter().zip(&st.k[0]).map(|(a, b)| *a - *b).collect();
    let d2 = st.scaled_norm(y, y, &diff) / h0;
    let m = d1.max(d2);
    let h1 = if m <= T::lit(1e-15) { (h0 * T::lit(1e-3)).max(T::lit(1e-6)) } else { (T::lit(0.01) / m).powf(T::lit(0.2)) };
    (T::lit(100.0) * h0).min(h1).min(t_end)
}
