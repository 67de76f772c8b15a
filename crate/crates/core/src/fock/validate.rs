use rayon::prelude::*;

use super::density::{fidelity_with_logical, DensityMatrix};
use super::integrate::{evolve, Tolerances};
use super::liouvillian::build_full_liouvillian;
use super::states::{truncation_dim, CatBasis};
use crate::ep::lep3_locus;
use crate::error::{Error, Result};
use crate::logical::{build_matrix, LogicalVector, Propagator};
use crate::params::{derive_cat_manifold, SystemParams};
use crate::scalar::Real;

/// Comparison of the projected and full dynamics from `|C⁺_α⟩` over a grid
/// of detunings and times.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionCheck<T> {
    pub kappa: T,
    pub eps: T,
    pub eps2_mag: T,
    pub theta: T,
    /// Detuning that `delta_fractions` are relative to.
    pub delta_ref: T,
    pub delta_fractions: Vec<T>,
    /// Times in units of `1/κ₂`, ascending from 0.
    pub times: Vec<T>,
    /// Fock truncation; `None` picks [`truncation_dim`].
    pub dim: Option<usize>,
    /// Repeat every run at twice the dimension.
    pub check_doubled: bool,
    pub tol: Tolerances<T>,
}

fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1) })
        .collect()
}

impl<T: Real> Default for ProjectionCheck<T> {
    /// `ε = 6.94e−3`, `κ = 6.48e−3`, `|ε₂| = 0.93`, `θ = 3π/2`, with `Δ_ref`
    /// the LEP3 detuning at these rates, `Δ/Δ_ref ∈ [0, 1]` (21 points) and
    /// `κ₂t ∈ [0, 20]` (201 points).
    fn default() -> Self {
        let kappa = T::lit(6.48e-3);
        let eps2_mag = T::lit(0.93);
        let theta = T::lit(1.5) * T::PI();
        let p = SystemParams::normalized(kappa, T::zero(), T::zero(), eps2_mag, theta).expect("valid defaults");
        let m = derive_cat_manifold(&p).expect("valid defaults");
        Self {
            kappa,
            eps: T::lit(6.94e-3),
            eps2_mag,
            theta,
            delta_ref: lep3_locus(&m, theta, kappa).delta_abs,
            delta_fractions: linspace(T::zero(), T::one(), 21),
            times: linspace(T::zero(), T::lit(20.0), 201),
            dim: None,
            check_doubled: true,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionRow<T> {
    pub delta_norm: T,
    pub kappa2_t: T,
    pub fidelity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionTable<T> {
    pub rows: Vec<ProjectionRow<T>>,
    pub min_fidelity: T,
    /// `(Δ/Δ_ref, κ₂t)` of the minimum.
    pub argmin: (T, T),
    pub dim: usize,
    /// Largest fidelity change between `dim` and `2·dim`.
    pub dim_doubled_change: Option<T>,
    /// Largest re-Hermitization and trace corrections applied to any output.
    pub max_hermiticity_correction: T,
    pub max_trace_correction: T,
    /// Lowest density-matrix eigenvalue over all outputs.
    pub min_eigenvalue: T,
}

struct Run<T> {
    fidelities: Vec<T>,
    herm: T,
    trace: T,
    min_eig: T,
}

fn run_one<T: Real>(cfg: &ProjectionCheck<T>, params: &SystemParams<T>, dim: usize) -> Result<Run<T>> {
    let manifold = derive_cat_manifold(params)?;
    let basis = CatBasis::new(manifold.alpha, dim)?;
    let l = build_full_liouvillian(params, dim)?;
    let rho0 = DensityMatrix::from_pure(&basis.plus)?;
    let ev = evolve(&l, &rho0, &cfg.times, cfg.tol)?;
    let prop = Propagator::new(&build_matrix(params, &manifold));
    let v0 = LogicalVector::even_cat();
    let mut fidelities = Vec::with_capacity(cfg.times.len());
    let mut min_eig = T::infinity();
    for (t, rho) in ev.times.iter().zip(&ev.states) {
        let v = prop.at(&v0, *t)?;
        fidelities.push(fidelity_with_logical(rho, &v, &basis)?);
        min_eig = min_eig.min(rho.min_eigenvalue()?);
    }
    let herm = ev.corrections.iter().fold(T::zero(), |m, c| m.max(c.hermiticity));
    let trace = ev.corrections.iter().fold(T::zero(), |m, c| m.max(c.trace));
    Ok(Run { fidelities, herm, trace, min_eig })
}

/// Fidelity between full and projected evolution on the configured grid.
pub fn validate_projection<T: Real>(cfg: &ProjectionCheck<T>) -> Result<ProjectionTable<T>> {
    if cfg.delta_fractions.is_empty() || cfg.times.is_empty() {
        return Err(Error::invalid("grid", "empty detuning or time grid"));
    }
    if !cfg.delta_ref.is_finite() {
        return Err(Error::invalid("delta_ref", "must be finite"));
    }
    let base = SystemParams::normalized(cfg.kappa, cfg.eps, T::zero(), cfg.eps2_mag, cfg.theta)?;
    let manifold = derive_cat_manifold(&base)?;
    let dim = cfg.dim.unwrap_or_else(|| truncation_dim(manifold.alpha_mag));
    let runs: Vec<(Run<T>, Option<Run<T>>)> = cfg
        .delta_fractions
        .par_iter()
        .map(|&f| {
            let params = base.with_delta(f * cfg.delta_ref)?;
            let run = run_one(cfg, &params, dim)?;
            let doubled = if cfg.check_doubled { Some(run_one(cfg, &params, 2 * dim)?) } else { None };
            Ok((run, doubled))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(runs.len() * cfg.times.len());
    let mut min = (T::infinity(), (T::zero(), T::zero()));
    let mut change: Option<T> = None;
    let (mut herm, mut trace, mut min_eig) = (T::zero(), T::zero(), T::infinity());
    for (&f, (run, doubled)) in cfg.delta_fractions.iter().zip(&runs) {
        for (k, &t) in cfg.times.iter().enumerate() {
            let fid = run.fidelities[k];
            rows.push(ProjectionRow { delta_norm: f, kappa2_t: t, fidelity: fid });
            if fid < min.0 {
                min = (fid, (f, t));
            }
            if let Some(d) = doubled {
                let c = (d.fidelities[k] - fid).abs();
                change = Some(change.map_or(c, |m: T| m.max(c)));
            }
        }
        herm = herm.max(run.herm);
        trace = trace.max(run.trace);
        min_eig = min_eig.min(run.min_eig);
        if let Some(d) = doubled {
            herm = herm.max(d.herm);
            trace = trace.max(d.trace);
            min_eig = min_eig.min(d.min_eig);
        }
    }
    Ok(ProjectionTable {
        rows,
        min_fidelity: min.0,
        argmin: min.1,
        dim,
        dim_doubled_change: change,
        max_hermiticity_correction: herm,
        max_trace_correction: trace,
        min_eigenvalue: min_eig,
    })
}
