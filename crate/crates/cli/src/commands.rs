use std::path::Path;

use catlep_core::contour::{intersections, zero_contours, Component, GridSpec, Polyline};
use catlep_core::ep::{
    lep2_zero_drive, lep3_locus, lep3_sweep, refine_lep3, SweepReference, SweepSpec, SweepVariable,
};
use catlep_core::fock::{truncation_dim, validate_projection, ProjectionCheck, Tolerances};
use catlep_core::logical::{build_matrix, closed_form_spectrum, numeric_spectrum, spectral_distance};
use catlep_core::params::{confinement_rate, derive_cat_manifold, CatManifold, ParamBox};
use catlep_core::topology::{resultants_at, trajectory, winding_number, LoopSpec, ResultantField};
use catlep_core::{Manifold, Params};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::args::{
    Cli, Command, ContoursArgs, Format, Lep3Args, SpectrumArgs, SweepArgs, SweepVar, ValidateArgs, WindingArgs,
};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{write_csv, write_json};

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::resolve(&cli.common)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Spectrum(a) => spectrum(&cfg, a),
        Command::Contours(a) => contours(&cfg, a),
        Command::Winding(a) => winding(&cfg, a),
        Command::Lep3(a) => lep3(&cfg, a),
        Command::Sweep(a) => sweep(&cfg, a),
        Command::Validate(a) => validate(&cfg, a),
        Command::Params => params(&cfg),
    }
}

fn out(cfg: &RunConfig) -> Option<&Path> {
    cfg.out.as_deref()
}

fn format(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn phase(theta: f64) -> f64 {
    0.75 * std::f64::consts::PI - theta / 2.0
}

/// LEP3 coordinates at the reference point, with the configured κ.
fn reference_lep3(cfg: &RunConfig) -> CliResult<(f64, f64)> {
    let m = CatManifold::from_amplitude(cfg.alpha0, phase(cfg.theta0))?;
    let loc = lep3_locus(&m, cfg.theta0, cfg.params.kappa());
    if !loc.exists || loc.eps_abs == 0.0 || loc.delta_abs == 0.0 {
        return Err(CliError::Usage("no LEP3 at the reference point (check kappa, alpha0, theta0)".into()));
    }
    Ok((loc.eps_abs, loc.delta_abs))
}

#[derive(Serialize)]
struct ParamsOut {
    kappa: f64,
    kappa2: f64,
    eps: f64,
    delta: f64,
    eps2: f64,
    theta: f64,
}

impl From<&Params> for ParamsOut {
    fn from(p: &Params) -> Self {
        Self { kappa: p.kappa(), kappa2: p.kappa2(), eps: p.eps(), delta: p.delta(), eps2: p.eps2_mag(), theta: p.theta() }
    }
}

fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

fn spectrum(cfg: &RunConfig, a: &SpectrumArgs) -> CliResult<()> {
    if let Some(n) = a.random_draws {
        return random_spectra(cfg, n);
    }
    let p = &cfg.params;
    let m = derive_cat_manifold(p)?;
    let s = closed_form_spectrum(p, &m);
    let r = resultants_at(p)?;
    match format(cfg, Format::Json) {
        Format::Json => write_json(
            out(cfg),
            &json!({
                "params": ParamsOut::from(p),
                "alpha": pair(m.alpha),
                "p": m.p,
                "eigenvalues": s.e.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
                "q": s.q,
                "m": s.m_coef,
                "r1": r.r1,
                "r2": r.r2,
            }),
        ),
        Format::Csv => {
            let header = [
                "e1_re", "e1_im", "e2_re", "e2_im", "e3_re", "e3_im", "e4_re", "e4_im", "q", "m", "r1", "r2",
            ];
            let mut row: Vec<f64> = s.e.iter().flat_map(|z| [z.re, z.im]).collect();
            row.extend([s.q, s.m_coef, r.r1, r.r2]);
            write_csv(out(cfg), &header, [row])
        }
    }
}

#[derive(Serialize)]
struct DrawRow {
    kappa: f64,
    eps: f64,
    delta: f64,
    eps2: f64,
    theta: f64,
    rel_dev: f64,
    reciprocal_dev: f64,
    max_re: f64,
}

fn spectral_check(p: &Params, m: &Manifold) -> DrawRow {
    let s = closed_form_spectrum(p, m);
    let scale = s.e.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let num = numeric_spectrum(&build_matrix(p, m));
    let rec = numeric_spectrum(&build_matrix(p, &m.with_reciprocal_p()));
    let rel = |d: f64| if scale > 0.0 { d / scale } else { d };
    DrawRow {
        kappa: p.kappa(),
        eps: p.eps(),
        delta: p.delta(),
        eps2: p.eps2_mag(),
        theta: p.theta(),
        rel_dev: rel(spectral_distance(&s.e, &num.eigenvalues)),
        reciprocal_dev: rel(spectral_distance(&num.eigenvalues, &rec.eigenvalues)),
        max_re: s.e.iter().chain(num.eigenvalues.iter()).fold(f64::NEG_INFINITY, |acc, z| acc.max(z.re)),
    }
}

fn random_spectra(cfg: &RunConfig, n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("random-draws must be positive".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let dist = ParamBox::default();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let u: [f64; 5] = std::array::from_fn(|_| rng.gen());
        let p: Params = dist.sample(u)?;
        let m = derive_cat_manifold(&p)?;
        rows.push(spectral_check(&p, &m));
    }
    match format(cfg, Format::Json) {
        Format::Json => {
            let worst = rows.iter().fold(0.0f64, |acc, r| acc.max(r.rel_dev));
            let worst_rec = rows.iter().fold(0.0f64, |acc, r| acc.max(r.reciprocal_dev));
            let max_re = rows.iter().fold(f64::NEG_INFINITY, |acc, r| acc.max(r.max_re));
            write_json(
                out(cfg),
                &json!({
                    "seed": cfg.seed,
                    "draws": n,
                    "worst_rel_dev": worst,
                    "worst_reciprocal_dev": worst_rec,
                    "max_re": max_re,
                    "rows": rows,
                }),
            )
        }
        Format::Csv => write_csv(
            out(cfg),
            &["kappa", "eps", "delta", "eps2", "theta", "rel_dev", "reciprocal_dev", "max_re"],
            rows,
        ),
    }
}

fn field(cfg: &RunConfig) -> CliResult<ResultantField<f64>> {
    Ok(ResultantField::new(&cfg.params)?)
}

fn contours(cfg: &RunConfig, a: &ContoursArgs) -> CliResult<()> {
    let f = field(cfg)?;
    let (se, sd) = if a.absolute_window { (1.0, 1.0) } else { reference_lep3(cfg)? };
    let grid = GridSpec::new(
        (a.eps_range.0 * se, a.eps_range.1 * se),
        a.eps_count,
        (a.delta_range.0 * sd, a.delta_range.1 * sd),
        a.delta_count,
    )?;
    let r1 = zero_contours(&grid, Component::R1, &f)?;
    let r2 = zero_contours(&grid, Component::R2, &f)?;
    let tagged: Vec<(usize, Component, &Polyline<f64>)> = r1
        .iter()
        .map(|l| (Component::R1, l))
        .chain(r2.iter().map(|l| (Component::R2, l)))
        .enumerate()
        .map(|(i, (c, l))| (i, c, l))
        .collect();
    match format(cfg, Format::Csv) {
        Format::Csv => {
            let rows = tagged
                .iter()
                .flat_map(|(id, c, l)| l.points.iter().map(move |&(e, d)| (*id, c.as_str(), e, d)));
            write_csv(out(cfg), &["contour_id", "which", "eps", "delta"], rows)
        }
        Format::Json => {
            let lines: Vec<_> = tagged
                .iter()
                .map(|(id, c, l)| {
                    json!({
                        "contour_id": id,
                        "which": c.as_str(),
                        "closed": l.closed,
                        "points": l.points.iter().map(|&(e, d)| [e, d]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let cross: Vec<[f64; 2]> = intersections(&r1, &r2).into_iter().map(|(e, d)| [e, d]).collect();
            write_json(
                out(cfg),
                &json!({
                    "theta": cfg.params.theta(),
                    "eps_scale": se,
                    "delta_scale": sd,
                    "contours": lines,
                    "intersections": cross,
                }),
            )
        }
    }
}

fn winding(cfg: &RunConfig, a: &WindingArgs) -> CliResult<()> {
    let f = field(cfg)?;
    let (se, sd) = if a.absolute_window { (1.0, 1.0) } else { reference_lep3(cfg)? };
    let mut spec = LoopSpec::new((a.center.0 * se, a.center.1 * sd), (a.radii.0 * se, a.radii.1 * sd), a.samples)?;
    spec.clockwise = a.clockwise;
    let loop_json = json!({
        "center": [spec.center.0, spec.center.1],
        "radii": [spec.radii.0, spec.radii.1],
        "samples": spec.samples,
        "clockwise": spec.clockwise,
    });
    if a.trajectory {
        let t = trajectory(&spec, &f)?;
        return match format(cfg, Format::Csv) {
            Format::Csv => write_csv(out(cfg), &["phi", "n1", "n2"], t.iter().map(|p| (p.phi, p.n1, p.n2))),
            Format::Json => write_json(
                out(cfg),
                &json!({
                    "loop": loop_json,
                    "trajectory": t.iter().map(|p| [p.phi, p.n1, p.n2]).collect::<Vec<_>>(),
                }),
            ),
        };
    }
    let result = winding_number(&spec, &f);
    let (w, used, min_r, conf) = match &result {
        Ok(w) => (Some(w.w), Some(w.samples_used), Some(w.min_r_norm), w.confidence.as_str()),
        Err(_) => (None, None, None, "failed"),
    };
    match format(cfg, Format::Json) {
        Format::Json => write_json(
            out(cfg),
            &json!({
                "loop": loop_json,
                "samples_used": used,
                "w": w,
                "min_R_norm": min_r,
                "confidence": conf,
            }),
        )?,
        Format::Csv => write_csv(out(cfg), &["w", "samples_used", "min_R_norm", "confidence"], [(w, used, min_r, conf)])?,
    }
    result.map(|_| ()).map_err(CliError::from)
}

#[derive(Serialize)]
struct Lep3Row {
    theta: f64,
    eps_abs: f64,
    delta_abs: f64,
    eps_norm: f64,
    delta_norm: f64,
    d_theta: f64,
    exists: bool,
    refined_eps: Option<f64>,
    refined_delta: Option<f64>,
    residual: Option<f64>,
    iterations: Option<usize>,
}

fn lep3(cfg: &RunConfig, a: &Lep3Args) -> CliResult<()> {
    let p = &cfg.params;
    let m = derive_cat_manifold(p)?;
    let loc = lep3_locus(&m, p.theta(), p.kappa());
    let (re, rd) = reference_lep3(cfg)?;
    let refined = if loc.exists && !a.no_refine {
        Some(refine_lep3((loc.eps_abs, loc.delta_abs), &ResultantField::new(p)?)?)
    } else {
        None
    };
    let row = Lep3Row {
        theta: p.theta(),
        eps_abs: loc.eps_abs,
        delta_abs: loc.delta_abs,
        eps_norm: loc.eps_abs / re,
        delta_norm: loc.delta_abs / rd,
        d_theta: loc.d_theta,
        exists: loc.exists,
        refined_eps: refined.map(|r| r.eps),
        refined_delta: refined.map(|r| r.delta),
        residual: refined.map(|r| r.residual),
        iterations: refined.map(|r| r.iterations),
    };
    match format(cfg, Format::Json) {
        Format::Json => write_json(out(cfg), &row),
        Format::Csv => write_csv(
            out(cfg),
            &[
                "theta", "eps_abs", "delta_abs", "eps_norm", "delta_norm", "d_theta", "exists", "refined_eps",
                "refined_delta", "residual", "iterations",
            ],
            [row],
        ),
    }
}

#[derive(Serialize)]
struct SweepOut {
    sweep_var: f64,
    eps_abs: f64,
    delta_abs: f64,
    eps_norm: f64,
    delta_norm: f64,
    exists: bool,
}

fn sweep(cfg: &RunConfig, a: &SweepArgs) -> CliResult<()> {
    let (variable, start, end) = match a.variable {
        SweepVar::Theta => (SweepVariable::Theta, a.start.unwrap_or(0.0), a.end.unwrap_or(std::f64::consts::TAU)),
        SweepVar::Eps2Ratio => (SweepVariable::Eps2Ratio, a.start.unwrap_or(0.3), a.end.unwrap_or(2.0)),
    };
    let spec = SweepSpec { variable, start, end, count: a.count };
    let reference = SweepReference { alpha0_mag: cfg.alpha0, theta0: cfg.theta0 };
    let rows: Vec<SweepOut> = lep3_sweep(&spec, &reference, cfg.params.kappa())?
        .into_iter()
        .map(|r| SweepOut {
            sweep_var: r.value,
            eps_abs: r.eps_abs,
            delta_abs: r.delta_abs,
            eps_norm: r.eps_norm,
            delta_norm: r.delta_norm,
            exists: r.exists,
        })
        .collect();
    match format(cfg, Format::Csv) {
        Format::Csv => write_csv(out(cfg), &["sweep_var", "eps_abs", "delta_abs", "eps_norm", "delta_norm", "exists"], rows),
        Format::Json => write_json(out(cfg), &json!({ "variable": variable.as_str(), "rows": rows })),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn validate(cfg: &RunConfig, a: &ValidateArgs) -> CliResult<()> {
    if a.delta_count == 0 || a.t_count == 0 {
        return Err(CliError::Usage("grid counts must be positive".into()));
    }
    if !(a.t_max >= 0.0 && a.delta_max.is_finite()) {
        return Err(CliError::Usage("t-max must be non-negative and delta-max finite".into()));
    }
    let p = &cfg.params;
    let (_, delta_ref) = reference_lep3(cfg)?;
    let fc = ProjectionCheck {
        kappa: p.kappa(),
        eps: p.eps(),
        eps2_mag: p.eps2_mag(),
        theta: p.theta(),
        delta_ref,
        delta_fractions: linspace(0.0, a.delta_max, a.delta_count),
        times: linspace(0.0, a.t_max, a.t_count),
        dim: a.dim,
        check_doubled: !a.no_doubled_check,
        tol: Tolerances { rel: a.rel_tol, abs: a.abs_tol },
    };
    let table = validate_projection(&fc)?;
    let summary = json!({
        "min_fidelity": table.min_fidelity,
        "argmin": { "delta_norm": table.argmin.0, "kappa2_t": table.argmin.1 },
        "dim": table.dim,
        "dim_doubled_check": table.dim_doubled_change,
        "delta_ref": delta_ref,
        "max_hermiticity_correction": table.max_hermiticity_correction,
        "max_trace_correction": table.max_trace_correction,
        "min_eigenvalue": table.min_eigenvalue,
    });
    match format(cfg, Format::Csv) {
        Format::Csv => {
            write_csv(
                out(cfg),
                &["delta_norm", "kappa2_t", "fidelity"],
                table.rows.iter().map(|r| (r.delta_norm, r.kappa2_t, r.fidelity)),
            )?;
            if let Some(path) = &a.summary {
                write_json(Some(path), &summary)?;
            }
            eprintln!("{summary}");
            Ok(())
        }
        Format::Json => {
            let rows: Vec<[f64; 3]> = table.rows.iter().map(|r| [r.delta_norm, r.kappa2_t, r.fidelity]).collect();
            write_json(out(cfg), &json!({ "summary": summary, "rows": rows }))
        }
    }
}

fn params(cfg: &RunConfig) -> CliResult<()> {
    let p = &cfg.params;
    let m = derive_cat_manifold(p)?;
    let loc = lep3_locus(&m, p.theta(), p.kappa());
    let lep2 = lep2_zero_drive(p.kappa(), &m).ok();
    let reference = reference_lep3(cfg).ok();
    write_json(
        out(cfg),
        &json!({
            "units": cfg.units,
            "normalized": ParamsOut::from(p),
            "alpha": pair(m.alpha),
            "alpha_mag": m.alpha_mag,
            "phi_alpha": m.phi_alpha,
            "p": m.p,
            "p_sq": m.p_sq(),
            "p_plus": m.p_comb.plus,
            "p_minus": m.p_comb.minus,
            "confinement_rate": confinement_rate(p, &m),
            "truncation_dim": truncation_dim(m.alpha_mag),
            "lep2_zero_drive_delta": lep2,
            "lep3": {
                "eps_abs": loc.eps_abs,
                "delta_abs": loc.delta_abs,
                "d_theta": loc.d_theta,
                "exists": loc.exists,
            },
            "reference": {
                "alpha0": cfg.alpha0,
                "theta0": cfg.theta0,
                "eps_ref": reference.map(|r| r.0),
                "delta_ref": reference.map(|r| r.1),
            },
            "seed": cfg.seed,
        }),
    )
}
