use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Liouvillian exceptional points of a driven-dissipative cat qubit.
///
/// Rates, drives and detunings are in units of κ₂ unless --absolute-hz is
/// given, in which case they are frequencies in Hz (κ₂ included) and are
/// divided by κ₂. Angles are radians; a trailing `pi` multiplies by π
/// (`1.5pi`).
#[derive(Debug, Parser)]
#[command(name = "catlep", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat JSON configuration; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (standard output if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Interpret rates and drives as frequencies in Hz.
    #[arg(long, global = true)]
    pub absolute_hz: bool,
    /// Single-photon loss κ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Two-photon loss κ₂ (only meaningful with --absolute-hz).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa2: Option<f64>,
    /// Single-photon drive ε.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Detuning Δ.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Two-photon drive magnitude |ε₂|.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps2: Option<f64>,
    /// Two-photon drive phase θ.
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Reference cat amplitude |α₀| for normalized coordinates.
    #[arg(long, global = true)]
    pub alpha0: Option<f64>,
    /// Reference phase θ₀ for normalized coordinates.
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form spectrum, cubic invariants and resultants at one point.
    Spectrum(SpectrumArgs),
    /// Zero-level contours of R₁ and R₂ on an (ε, Δ) grid.
    Contours(ContoursArgs),
    /// Winding number of the resultant vector along an elliptical loop.
    Winding(WindingArgs),
    /// Third-order exceptional point at the configured phase.
    Lep3(Lep3Args),
    /// LEP3 coordinates along a sweep of θ or |ε₂|/κ₂.
    Sweep(SweepArgs),
    /// Fidelity between full and projected dynamics.
    Validate(ValidateArgs),
    /// Derived quantities for the configured parameters.
    Params,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Instead of one point, compare closed-form and numeric spectra at this
    /// many seeded random points.
    #[arg(long)]
    pub random_draws: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ContoursArgs {
    /// ε range, in units of the reference LEP3 coordinate unless
    /// --absolute-window.
    #[arg(long, value_parser = parse_pair, default_value = "-2,2", allow_hyphen_values = true)]
    pub eps_range: (f64, f64),
    #[arg(long, value_parser = parse_pair, default_value = "-2,2", allow_hyphen_values = true)]
    pub delta_range: (f64, f64),
    #[arg(long, default_value_t = 401)]
    pub eps_count: usize,
    #[arg(long, default_value_t = 401)]
    pub delta_count: usize,
    /// Ranges are in units of κ₂.
    #[arg(long)]
    pub absolute_window: bool,
}

#[derive(Debug, Args)]
pub struct WindingArgs {
    /// Loop center (ε, Δ), in units of the reference LEP3 coordinates
    /// unless --absolute-window.
    #[arg(long, value_parser = parse_pair, default_value = "1,1", allow_hyphen_values = true)]
    pub center: (f64, f64),
    #[arg(long, value_parser = parse_pair, default_value = "0.4,0.4")]
    pub radii: (f64, f64),
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long)]
    pub clockwise: bool,
    #[arg(long)]
    pub absolute_window: bool,
    /// Write the normalized trajectory (φ, R₁/‖R‖, R₂/‖R‖) instead.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Args)]
pub struct Lep3Args {
    /// Skip the Newton refinement.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Theta,
    Eps2Ratio,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "theta")]
    pub variable: SweepVar,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub end: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Largest Δ/Δ_ref.
    #[arg(long, default_value_t = 1.0)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 21)]
    pub delta_count: usize,
    /// Final κ₂t.
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub t_count: usize,
    /// Fock truncation (default: coherent tail below 1e-10 plus 10 levels).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Skip the run at twice the truncation.
    #[arg(long)]
    pub no_doubled_check: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Also write the JSON summary to this file (CSV mode).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let v = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*');
        let k = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|e| format!("bad angle `{s}`: {e}"))?,
        };
        k * std::f64::consts::PI
    } else {
        t.parse::<f64>().map_err(|e| format!("bad angle `{s}`: {e}"))?
    };
    if !v.is_finite() {
        return Err(format!("angle `{s}` is not finite"));
    }
    Ok(v)
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number `{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("1.5pi").unwrap(), 1.5 * std::f64::consts::PI);
        assert_eq!(parse_angle("-pi").unwrap(), -std::f64::consts::PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("-2, 2").unwrap(), (-2.0, 2.0));
        assert!(parse_pair("1").is_err());
    }
}
