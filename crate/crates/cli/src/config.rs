use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use catlep_core::params::SystemParams;
use catlep_core::Params;
use serde::{Deserialize, Serialize};

use crate::args::{Common, Format};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Normalized,
    AbsoluteHz,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub units: Option<Units>,
    pub kappa: Option<f64>,
    pub kappa2: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub eps2: Option<f64>,
    /// Radians.
    pub theta: Option<f64>,
    pub alpha0: Option<f64>,
    pub theta0: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Normalized parameters plus the reference point for normalized
/// coordinates.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub units: Units,
    pub alpha0: f64,
    pub theta0: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 7;

impl RunConfig {
    pub fn resolve(common: &Common) -> CliResult<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let units = if common.absolute_hz { Units::AbsoluteHz } else { file.units.unwrap_or_default() };
        let pick = |flag: Option<f64>, file: Option<f64>, normalized: f64, hz: f64| {
            flag.or(file).unwrap_or(match units {
                Units::Normalized => normalized,
                Units::AbsoluteHz => hz,
            })
        };
        let kappa = pick(common.kappa, file.kappa, 6.48e-3, 14e3);
        let eps = pick(common.eps, file.eps, 6.94e-3, 15e3);
        let delta = pick(common.delta, file.delta, 0.0, 0.0);
        let eps2 = pick(common.eps2, file.eps2, 0.93, 2e6);
        let theta = common.theta.or(file.theta).unwrap_or(1.5 * PI);
        let kappa2 = common.kappa2.or(file.kappa2);
        let params = match units {
            Units::Normalized => {
                if kappa2.is_some_and(|k| k != 1.0) {
                    return Err(CliError::Usage("kappa2 can only be set with absolute_hz units".into()));
                }
                SystemParams::normalized(kappa, eps, delta, eps2, theta)?
            }
            Units::AbsoluteHz => SystemParams::from_absolute(kappa, kappa2.unwrap_or(2.16e6), eps, delta, eps2, theta)?,
        };
        let alpha0 = common.alpha0.or(file.alpha0).unwrap_or((2.0f64 * 0.93).sqrt());
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(CliError::Usage("alpha0 must be positive".into()));
        }
        let format = match (common.format, file.format.as_deref()) {
            (Some(f), _) => Some(f),
            (None, Some("csv")) => Some(Format::Csv),
            (None, Some("json")) => Some(Format::Json),
            (None, Some(other)) => return Err(CliError::Usage(format!("unknown format `{other}`"))),
            (None, None) => None,
        };
        let threads = common.threads.or(file.threads);
        if threads == Some(0) {
            return Err(CliError::Usage("threads must be positive".into()));
        }
        Ok(Self {
            params,
            units,
            alpha0,
            theta0: common.theta0.or(file.theta0).unwrap_or(1.5 * PI),
            out: common.out.clone().or(file.out),
            format,
            seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            threads,
        })
    }
}
