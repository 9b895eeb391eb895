use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::{EstimateConfig, Mode, TrendOptions};
use crate::nonlinearity::{scaled_power_coefficient, Family, TailGrid};
use crate::numerics::Tolerance;
use crate::radial_solver::SGrid;
use crate::spectral::SpectralOptions;

/// Output file formats for tabular results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run needs, as read from a JSON config file. Command-line
/// flags override individual fields.
///
/// ```json
/// { "nonlinearity": { "family": "power", "p": 2 }, "n": 3,
///   "grid": { "cap": 1e-4, "uniform_points": 75, "tail_points": 75 } }
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nonlinearity: Option<Family>,
    pub n: Option<usize>,
    pub grid: SGrid,
    pub tol: Option<Tolerance>,
    /// estimate tags for `verify`; empty means all branch estimates
    pub tags: Vec<String>,
    pub beta: Option<f64>,
    /// `p̄` used by the L^p estimates when `n ≤ 2`
    pub p_bar: Option<f64>,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    /// empty means both
    pub formats: Vec<Format>,
    pub spectral: SpectralOptions,
    pub tail_grid: TailGrid,
    pub trend: TrendOptions,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.is_empty() || self.formats.contains(&format)
    }

    pub fn tolerance(&self) -> Result<Tolerance> {
        let tol = self.tol.unwrap_or_default();
        tol.validate().map_err(config_error)?;
        Ok(tol)
    }

    pub fn dimension(&self) -> Result<usize> {
        match self.n {
            Some(n) if n >= 1 => Ok(n),
            Some(_) => Err(Error::Config("the dimension n must be at least 1".into())),
            None => Err(Error::Config("no dimension: pass --n or set n in the config".into())),
        }
    }

    pub fn family(&self) -> Result<&Family> {
        self.nonlinearity
            .as_ref()
            .ok_or_else(|| Error::Config("no nonlinearity: pass --family or set nonlinearity in the config".into()))
    }

    pub fn estimate_config(&self) -> EstimateConfig {
        EstimateConfig {
            mode: self.mode,
            beta: self.beta,
            p_bar_low_dim: self.p_bar.unwrap_or(EstimateConfig::default().p_bar_low_dim),
            trend: self.trend,
            tail_grid: self.tail_grid,
        }
    }

    /// `--out`, then the config, then `MEMS_BRANCH_OUT`, then the working directory.
    pub fn output_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("MEMS_BRANCH_OUT").filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Domain errors raised while validating user input are configuration errors.
pub(crate) fn config_error(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

/// Family flags as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct FamilyFlags {
    pub family: Option<String>,
    pub p: Option<f64>,
    pub c: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub eps: Option<f64>,
    pub table: Option<PathBuf>,
}

impl FamilyFlags {
    fn any_parameter(&self) -> bool {
        self.p.is_some() || self.c.is_some() || self.a.is_some() || self.b.is_some() || self.eps.is_some() || self.table.is_some()
    }

    /// Builds the family from `--family` and its parameters, or patches the
    /// parameters of the configured family when `--family` is absent.
    pub fn resolve(&self, configured: Option<&Family>, n: Option<usize>) -> Result<Option<Family>> {
        let need = |v: Option<f64>, flag: &str, name: &str| {
            v.ok_or_else(|| Error::Config(format!("family {name} needs --{flag}")))
        };
        let Some(name) = self.family.as_deref() else {
            return match configured {
                Some(f) => Ok(Some(self.patch(f.clone()))),
                None if self.any_parameter() => Err(Error::Config("family parameters given without --family".into())),
                None => Ok(None),
            };
        };
        let family = match name {
            "power" => Family::Power { p: need(self.p, "p", name)? },
            "exponential" => Family::Exponential,
            "mems" => Family::Mems,
            "scaled-power" => {
                let p = need(self.p, "p", name)?;
                let c = match (self.c, n) {
                    (Some(c), _) => c,
                    (None, Some(n)) => scaled_power_coefficient(p, n as f64).map_err(config_error)?,
                    (None, None) => return Err(Error::Config("scaled-power needs --c or --n to derive c(p, n)".into())),
                };
                Family::ScaledPower { p, c }
            }
            "constant" => Family::Constant { c: self.c.unwrap_or(1.0) },
            "castorina" | "castorina-oscillating" => Family::CastorinaOscillating {
                a: need(self.a, "a", name)?,
                b: need(self.b, "b", name)?,
                eps: need(self.eps, "eps", name)?,
            },
            "custom-table" | "table" => Family::CustomTable {
                path: self.table.clone().ok_or_else(|| Error::Config("custom-table needs --table".into()))?,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown family {other:?} (power, exponential, mems, scaled-power, constant, castorina, custom-table)"
                )))
            }
        };
        Ok(Some(family))
    }

    fn patch(&self, family: Family) -> Family {
        match family {
            Family::Power { p } => Family::Power { p: self.p.unwrap_or(p) },
            Family::ScaledPower { p, c } => Family::ScaledPower { p: self.p.unwrap_or(p), c: self.c.unwrap_or(c) },
            Family::Constant { c } => Family::Constant { c: self.c.unwrap_or(c) },
            Family::CastorinaOscillating { a, b, eps } => Family::CastorinaOscillating {
                a: self.a.unwrap_or(a),
                b: self.b.unwrap_or(b),
                eps: self.eps.unwrap_or(eps),
            },
            Family::CustomTable { path } => Family::CustomTable { path: self.table.clone().unwrap_or(path) },
            other => other,
        }
    }
}

/// Grid flags; `points` splits evenly between the two parts of the grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridFlags {
    pub points: Option<usize>,
    pub cap: Option<f64>,
    pub s_min: Option<f64>,
    pub split: Option<f64>,
}

impl GridFlags {
    pub fn apply(&self, grid: &mut SGrid) -> Result<()> {
        if let Some(points) = self.points {
            if points < 3 {
                return Err(Error::Config(format!("--points must be at least 3 (got {points})")));
            }
            grid.uniform_points = points / 2;
            grid.tail_points = points - points / 2;
        }
        if let Some(cap) = self.cap {
            grid.cap = cap;
        }
        if let Some(s_min) = self.s_min {
            grid.s_min = s_min;
        }
        if let Some(split) = self.split {
            grid.split = split;
        }
        Ok(())
    }
}
