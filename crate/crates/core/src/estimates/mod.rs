//! Numerical checks of the a priori estimates for stable solutions.
//!
//! Every branch-level check evaluates a dimensionless ratio at each stable
//! point of a computed branch and classifies how the ratio behaves as the
//! branch approaches its end. The estimates only assert that some constant
//! exists, so a verdict is a statement about the trend, never about a value.
//!
//! All quantities use the effective nonlinearity `g = λ f`, for which the
//! branch point solves `-Δu = g(u)` with unit coefficient.

mod branch;
mod inequalities;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use branch::{
    global_lp_sample, interior_linf_sample, interior_lp_sample, lp_exponent, morrey_sample, nedev_sample,
    verify_global_linf, verify_global_lp, verify_interior_linf, verify_interior_lp, verify_morrey,
    verify_nedev_yezhou, verify_w12, w12_sample,
};
pub use inequalities::{
    hardy_near_extremal, proof_test_function, subsolution_identities, truncated_power_test_function,
    verify_hardy, verify_l1_laplacian_control, verify_stability_lemma, verify_stability_lemma_on_branch, HardyCheck,
    L1ControlCheck, StabilityLemmaCheck, SubsolutionCheck,
};

use crate::error::{Error, Result};
use crate::nonlinearity::{certify, extended_dimension_bound, CrCertificate, Nonlinearity, Quotient, TailGrid};
use crate::report;

/// The branch-level estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateTag {
    InteriorLinf,
    GlobalLinf,
    InteriorLp,
    GlobalLp,
    W12,
    Morrey,
    Nedev,
}

impl EstimateTag {
    pub const ALL: [EstimateTag; 7] = [
        EstimateTag::InteriorLinf,
        EstimateTag::GlobalLinf,
        EstimateTag::InteriorLp,
        EstimateTag::GlobalLp,
        EstimateTag::W12,
        EstimateTag::Morrey,
        EstimateTag::Nedev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimateTag::InteriorLinf => "interior-linf",
            EstimateTag::GlobalLinf => "global-linf",
            EstimateTag::InteriorLp => "interior-lp",
            EstimateTag::GlobalLp => "global-lp",
            EstimateTag::W12 => "w12",
            EstimateTag::Morrey => "morrey",
            EstimateTag::Nedev => "nedev",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|t| t.name()).collect();
                Error::Config(format!("unknown estimate tag '{name}' (known: {})", known.join(", ")))
            })
    }

    /// Dimensions in which the estimate is a theorem.
    pub fn theorem_dimensions(self) -> (usize, usize) {
        match self {
            EstimateTag::Morrey => (3, 6),
            _ => (1, 6),
        }
    }
}

impl std::fmt::Display for EstimateTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Theorem mode enforces the hypotheses and fails on anything but `bounded`;
/// exploration mode runs anywhere and never fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Theorem,
    Explore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrendOptions {
    /// `bounded` needs the last-decade ratios within this factor of each other
    pub bounded_factor: f64,
    /// decades of `1 - s` over which `growing` needs monotone growth
    pub decades: f64,
    /// `growing` also needs the last decade to add this fraction of the final
    /// ratio, and at least half the growth of the first decade
    pub min_decade_growth: f64,
    /// `L∞` verdicts: `growing` once `max u > 1 - linf_margin`
    pub linf_margin: f64,
}

impl Default for TrendOptions {
    fn default() -> Self {
        Self { bounded_factor: 100.0, decades: 3.0, min_decade_growth: 1e-2, linf_margin: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateConfig {
    pub mode: Mode,
    /// defaults to `0.9 (√(1+θ) - 1)`
    pub beta: Option<f64>,
    /// integrability exponent used when `n ≤ 2`
    pub p_bar_low_dim: f64,
    pub trend: TrendOptions,
    pub tail_grid: TailGrid,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Theorem,
            beta: None,
            p_bar_low_dim: 20.0,
            trend: TrendOptions::default(),
            tail_grid: TailGrid::default(),
        }
    }
}

/// One branch point: the ratio and the two sides it is made of.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateSample {
    pub s: f64,
    pub lambda: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

impl EstimateSample {
    pub(crate) fn new(s: f64, lambda: f64, numerator: f64, denominator: f64) -> Self {
        Self { s, lambda, numerator, denominator, ratio: numerator / denominator }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EstimateParams {
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub p_bar: Option<f64>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub tag: EstimateTag,
    pub family: String,
    pub n: usize,
    pub mode: Mode,
    pub params: EstimateParams,
    /// stable branch points only
    pub samples: Vec<EstimateSample>,
    pub max_ratio: f64,
    pub verdict: Trend,
    /// `1 - sup max u` for the `L∞` checks
    pub margin: Option<f64>,
    /// theorem mode: verdict is `bounded`; exploration mode: always true
    pub passed: bool,
    pub notes: Vec<String>,
    pub version: &'static str,
}

impl EstimateReport {
    pub(crate) fn assemble(
        tag: EstimateTag,
        nl: &Nonlinearity,
        n: usize,
        cfg: &EstimateConfig,
        params: EstimateParams,
        samples: Vec<EstimateSample>,
    ) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|p| !(p.ratio.is_finite() && p.ratio >= 0.0)) {
            return Err(Error::Numerical {
                message: format!("{tag}: ratio {} at s = {} is not finite and nonnegative", bad.ratio, bad.s),
                achieved: f64::INFINITY,
            });
        }
        let max_ratio = samples.iter().map(|p| p.ratio).fold(0.0, f64::max);
        let (verdict, margin) = if tag == EstimateTag::GlobalLinf {
            let sup = samples.iter().map(|p| p.ratio).fold(0.0, f64::max);
            let margin = 1.0 - sup;
            let v = if samples.is_empty() {
                Trend::Inconclusive
            } else if margin < cfg.trend.linf_margin {
                Trend::Growing
            } else {
                Trend::Bounded
            };
            (v, Some(margin))
        } else {
            (classify_trend(&samples, &cfg.trend), None)
        };
        let mut notes = Vec::new();
        if samples.is_empty() {
            notes.push("no stable branch points".to_string());
        }
        Ok(Self {
            tag,
            family: nl.tag().to_string(),
            n,
            mode: cfg.mode,
            params,
            samples,
            max_ratio,
            verdict,
            margin,
            passed: cfg.mode == Mode::Explore || verdict == Trend::Bounded,
            notes,
            version: env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        report::write_json(path, self)
    }

    /// CSV `s,ratio`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self.samples.iter().map(|p| vec![Some(p.s), Some(p.ratio)]);
        report::write_csv(path, &["s", "ratio"], rows)
    }
}

/// Tail trend of `(s, ratio)` samples ordered by `s`.
///
/// `growing`: the samples within `decades` decades of `1 - s` from the last
/// one cover that range, never decrease, and keep growing in the last decade
/// at no less than half the pace of the first (a ratio converging to a limit
/// fails this). `bounded`: the samples in the last
/// decade of `1 - s` (and in the upper half of the `s` range, for branches
/// that end at a fold far from 1) stay within `bounded_factor` of each other.
pub fn classify_trend(samples: &[EstimateSample], opts: &TrendOptions) -> Trend {
    let Some(last) = samples.last() else {
        return Trend::Inconclusive;
    };
    let gap_last = 1.0 - last.s;
    let span = 10f64.powf(opts.decades);
    let window: Vec<&EstimateSample> = samples.iter().filter(|p| 1.0 - p.s <= span * gap_last).collect();
    let covered = window.first().is_some_and(|p| 1.0 - p.s >= span * gap_last / 10f64.sqrt());
    if covered && window.len() >= 4 {
        let monotone = window.windows(2).all(|w| w[1].ratio >= w[0].ratio * (1.0 - 1e-9));
        // ratio at the sample nearest to a given gap, in log scale
        let at = |gap: f64| {
            window
                .iter()
                .min_by(|a, b| ((1.0 - a.s) / gap).ln().abs().total_cmp(&((1.0 - b.s) / gap).ln().abs()))
                .map_or(0.0, |p| p.ratio)
        };
        let last_decade = last.ratio - at(10.0 * gap_last);
        let first_decade = at(span * gap_last / 10.0) - window[0].ratio;
        if monotone && last_decade >= opts.min_decade_growth * last.ratio && last_decade >= 0.5 * first_decade {
            return Trend::Growing;
        }
    }
    let tail: Vec<f64> = samples
        .iter()
        .filter(|p| 1.0 - p.s <= 10.0 * gap_last && p.s >= 0.5 * last.s)
        .map(|p| p.ratio)
        .collect();
    let hi = tail.iter().cloned().fold(0.0, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi == 0.0 || (lo > 0.0 && hi <= opts.bounded_factor * lo) {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    }
}

pub(crate) fn certificate(nl: &Nonlinearity, cfg: &EstimateConfig) -> Result<CrCertificate> {
    certify(nl, &cfg.tail_grid, None)
}

/// The eligible dimensions `n < 4 + 2√γ_lo` for nonlinearities with
/// `γ_lo < 1`, where the standard range no longer applies. Reported only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedRange {
    pub gamma_lo: f64,
    pub dimension_bound: f64,
    /// largest integer dimension strictly below the bound
    pub max_dimension: usize,
    pub applies: bool,
}

pub fn extended_range(nl: &Nonlinearity, grid: &TailGrid) -> Result<ExtendedRange> {
    let gamma = crate::nonlinearity::estimate_limits(nl, Quotient::Gamma, grid)?;
    let bound = extended_dimension_bound(gamma.lo)?;
    let max_dimension = (bound - 1e-12).ceil() as usize - 1;
    Ok(ExtendedRange { gamma_lo: gamma.lo, dimension_bound: bound, max_dimension, applies: gamma.lo < 1.0 })
}

/// Runs one branch-level estimate.
pub fn verify(tag: EstimateTag, diagram: &crate::radial_solver::BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    match tag {
        EstimateTag::InteriorLinf => verify_interior_linf(diagram, cfg),
        EstimateTag::GlobalLinf => verify_global_linf(diagram, cfg),
        EstimateTag::InteriorLp => verify_interior_lp(diagram, cfg),
        EstimateTag::GlobalLp => verify_global_lp(diagram, cfg),
        EstimateTag::W12 => verify_w12(diagram, cfg),
        EstimateTag::Morrey => verify_morrey(diagram, cfg),
        EstimateTag::Nedev => verify_nedev_yezhou(diagram, cfg),
    }
}
