use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{config_error, Format, RunConfig};
use crate::error::{Error, Result};
use crate::estimates::{
    extended_range, subsolution_identities, verify, verify_l1_laplacian_control, verify_stability_lemma_on_branch,
    EstimateReport, EstimateTag, ExtendedRange, Mode, Trend,
};
use crate::nonlinearity::{
    castorina_threshold, certify, extended_dimension_bound, np_threshold, oscillation_intervals, relation_check,
    CrCertificate, Family, Nonlinearity, OscillationReport, RelationReport,
};
use crate::radial_solver::{branch, extremal_profile, BifurcationDiagram, BranchOptions, ExtremalBehavior, SGrid, TurningPoint};
use crate::numerics::Tolerance;
use crate::report::{self, fmt_g15};
use crate::spectral::{explicit_residual, explicit_singular_stability, rayleigh_min, ExplicitStability, SpectralResult, TestFunction};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How a command that ran to completion ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// theorem-mode checks that did not pass
    VerificationFailed(Vec<String>),
}

const INEQUALITY_TAGS: [&str; 3] = ["stability-lemma", "l1-laplacian", "subsolution"];

pub(crate) fn check_tags(tags: &[String]) -> Result<()> {
    for t in tags {
        if !INEQUALITY_TAGS.contains(&t.as_str()) {
            EstimateTag::parse(t)?;
        }
    }
    Ok(())
}

fn nonlinearity(cfg: &RunConfig) -> Result<Nonlinearity> {
    Nonlinearity::new(cfg.family()?.clone()).map_err(config_error)
}

fn validate_grid(grid: &SGrid, nl: &Nonlinearity) -> Result<()> {
    grid.points(nl.t_max()).map(|_| ()).map_err(config_error)
}

fn sweep(cfg: &RunConfig, nl: &Nonlinearity, with_spectrum: bool) -> Result<BifurcationDiagram> {
    let n = cfg.dimension()?;
    validate_grid(&cfg.grid, nl)?;
    let opts = BranchOptions {
        grid: cfg.grid,
        tol: cfg.tolerance()?,
        spectral: with_spectrum.then_some(cfg.spectral),
        refine_fold: true,
    };
    branch(nl, n, &opts)
}

fn out_path(cfg: &RunConfig, name: &str) -> std::path::PathBuf {
    cfg.output_dir().join(name)
}

#[derive(Serialize)]
struct Thresholds {
    /// exponent of a pure power tail, when f has one
    power_exponent: Option<f64>,
    /// stability threshold of the explicit singular solution
    n_p: Option<f64>,
    /// dimension threshold from the tail estimates `γ_lo`, `m_lo`
    castorina: Option<f64>,
    /// `4 + 2√γ_lo`
    extended_dimension_bound: Option<f64>,
    extended_range: Option<ExtendedRange>,
}

#[derive(Serialize)]
struct NonlinearityReport<'a> {
    version: &'static str,
    family: &'a Family,
    tag: &'static str,
    singular: bool,
    nonintegrable: bool,
    log_convex: bool,
    certificate: CrCertificate,
    cr_status: &'static str,
    thresholds: Thresholds,
    relations: Option<RelationReport>,
    oscillation: Option<OscillationReport>,
}

fn power_exponent(family: &Family) -> Option<f64> {
    match family {
        Family::Power { p } | Family::ScaledPower { p, .. } => Some(*p),
        Family::Mems => Some(2.0),
        _ => None,
    }
}

pub fn cmd_report_nonlinearity(cfg: &RunConfig) -> Result<Outcome> {
    let nl = nonlinearity(cfg)?;
    let grid = &cfg.tail_grid;
    let cert = certify(&nl, grid, None).map_err(config_error)?;
    let gamma_lo = cert.gamma.map(|g| g.lo);
    let m_lo = cert.m.map(|m| m.lo);
    let p = power_exponent(nl.family());
    let thresholds = Thresholds {
        power_exponent: p,
        n_p: p.and_then(|p| np_threshold(p).ok()),
        castorina: gamma_lo.zip(m_lo).filter(|_| cert.cr_condition).and_then(|(g, m)| castorina_threshold(g, m).ok()),
        extended_dimension_bound: gamma_lo.and_then(|g| extended_dimension_bound(g).ok()),
        extended_range: extended_range(&nl, grid).ok(),
    };
    let oscillation = match nl.family() {
        Family::CastorinaOscillating { a, b, eps } => oscillation_intervals(*a, *b, *eps, 0.0, f64::INFINITY).ok(),
        _ => None,
    };
    let cr_status = if cert.cr_condition { "CR condition holds" } else { "CR condition fails" };
    let report = NonlinearityReport {
        version: VERSION,
        family: nl.family(),
        tag: nl.tag(),
        singular: nl.is_singular(),
        nonintegrable: nl.is_nonintegrable(),
        log_convex: nl.is_log_convex(),
        relations: relation_check(&nl, grid).ok(),
        certificate: cert,
        cr_status,
        thresholds,
        oscillation,
    };
    let path = out_path(cfg, "nonlinearity.json");
    report::write_json(&path, &report)?;

    let c = &report.certificate;
    println!("family: {}", report.tag);
    for (name, lim) in [("gamma", c.gamma), ("q", c.q), ("m", c.m)] {
        match lim {
            Some(l) => println!("{name}: lo = {}, hi = {}", fmt_g15(l.lo), fmt_g15(l.hi)),
            None => println!("{name}: undefined"),
        }
    }
    if let Some(th) = c.theta {
        println!("theta = {}", fmt_g15(th));
    }
    println!("{cr_status}");
    if let Some(np) = report.thresholds.n_p {
        println!("N(p) = {}", fmt_g15(np));
    }
    if let Some(nc) = report.thresholds.castorina {
        println!("castorina threshold = {}", fmt_g15(nc));
    }
    println!("wrote {}", path.display());
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct ExtremalSummary {
    behavior: ExtremalBehavior,
    sup_max_u: f64,
    margin: f64,
}

#[derive(Serialize)]
struct BranchSummary<'a> {
    version: &'static str,
    family: &'a Family,
    n: usize,
    points: usize,
    lambda_star: f64,
    s_at_lambda_star: f64,
    s_fold: Option<f64>,
    turning_points: &'a [TurningPoint],
    singular_family: bool,
    extremal: ExtremalSummary,
    /// the stable branch runs into the singularity without a fold
    singular_extremal: bool,
    grid: SGrid,
    tol: Tolerance,
}

fn branch_summary<'a>(d: &'a BifurcationDiagram, family: &'a Family) -> Result<BranchSummary<'a>> {
    let ext = extremal_profile(d)?;
    Ok(BranchSummary {
        version: VERSION,
        family,
        n: d.n,
        points: d.points.len(),
        lambda_star: d.lambda_star,
        s_at_lambda_star: d.s_at_lambda_star,
        s_fold: d.s_fold,
        turning_points: &d.turning_points,
        singular_family: d.singular_family,
        singular_extremal: ext.behavior == ExtremalBehavior::Singular,
        extremal: ExtremalSummary { behavior: ext.behavior, sup_max_u: ext.sup_max_u, margin: ext.margin },
        grid: d.options.grid,
        tol: d.options.tol,
    })
}

fn print_branch(summary: &BranchSummary) {
    println!("lambda* = {} at s = {}", fmt_g15(summary.lambda_star), fmt_g15(summary.s_at_lambda_star));
    match summary.s_fold {
        Some(s) => println!("fold at s = {}", fmt_g15(s)),
        None => println!("no fold on the grid"),
    }
    if summary.singular_extremal {
        println!("singular extremal: max u reaches {}", fmt_g15(summary.extremal.sup_max_u));
    }
}

pub fn cmd_branch(cfg: &RunConfig) -> Result<Outcome> {
    let nl = nonlinearity(cfg)?;
    let d = sweep(cfg, &nl, false)?;
    let summary = branch_summary(&d, nl.family())?;
    if cfg.wants(Format::Csv) {
        d.write_csv(&out_path(cfg, "branch.csv"))?;
    }
    if cfg.wants(Format::Json) {
        report::write_json(&out_path(cfg, "branch.json"), &summary)?;
    }
    print_branch(&summary);
    println!("wrote branch output to {}", cfg.output_dir().display());
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct FoldSpectrum {
    mu1: f64,
    error_bar: f64,
    cells: (usize, usize),
}

impl From<&SpectralResult> for FoldSpectrum {
    fn from(r: &SpectralResult) -> Self {
        Self { mu1: r.mu1, error_bar: r.error_bar, cells: r.cells }
    }
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    #[serde(flatten)]
    branch: BranchSummary<'a>,
    stable_points: usize,
    first_unstable_s: Option<f64>,
    fold_spectrum: Option<FoldSpectrum>,
}

pub fn cmd_stability(cfg: &RunConfig) -> Result<Outcome> {
    let nl = nonlinearity(cfg)?;
    let d = sweep(cfg, &nl, true)?;
    let stable = d.stable_indices();
    let first_unstable_s = d.points.get(stable.len()).map(|p| p.s);
    let fold_spectrum = match &d.fold_profile {
        Some(fp) => Some(FoldSpectrum::from(&rayleigh_min(fp, &cfg.spectral)?)),
        None => None,
    };
    let summary = StabilitySummary {
        branch: branch_summary(&d, nl.family())?,
        stable_points: stable.len(),
        first_unstable_s,
        fold_spectrum,
    };
    if cfg.wants(Format::Csv) {
        d.write_csv(&out_path(cfg, "stability.csv"))?;
    }
    if cfg.wants(Format::Json) {
        report::write_json(&out_path(cfg, "stability.json"), &summary)?;
    }
    print_branch(&summary.branch);
    println!("stable points: {} of {}", summary.stable_points, d.points.len());
    if let Some(f) = &summary.fold_spectrum {
        println!("mu1 at the fold = {} ± {}", fmt_g15(f.mu1), fmt_g15(f.error_bar));
    }
    println!("wrote stability output to {}", cfg.output_dir().display());
    Ok(Outcome::Success)
}

/// Report for the pointwise inequality checks run by `verify`.
#[derive(Serialize)]
struct CheckReport<T: Serialize> {
    tag: &'static str,
    family: String,
    n: usize,
    mode: Mode,
    /// a sample passes when its ratio is at most this
    limit: f64,
    samples: Vec<T>,
    max_ratio: f64,
    verdict: Trend,
    passed: bool,
    version: &'static str,
}

impl<T: Serialize> CheckReport<T> {
    fn new(tag: &'static str, d: &BifurcationDiagram, mode: Mode, limit: f64, samples: Vec<T>, ratio: impl Fn(&T) -> f64) -> Self {
        let max_ratio = samples.iter().map(&ratio).fold(0.0, f64::max);
        let ok = !samples.is_empty() && samples.iter().all(|s| ratio(s) <= limit);
        Self {
            tag,
            family: d.family.clone(),
            n: d.n,
            mode,
            limit,
            max_ratio,
            verdict: if ok { Trend::Bounded } else { Trend::Inconclusive },
            passed: ok || mode == Mode::Explore,
            samples,
            version: VERSION,
        }
    }
}

#[derive(Serialize)]
struct TagSummary {
    tag: String,
    verdict: Trend,
    passed: bool,
    max_ratio: f64,
    margin: Option<f64>,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    version: &'static str,
    family: &'a Family,
    n: usize,
    mode: Mode,
    branch_points: usize,
    stable_points: usize,
    results: Vec<TagSummary>,
    passed: bool,
}

fn write_check<T: Serialize>(cfg: &RunConfig, r: &CheckReport<T>, rows: Vec<(f64, f64)>) -> Result<TagSummary> {
    if cfg.wants(Format::Json) {
        report::write_json(&out_path(cfg, &format!("verify-{}.json", r.tag)), r)?;
    }
    if cfg.wants(Format::Csv) {
        let rows = rows.into_iter().map(|(s, ratio)| vec![Some(s), Some(ratio)]);
        report::write_csv(&out_path(cfg, &format!("verify-{}.csv", r.tag)), &["s", "ratio"], rows)?;
    }
    Ok(TagSummary { tag: r.tag.to_string(), verdict: r.verdict, passed: r.passed, max_ratio: r.max_ratio, margin: None })
}

fn run_inequality(tag: &str, d: &BifurcationDiagram, cfg: &RunConfig) -> Result<TagSummary> {
    let mode = cfg.mode;
    let stable = d.stable_indices();
    match tag {
        "stability-lemma" => {
            let checks = verify_stability_lemma_on_branch(d, &cfg.tail_grid, |_| TestFunction::cutoff(0.25, 0.75))
                .map_err(config_error)?;
            let rows = checks.iter().map(|c| (c.s, c.ratio)).collect();
            write_check(cfg, &CheckReport::new("stability-lemma", d, mode, 1.0 + 1e-4, checks, |c| c.ratio), rows)
        }
        "l1-laplacian" => {
            let checks = stable
                .par_iter()
                .map(|&i| verify_l1_laplacian_control(&d.profiles[i]))
                .collect::<Result<Vec<_>>>()?;
            let rows = checks.iter().map(|c| (c.s, c.ratio)).collect();
            write_check(cfg, &CheckReport::new("l1-laplacian", d, mode, 1.0 + 1e-4, checks, |c| c.ratio), rows)
        }
        _ => {
            let checks = stable
                .par_iter()
                .map(|&i| subsolution_identities(&d.profiles[i], 41))
                .collect::<Result<Vec<_>>>()?;
            let err = |c: &crate::estimates::SubsolutionCheck| c.max_error_primitive.max(c.max_error_f);
            let rows = checks.iter().map(|c| (c.s, err(c))).collect();
            write_check(cfg, &CheckReport::new("subsolution", d, mode, 1e-4, checks, err), rows)
        }
    }
}

fn write_estimate(cfg: &RunConfig, r: &EstimateReport) -> Result<TagSummary> {
    if cfg.wants(Format::Json) {
        r.write_json(&out_path(cfg, &format!("verify-{}.json", r.tag)))?;
    }
    if cfg.wants(Format::Csv) {
        r.write_csv(&out_path(cfg, &format!("verify-{}.csv", r.tag)))?;
    }
    Ok(TagSummary { tag: r.tag.to_string(), verdict: r.verdict, passed: r.passed, max_ratio: r.max_ratio, margin: r.margin })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    check_tags(&cfg.tags)?;
    let tags: Vec<String> = if cfg.tags.is_empty() {
        EstimateTag::ALL.iter().map(|t| t.name().to_string()).collect()
    } else {
        cfg.tags.clone()
    };
    let nl = nonlinearity(cfg)?;
    let d = sweep(cfg, &nl, false)?;
    let est = cfg.estimate_config();
    let mut results = Vec::new();
    for tag in &tags {
        let summary = if INEQUALITY_TAGS.contains(&tag.as_str()) {
            run_inequality(tag, &d, cfg)?
        } else {
            let report = verify(EstimateTag::parse(tag)?, &d, &est).map_err(|e| match e {
                Error::Domain(m) => Error::Config(m),
                other => other,
            })?;
            write_estimate(cfg, &report)?
        };
        println!(
            "{:<16} {:<12} max ratio {}{}",
            summary.tag,
            format!("{:?}", summary.verdict).to_lowercase(),
            fmt_g15(summary.max_ratio),
            if summary.passed { "" } else { "  FAILED" }
        );
        results.push(summary);
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.tag.clone()).collect();
    let summary = VerifySummary {
        version: VERSION,
        family: nl.family(),
        n: d.n,
        mode: cfg.mode,
        branch_points: d.points.len(),
        stable_points: d.stable_indices().len(),
        passed: failed.is_empty(),
        results,
    };
    report::write_json(&out_path(cfg, "verify.json"), &summary)?;
    Ok(if failed.is_empty() { Outcome::Success } else { Outcome::VerificationFailed(failed) })
}

#[derive(Serialize)]
struct ExplicitReport {
    version: &'static str,
    #[serde(flatten)]
    stability: ExplicitStability,
    classification: &'static str,
    c: f64,
    residual: f64,
    residual_range: (f64, f64),
    integrable_primitive: bool,
    notes: Vec<String>,
}

pub fn cmd_explicit(p: f64, n: usize, cfg: &RunConfig) -> Result<Outcome> {
    if !(p > 0.0 && p.is_finite()) || n < 2 {
        return Err(Error::Config(format!("explicit needs p > 0 and n >= 2 (got p = {p}, n = {n})")));
    }
    let stability = explicit_singular_stability(p, n as f64).map_err(config_error)?;
    let range = (1e-3, 1.0 - 1e-3);
    let residual = explicit_residual(p, n, range.0, range.1, 2001).map_err(config_error)?;
    let c = crate::nonlinearity::scaled_power_coefficient(p, n as f64).map_err(config_error)?;
    let mut notes = Vec::new();
    if p < 1.0 {
        notes.push(format!("p = {p} < 1: the primitive F is integrable up to 1 (F(1) < +inf)"));
    }
    let report = ExplicitReport {
        version: VERSION,
        classification: if stability.stable { "stable" } else { "unstable" },
        c,
        residual,
        residual_range: range,
        integrable_primitive: p < 1.0,
        notes,
        stability,
    };
    let path: &Path = &out_path(cfg, "explicit.json");
    report::write_json(path, &report)?;
    println!("p = {}, n = {}: {}", fmt_g15(p), n, report.classification);
    println!("N(p) = {}", fmt_g15(report.stability.threshold));
    println!("c(p, n) = {}", fmt_g15(c));
    println!("max ODE residual = {:e}", residual);
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("wrote {}", path.display());
    Ok(Outcome::Success)
}
