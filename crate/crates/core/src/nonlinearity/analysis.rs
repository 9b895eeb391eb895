use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{castorina_phase_point, gamma_from_jet, Family, Nonlinearity, Quotients};
use crate::error::{domain, Error, Result};

/// Sampling of the tail `t → 1` used for liminf/limsup surrogates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TailGrid {
    /// smallest `1 - t`
    pub floor: f64,
    /// largest `1 - t`
    pub start: f64,
    /// geometric samples in `1 - t`
    pub points: usize,
    /// uniform samples in `t` on `[0, 1 - start]` (for `K` and the onset)
    pub body_points: usize,
    /// phase periods swept for the oscillating family
    pub phase_periods: usize,
    pub phase_points: usize,
    /// the phase sweep starts where the decaying corrections fall below this
    pub phase_depth: f64,
}

impl Default for TailGrid {
    fn default() -> Self {
        Self {
            floor: 1e-12,
            start: 0.1,
            points: 100,
            body_points: 400,
            phase_periods: 2,
            phase_points: 4000,
            phase_depth: 1e-6,
        }
    }
}

impl TailGrid {
    pub fn with_floor(floor: f64) -> Self {
        Self { floor, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.floor > 0.0 && self.floor < self.start && self.start < 1.0) {
            return domain(format!("tail grid needs 0 < floor < start < 1 (floor = {}, start = {})", self.floor, self.start));
        }
        if self.points < 2 || self.phase_points < 2 || self.phase_periods == 0 || !(self.phase_depth > 0.0) {
            return domain("tail grid needs at least two points and a positive phase depth");
        }
        Ok(())
    }

    /// Geometric `1 - t` values from `start` down to `floor`.
    pub fn gaps(&self) -> Vec<f64> {
        let (a, b) = (self.start.ln(), self.floor.ln());
        (0..self.points)
            .map(|i| (a + (b - a) * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quotient {
    Gamma,
    Q,
    M,
}

impl Quotient {
    fn pick(self, q: &Quotients) -> f64 {
        match self {
            Quotient::Gamma => q.gamma,
            Quotient::Q => q.q,
            Quotient::M => q.m,
        }
    }
}

/// Numerical surrogate of `(liminf, limsup)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub lo: f64,
    pub hi: f64,
}

/// Points in `s` where the tail quotients are sampled (not used for the
/// oscillating family, whose limits come from the phase sweep).
fn tail_s(nl: &Nonlinearity, grid: &TailGrid) -> Vec<f64> {
    match nl.table() {
        Some(tab) => {
            // the last interval's curvature only reflects the one-sided end slope
            let nodes = tab.nodes();
            let t_end = if nodes.len() > 2 { nodes[nodes.len() - 2] } else { tab.t_max() };
            let t_start = (0.9 * tab.t_max()).min(t_end);
            (0..grid.points)
                .map(|i| -(-(t_start + (t_end - t_start) * i as f64 / (grid.points - 1) as f64)).ln_1p())
                .collect()
        }
        None => grid.gaps().into_iter().map(|g| -g.ln()).collect(),
    }
}

/// Phase sweep `τ ∈ [τ₀, τ₀ + 2π·periods]` for the oscillating family,
/// starting deep enough that the `O(ε/log s)` corrections are below
/// `grid.phase_depth`.
fn phase_sweep(a: f64, b: f64, eps: f64, grid: &TailGrid) -> Vec<Quotients> {
    let amp = 0.5 * (b - a);
    let w0 = (amp * eps * (1.0 + eps) / grid.phase_depth).max(1.0);
    let tau0 = eps * w0.ln();
    let span = 2.0 * PI * grid.phase_periods as f64;
    (0..grid.phase_points)
        .map(|i| {
            let tau = tau0 + span * i as f64 / (grid.phase_points - 1) as f64;
            let sigma = (tau / eps).exp() - 1.0;
            let pp = castorina_phase_point(a, b, eps, tau, sigma, -(-sigma).exp_m1(), (-sigma).exp());
            let jet = super::LogJet { log_f: f64::NAN, d1: pp.d1, d2: pp.d2 };
            Quotients { gamma: gamma_from_jet(&jet), q: pp.d1, m: pp.h }
        })
        .collect()
}

/// Minimum and maximum of a quotient over the tail grid.
pub fn estimate_limits(nl: &Nonlinearity, quotient: Quotient, grid: &TailGrid) -> Result<Limits> {
    grid.validate()?;
    let samples: Vec<Quotients> = match *nl.family() {
        Family::CastorinaOscillating { a, b, eps } => phase_sweep(a, b, eps, grid),
        _ => tail_s(nl, grid).into_iter().map(|s| nl.quotients_s(s)).collect(),
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in samples.iter().map(|q| quotient.pick(q)).filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return Err(Error::UndefinedQuotient(format!(
            "{quotient:?} is undefined at every tail sample of the {} family",
            nl.tag()
        )));
    }
    Ok(Limits { lo, hi })
}

/// Relaxed-inequality constant: bounded, or divergent as `t → 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KBound {
    Finite(f64),
    Unbounded,
}

impl KBound {
    pub fn value(self) -> Option<f64> {
        match self {
            KBound::Finite(k) => Some(k),
            KBound::Unbounded => None,
        }
    }
}

/// `t` points where `K` and the concavity onset are evaluated: a uniform body
/// on `[0, 1 - start]` followed by the geometric tail.
fn evaluation_grid(nl: &Nonlinearity, grid: &TailGrid) -> Vec<f64> {
    if let Some(tab) = nl.table() {
        let nodes = tab.nodes();
        let mut ts = Vec::with_capacity(2 * nodes.len());
        for w in nodes.windows(2) {
            ts.push(w[0]);
            ts.push(0.5 * (w[0] + w[1]));
        }
        ts.push(tab.t_max());
        return ts;
    }
    let body_end = 1.0 - grid.start;
    let mut ts: Vec<f64> = (0..grid.body_points).map(|i| body_end * i as f64 / grid.body_points as f64).collect();
    ts.extend(grid.gaps().into_iter().map(|g| 1.0 - g));
    ts
}

/// Sign-carrying part of `E = (1+θ) f'² - f f''`:
/// `E = f² (1-t)^{-2} r` with `r = θ L'² - L' - L''`, snapped to 0 when it is
/// below rounding level.
fn excess_ratio(nl: &Nonlinearity, theta: f64, t: f64) -> (f64, f64) {
    let s = -(-t).ln_1p();
    let jet = nl.jet_s(s);
    let terms = [theta * jet.d1 * jet.d1, -jet.d1, -jet.d2];
    let r: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|x| x.abs()).sum();
    let r = if r.abs() <= 1e-12 * scale { 0.0 } else { r };
    // f² (1-t)^{-2}
    let weight = (2.0 * (jet.log_f + s)).exp();
    (r, weight)
}

fn excess(nl: &Nonlinearity, theta: f64, t: f64) -> f64 {
    let (r, weight) = excess_ratio(nl, theta, t);
    if r == 0.0 {
        0.0
    } else {
        r * weight
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        domain(format!("θ must be positive (got {theta})"))
    }
}

fn tail_gamma(nl: &Nonlinearity, grid: &TailGrid) -> Result<Option<f64>> {
    if !nl.is_singular() {
        return Ok(None);
    }
    Ok(Some(estimate_limits(nl, Quotient::Gamma, grid)?.lo))
}

/// `sup_t ((1+θ) f'² - f f'')₊` over the evaluation grid, or `Unbounded` when
/// the tail estimate of `γ` lies below `1 + θ`.
pub fn find_k(nl: &Nonlinearity, theta: f64, grid: &TailGrid) -> Result<KBound> {
    check_theta(theta)?;
    if let Some(gamma_lo) = tail_gamma(nl, grid)? {
        if 1.0 + theta - gamma_lo > 1e-9 {
            return Ok(KBound::Unbounded);
        }
    }
    let k = evaluation_grid(nl, grid)
        .into_iter()
        .map(|t| excess(nl, theta, t).max(0.0))
        .fold(0.0, f64::max);
    Ok(if k.is_finite() { KBound::Finite(k) } else { KBound::Unbounded })
}

/// Same as [`find_k`] with `f` replaced by `f - f(0)` in the product term.
pub fn find_k_tilde(nl: &Nonlinearity, theta: f64, grid: &TailGrid) -> Result<KBound> {
    check_theta(theta)?;
    if let Some(gamma_lo) = tail_gamma(nl, grid)? {
        // at equality f'' f(0) alone diverges
        if 1.0 + theta - gamma_lo > -1e-9 {
            return Ok(KBound::Unbounded);
        }
    }
    let f0 = nl.f0();
    let k = evaluation_grid(nl, grid)
        .into_iter()
        .map(|t| (excess(nl, theta, t) + nl.derivs(t).2 * f0).max(0.0))
        .fold(0.0, f64::max);
    Ok(if k.is_finite() { KBound::Finite(k) } else { KBound::Unbounded })
}

/// Smallest grid point `t₀` with `(f^{-θ})'' ≤ 0` on the rest of the grid.
pub fn concavity_onset(nl: &Nonlinearity, theta: f64, grid: &TailGrid) -> Result<Option<f64>> {
    check_theta(theta)?;
    let ts = evaluation_grid(nl, grid);
    let mut onset = None;
    for &t in ts.iter().rev() {
        if excess_ratio(nl, theta, t).0 <= 0.0 {
            onset = Some(t);
        } else {
            break;
        }
    }
    Ok(onset)
}

/// Constants certifying the relaxed inequality `f f'' ≥ (1+θ) f'² - K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrCertificate {
    pub theta: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<KBound>,
    #[serde(rename = "K_tilde")]
    pub k_tilde: Option<KBound>,
    pub t0: Option<f64>,
    pub gamma: Option<Limits>,
    pub q: Option<Limits>,
    pub m: Option<Limits>,
    /// `γ_lo > 1`
    pub cr_condition: bool,
}

/// Estimates the tail quotients and, when `γ_lo > 1`, certifies
/// `θ = 0.99 (γ_lo - 1)` (or the given `θ`) with its `K`, `K̃` and onset.
pub fn certify(nl: &Nonlinearity, grid: &TailGrid, theta: Option<f64>) -> Result<CrCertificate> {
    let limits = |q| match estimate_limits(nl, q, grid) {
        Ok(l) => Ok(Some(l)),
        Err(Error::UndefinedQuotient(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let gamma = limits(Quotient::Gamma)?;
    let q = limits(Quotient::Q)?;
    let m = limits(Quotient::M)?;
    let cr_condition = gamma.is_some_and(|g| g.lo > 1.0 + 1e-9);
    let theta = theta.or_else(|| gamma.filter(|_| cr_condition).map(|g| 0.99 * (g.lo - 1.0)));
    let (k, k_tilde, t0) = match theta {
        Some(th) => (
            Some(find_k(nl, th, grid)?),
            Some(find_k_tilde(nl, th, grid)?),
            concavity_onset(nl, th, grid)?,
        ),
        None => (None, None, None),
    };
    Ok(CrCertificate { theta, k, k_tilde, t0, gamma, q, m, cr_condition })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationSample {
    /// `1 - t`
    pub gap: f64,
    /// `|γ - (1 + 1/q)|`
    pub gamma_defect: f64,
    /// `|m - q|`
    pub m_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub samples: Vec<RelationSample>,
    pub max_gamma_defect: f64,
    pub max_m_defect: f64,
    /// defects at the deepest sample, the asymptotically meaningful values
    pub tail_gamma_defect: f64,
    pub tail_m_defect: f64,
}

/// Pointwise defects of the limit relations `γ = 1 + 1/q` and `m = q` along
/// the tail grid.
pub fn relation_check(nl: &Nonlinearity, grid: &TailGrid) -> Result<RelationReport> {
    grid.validate()?;
    let mut samples = Vec::new();
    for s in tail_s(nl, grid) {
        let q = nl.quotients_s(s);
        if !(q.q.abs() > 1e-12) {
            return Err(Error::UndefinedQuotient(format!(
                "q vanishes on the tail of the {} family; the relations are undefined",
                nl.tag()
            )));
        }
        samples.push(RelationSample {
            gap: (-s).exp(),
            gamma_defect: (q.gamma - (1.0 + 1.0 / q.q)).abs(),
            m_defect: (q.m - q.q).abs(),
        });
    }
    let max = |f: fn(&RelationSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let last = *samples.last().expect("tail grid has at least two points");
    Ok(RelationReport {
        max_gamma_defect: max(|r| r.gamma_defect),
        max_m_defect: max(|r| r.m_defect),
        tail_gamma_defect: last.gamma_defect,
        tail_m_defect: last.m_defect,
        samples,
    })
}
