//! Singular nonlinearity families `f : [0, 1) → (0, ∞)` and everything derived
//! from them: the primitive `F`, the quotients `γ = f f''/f'²`,
//! `q = f'(1-t)/f` and `m = log f / log(1/(1-t))`, their tail limits, the
//! relaxed constants `K`, `K̃`, dimension thresholds, and the oscillation
//! structure of the oscillating family.
//!
//! Internally every family is described by its log-jet `L(s) = log f`,
//! `L'(s)`, `L''(s)` in the coordinate `s = -log(1-t)`. The quotients are
//! ratios of jet entries and never overflow:
//!
//! ```text
//! γ = 1 + (L' + L'') / L'²      q = L'      m = L / s
//! ```

mod analysis;
mod oscillation;
mod table;
mod thresholds;

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use analysis::{
    certify, concavity_onset, estimate_limits, find_k, find_k_tilde, relation_check, CrCertificate, KBound, Limits,
    Quotient, RelationReport, RelationSample, TailGrid,
};
pub use oscillation::{oscillation_intervals, phase_to_s, s_to_phase, OscillationRegime, OscillationReport};
pub use table::MonotoneTable;
pub use thresholds::{castorina_threshold, extended_dimension_bound, np_threshold, scaled_power_coefficient};

use crate::error::{domain, Error, Result};
use crate::numerics::{quad_adaptive, Tolerance};

/// Family tag and parameters, as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `(1-t)^{-p}`
    Power { p: f64 },
    /// `exp(1/(1-t))`
    Exponential,
    /// `(1-t)^{-2}`
    Mems,
    /// `c (1-t)^{-p}`
    ScaledPower { p: f64, c: f64 },
    /// `c`; regular test family with `f' = 0`
    Constant { c: f64 },
    /// `(1-t)^{-h(t)}` with `h = (a+b)/2 + (b-a)/2 sin(ε log(1 + log(1+s)))`
    CastorinaOscillating { a: f64, b: f64, eps: f64 },
    /// two-column CSV `(t, f)`, monotone cubic interpolation
    CustomTable { path: PathBuf },
}

/// How `f, f', f''` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// closed forms in `t`
    #[default]
    Direct,
    /// exponentiate the log-jet in `s = -log(1-t)`
    LogCoordinate,
}

/// `f`, its first two derivatives and its primitive `F(t) = ∫_0^t f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Values {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
}

/// `log f` and its first two `s`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogJet {
    pub log_f: f64,
    pub d1: f64,
    pub d2: f64,
}

/// The three tail quotients at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quotients {
    pub gamma: f64,
    pub q: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    family: Family,
    mode: EvalMode,
    table: Option<Arc<MonotoneTable>>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite (got {v})"))
    }
}

impl Nonlinearity {
    /// Validates the parameters and, for `custom-table`, reads the CSV.
    pub fn new(family: Family) -> Result<Self> {
        let mut table = None;
        let mode = match &family {
            Family::Power { p } => {
                positive("p", *p)?;
                EvalMode::Direct
            }
            Family::ScaledPower { p, c } => {
                positive("p", *p)?;
                positive("c", *c)?;
                EvalMode::Direct
            }
            Family::Constant { c } => {
                positive("c", *c)?;
                EvalMode::Direct
            }
            Family::Exponential | Family::Mems => EvalMode::Direct,
            Family::CastorinaOscillating { a, b, eps } => {
                positive("a", *a)?;
                positive("b", *b)?;
                positive("eps", *eps)?;
                if a > b {
                    return domain(format!("oscillating family needs a <= b (a = {a}, b = {b})"));
                }
                EvalMode::LogCoordinate
            }
            Family::CustomTable { path } => {
                table = Some(Arc::new(MonotoneTable::from_csv(path)?));
                EvalMode::Direct
            }
        };
        Ok(Self { family, mode, table })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(Family::Power { p })
    }

    pub fn exponential() -> Self {
        Self::new(Family::Exponential).expect("no parameters to validate")
    }

    pub fn mems() -> Self {
        Self::new(Family::Mems).expect("no parameters to validate")
    }

    pub fn scaled_power(p: f64, c: f64) -> Result<Self> {
        Self::new(Family::ScaledPower { p, c })
    }

    /// `c(p,n) (1-t)^{-p}`, the family for which `1 - |x|^{2/(1+p)}` solves
    /// the equation with `λ = 1`.
    pub fn scaled_power_for_dimension(p: f64, n: f64) -> Result<Self> {
        Self::scaled_power(p, scaled_power_coefficient(p, n)?)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Family::Constant { c })
    }

    pub fn castorina(a: f64, b: f64, eps: f64) -> Result<Self> {
        Self::new(Family::CastorinaOscillating { a, b, eps })
    }

    pub fn from_table(table: MonotoneTable) -> Self {
        Self {
            family: Family::CustomTable { path: PathBuf::from("<memory>") },
            mode: EvalMode::Direct,
            table: Some(Arc::new(table)),
        }
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn tag(&self) -> &'static str {
        match self.family {
            Family::Power { .. } => "power",
            Family::Exponential => "exponential",
            Family::Mems => "mems",
            Family::ScaledPower { .. } => "scaled-power",
            Family::Constant { .. } => "constant",
            Family::CastorinaOscillating { .. } => "castorina-oscillating",
            Family::CustomTable { .. } => "custom-table",
        }
    }

    /// `f → ∞` as `t → 1`.
    pub fn is_singular(&self) -> bool {
        !matches!(self.family, Family::Constant { .. } | Family::CustomTable { .. })
    }

    /// `F → ∞` as `t → 1`.
    pub fn is_nonintegrable(&self) -> bool {
        match self.family {
            Family::Power { p } | Family::ScaledPower { p, .. } => p >= 1.0,
            Family::Exponential | Family::Mems => true,
            Family::CastorinaOscillating { b, .. } => b > 1.0,
            Family::Constant { .. } | Family::CustomTable { .. } => false,
        }
    }

    /// `log f` convex in `t`.
    pub fn is_log_convex(&self) -> bool {
        matches!(
            self.family,
            Family::Power { .. } | Family::ScaledPower { .. } | Family::Exponential | Family::Mems | Family::Constant { .. }
        )
    }

    /// Right end of the domain: 1, or the last tabulated abscissa.
    pub fn t_max(&self) -> f64 {
        self.table.as_ref().map_or(1.0, |t| t.t_max())
    }

    pub fn table(&self) -> Option<&MonotoneTable> {
        self.table.as_deref()
    }

    pub(crate) fn check_point(&self, t: f64) -> Result<()> {
        let ok = match &self.table {
            Some(tab) => tab.contains(t),
            None => (0.0..1.0).contains(&t),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("t = {t} outside the domain [0, {})", self.t_max()))
        }
    }

    fn power_params(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Power { p } => Some((p, 1.0)),
            Family::Mems => Some((2.0, 1.0)),
            Family::ScaledPower { p, c } => Some((p, c)),
            _ => None,
        }
    }

    pub fn f0(&self) -> f64 {
        self.derivs(0.0).0
    }

    /// `log f` and its derivatives at `s = -log(1-t)`.
    pub fn jet_s(&self, s: f64) -> LogJet {
        if let Some((p, c)) = self.power_params() {
            return LogJet { log_f: c.ln() + p * s, d1: p, d2: 0.0 };
        }
        match &self.family {
            Family::Exponential => {
                let e = s.exp();
                LogJet { log_f: e, d1: e, d2: e }
            }
            Family::Constant { c } => LogJet { log_f: c.ln(), d1: 0.0, d2: 0.0 },
            Family::CastorinaOscillating { a, b, eps } => castorina_jet(*a, *b, *eps, s),
            Family::CustomTable { .. } => {
                let t = -(-s).exp_m1();
                let (f, df, d2f) = self.derivs(t);
                let gap = (-s).exp();
                let l1 = df / f;
                let l2 = d2f / f;
                LogJet {
                    log_f: f.ln(),
                    d1: l1 * gap,
                    d2: gap * ((l2 - l1 * l1) * gap - l1),
                }
            }
            _ => unreachable!("power families handled above"),
        }
    }

    pub fn jet(&self, t: f64) -> LogJet {
        self.jet_s(-(-t).ln_1p())
    }

    /// `(f, f', f'')` without domain checks; used in solver inner loops.
    pub fn derivs(&self, t: f64) -> (f64, f64, f64) {
        if let Some(tab) = &self.table {
            return tab.derivs(t);
        }
        if self.mode == EvalMode::Direct {
            let g = 1.0 - t;
            if let Some((p, c)) = self.power_params() {
                let f = c * g.powf(-p);
                return (f, p * f / g, p * (p + 1.0) * f / (g * g));
            }
            match self.family {
                Family::Exponential => {
                    let sigma = 1.0 / g;
                    let f = sigma.exp();
                    return (f, f * sigma * sigma, f * sigma.powi(3) * (sigma + 2.0));
                }
                Family::Constant { c } => return (c, 0.0, 0.0),
                _ => {}
            }
        }
        let s = -(-t).ln_1p();
        let jet = self.jet_s(s);
        let inv_gap = s.exp();
        let f = jet.log_f.exp();
        let l1 = jet.d1 * inv_gap;
        let l2 = (jet.d2 + jet.d1 + jet.d1 * jet.d1) * inv_gap * inv_gap;
        (f, f * l1, f * l2)
    }

    pub fn f(&self, t: f64) -> f64 {
        self.derivs(t).0
    }

    /// `F(t) = ∫_0^t f`.
    pub fn primitive(&self, t: f64) -> Result<f64> {
        self.check_point(t)?;
        let tol = Tolerance::new(1e-300, 1e-12, 20_000)?;
        let s = -(-t).ln_1p();
        let value = if let Some((p, c)) = self.power_params() {
            if p == 1.0 {
                c * s
            } else {
                c * ((p - 1.0) * s).exp_m1() / (p - 1.0)
            }
        } else {
            match &self.family {
                Family::Constant { c } => c * t,
                Family::CustomTable { .. } => self.table.as_ref().expect("table family").primitive(t),
                // σ = 1/(1-t): F = ∫_1^σ e^v / v² dv
                Family::Exponential => quad_adaptive(|v| v.exp() / (v * v), 1.0, 1.0 / (1.0 - t), &tol)?.value,
                // dt = e^{-s} ds: F = ∫_0^s exp(L(v) - v) dv
                Family::CastorinaOscillating { .. } => {
                    quad_adaptive(|v| (self.jet_s(v).log_f - v).exp(), 0.0, s, &tol)?.value
                }
                _ => unreachable!(),
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Numerical { message: format!("F({t}) overflows"), achieved: f64::INFINITY })
        }
    }

    /// `(f, f', f'', F)` at `t`.
    pub fn eval(&self, t: f64) -> Result<Values> {
        self.check_point(t)?;
        let (f, df, d2f) = self.derivs(t);
        if !(f.is_finite() && df.is_finite() && d2f.is_finite()) {
            return Err(Error::Numerical {
                message: format!("f or its derivatives overflow at t = {t}"),
                achieved: f64::INFINITY,
            });
        }
        Ok(Values { f, df, d2f, big_f: self.primitive(t)? })
    }

    /// `f f'' / f'²`.
    pub fn cr_quotient(&self, t: f64) -> Result<f64> {
        self.check_point(t)?;
        let jet = self.jet(t);
        if jet.d1 == 0.0 {
            return Err(Error::UndefinedQuotient(format!("f'({t}) = 0")));
        }
        Ok(gamma_from_jet(&jet))
    }

    /// `f'(t)(1-t)/f(t)`.
    pub fn q_quotient(&self, t: f64) -> Result<f64> {
        self.check_point(t)?;
        Ok(self.jet(t).d1)
    }

    /// `log f(t) / log(1/(1-t))`.
    pub fn m_quotient(&self, t: f64) -> Result<f64> {
        self.check_point(t)?;
        let s = -(-t).ln_1p();
        if s == 0.0 {
            return Err(Error::UndefinedQuotient("m is undefined at t = 0".into()));
        }
        if let Family::CastorinaOscillating { a, b, eps } = self.family {
            // log f = s h(s) exactly
            return Ok(castorina_h(a, b, eps, s));
        }
        Ok(self.jet_s(s).log_f / s)
    }

    pub(crate) fn quotients_s(&self, s: f64) -> Quotients {
        let jet = self.jet_s(s);
        let m = match self.family {
            Family::CastorinaOscillating { a, b, eps } => castorina_h(a, b, eps, s),
            _ => jet.log_f / s,
        };
        Quotients { gamma: gamma_from_jet(&jet), q: jet.d1, m }
    }
}

pub(crate) fn gamma_from_jet(jet: &LogJet) -> f64 {
    1.0 + (jet.d1 + jet.d2) / (jet.d1 * jet.d1)
}

pub(crate) fn castorina_h(a: f64, b: f64, eps: f64, s: f64) -> f64 {
    let tau = eps * s.ln_1p().ln_1p();
    0.5 * (a + b) + 0.5 * (b - a) * tau.sin()
}

/// Jet ingredients of the oscillating family in terms of
/// `σ = log(1+s)`, `w = 1+σ`, `ρ = s/(1+s)`, `ι = 1/(1+s)`, `τ = ε log w`.
pub(crate) struct PhasePoint {
    pub h: f64,
    /// `L' = h + s h'`
    pub d1: f64,
    /// `L'' = 2h' + s h''`
    pub d2: f64,
}

pub(crate) fn castorina_phase_point(a: f64, b: f64, eps: f64, tau: f64, sigma: f64, rho: f64, iota: f64) -> PhasePoint {
    let c = 0.5 * (a + b);
    let amp = 0.5 * (b - a);
    let (sin, cos) = tau.sin_cos();
    let inv_w = 1.0 / (1.0 + sigma);
    let h = c + amp * sin;
    let h1 = amp * eps * cos * iota * inv_w;
    let s_h1 = amp * eps * cos * rho * inv_w;
    // s h'' = -A ε ρ ι / w² (ε sin τ + cos τ (1 + w))
    let s_h2 = -amp * eps * rho * iota * inv_w * (eps * sin * inv_w + cos * (inv_w + 1.0));
    PhasePoint { h, d1: h + s_h1, d2: 2.0 * h1 + s_h2 }
}

fn castorina_jet(a: f64, b: f64, eps: f64, s: f64) -> LogJet {
    let sigma = s.ln_1p();
    let tau = eps * sigma.ln_1p();
    let pp = castorina_phase_point(a, b, eps, tau, sigma, s / (1.0 + s), 1.0 / (1.0 + s));
    LogJet { log_f: s * pp.h, d1: pp.d1, d2: pp.d2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn power_two_closed_forms() {
        let nl = Nonlinearity::power(2.0).unwrap();
        let v = nl.eval(0.5).unwrap();
        assert!(close(v.f, 4.0, 1e-15) && close(v.df, 16.0, 1e-15) && close(v.d2f, 96.0, 1e-15));
        assert!(close(v.big_f, 1.0, 1e-15));
        let v0 = nl.eval(0.0).unwrap();
        assert_eq!((v0.f, v0.df, v0.d2f, v0.big_f), (1.0, 2.0, 6.0, 0.0));
    }

    #[test]
    fn log_coordinate_matches_direct() {
        for nl in [Nonlinearity::power(2.5).unwrap(), Nonlinearity::exponential(), Nonlinearity::mems()] {
            let log = nl.clone().with_mode(EvalMode::LogCoordinate);
            for t in [0.0, 0.3, 0.9, 0.99] {
                let (a, b) = (nl.derivs(t), log.derivs(t));
                assert!(close(a.0, b.0, 1e-12) && close(a.1, b.1, 1e-12) && close(a.2, b.2, 1e-11), "{t}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let nl = Nonlinearity::mems();
        assert!(matches!(nl.eval(1.0), Err(Error::Domain(_))));
        assert!(matches!(nl.eval(-0.1), Err(Error::Domain(_))));
        assert!(Nonlinearity::power(-1.0).is_err());
        assert!(Nonlinearity::castorina(1.8, 1.2, 1.0).is_err());
    }

    #[test]
    fn constant_family_quotients() {
        let nl = Nonlinearity::constant(1.0).unwrap();
        assert!(matches!(nl.cr_quotient(0.5), Err(Error::UndefinedQuotient(_))));
        assert_eq!(nl.q_quotient(0.5).unwrap(), 0.0);
        assert!(close(nl.primitive(0.5).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn family_serde_round_trip() {
        let fam: Family = serde_json::from_str(r#"{"family":"castorina-oscillating","a":1.2,"b":1.8,"eps":2.0}"#).unwrap();
        assert_eq!(fam, Family::CastorinaOscillating { a: 1.2, b: 1.8, eps: 2.0 });
        let fam: Family = serde_json::from_str(r#"{"family":"mems"}"#).unwrap();
        assert_eq!(fam, Family::Mems);
    }
}
