use rayon::prelude::*;

use super::{certificate, EstimateConfig, EstimateParams, EstimateReport, EstimateSample, EstimateTag, Mode};
use crate::error::{domain, Error, Result};
use crate::nonlinearity::{KBound, Nonlinearity};
use crate::radial_solver::{BifurcationDiagram, RadialProfile, RadialState};

/// `λ F(max_{B_{1/2}} u) / ‖u‖²_{L¹(B₁)}`; `u` is radially decreasing, so the
/// maximum is `u(0) = s`.
pub fn interior_linf_sample(p: &RadialProfile) -> Result<EstimateSample> {
    let big_f = p.nonlinearity().primitive(p.s)?;
    Ok(EstimateSample::new(p.s, p.lambda, p.lambda * big_f, p.l1_norm * p.l1_norm))
}

/// `‖g(u)‖_{L^p̄(B_ρ)}` with `g(u)/g(s) ≤ 1` raised to `p̄` to avoid overflow.
fn g_lp_norm(p: &RadialProfile, p_bar: f64, rho: f64) -> f64 {
    let nl = p.nonlinearity();
    let f_max = nl.f(p.s);
    let scaled = p.integrate(rho, |_, u, _| (nl.f(u) / f_max).powf(p_bar));
    p.lambda * f_max * scaled.powf(1.0 / p_bar)
}

/// `‖g(u)‖_{L^p̄(B_{1/2})} / ‖u‖_{L¹(B₁)}`.
pub fn interior_lp_sample(p: &RadialProfile, p_bar: f64) -> Result<EstimateSample> {
    check_p_bar(p_bar)?;
    Ok(EstimateSample::new(p.s, p.lambda, g_lp_norm(p, p_bar, 0.5), p.l1_norm))
}

/// `‖g(u)‖_{L^p̄(B₁)} / (g(0) + ‖g'(u) g(u)‖_{L¹(B₁)})`.
pub fn global_lp_sample(p: &RadialProfile, p_bar: f64) -> Result<EstimateSample> {
    check_p_bar(p_bar)?;
    let nl = p.nonlinearity();
    let lam = p.lambda;
    let product = p.integrate(1.0, |_, u, _| {
        let (f, df, _) = nl.derivs(u);
        (lam * df * lam * f).abs()
    });
    Ok(EstimateSample::new(p.s, lam, g_lp_norm(p, p_bar, 1.0), lam * nl.f0() + product))
}

/// `‖g(u)‖_{W^{1,2}(B_{1/2})} / ‖u‖_{L¹(B_{3/4})}`, with `∇g(u) = g'(u) u'`.
pub fn w12_sample(p: &RadialProfile) -> Result<EstimateSample> {
    let nl = p.nonlinearity();
    let lam = p.lambda;
    let sq = p.integrate(0.5, |_, u, du| {
        let (f, df, _) = nl.derivs(u);
        (lam * f).powi(2) + (lam * df * du).powi(2)
    });
    Ok(EstimateSample::new(p.s, lam, sq.sqrt(), p.integrate(0.75, |_, u, _| u)))
}

/// `∫_{B_{3/16}} (g(u)² + |x|² |∇g(u)|²) |x|^{2-n} dx / ‖u‖²_{L¹(B_{3/4})}`.
pub fn morrey_sample(p: &RadialProfile) -> Result<EstimateSample> {
    let nl = p.nonlinearity();
    let lam = p.lambda;
    let a = 2.0 - p.n as f64;
    let num = p.integrate_weighted(3.0 / 16.0, a, |x, u, du| {
        let (f, df, _) = nl.derivs(u);
        (lam * f).powi(2) + (x * lam * df * du).powi(2)
    });
    let l1 = p.integrate(0.75, |_, u, _| u);
    Ok(EstimateSample::new(p.s, lam, num, l1 * l1))
}

/// `I = ∫_{B₁} g'(u) g(u) dx`, recorded as the ratio.
pub fn nedev_sample(p: &RadialProfile) -> Result<EstimateSample> {
    let nl = p.nonlinearity();
    let lam = p.lambda;
    let value = p.integrate(1.0, |_, u, _| {
        let (f, df, _) = nl.derivs(u);
        lam * lam * df * f
    });
    Ok(EstimateSample::new(p.s, lam, value, 1.0))
}

fn check_p_bar(p_bar: f64) -> Result<()> {
    if p_bar >= 1.0 && p_bar.is_finite() {
        Ok(())
    } else {
        domain(format!("integrability exponent p̄ must be finite and >= 1 (got {p_bar})"))
    }
}

/// `(β, p̄)`: `p̄ = (2+β) 2n/(n-2)` for `n ≥ 3` with `β ∈ (0, √(1+θ) - 1)`,
/// `p̄ = p_bar_low_dim` for `n ≤ 2`.
pub fn lp_exponent(theta: Option<f64>, beta: Option<f64>, n: usize, p_bar_low_dim: f64) -> Result<(Option<f64>, f64)> {
    if n <= 2 {
        check_p_bar(p_bar_low_dim)?;
        return Ok((beta, p_bar_low_dim));
    }
    let beta = match (theta, beta) {
        (Some(th), b) => {
            let top = (1.0 + th).sqrt() - 1.0;
            let b = b.unwrap_or(0.9 * top);
            if !(b > 0.0 && b < top) {
                return domain(format!("β = {b} outside the eligibility interval (0, √(1+θ) - 1) = (0, {top}) for θ = {th}"));
            }
            b
        }
        (None, Some(b)) if b > 0.0 && b.is_finite() => b,
        (None, Some(b)) => return domain(format!("β must be positive (got {b})")),
        (None, None) => return domain("no θ certificate for this nonlinearity; pass β explicitly"),
    };
    let nf = n as f64;
    Ok((Some(beta), (2.0 + beta) * 2.0 * nf / (nf - 2.0)))
}

fn convex(nl: &Nonlinearity) -> bool {
    if let Some(t) = nl.table() {
        return t.is_convex();
    }
    let t_max = nl.t_max();
    (0..=180).all(|i| {
        let t = t_max * (1.0 - (-(i as f64) / 30.0).exp());
        let (f, _, d2f) = nl.derivs(t);
        d2f >= -1e-10 * f
    })
}

fn check_hypotheses(tag: EstimateTag, nl: &Nonlinearity, n: usize, mode: Mode) -> Result<()> {
    if mode == Mode::Explore {
        return Ok(());
    }
    let (lo, hi) = tag.theorem_dimensions();
    if n < lo || n > hi {
        return Err(Error::Config(format!(
            "{tag} is a theorem only for {lo} <= n <= {hi} (n = {n}); use exploration mode"
        )));
    }
    let needs_convex = matches!(tag, EstimateTag::GlobalLinf | EstimateTag::GlobalLp | EstimateTag::Nedev);
    if needs_convex && !convex(nl) {
        return Err(Error::Config(format!("{tag} needs a convex nonlinearity; {} is not", nl.tag())));
    }
    if tag == EstimateTag::GlobalLinf && !nl.is_nonintegrable() {
        return Err(Error::Config(format!("{tag} needs a nonintegrable singular nonlinearity; {} is not", nl.tag())));
    }
    Ok(())
}

/// Stable profiles of the diagram, with the nonlinearity they share.
fn stable_profiles(d: &BifurcationDiagram) -> Result<(Vec<&RadialProfile>, &Nonlinearity)> {
    if d.profiles.len() != d.points.len() || d.profiles.is_empty() {
        return domain("the branch carries no profiles; rerun the sweep");
    }
    let nl = d.profiles[0].nonlinearity();
    Ok((d.stable_indices().into_iter().map(|i| &d.profiles[i]).collect(), nl))
}

fn run(
    tag: EstimateTag,
    d: &BifurcationDiagram,
    cfg: &EstimateConfig,
    params: EstimateParams,
    sample: impl Fn(&RadialProfile) -> Result<EstimateSample> + Sync,
) -> Result<EstimateReport> {
    let (profiles, nl) = stable_profiles(d)?;
    check_hypotheses(tag, nl, d.n, cfg.mode)?;
    let samples = profiles
        .par_iter()
        .map(|p| sample(p).map_err(|e| Error::Branch { s: p.s, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    EstimateReport::assemble(tag, nl, d.n, cfg, params, samples)
}

fn lp_params(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateParams> {
    let (_, nl) = stable_profiles(d)?;
    let cert = certificate(nl, cfg)?;
    let (beta, p_bar) = lp_exponent(cert.theta, cfg.beta, d.n, cfg.p_bar_low_dim)?;
    Ok(EstimateParams {
        beta,
        theta: cert.theta,
        k: cert.k.and_then(KBound::value),
        p_bar: Some(p_bar),
        radii: vec![],
    })
}

pub fn verify_interior_linf(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    let params = EstimateParams { radii: vec![0.5, 1.0], ..Default::default() };
    run(EstimateTag::InteriorLinf, d, cfg, params, interior_linf_sample)
}

/// Records `max u = s` per stable point; the verdict compares the supremum
/// with `1 - linf_margin`.
pub fn verify_global_linf(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    run(EstimateTag::GlobalLinf, d, cfg, EstimateParams::default(), |p| Ok(EstimateSample::new(p.s, p.lambda, p.s, 1.0)))
}

pub fn verify_interior_lp(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    let params = EstimateParams { radii: vec![0.5, 1.0], ..lp_params(d, cfg)? };
    let p_bar = params.p_bar.expect("set by lp_params");
    run(EstimateTag::InteriorLp, d, cfg, params, |p| interior_lp_sample(p, p_bar))
}

pub fn verify_global_lp(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    let params = EstimateParams { radii: vec![1.0], ..lp_params(d, cfg)? };
    let p_bar = params.p_bar.expect("set by lp_params");
    run(EstimateTag::GlobalLp, d, cfg, params, |p| global_lp_sample(p, p_bar))
}

pub fn verify_w12(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    let params = EstimateParams { radii: vec![0.5, 0.75], ..Default::default() };
    run(EstimateTag::W12, d, cfg, params, w12_sample)
}

pub fn verify_morrey(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    let params = EstimateParams { radii: vec![3.0 / 16.0, 0.75], ..Default::default() };
    run(EstimateTag::Morrey, d, cfg, params, morrey_sample)
}

pub fn verify_nedev_yezhou(d: &BifurcationDiagram, cfg: &EstimateConfig) -> Result<EstimateReport> {
    run(EstimateTag::Nedev, d, cfg, EstimateParams::default(), nedev_sample)
}
