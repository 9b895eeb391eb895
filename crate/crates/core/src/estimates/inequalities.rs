use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::nonlinearity::{certify, KBound, TailGrid};
use crate::numerics::{radial_integral_fn_weighted, Tolerance};
use crate::radial_solver::{BifurcationDiagram, RadialProfile, RadialState};
use crate::spectral::{smoothstep, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityLemmaCheck {
    pub s: f64,
    pub theta: f64,
    /// `λ² max(K_f, sup_{[0,s]} ((1+θ) f'² - f f''))`
    pub k_effective: f64,
    /// `(1+θ) ∫ |∇g(u)|² η²`
    pub lhs: f64,
    /// `∫ g(u)² |∇η|² + K ∫ |∇u|² η²`
    pub rhs: f64,
    pub ratio: f64,
    /// `∫ g''(u) g(u) |∇u|² η²`
    pub precursor_lhs: f64,
    /// `∫ g(u)² |∇η|²`
    pub precursor_rhs: f64,
    pub precursor_ratio: f64,
}

fn check_admissible(eta: &TestFunction) -> Result<()> {
    let (v, d) = eta.eval(1.0);
    if v.abs() > 1e-12 || !d.is_finite() {
        return domain(format!("η = {} is not admissible: it must vanish on the boundary", eta.describe()));
    }
    Ok(())
}

/// Both sides of the gradient inequality for `g = λ f` at a stable profile,
/// together with the inequality it is derived from.
///
/// `θ` is the certificate exponent of `f`, `k_f` its constant; `K` scales by
/// `λ²` for `g` and is raised to the pointwise supremum over the range of
/// `u` when the certificate grid missed a larger value.
pub fn verify_stability_lemma(p: &RadialProfile, theta: f64, k_f: f64, eta: &TestFunction) -> Result<StabilityLemmaCheck> {
    check_admissible(eta)?;
    if !(theta > 0.0) || !(k_f >= 0.0 && k_f.is_finite()) {
        return domain(format!("need θ > 0 and finite K >= 0 (got θ = {theta}, K = {k_f})"));
    }
    let nl = p.nonlinearity();
    let lam = p.lambda;
    let local = (0..=2000)
        .map(|i| {
            let (f, df, d2f) = nl.derivs(p.s * i as f64 / 2000.0);
            (1.0 + theta) * df * df - f * d2f
        })
        .fold(0.0, f64::max);
    let k = lam * lam * k_f.max(local);
    let rho = eta.support_end();
    let part = |select: fn(f64, f64, f64, f64, f64, f64) -> f64| {
        p.integrate(rho, |x, u, du| {
            let (e, de) = eta.eval(x);
            let (f, df, d2f) = nl.derivs(u);
            select(lam * f, lam * df, lam * d2f, du, e, de)
        })
    };
    let grad_g = part(|_, dg, _, du, e, _| (dg * du * e).powi(2));
    let grad_eta = part(|g, _, _, _, _, de| (g * de).powi(2));
    let grad_u = part(|_, _, _, du, e, _| (du * e).powi(2));
    let precursor = part(|g, _, d2g, du, e, _| d2g * g * (du * e).powi(2));
    let lhs = (1.0 + theta) * grad_g;
    let rhs = grad_eta + k * grad_u;
    Ok(StabilityLemmaCheck {
        s: p.s,
        theta,
        k_effective: k,
        lhs,
        rhs,
        ratio: lhs / rhs,
        precursor_lhs: precursor,
        precursor_rhs: grad_eta,
        precursor_ratio: precursor / grad_eta,
    })
}

/// [`verify_stability_lemma`] at every stable point of a branch, with `θ` and
/// `K` from the nonlinearity's certificate and `η` built per profile.
pub fn verify_stability_lemma_on_branch(
    d: &BifurcationDiagram,
    grid: &TailGrid,
    eta: impl Fn(&RadialProfile) -> Result<TestFunction> + Sync,
) -> Result<Vec<StabilityLemmaCheck>> {
    let Some(first) = d.profiles.first() else {
        return domain("the branch carries no profiles; rerun the sweep");
    };
    let cert = certify(first.nonlinearity(), grid, None)?;
    let theta = cert.theta.ok_or_else(|| Error::Domain(format!("{} has no θ certificate", first.nonlinearity().tag())))?;
    let k_f = match cert.k {
        Some(KBound::Finite(k)) => k,
        _ => return domain(format!("K is unbounded for θ = {theta}")),
    };
    d.stable_indices()
        .par_iter()
        .map(|&i| {
            let p = &d.profiles[i];
            verify_stability_lemma(p, theta, k_f, &eta(p)?)
        })
        .collect()
}

/// `η = f(u)^{1+β} ζ` with `ζ` the smoothstep cutoff on `[inner, outer]`.
pub fn proof_test_function(p: &RadialProfile, beta: f64, inner: f64, outer: f64) -> Result<TestFunction> {
    let zeta = TestFunction::cutoff(inner, outer)?;
    let breaks = zeta.breakpoints();
    let p = p.clone();
    Ok(TestFunction::custom(
        format!("f(u)^{} * {}", 1.0 + beta, zeta.describe()),
        move |x| {
            let (z, dz) = zeta.eval(x);
            let (f, df, _) = p.nonlinearity().derivs(p.u(x));
            let v = f.powf(1.0 + beta);
            (v * z, (1.0 + beta) * f.powf(beta) * df * p.du(x) * z + v * dz)
        },
        breaks,
    ))
}

/// `η = max(x, δ)^{(4-n)/2} ζ`: the power weight, truncated near the origin.
pub fn truncated_power_test_function(n: usize, delta: f64, inner: f64, outer: f64) -> Result<TestFunction> {
    if !(delta > 0.0 && delta < inner) {
        return domain(format!("need 0 < δ < inner radius (δ = {delta}, inner = {inner})"));
    }
    let k = (4.0 - n as f64) / 2.0;
    let zeta = TestFunction::cutoff(inner, outer)?;
    let mut breaks = zeta.breakpoints();
    breaks.push(delta);
    Ok(TestFunction::custom(
        format!("max(x, {delta})^{k} * {}", zeta.describe()),
        move |x| {
            let (z, dz) = zeta.eval(x);
            if x <= delta {
                (delta.powf(k) * z, delta.powf(k) * dz)
            } else {
                let v = x.powf(k);
                (v * z, k * v / x * z + v * dz)
            }
        },
        breaks,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyCheck {
    pub n: usize,
    pub a: f64,
    /// `(n + a - 2)² / 4`
    pub constant: f64,
    /// `constant · ∫ φ² |x|^{a-2}`
    pub lhs: f64,
    /// `∫ φ_r² |x|^a`
    pub rhs: f64,
    pub ratio: f64,
}

/// Both sides of the weighted Hardy inequality for a radial `φ`.
pub fn verify_hardy(n: usize, a: f64, phi: &TestFunction) -> Result<HardyCheck> {
    if n == 0 || !(a > -(n as f64)) {
        return domain(format!("need n >= 1 and a > -n (n = {n}, a = {a})"));
    }
    let (v, _) = phi.eval(phi.support_end());
    if v.abs() > 1e-12 {
        return domain(format!("φ = {} must vanish at the end of its support", phi.describe()));
    }
    let constant = (n as f64 + a - 2.0).powi(2) / 4.0;
    let rho = phi.support_end();
    let breaks = phi.breakpoints();
    let tol = Tolerance::new(1e-300, 1e-13, 20_000)?;
    let delta = 1e-8 * rho;
    let rhs = radial_integral_fn_weighted(|x| phi.eval(x).1.powi(2), n, a, rho, &breaks, delta, &tol)?.value;
    let lhs = if constant == 0.0 {
        0.0
    } else {
        let integral = radial_integral_fn_weighted(|x| phi.eval(x).0.powi(2), n, a - 2.0, rho, &breaks, delta, &tol)
            .map_err(|e| match e {
                Error::Numerical { .. } => Error::Domain(format!(
                    "φ = {} is not admissible for a = {a}: it must vanish at the origin when a < 2 - n",
                    phi.describe()
                )),
                other => other,
            })?;
        constant * integral.value
    };
    if !(rhs > 0.0) {
        return domain(format!("φ = {} has no gradient", phi.describe()));
    }
    Ok(HardyCheck { n, a, constant, lhs, rhs, ratio: lhs / rhs })
}

/// `φ = r^{-(n+a-2)/2}` on the plateau `[δ, 1/2]`, smoothstep ramps on
/// `[δ/2, δ]` and `[1/2, 1]`. The Hardy ratio tends to 1 as `δ → 0`.
pub fn hardy_near_extremal(n: usize, a: f64, delta: f64) -> Result<TestFunction> {
    if !(delta > 0.0 && delta < 0.5) {
        return domain(format!("plateau start δ must lie in (0, 1/2) (got {delta})"));
    }
    let k = (n as f64 + a - 2.0) / 2.0;
    let outer = TestFunction::cutoff(0.5, 1.0)?;
    Ok(TestFunction::custom(
        format!("r^{} plateau [{delta}, 0.5]", -k),
        move |x| {
            if x <= 0.5 * delta {
                return (0.0, 0.0);
            }
            let (zi, dzi, _) = smoothstep((x - 0.5 * delta) / (0.5 * delta));
            let dzi = dzi / (0.5 * delta);
            let (zo, dzo) = outer.eval(x);
            let v = x.powf(-k);
            let dv = -k * v / x;
            (v * zi * zo, dv * zi * zo + v * dzi * zo + v * zi * dzo)
        },
        vec![0.5 * delta, delta, 0.5],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1ControlCheck {
    pub s: f64,
    /// `‖Δu‖_{L¹(B_{3/4})} = ∫_{B_{3/4}} g(u)`
    pub lhs: f64,
    /// `∫_{B₁} u (-Δφ)`, which dominates `lhs`
    pub tested: f64,
    pub l1_norm: f64,
    /// `max |Δφ|`
    pub cutoff_constant: f64,
    /// `lhs / ‖u‖_{L¹}`
    pub ratio_raw: f64,
    /// `lhs / (max|Δφ| ‖u‖_{L¹})`, at most 1
    pub ratio: f64,
}

/// `‖Δu‖_{L¹(B_{3/4})} ≤ ∫ u (-Δφ) ≤ max|Δφ| ‖u‖_{L¹(B₁)}` with `φ` the
/// smoothstep cutoff equal to 1 on `B_{3/4}`.
pub fn verify_l1_laplacian_control(p: &RadialProfile) -> Result<L1ControlCheck> {
    let phi = TestFunction::cutoff(0.75, 1.0)?;
    let nm1 = p.n as f64 - 1.0;
    let lap = |x: f64| phi.second_derivative(x).expect("closed form") + nm1 / x * phi.eval(x).1;
    let cutoff_constant = (0..=20_000).map(|i| lap(0.75 + 0.25 * i as f64 / 20_000.0).abs()).fold(0.0, f64::max);
    let nl = p.nonlinearity();
    let lhs = p.integrate(0.75, |_, u, _| p.lambda * nl.f(u));
    let tested = p.integrate(1.0, |x, u, _| if x > 0.75 { -u * lap(x) } else { 0.0 });
    let ratio_raw = lhs / p.l1_norm;
    Ok(L1ControlCheck {
        s: p.s,
        lhs,
        tested,
        l1_norm: p.l1_norm,
        cutoff_constant,
        ratio_raw,
        ratio: ratio_raw / cutoff_constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsolutionCheck {
    pub s: f64,
    pub points: usize,
    /// `-ΔG(u) = -g'(u)|∇u|² + g(u)²`, `G' = g`
    pub max_error_primitive: f64,
    /// `-Δg(u) = -g''(u)|∇u|² + g'(u) g(u)`
    pub max_error_f: f64,
}

/// Finite-difference check of the two pointwise identities on `points`
/// radii in `[0.05, 0.95]`, relative to the size of the right-hand side terms.
pub fn subsolution_identities(p: &RadialProfile, points: usize) -> Result<SubsolutionCheck> {
    if points < 2 {
        return domain("need at least two check points");
    }
    let nl = p.nonlinearity();
    let lam = p.lambda;
    let nm1 = p.n as i32 - 1;
    let h = 1e-3;
    // Laplacian of a radial function from its derivative: (x^{n-1} φ')' / x^{n-1},
    // fourth-order central difference of the flux
    let lap = |x: f64, d: &dyn Fn(f64) -> f64| {
        let flux = |y: f64| y.powi(nm1) * d(y);
        (8.0 * (flux(x + h) - flux(x - h)) - (flux(x + 2.0 * h) - flux(x - 2.0 * h))) / (12.0 * h * x.powi(nm1))
    };
    let d_primitive = |x: f64| lam * nl.f(p.u(x)) * p.du(x);
    let d_g = |x: f64| lam * nl.derivs(p.u(x)).1 * p.du(x);
    let (mut e1, mut e2): (f64, f64) = (0.0, 0.0);
    for i in 0..points {
        let x = 0.05 + 0.9 * i as f64 / (points - 1) as f64;
        let (f, df, d2f) = nl.derivs(p.u(x));
        let (g, dg, d2g) = (lam * f, lam * df, lam * d2f);
        let du2 = p.du(x).powi(2);
        let rhs1 = -dg * du2 + g * g;
        e1 = e1.max((-lap(x, &d_primitive) - rhs1).abs() / (dg * du2 + g * g));
        let rhs2 = -d2g * du2 + dg * g;
        e2 = e2.max((-lap(x, &d_g) - rhs2).abs() / (d2g.abs() * du2 + (dg * g).abs()));
    }
    Ok(SubsolutionCheck { s: p.s, points, max_error_primitive: e1, max_error_f: e2 })
}
