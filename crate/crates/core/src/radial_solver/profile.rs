use std::path::Path;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::numerics::{
    gauss_legendre_10, ode_integrate, radial_integral, sphere_area, DenseSegment, Event, GridFunction, OdeOptions,
    Tolerance,
};
use crate::report;

/// A radial function on the unit ball, `x ↦ u(|x|)`, solving `-Δu = λ f(u)`.
pub trait RadialState: Sync {
    fn dimension(&self) -> usize;
    fn lambda(&self) -> f64;
    fn nonlinearity(&self) -> &Nonlinearity;
    fn u(&self, x: f64) -> f64;
    fn du(&self, x: f64) -> f64;

    /// `λ f'(u(x))`, the potential of the linearized operator.
    fn potential(&self, x: f64) -> f64 {
        self.lambda() * self.nonlinearity().derivs(self.u(x)).1
    }

    /// `u(0) = 1`: the state is singular at the origin.
    fn singular_center(&self) -> bool {
        false
    }
}

/// Solution of `w'' + (n-1)/r w' + f(w) = 0`, `w(0) = s`, `w'(0) = 0`, up to
/// its first zero `R`; `u(x) = w(R|x|)` solves the Dirichlet problem with
/// `λ = R²`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub n: usize,
    pub s: f64,
    /// first zero of `w`
    pub radius: f64,
    pub lambda: f64,
    /// accepted integration nodes `r_i`, starting at the Taylor radius
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    pub l1_norm: f64,
    pub tol: Tolerance,
    pub rejected_steps: usize,
    #[serde(skip)]
    nl: Nonlinearity,
    #[serde(skip)]
    segments: Vec<DenseSegment<2>>,
    /// `w ≈ s + a r² + b r⁴` on `[0, r0]`
    #[serde(skip)]
    taylor: (f64, f64, f64),
}

/// Shoots from the center value `s` and locates the first zero of `w`.
pub fn solve_profile(nl: &Nonlinearity, n: usize, s: f64, tol: &Tolerance) -> Result<RadialProfile> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    tol.validate()?;
    let t_max = nl.t_max();
    if !(s > 0.0 && s < t_max) {
        return domain(format!("center value s = {s} must lie in (0, {t_max})"));
    }
    let (f_s, df_s, _) = nl.derivs(s);
    if !(f_s > 0.0 && f_s.is_finite() && df_s.is_finite()) {
        return domain(format!("f(s) = {f_s:e} is not positive and finite at s = {s}"));
    }
    let nf = n as f64;
    let a = -f_s / (2.0 * nf);
    let b = f_s * df_s / (8.0 * nf * (nf + 2.0));
    // length on which w leaves the neighborhood of s
    let core = (2.0 * nf * (t_max - s) / f_s).sqrt();
    let r0 = 1e-6 * core.min(1.0);
    let y0 = [s + a * r0 * r0 + b * r0.powi(4), 2.0 * a * r0 + 4.0 * b * r0.powi(3)];

    let f_min = nl.f(0.0).min(f_s);
    let r_max = 2.0 * (2.0 * nf * s / f_min).sqrt() + 10.0 * r0;
    let rhs = |r: f64, y: &[f64; 2]| [y[1], -(nf - 1.0) / r * y[1] - nl.f(y[0])];
    let limit = |_: f64, y: &[f64; 2]| {
        let f = nl.f(y[0]);
        if f > 0.0 {
            0.5 * ((t_max - y[0]).max(0.0) / f).sqrt()
        } else {
            f64::INFINITY
        }
    };
    let events = [
        Event { g: Box::new(|_, y: &[f64; 2]| y[0]), terminal: true },
        Event { g: Box::new(move |_, y: &[f64; 2]| t_max - y[0]), terminal: true },
    ];
    let mut opts = OdeOptions::new(*tol);
    opts.h_init = Some(r0.max(1e-3 * core.min(1.0)));
    let sol = ode_integrate(rhs, r0, y0, r_max, &events, &opts, Some(&limit)).map_err(|e| match e {
        Error::StepUnderflow { r } | Error::RhsNotFinite { r } => Error::SingularExcursion { s, r },
        other => other,
    })?;
    let radius = match sol.events.first() {
        Some(ev) if ev.index == 0 => ev.r,
        Some(ev) => return Err(Error::SingularExcursion { s, r: ev.r }),
        None => return Err(Error::NoZero { s, r_max }),
    };
    let mut profile = RadialProfile {
        n,
        s,
        radius,
        lambda: radius * radius,
        r: sol.nodes.clone(),
        w: sol.states.iter().map(|y| y[0]).collect(),
        dw: sol.states.iter().map(|y| y[1]).collect(),
        l1_norm: 0.0,
        tol: *tol,
        rejected_steps: sol.rejected_steps,
        nl: nl.clone(),
        segments: sol.segments,
        taylor: (r0, a, b),
    };
    // the event state is exact; pin w(R) = 0 against dense-output rounding
    if let Some(last) = profile.w.last_mut() {
        *last = 0.0;
    }
    profile.l1_norm = profile.integrate(1.0, |_, u, _| u);
    Ok(profile)
}

impl RadialProfile {
    fn segment(&self, r: f64) -> &DenseSegment<2> {
        let i = self.segments.partition_point(|seg| seg.r0 <= r);
        &self.segments[i.clamp(1, self.segments.len()) - 1]
    }

    pub fn taylor_radius(&self) -> f64 {
        self.taylor.0
    }

    /// `w(r)` for `0 ≤ r ≤ R`.
    pub fn w_at(&self, r: f64) -> f64 {
        let (r0, a, b) = self.taylor;
        if r <= r0 || self.segments.is_empty() {
            let r2 = r * r;
            return self.s + a * r2 + b * r2 * r2;
        }
        self.segment(r.min(self.radius)).eval(r.min(self.radius))[0]
    }

    pub fn dw_at(&self, r: f64) -> f64 {
        let (r0, a, b) = self.taylor;
        if r <= r0 || self.segments.is_empty() {
            return 2.0 * a * r + 4.0 * b * r.powi(3);
        }
        self.segment(r.min(self.radius)).eval(r.min(self.radius))[1]
    }

    /// `w''(r)` from the derivative of the continuous extension.
    pub fn d2w_at(&self, r: f64) -> f64 {
        let (r0, a, b) = self.taylor;
        if r <= r0 || self.segments.is_empty() {
            return 2.0 * a + 12.0 * b * r * r;
        }
        self.segment(r.min(self.radius)).derivative(r.min(self.radius))[1]
    }

    /// Relative residual `|w'' + (n-1)/r w' + f(w)| / (|w''| + |(n-1)/r w'| + f(w))`.
    pub fn residual(&self, r: f64) -> f64 {
        let w = self.w_at(r);
        let d1 = (self.n as f64 - 1.0) / r * self.dw_at(r);
        let d2 = self.d2w_at(r);
        let f = self.nl.f(w);
        (d2 + d1 + f).abs() / (d2.abs() + d1.abs() + f)
    }

    /// Largest residual at the accepted nodes, with `w''` from the step that
    /// starts there. Checks the stored trajectory against the equation.
    pub fn max_node_residual(&self) -> f64 {
        self.segments
            .iter()
            .map(|seg| {
                let y = seg.eval(seg.r0);
                let d1 = (self.n as f64 - 1.0) / seg.r0 * y[1];
                let d2 = seg.derivative(seg.r0)[1];
                let f = self.nl.f(y[0]);
                (d2 + d1 + f).abs() / (d2.abs() + d1.abs() + f)
            })
            .fold(0.0, f64::max)
    }

    /// Largest residual over the midpoints of the integration steps. The
    /// continuous extension is one order below the step, so expect roughly
    /// `tol^{4/5}` here.
    pub fn max_step_residual(&self) -> f64 {
        self.segments
            .iter()
            .map(|seg| self.residual(seg.r0 + 0.5 * seg.h))
            .fold(0.0, f64::max)
    }

    pub fn segments(&self) -> &[DenseSegment<2>] {
        &self.segments
    }

    /// `|S^{n-1}| ∫_0^ρ g(x, u, u') x^{n-1} dx`, 10-point Gauss–Legendre per
    /// integration step.
    pub fn integrate(&self, rho: f64, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
        self.integrate_weighted(rho, 0.0, g)
    }

    /// `|S^{n-1}| ∫_0^ρ g(x, u, u') x^{a+n-1} dx`: the weight `|x|^a` folded
    /// into the radial measure before quadrature.
    pub fn integrate_weighted(&self, rho: f64, a: f64, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let radius = self.radius;
        let r_end = rho.clamp(0.0, 1.0) * radius;
        let power = a + self.n as f64 - 1.0;
        let integrand = |r: f64| {
            let x = r / radius;
            let weight = if power == 0.0 { 1.0 } else { x.powf(power) };
            g(x, self.w_at(r), radius * self.dw_at(r)) * weight
        };
        let mut edges = vec![0.0, self.taylor.0];
        edges.extend(self.segments.iter().map(|seg| seg.r1()));
        let mut total = 0.0;
        for e in edges.windows(2) {
            if e[0] >= r_end {
                break;
            }
            total += gauss_legendre_10(integrand, e[0], e[1].min(r_end));
        }
        sphere_area(self.n) * total / radius
    }

    /// `‖u‖_{L^q(B_ρ)}`.
    pub fn lq_norm(&self, q: f64, rho: f64) -> f64 {
        self.integrate(rho, |_, u, _| u.abs().powf(q)).powf(1.0 / q)
    }

    /// `u` sampled on `m + 1` uniform points of `[0, 1]`, monotone cubic interpolation.
    pub fn resample_uniform(&self, m: usize) -> Result<GridFunction> {
        let x: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        GridFunction::sample(x, |x| self.u(x))
    }

    /// `‖u‖_{L1}` recomputed from a uniform monotone-cubic resampling.
    pub fn l1_norm_resampled(&self, m: usize) -> Result<f64> {
        radial_integral(&self.resample_uniform(m)?, self.n, 0.0, 1.0)
    }

    pub fn max_u(&self) -> f64 {
        self.s
    }

    /// Profile as CSV `r,w,dw` on the integration nodes.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = std::iter::once(vec![Some(0.0), Some(self.s), Some(0.0)])
            .chain((0..self.r.len()).map(|i| vec![Some(self.r[i]), Some(self.w[i]), Some(self.dw[i])]));
        report::write_csv(path, &["r", "w", "dw"], rows)
    }
}

impl RadialState for RadialProfile {
    fn dimension(&self) -> usize {
        self.n
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    fn u(&self, x: f64) -> f64 {
        self.w_at(x * self.radius).max(0.0)
    }

    fn du(&self, x: f64) -> f64 {
        self.radius * self.dw_at(x * self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_source_is_quadratic() {
        let nl = Nonlinearity::constant(1.0).unwrap();
        let p = solve_profile(&nl, 2, 0.5, &Tolerance::default()).unwrap();
        assert!((p.radius - 2f64.sqrt()).abs() < 1e-10);
        assert!((p.lambda - 2.0).abs() < 1e-10);
        for &r in &[0.1, 0.7, 1.3] {
            assert!((p.w_at(r) - (0.5 - r * r / 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn descent_property() {
        let p = solve_profile(&Nonlinearity::mems(), 3, 0.6, &Tolerance::default()).unwrap();
        assert!(p.dw.iter().all(|&d| d < 0.0));
        assert!(p.w.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_bad_center() {
        let nl = Nonlinearity::mems();
        assert!(solve_profile(&nl, 2, 1.0, &Tolerance::default()).is_err());
        assert!(solve_profile(&nl, 0, 0.5, &Tolerance::default()).is_err());
    }
}
