use std::f64::consts::PI;

use serde::Serialize;

use super::{quad::gauss_legendre_10, quad_adaptive, GridFunction, Tolerance};
use crate::error::{domain, Error, Result};

/// Surface measure `|S^{n-1}| = 2 π^{n/2} / Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    // Γ(n/2) by the half-integer recursion
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while k < n as f64 / 2.0 - 0.25 {
        gamma *= k;
        k += 1.0;
    }
    2.0 * PI.powf(n as f64 / 2.0) / gamma
}

/// Volume of the ball of radius `rho` in `R^n`.
pub fn ball_volume(n: usize, rho: f64) -> f64 {
    sphere_area(n) * rho.powi(n as i32) / n as f64
}

/// `∫_{B_ρ} h(|x|) |x|^a dx = |S^{n-1}| ∫_0^ρ h(r) r^{a+n-1} dr` for tabulated `h`.
///
/// Interior panels use 10-point Gauss–Legendre on the Hermite interpolant;
/// the first panel, where `r^{a+n-1}` may be singular, uses adaptive quadrature.
pub fn radial_integral(gf: &GridFunction, n: usize, a: f64, rho: f64) -> Result<f64> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    let power = a + n as f64 - 1.0;
    if power <= -1.0 {
        return domain(format!("weight r^{power} is not integrable at the origin (a = {a}, n = {n})"));
    }
    let (lo, hi) = gf.domain();
    if lo > 0.0 || rho > hi * (1.0 + 1e-14) {
        return domain(format!("grid [{lo}, {hi}] does not cover [0, {rho}]"));
    }
    let rho = rho.min(hi);
    let x = gf.abscissae();
    let weight = |r: f64| if power == 0.0 { 1.0 } else { r.powf(power) };
    let mut total = 0.0;
    for i in 0..x.len() - 1 {
        let (a0, b0) = (x[i], x[i + 1].min(rho));
        if a0 >= rho {
            break;
        }
        if i == 0 && power.fract() != 0.0 {
            let tol = Tolerance::new(1e-15, 1e-13, 10_000)?;
            total += quad_adaptive(|r| gf.eval(r) * weight(r), a0, b0, &tol)
                .map(|q| q.value)
                .or_else(|e| match e {
                    crate::Error::Numerical { .. } => Ok(gauss_legendre_10(|r| gf.eval(r) * weight(r), a0, b0)),
                    other => Err(other),
                })?;
        } else {
            total += gauss_legendre_10(|r| gf.eval(r) * weight(r), a0, b0);
        }
    }
    Ok(sphere_area(n) * total)
}

/// Integral split into the computed part over `[δ, ρ]` and an analytic
/// estimate of the part over `[0, δ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedIntegral {
    /// total, tail included
    pub value: f64,
    /// estimate of the contribution of `[0, δ]`
    pub tail: f64,
    pub truncation: f64,
    /// local power `β` in `g(x) x^n ~ x^β` near `δ`
    pub tail_exponent: f64,
}

/// `|S^{n-1}| ∫_0^ρ g(x) x^{n-1} dx` for integrands that may be singular at
/// the origin.
///
/// `[δ, b₁]` is integrated in `y = -log x`, the remaining pieces between the
/// breakpoints directly; the part below `δ` is estimated by fitting a local
/// power `x^{β-1}` to `g(x) x^{n-1}` at `δ` and `δ/e`.
pub fn radial_integral_fn(
    g: impl Fn(f64) -> f64,
    n: usize,
    rho: f64,
    breakpoints: &[f64],
    delta: f64,
    tol: &Tolerance,
) -> Result<TruncatedIntegral> {
    radial_integral_fn_weighted(g, n, 0.0, rho, breakpoints, delta, tol)
}

/// [`radial_integral_fn`] for `∫_{B_ρ} g(|x|) |x|^a dx`, with `|x|^a` merged
/// into the measure `x^{a+n-1}`.
pub fn radial_integral_fn_weighted(
    g: impl Fn(f64) -> f64,
    n: usize,
    a: f64,
    rho: f64,
    breakpoints: &[f64],
    delta: f64,
    tol: &Tolerance,
) -> Result<TruncatedIntegral> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    if !(delta > 0.0 && delta < rho) {
        return domain(format!("need 0 < δ < ρ (δ = {delta}, ρ = {rho})"));
    }
    let power = a + n as f64 - 1.0;
    let measure = |x: f64| if power == 0.0 { 1.0 } else { x.powf(power) };
    let h = |x: f64| g(x) * measure(x) * x;
    let mut edges = vec![delta];
    edges.extend(breakpoints.iter().copied().filter(|&b| b > delta && b < rho));
    edges.push(rho);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = quad_adaptive(|y| h((-y).exp()), -edges[1].ln(), -delta.ln(), tol)?.value;
    for e in edges[1..].windows(2) {
        total += quad_adaptive(|x| g(x) * measure(x), e[0], e[1], tol)?.value;
    }
    let (h0, h1) = (h(delta), h(delta / std::f64::consts::E));
    let (tail, beta) = if h0 == 0.0 && h1 == 0.0 {
        (0.0, f64::INFINITY)
    } else {
        let beta = -(h1 / h0).ln();
        if !(beta > 1e-2) {
            return Err(Error::Numerical {
                message: format!(
                    "integrand is not integrable at the origin: g(x) x^n ~ x^{beta:.3} near δ = {delta:e} (h(δ) = {h0:e})"
                ),
                achieved: f64::INFINITY,
            });
        }
        (h0 / beta, beta)
    };
    let area = sphere_area(n);
    Ok(TruncatedIntegral { value: area * (total + tail), tail: area * tail, truncation: delta, tail_exponent: beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn unit_ball_volume_in_3d() {
        let g = GridFunction::sample((0..=50).map(|i| i as f64 / 50.0).collect(), |_| 1.0).unwrap();
        let v = radial_integral(&g, 3, 0.0, 1.0).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn weight_cancels_measure() {
        // a = 2 - n leaves r^1 under the integral
        let g = GridFunction::sample((0..=50).map(|i| i as f64 / 50.0).collect(), |_| 1.0).unwrap();
        let v = radial_integral(&g, 5, -3.0, 1.0).unwrap();
        assert!((v - sphere_area(5) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn non_integrable_weight_rejected() {
        let g = GridFunction::sample(vec![0.0, 1.0], |_| 1.0).unwrap();
        assert!(radial_integral(&g, 3, -3.0, 1.0).is_err());
    }

    #[test]
    fn singular_integrand_with_tail() {
        // ∫_{B_1} |x|^{-2.8} dx in n = 3: 4π ∫ r^{-0.8} dr = 20π
        let tol = Tolerance::new(1e-300, 1e-11, 10_000).unwrap();
        let v = radial_integral_fn(|x| x.powf(-2.8), 3, 1.0, &[], 1e-8, &tol).unwrap();
        assert!((v.value - 20.0 * PI).abs() < 1e-8 * 20.0 * PI, "{v:?}");
        assert!((v.tail_exponent - 0.2).abs() < 1e-9);
    }

    #[test]
    fn weight_merged_into_measure() {
        // ∫_{B_1} |x|^{-2.8} dx again, with the power as a weight
        let tol = Tolerance::new(1e-300, 1e-11, 10_000).unwrap();
        let v = radial_integral_fn_weighted(|_| 1.0, 3, -2.8, 1.0, &[], 1e-8, &tol).unwrap();
        assert!((v.value - 20.0 * PI).abs() < 1e-8 * 20.0 * PI, "{v:?}");
    }

    #[test]
    fn divergent_integrand_reported() {
        let tol = Tolerance::uniform(1e-10).unwrap();
        assert!(radial_integral_fn(|x| x.powi(-3), 3, 1.0, &[], 1e-8, &tol).is_err());
    }
}
