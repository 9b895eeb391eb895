use serde::Serialize;

use crate::error::{domain, Result};
use crate::nonlinearity::{np_threshold, Nonlinearity};
use crate::radial_solver::RadialState;

/// `u_p(x) = 1 - |x|^{2/(1+p)}`, the singular solution of
/// `-Δu = c(p,n) (1-u)^{-p}` with `λ = 1`.
#[derive(Debug, Clone)]
pub struct ExplicitSingular {
    pub p: f64,
    pub n: usize,
    nl: Nonlinearity,
}

impl ExplicitSingular {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        let nl = Nonlinearity::scaled_power_for_dimension(p, n as f64)?;
        Ok(Self { p, n, nl })
    }

    fn exponent(&self) -> f64 {
        2.0 / (1.0 + self.p)
    }

    /// `λ f'(u_p) = c_H / |x|²`.
    pub fn hardy_coefficient(&self) -> f64 {
        hardy_coefficient(self.p, self.n as f64)
    }
}

impl RadialState for ExplicitSingular {
    fn dimension(&self) -> usize {
        self.n
    }

    fn lambda(&self) -> f64 {
        1.0
    }

    fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    fn u(&self, x: f64) -> f64 {
        1.0 - x.powf(self.exponent())
    }

    fn du(&self, x: f64) -> f64 {
        let k = self.exponent();
        -k * x.powf(k - 1.0)
    }

    fn potential(&self, x: f64) -> f64 {
        self.hardy_coefficient() / (x * x)
    }

    fn singular_center(&self) -> bool {
        true
    }
}

/// `c_H(p,n) = 2p/(1+p) · (2/(1+p) + n - 2)`.
fn hardy_coefficient(p: f64, n: f64) -> f64 {
    2.0 * p / (1.0 + p) * (2.0 / (1.0 + p) + n - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitStability {
    pub p: f64,
    pub n: f64,
    pub c_hardy_form: f64,
    /// `(n-2)²/4`
    pub hardy_constant: f64,
    /// `(n-2)²/4 - c_H`
    pub margin: f64,
    pub stable: bool,
    /// `N(p)`
    pub threshold: f64,
}

/// Stability of `u_p` by Hardy's inequality: stable iff `c_H ≤ (n-2)²/4`,
/// i.e. iff `n ≥ N(p)`.
pub fn explicit_singular_stability(p: f64, n: f64) -> Result<ExplicitStability> {
    if !(p > 0.0 && p.is_finite()) || !(n >= 2.0 && n.is_finite()) {
        return domain(format!("need p > 0 and n >= 2 (got p = {p}, n = {n})"));
    }
    let c = hardy_coefficient(p, n);
    let hardy = (n - 2.0).powi(2) / 4.0;
    let margin = hardy - c;
    Ok(ExplicitStability {
        p,
        n,
        c_hardy_form: c,
        hardy_constant: hardy,
        margin,
        stable: margin >= 0.0,
        threshold: np_threshold(p)?,
    })
}

/// Largest relative residual `|w'' + (n-1)/r w' + c(p,n)(1-w)^{-p}| / f(w)` of
/// `w = 1 - r^{2/(1+p)}` over `points` radii spread evenly on `[r_lo, r_hi]`.
pub fn explicit_residual(p: f64, n: usize, r_lo: f64, r_hi: f64, points: usize) -> Result<f64> {
    if !(0.0 < r_lo && r_lo < r_hi) || points < 2 {
        return domain(format!("need 0 < r_lo < r_hi and at least two points (r_lo = {r_lo}, r_hi = {r_hi})"));
    }
    let e = ExplicitSingular::new(p, n)?;
    let k = e.exponent();
    let worst = (0..points)
        .map(|i| {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (points - 1) as f64;
            let w = e.u(r);
            let d2w = -k * (k - 1.0) * r.powf(k - 2.0);
            let f = e.nl.f(w);
            (d2w + (n as f64 - 1.0) / r * e.du(r) + f).abs() / f
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        assert!(explicit_singular_stability(1.0, 7.0).unwrap().stable);
        assert!(!explicit_singular_stability(2.0, 6.0).unwrap().stable);
        assert!(explicit_singular_stability(0.04, 3.0).unwrap().stable);
        assert!(explicit_singular_stability(1.0, 1.0).is_err());
    }

    #[test]
    fn margin_vanishes_at_threshold() {
        for p in [0.1, 0.5, 1.0, 2.0, 7.5] {
            let n = np_threshold(p).unwrap();
            assert!(explicit_singular_stability(p, n).unwrap().margin.abs() < 1e-10);
        }
    }

    #[test]
    fn residual_at_rounding_level() {
        assert!(explicit_residual(2.0, 3, 1e-3, 1.0 - 1e-3, 1000).unwrap() < 1e-12);
        assert!(explicit_residual(2.0, 3, 0.5, 0.1, 10).is_err());
    }

    #[test]
    fn profile_solves_equation() {
        let e = ExplicitSingular::new(2.0, 3).unwrap();
        let x: f64 = 0.3;
        let k = 2.0 / 3.0;
        // -Δu = -(u'' + (n-1)/x u')
        let lap = -(-k * (k - 1.0) * x.powf(k - 2.0) + 2.0 / x * e.du(x));
        assert!((lap - e.nonlinearity().f(e.u(x))).abs() < 1e-12 * lap);
    }
}
