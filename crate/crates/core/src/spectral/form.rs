use serde::Serialize;

use super::TestFunction;
use crate::error::{domain, Result};
use crate::numerics::{radial_integral_fn, Tolerance};
use crate::radial_solver::RadialState;

/// `Q(ξ) = ∫_{B_1} |∇ξ|² - λ f'(u) ξ²` and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormValue {
    pub value: f64,
    /// `∫ |∇ξ|²`
    pub gradient: f64,
    /// `∫ λ f'(u) ξ²`
    pub potential: f64,
    /// `∫ ξ²`
    pub l2_squared: f64,
    /// analytic estimates of the contributions of `B_δ`
    pub gradient_tail: f64,
    pub potential_tail: f64,
    pub truncation: f64,
}

pub(crate) const FORM_TRUNCATION: f64 = 1e-8;

pub(crate) fn form_tolerance() -> Tolerance {
    Tolerance::new(1e-300, 1e-10, 4000).expect("valid tolerance")
}

/// Evaluates the stability quadratic form at a radial test function vanishing
/// on the boundary; a negative value certifies instability.
pub fn quadratic_form<S: RadialState + ?Sized>(state: &S, xi: &TestFunction) -> Result<FormValue> {
    let rho = xi.support_end();
    if rho >= 1.0 && xi.eval(1.0).0.abs() > 1e-12 {
        return domain(format!("test function {} does not vanish at the boundary", xi.describe()));
    }
    let n = state.dimension();
    let breaks = xi.breakpoints();
    let tol = form_tolerance();
    let grad = radial_integral_fn(|x| xi.eval(x).1.powi(2), n, rho, &breaks, FORM_TRUNCATION, &tol)?;
    let pot = radial_integral_fn(|x| state.potential(x) * xi.eval(x).0.powi(2), n, rho, &breaks, FORM_TRUNCATION, &tol)?;
    let l2 = radial_integral_fn(|x| xi.eval(x).0.powi(2), n, rho, &breaks, FORM_TRUNCATION, &tol)?;
    Ok(FormValue {
        value: grad.value - pot.value,
        gradient: grad.value,
        potential: pot.value,
        l2_squared: l2.value,
        gradient_tail: grad.tail,
        potential_tail: pot.tail,
        truncation: FORM_TRUNCATION,
    })
}
