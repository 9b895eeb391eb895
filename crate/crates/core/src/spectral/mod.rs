//! Linearized stability of radial solutions: the first eigenvalue of
//! `-Δ - λ f'(u)` on radial functions with Dirichlet data, the stability
//! quadratic form on explicit test functions, and the explicit singular
//! solutions `u_p = 1 - |x|^{2/(1+p)}`.
//!
//! Radial functions suffice: on a ball the ground state of the linearized
//! operator is radial.

mod explicit;
mod form;
mod test_function;

use serde::{Deserialize, Serialize};

pub use explicit::{explicit_residual, explicit_singular_stability, ExplicitSingular, ExplicitStability};
pub use form::{quadratic_form, FormValue};
pub use test_function::{smoothstep, TestFunction};

use crate::error::{domain, Result};
use crate::numerics::eig_tridiag_smallest;
use crate::radial_solver::RadialState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralOptions {
    /// cells of the coarse grid; the fine grid has twice as many
    pub cells: usize,
    /// end clustering of the graded grid, in `[0, 1)`
    pub alpha: f64,
    /// center clustering; chosen from the core width of `u` when absent
    pub kappa: Option<f64>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { cells: 400, alpha: 0.3, kappa: None }
    }
}

/// First eigenpair of the radial linearized operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    /// Richardson extrapolation of the two grids
    pub mu1: f64,
    pub mu1_coarse: f64,
    pub mu1_fine: f64,
    /// `1.5 |μ_fine - μ_coarse|`; brackets both grid values
    pub error_bar: f64,
    pub cells: (usize, usize),
    pub kappa: f64,
    /// fine-grid nodes and eigenfunction (max 1, zero at `x = 1`)
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    /// the potential was not finite up to this radius and was clipped there
    pub truncation_radius: Option<f64>,
    pub sign_changes: usize,
}

/// Graded nodes on `[0, 1]`: `ξ - α sin(2πξ)/(2π)` clusters at both ends,
/// then `expm1(κ·)/expm1(κ)` clusters further at the origin.
pub fn graded_grid(cells: usize, alpha: f64, kappa: f64) -> Vec<f64> {
    use std::f64::consts::TAU;
    (0..=cells)
        .map(|i| {
            let xi = i as f64 / cells as f64;
            let xt = xi - alpha * (TAU * xi).sin() / TAU;
            if kappa > 0.0 {
                (kappa * xt).exp_m1() / kappa.exp_m1()
            } else {
                xt
            }
        })
        .map(|x: f64| x.clamp(0.0, 1.0))
        .collect()
}

fn center_kappa<S: RadialState + ?Sized>(state: &S) -> f64 {
    if state.singular_center() {
        return 16.0;
    }
    let s = state.u(0.0);
    let f = state.nonlinearity().f(s);
    let width = ((state.nonlinearity().t_max() - s) / (state.lambda() * f)).sqrt();
    if width.is_finite() && width > 0.0 {
        (0.05 / width).ln().clamp(0.0, 16.0)
    } else {
        0.0
    }
}

struct Discrete {
    mu: f64,
    phi: Vec<f64>,
    x: Vec<f64>,
    truncation: Option<f64>,
}

/// Finite volumes with the weight `x^{n-1}`: `φ_M = 0` at `x = 1`, natural
/// condition at the origin.
fn solve_on_grid<S: RadialState + ?Sized>(state: &S, x: Vec<f64>) -> Result<Discrete> {
    let cells = x.len() - 1;
    let n = state.dimension() as i32;
    let faces: Vec<f64> = (0..cells).map(|i| 0.5 * (x[i] + x[i + 1])).collect();
    let flux: Vec<f64> = (0..cells).map(|i| faces[i].powi(n - 1) / (x[i + 1] - x[i])).collect();
    let mut potential: Vec<f64> = (0..cells).map(|i| state.potential(x[i])).collect();
    let mut truncation = None;
    if let Some(last_bad) = potential.iter().rposition(|v| !v.is_finite()) {
        let Some(clip) = potential.get(last_bad + 1).copied() else {
            return domain("potential is not finite anywhere on the grid");
        };
        truncation = Some(x[last_bad + 1]);
        potential[..=last_bad].iter_mut().for_each(|v| *v = clip);
    }
    let mut diag = Vec::with_capacity(cells);
    let mut mass = Vec::with_capacity(cells);
    for i in 0..cells {
        let lower = if i == 0 { 0.0 } else { faces[i - 1] };
        let m = (faces[i].powi(n) - lower.powi(n)) / n as f64;
        let left = if i == 0 { 0.0 } else { flux[i - 1] };
        diag.push(left + flux[i] - potential[i] * m);
        mass.push(m);
    }
    let off: Vec<f64> = flux[..cells - 1].iter().map(|a| -a).collect();
    let pair = eig_tridiag_smallest(&diag, &off, &mass)?;
    let mut phi = pair.vector;
    phi.push(0.0);
    let peak = phi.iter().cloned().fold(0.0, f64::max);
    phi.iter_mut().for_each(|v| *v /= peak);
    Ok(Discrete { mu: pair.value, phi, x, truncation })
}

/// Smallest eigenvalue `μ₁` of `-φ'' - (n-1)/x φ' - λ f'(u) φ = μ φ`,
/// `φ'(0) = 0`, `φ(1) = 0`, Richardson-extrapolated over two grids.
pub fn rayleigh_min<S: RadialState + ?Sized>(state: &S, opts: &SpectralOptions) -> Result<SpectralResult> {
    if opts.cells < 8 || !(0.0..1.0).contains(&opts.alpha) {
        return domain(format!("spectral grid needs >= 8 cells and 0 <= α < 1 (cells = {}, α = {})", opts.cells, opts.alpha));
    }
    let kappa = opts.kappa.unwrap_or_else(|| center_kappa(state));
    let coarse = solve_on_grid(state, graded_grid(opts.cells, opts.alpha, kappa))?;
    let fine = solve_on_grid(state, graded_grid(2 * opts.cells, opts.alpha, kappa))?;
    let delta = fine.mu - coarse.mu;
    let sign_changes = fine.phi[..fine.phi.len() - 1].windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    Ok(SpectralResult {
        mu1: fine.mu + delta / 3.0,
        mu1_coarse: coarse.mu,
        mu1_fine: fine.mu,
        error_bar: 1.5 * delta.abs(),
        cells: (opts.cells, 2 * opts.cells),
        kappa,
        truncation_radius: fine.truncation.or(coarse.truncation),
        x: fine.x,
        phi: fine.phi,
        sign_changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_monotone_and_spans_unit_interval() {
        for kappa in [0.0, 5.0, 16.0] {
            let x = graded_grid(100, 0.3, kappa);
            assert_eq!(x[0], 0.0);
            assert_eq!(x[100], 1.0);
            assert!(x.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
