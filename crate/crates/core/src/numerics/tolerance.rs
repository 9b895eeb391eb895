use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Accuracy budget shared by the integrators and quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of ODE steps or quadrature subdivisions.
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
            max_steps: 200_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_steps: usize) -> Result<Self> {
        let tol = Self { abs, rel, max_steps };
        tol.validate()?;
        Ok(tol)
    }

    /// Same absolute and relative tolerance.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol, Self::default().max_steps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs > 0.0 && self.abs.is_finite()) || !(self.rel > 0.0 && self.rel.is_finite()) {
            return domain(format!(
                "tolerances must be positive and finite (abs = {}, rel = {})",
                self.abs, self.rel
            ));
        }
        if self.max_steps == 0 {
            return domain("max_steps must be positive");
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs: self.abs * factor,
            rel: self.rel * factor,
            max_steps: self.max_steps,
        }
    }

    pub(crate) fn bound(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}
