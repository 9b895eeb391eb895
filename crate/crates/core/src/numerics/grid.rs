use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::interp::{fritsch_carlson_slopes, hermite_cubic, hermite_cubic_integral};
use crate::error::{domain, Result};

/// Samples of a function on strictly increasing abscissae.
///
/// Interpolation is cubic Hermite: with the stored derivatives when present,
/// with Fritsch–Carlson monotone slopes otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Option<Vec<f64>>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

impl GridFunction {
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Option<Vec<f64>>) -> Result<Self> {
        if x.len() < 2 {
            return domain("a grid function needs at least two samples");
        }
        if x.len() != y.len() || dy.as_ref().is_some_and(|d| d.len() != x.len()) {
            return domain("abscissae, values and derivatives must have equal lengths");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("abscissae must be strictly increasing");
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return domain("grid function samples must be finite");
        }
        let slopes = match &dy {
            Some(d) => d.clone(),
            None => fritsch_carlson_slopes(&x, &y),
        };
        Ok(Self { x, y, dy, slopes })
    }

    /// Samples `f` on `x`.
    pub fn sample(x: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let y = x.iter().map(|&v| f(v)).collect();
        Self::new(x, y, None)
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn derivatives(&self) -> Option<&[f64]> {
        self.dy.as_deref()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn slopes(&self) -> Cow<'_, [f64]> {
        if self.slopes.len() == self.x.len() {
            Cow::Borrowed(&self.slopes)
        } else {
            // deserialized instances carry no cached slopes
            match &self.dy {
                Some(d) => Cow::Borrowed(d),
                None => Cow::Owned(fritsch_carlson_slopes(&self.x, &self.y)),
            }
        }
    }

    fn piece(&self, x: f64) -> usize {
        let i = self.x.partition_point(|&v| v <= x);
        i.clamp(1, self.x.len() - 1) - 1
    }

    /// Value, first and second derivative of the interpolant; clamps outside the domain.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let (a, b) = self.domain();
        let xc = x.clamp(a, b);
        let i = self.piece(xc);
        let m = self.slopes();
        hermite_cubic(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], m[i], m[i + 1], xc)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    /// Exact integral of the interpolant over `[a, b]` (clamped to the domain).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.domain();
        let (a, b) = (a.clamp(lo, hi), b.clamp(lo, hi));
        if b <= a {
            return 0.0;
        }
        let m = self.slopes();
        let prim = |x: f64| -> (usize, f64) {
            let i = self.piece(x);
            (i, hermite_cubic_integral(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], m[i], m[i + 1], x))
        };
        let (ia, pa) = prim(a);
        let (ib, pb) = prim(b);
        let mut total = pb - pa;
        for j in ia..ib {
            total += hermite_cubic_integral(self.x[j], self.x[j + 1], self.y[j], self.y[j + 1], m[j], m[j + 1], self.x[j + 1]);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_abscissae() {
        assert!(GridFunction::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0], None).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0], None).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0, 2.0], Some(vec![0.0])).is_err());
    }

    #[test]
    fn integral_of_sampled_quadratic() {
        let x: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let dy = x.iter().map(|v| 2.0 * v).collect();
        let g = GridFunction::new(x.clone(), x.iter().map(|v| v * v).collect(), Some(dy)).unwrap();
        assert!((g.integral(0.0, 1.0) - 1.0 / 3.0).abs() < 1e-14);
        assert!((g.integral(0.25, 0.5) - (0.125 - 0.015625) / 3.0).abs() < 1e-14);
        assert!((g.eval(0.3) - 0.09).abs() < 1e-14);
    }
}
