use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::numerics::GridFunction;

type Evaluator = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Radial test function `ξ(|x|)` with its derivative.
#[derive(Clone)]
pub enum TestFunction {
    /// 1 on `[0, inner]`, quintic smoothstep down to 0 at `outer`
    Cutoff { inner: f64, outer: f64 },
    /// `(1 - x/ρ)₊`
    Linear { rho: f64 },
    /// `x^α`
    PowerWeight { alpha: f64 },
    Product(Box<TestFunction>, Box<TestFunction>),
    /// piecewise monotone cubic through samples
    Tabulated(GridFunction),
    /// arbitrary `x ↦ (ξ, ξ')`, with the points where it is not smooth
    Custom { name: String, eval: Evaluator, breakpoints: Vec<f64> },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `S(z) = 6z⁵ - 15z⁴ + 10z³` and its first two derivatives.
pub fn smoothstep(z: f64) -> (f64, f64, f64) {
    let z = z.clamp(0.0, 1.0);
    let z2 = z * z;
    (
        z2 * z * (10.0 + z * (6.0 * z - 15.0)),
        30.0 * z2 * (z - 1.0) * (z - 1.0),
        60.0 * z * (z - 1.0) * (2.0 * z - 1.0),
    )
}

impl TestFunction {
    pub fn cutoff(inner: f64, outer: f64) -> Result<Self> {
        if !(0.0 <= inner && inner < outer) {
            return domain(format!("cutoff needs 0 <= inner < outer (got {inner}, {outer})"));
        }
        Ok(TestFunction::Cutoff { inner, outer })
    }

    pub fn linear(rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return domain(format!("support radius must be positive (got {rho})"));
        }
        Ok(TestFunction::Linear { rho })
    }

    pub fn power_weight(alpha: f64) -> Self {
        TestFunction::PowerWeight { alpha }
    }

    pub fn times(self, other: TestFunction) -> Self {
        TestFunction::Product(Box::new(self), Box::new(other))
    }

    pub fn custom(name: impl Into<String>, eval: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static, breakpoints: Vec<f64>) -> Self {
        TestFunction::Custom { name: name.into(), eval: Arc::new(eval), breakpoints }
    }

    pub fn describe(&self) -> String {
        match self {
            TestFunction::Cutoff { inner, outer } => format!("cutoff[{inner}, {outer}]"),
            TestFunction::Linear { rho } => format!("linear({rho})"),
            TestFunction::PowerWeight { alpha } => format!("x^{alpha}"),
            TestFunction::Product(a, b) => format!("{} * {}", a.describe(), b.describe()),
            TestFunction::Tabulated(g) => format!("tabulated({} samples)", g.len()),
            TestFunction::Custom { name, .. } => name.clone(),
        }
    }

    /// `(ξ(x), ξ'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            TestFunction::Cutoff { inner, outer } => {
                if x <= *inner {
                    (1.0, 0.0)
                } else if x >= *outer {
                    (0.0, 0.0)
                } else {
                    let w = outer - inner;
                    let (s, ds, _) = smoothstep((outer - x) / w);
                    (s, -ds / w)
                }
            }
            TestFunction::Linear { rho } => {
                if x < *rho {
                    (1.0 - x / rho, -1.0 / rho)
                } else {
                    (0.0, 0.0)
                }
            }
            TestFunction::PowerWeight { alpha } => {
                if *alpha == 0.0 {
                    (1.0, 0.0)
                } else {
                    let v = x.powf(*alpha);
                    (v, alpha * v / x)
                }
            }
            TestFunction::Product(a, b) => {
                let (va, da) = a.eval(x);
                if va == 0.0 && da == 0.0 {
                    return (0.0, 0.0);
                }
                let (vb, db) = b.eval(x);
                if vb == 0.0 && db == 0.0 {
                    return (0.0, 0.0);
                }
                (va * vb, da * vb + va * db)
            }
            TestFunction::Tabulated(g) => {
                let (lo, hi) = g.domain();
                if x < lo || x > hi {
                    return (0.0, 0.0);
                }
                let (v, d, _) = g.eval_all(x);
                (v, d)
            }
            TestFunction::Custom { eval, .. } => eval(x),
        }
    }

    /// `ξ''(x)` where available in closed form.
    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        match self {
            TestFunction::Cutoff { inner, outer } => {
                if x <= *inner || x >= *outer {
                    Some(0.0)
                } else {
                    let w = outer - inner;
                    Some(smoothstep((outer - x) / w).2 / (w * w))
                }
            }
            TestFunction::Linear { .. } => Some(0.0),
            TestFunction::PowerWeight { alpha } => Some(alpha * (alpha - 1.0) * x.powf(alpha - 2.0)),
            TestFunction::Product(a, b) => {
                let ((va, da), (vb, db)) = (a.eval(x), b.eval(x));
                Some(a.second_derivative(x)? * vb + 2.0 * da * db + va * b.second_derivative(x)?)
            }
            TestFunction::Tabulated(g) => Some(g.eval_all(x).2),
            TestFunction::Custom { .. } => None,
        }
    }

    /// Points in `(0, 1)` where `ξ` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = match self {
            TestFunction::Cutoff { inner, outer } => vec![*inner, *outer],
            TestFunction::Linear { rho } => vec![*rho],
            TestFunction::PowerWeight { .. } => vec![],
            TestFunction::Product(a, b) => {
                let mut v = a.breakpoints();
                v.extend(b.breakpoints());
                v
            }
            TestFunction::Tabulated(g) => g.abscissae().to_vec(),
            TestFunction::Custom { breakpoints, .. } => breakpoints.clone(),
        };
        b.retain(|&x| x > 0.0 && x < 1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Right end of the support within `[0, 1]`.
    pub fn support_end(&self) -> f64 {
        match self {
            TestFunction::Cutoff { outer, .. } => outer.min(1.0),
            TestFunction::Linear { rho } => rho.min(1.0),
            TestFunction::Product(a, b) => a.support_end().min(b.support_end()),
            TestFunction::Tabulated(g) => g.domain().1.min(1.0),
            _ => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints() {
        assert_eq!(smoothstep(0.0), (0.0, 0.0, 0.0));
        let (v, d, d2) = smoothstep(1.0);
        assert!((v - 1.0).abs() < 1e-15 && d.abs() < 1e-15 && d2.abs() < 1e-12);
    }

    #[test]
    fn cutoff_derivative_matches_difference() {
        let c = TestFunction::cutoff(0.25, 0.75).unwrap();
        let x = 0.4;
        let h = 1e-6;
        let fd = (c.eval(x + h).0 - c.eval(x - h).0) / (2.0 * h);
        assert!((fd - c.eval(x).1).abs() < 1e-8);
        let fd2 = (c.eval(x + h).1 - c.eval(x - h).1) / (2.0 * h);
        assert!((fd2 - c.second_derivative(x).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn product_rule() {
        let f = TestFunction::power_weight(-0.3).times(TestFunction::linear(1.0).unwrap());
        let x = 0.6;
        let h = 1e-6;
        let fd = (f.eval(x + h).0 - f.eval(x - h).0) / (2.0 * h);
        assert!((fd - f.eval(x).1).abs() < 1e-8);
        assert_eq!(f.breakpoints(), Vec::<f64>::new());
        assert_eq!(f.support_end(), 1.0);
    }
}
