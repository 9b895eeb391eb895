use std::collections::BinaryHeap;

use super::Tolerance;
use crate::error::{Error, Result};

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// Kronrod abscissae (positive half, descending) of the 21-point rule; odd
// indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn gauss_kronrod_21(g: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for (j, &x) in XGK.iter().take(10).enumerate() {
        let dx = half * x;
        let s = g(center - dx) + g(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Fixed 10-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre_10(mut g: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in 0..5 {
        let dx = half * XGK[2 * k + 1];
        sum += WG[k] * (g(center - dx) + g(center + dx));
    }
    sum * half
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    at_left: bool,
    at_right: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive 10/21-point Gauss–Kronrod quadrature of `g` over `[a, b]`.
///
/// Panels touching an original endpoint are split at 1/4 of their width from
/// that endpoint, so integrable endpoint singularities are resolved by a
/// geometric grading; interior panels are bisected.
pub fn quad_adaptive(mut g: impl FnMut(f64) -> f64, a: f64, b: f64, tol: &Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if b < a {
        let r = quad_adaptive(g, b, a, tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut evaluations = 21;
    let (value, error) = gauss_kronrod_21(&mut g, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error, at_left: true, at_right: true });
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 0usize;
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    loop {
        if !total.is_finite() {
            return Err(Error::Numerical {
                message: format!("integrand not finite on [{a:e}, {b:e}]"),
                achieved: f64::INFINITY,
            });
        }
        if total_err <= tol.bound(total) {
            break;
        }
        let Some(p) = heap.pop() else { break };
        if subdivisions >= tol.max_steps {
            heap.push(p);
            let achieved = total_err;
            return Err(Error::Numerical {
                message: format!("quadrature did not converge on [{a:e}, {b:e}] within {} subdivisions", tol.max_steps),
                achieved,
            });
        }
        let width = p.b - p.a;
        let split = match (p.at_left, p.at_right) {
            (true, false) => p.a + 0.25 * width,
            (false, true) => p.b - 0.25 * width,
            _ => p.a + 0.5 * width,
        };
        if !(split > p.a && split < p.b) || width <= 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            // cannot refine further in double precision; keep the panel as is
            frozen_value += p.value;
            frozen_err += p.error;
            continue;
        }
        let (v1, e1) = gauss_kronrod_21(&mut g, p.a, split);
        let (v2, e2) = gauss_kronrod_21(&mut g, split, p.b);
        evaluations += 42;
        subdivisions += 1;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: split, value: v1, error: e1, at_left: p.at_left, at_right: false });
        heap.push(Panel { a: split, b: p.b, value: v2, error: e2, at_left: false, at_right: p.at_right });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value: f64 = heap.iter().map(|p| p.value).sum::<f64>() + frozen_value;
    let error: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_err;
    if error > tol.bound(value) {
        return Err(Error::Numerical {
            message: format!("quadrature on [{a:e}, {b:e}] limited by floating-point resolution"),
            achieved: error,
        });
    }
    Ok(QuadResult { value, error, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(t: f64) -> Tolerance {
        Tolerance::uniform(t).unwrap()
    }

    #[test]
    fn polynomial() {
        let r = quad_adaptive(|x| x * x, 0.0, 1.0, &tol(1e-12)).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn left_endpoint_singularity() {
        let r = quad_adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, &tol(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn right_endpoint_singularity() {
        let r = quad_adaptive(|t| 1.0 / (1.0 - t).sqrt(), 0.0, 1.0, &tol(1e-8)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let r = quad_adaptive(|x| x.exp(), 1.0, 0.0, &tol(1e-12)).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exact_for_degree_19() {
        let v = gauss_legendre_10(|x| x.powi(19), 0.0, 1.0);
        assert!((v - 0.05).abs() < 1e-15);
    }
}
