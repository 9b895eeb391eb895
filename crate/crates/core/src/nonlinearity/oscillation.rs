use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};

/// Phase `τ = ε log(1 + log(1+s))`.
pub fn s_to_phase(eps: f64, s: f64) -> f64 {
    eps * s.ln_1p().ln_1p()
}

/// Inverse phase map `s = exp(exp(τ/ε) - 1) - 1`; `+∞` past the float range.
pub fn phase_to_s(eps: f64, tau: f64) -> f64 {
    ((tau / eps).exp_m1()).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OscillationRegime {
    /// `a = b ≥ 1`: the whole range
    Degenerate,
    /// `b ≤ 1` (or `a = b < 1`): `h ≥ 1` holds at most on a null set
    Integrable,
    /// `a < 1 < b`: windows where `sin τ ≥ (1 - c)/A`
    Oscillating,
    /// `a ≥ 1`: `h ≥ 1` everywhere; intervals are single phase periods
    Everywhere,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub regime: OscillationRegime,
    /// `s`-intervals on which `h(s) ≥ 1`, clipped to the requested range
    pub intervals: Vec<(f64, f64)>,
    /// lengths of the intervals not clipped by the range
    pub lengths: Vec<f64>,
    /// consecutive full intervals have strictly increasing length
    pub lengths_increasing: bool,
    /// the phase map overflowed before the end of the range
    pub truncated: bool,
}

/// Intervals of `[s_lo, s_hi]` where `h(s) = c + A sin τ(s) ≥ 1`, computed in
/// the phase variable and mapped back through the inverse phase map.
pub fn oscillation_intervals(a: f64, b: f64, eps: f64, s_lo: f64, s_hi: f64) -> Result<OscillationReport> {
    if !(a > 0.0 && a <= b && eps > 0.0 && b.is_finite() && eps.is_finite()) {
        return domain(format!("need 0 < a <= b and ε > 0 (a = {a}, b = {b}, ε = {eps})"));
    }
    if !(s_lo >= 0.0 && s_hi > s_lo) {
        return domain(format!("need 0 <= s_lo < s_hi (got [{s_lo}, {s_hi}])"));
    }
    let c = 0.5 * (a + b);
    let amp = 0.5 * (b - a);
    let empty = |regime| OscillationReport {
        regime,
        intervals: vec![],
        lengths: vec![],
        lengths_increasing: false,
        truncated: false,
    };
    if a == b {
        return Ok(if c >= 1.0 {
            OscillationReport { intervals: vec![(s_lo, s_hi)], ..empty(OscillationRegime::Degenerate) }
        } else {
            empty(OscillationRegime::Integrable)
        });
    }
    if b <= 1.0 {
        return Ok(empty(OscillationRegime::Integrable));
    }
    // phase windows [τ_start + 2πk, τ_end + 2πk]
    let (regime, win_start, win_end) = if a >= 1.0 {
        (OscillationRegime::Everywhere, 0.0, 2.0 * PI)
    } else {
        let k = ((1.0 - c) / amp).asin();
        (OscillationRegime::Oscillating, k, PI - k)
    };
    let tau_lo = s_to_phase(eps, s_lo);
    let tau_hi = if s_hi.is_finite() { s_to_phase(eps, s_hi) } else { f64::INFINITY };
    let mut intervals = Vec::new();
    let mut lengths = Vec::new();
    let mut truncated = false;
    let mut period = ((tau_lo - win_end) / (2.0 * PI)).ceil().max(0.0);
    loop {
        let t0 = win_start + 2.0 * PI * period;
        let t1 = win_end + 2.0 * PI * period;
        if t0 >= tau_hi {
            break;
        }
        let (s0, s1) = (phase_to_s(eps, t0.max(tau_lo)), phase_to_s(eps, t1.min(tau_hi)));
        if s0.is_infinite() {
            truncated = true;
            break;
        }
        let (s0, s1) = (s0.max(s_lo), s1.min(s_hi));
        intervals.push((s0, s1));
        if t0 >= tau_lo && t1 <= tau_hi && s1.is_finite() {
            lengths.push(s1 - s0);
        }
        if s1.is_infinite() && s_hi.is_infinite() {
            truncated = true;
            break;
        }
        period += 1.0;
    }
    let lengths_increasing = lengths.len() >= 2 && lengths.windows(2).all(|w| w[1] > w[0]);
    Ok(OscillationReport { regime, intervals, lengths, lengths_increasing, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_map_round_trip() {
        for s in [0.0, 1.0, 1e3, 1e40] {
            let back = phase_to_s(2.0, s_to_phase(2.0, s));
            assert!((back - s).abs() <= 1e-10 * s.max(1.0));
        }
    }

    #[test]
    fn everywhere_regime_lengths_grow() {
        let r = oscillation_intervals(1.2, 1.8, 2.0, 0.0, f64::INFINITY).unwrap();
        assert_eq!(r.regime, OscillationRegime::Everywhere);
        assert!(r.lengths.len() >= 2 && r.lengths[1] > r.lengths[0]);
        assert!(r.lengths_increasing);
    }

    #[test]
    fn crossing_windows_satisfy_h_at_least_one() {
        let (a, b, eps) = (0.5, 1.5, 2.0);
        let r = oscillation_intervals(a, b, eps, 0.0, f64::INFINITY).unwrap();
        assert_eq!(r.regime, OscillationRegime::Oscillating);
        let h = |s: f64| 1.0 + 0.5 * s_to_phase(eps, s).sin();
        for &(s0, s1) in &r.intervals {
            if s1.is_finite() {
                let mid = 0.5 * (s0 + s1);
                assert!(h(mid) >= 1.0 - 1e-12);
                assert!((h(s0) - 1.0).abs() < 1e-9 || s0 == 0.0);
            }
        }
        assert!(r.lengths_increasing);
    }

    #[test]
    fn special_regimes() {
        assert_eq!(oscillation_intervals(0.5, 0.9, 1.0, 0.0, 1e6).unwrap().regime, OscillationRegime::Integrable);
        let d = oscillation_intervals(1.5, 1.5, 1.0, 2.0, f64::INFINITY).unwrap();
        assert_eq!(d.regime, OscillationRegime::Degenerate);
        assert_eq!(d.intervals, vec![(2.0, f64::INFINITY)]);
    }
}
