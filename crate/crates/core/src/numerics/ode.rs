use super::{root_bracket, Tolerance};
use crate::error::{Error, Result};

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub tol: Tolerance,
    pub h_init: Option<f64>,
    pub h_max: f64,
}

impl OdeOptions {
    pub fn new(tol: Tolerance) -> Self {
        Self { tol, h_init: None, h_max: f64::INFINITY }
    }
}

/// A scalar event function `g(r, y)`; zeros are located on the dense output.
pub struct Event<'a, const N: usize> {
    pub g: Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>,
    pub terminal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord<const N: usize> {
    pub index: usize,
    pub r: f64,
    pub y: [f64; N],
}

/// Fourth-order continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub r0: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn r1(&self) -> f64 {
        self.r0 + self.h
    }

    pub fn eval(&self, r: f64) -> [f64; N] {
        let th = (r - self.r0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.coeffs;
        std::array::from_fn(|i| c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i]))))
    }

    /// `d/dr` of the continuous extension.
    pub fn derivative(&self, r: f64) -> [f64; N] {
        let th = (r - self.r0) / self.h;
        let th1 = 1.0 - th;
        let c = &self.coeffs;
        std::array::from_fn(|i| {
            let p = c[2][i] + th * (c[3][i] + th1 * c[4][i]);
            let dp = c[3][i] + (th1 - th) * c[4][i];
            let q = c[1][i] + th1 * p;
            let dq = -p + th1 * dp;
            (q + th * dq) / self.h
        })
    }
}

/// Trajectory produced by [`ode_integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution<const N: usize> {
    pub nodes: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub segments: Vec<DenseSegment<N>>,
    pub events: Vec<EventRecord<N>>,
    pub rejected_steps: usize,
}

impl<const N: usize> OdeSolution<N> {
    pub fn r_end(&self) -> f64 {
        *self.nodes.last().expect("solution has at least one node")
    }

    pub fn segment_index(&self, r: f64) -> usize {
        let i = self.segments.partition_point(|s| s.r0 <= r);
        i.clamp(1, self.segments.len().max(1)) - 1
    }

    /// Dense-output state at `r` (clamped to the integrated span).
    pub fn eval(&self, r: f64) -> [f64; N] {
        if self.segments.is_empty() {
            return self.states[0];
        }
        let r = r.clamp(self.nodes[0], self.r_end());
        self.segments[self.segment_index(r)].eval(r)
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Adaptive Dormand–Prince 5(4) integration of `y' = rhs(r, y)` from `r0` to `r_end`.
///
/// `step_limit(r, y)` caps the step size in addition to the error control.
/// Events are located on the continuous extension by Brent refinement; the
/// first terminal event ends the integration exactly at the event.
pub fn ode_integrate<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    r0: f64,
    y0: [f64; N],
    r_end: f64,
    events: &[Event<'_, N>],
    opts: &OdeOptions,
    step_limit: Option<&dyn Fn(f64, &[f64; N]) -> f64>,
) -> Result<OdeSolution<N>> {
    let tol = opts.tol;
    let mut r = r0;
    let mut y = y0;
    let mut k1 = rhs(r, &y);
    if !finite(&k1) {
        return Err(Error::RhsNotFinite { r });
    }
    let norm = |v: &[f64; N], scale: &[f64; N]| -> f64 {
        (v.iter().zip(scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / N as f64).sqrt()
    };
    let limit = |r: f64, y: &[f64; N]| -> f64 {
        let cap = step_limit.map_or(f64::INFINITY, |f| f(r, y));
        cap.min(opts.h_max)
    };
    let span = r_end - r0;
    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let sc: [f64; N] = std::array::from_fn(|i| tol.abs + tol.rel * y[i].abs());
            let d0 = norm(&y, &sc);
            let d1 = norm(&k1, &sc);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.min(span.abs())
        }
    };
    h = h.min(limit(r, &y)).min(span);

    let mut sol = OdeSolution {
        nodes: vec![r],
        states: vec![y],
        segments: Vec::new(),
        events: Vec::new(),
        rejected_steps: 0,
    };
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(r, &y)).collect();
    let mut steps = 0usize;

    while r < r_end {
        if steps >= tol.max_steps {
            return Err(Error::MaxSteps { r, max_steps: tol.max_steps });
        }
        if h < 16.0 * f64::EPSILON * r.abs().max(f64::MIN_POSITIVE) || h <= 0.0 {
            return Err(Error::StepUnderflow { r });
        }
        let last = r + h >= r_end;
        if last {
            h = r_end - r;
        }
        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = rhs(r + C2 * h, &y2);
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = rhs(r + C3 * h, &y3);
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = rhs(r + C4 * h, &y4);
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = rhs(r + C5 * h, &y5);
        let y6 = axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = rhs(r + h, &y6);
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(r + h, &y_new);
        steps += 1;

        let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| finite(k)) && finite(&y_new);
        if !stages_ok {
            // shrink and retry; persistent failure ends as underflow
            sol.rejected_steps += 1;
            h *= 0.25;
            continue;
        }

        let err: [f64; N] = std::array::from_fn(|i| {
            h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        });
        let sc: [f64; N] = std::array::from_fn(|i| tol.abs + tol.rel * y[i].abs().max(y_new[i].abs()));
        let err_norm = norm(&err, &sc);

        if err_norm <= 1.0 {
            let coeffs: [[f64; N]; 5] = {
                let c0 = y;
                let c1: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let c2: [f64; N] = std::array::from_fn(|i| h * k1[i] - c1[i]);
                let c3: [f64; N] = std::array::from_fn(|i| c1[i] - h * k7[i] - c2[i]);
                let c4: [f64; N] = std::array::from_fn(|i| {
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                });
                [c0, c1, c2, c3, c4]
            };
            let seg = DenseSegment { r0: r, h, coeffs };
            let r_new = if last { r_end } else { r + h };

            // event detection on this step
            let mut terminal_hit: Option<EventRecord<N>> = None;
            let mut hits: Vec<EventRecord<N>> = Vec::new();
            for (idx, ev) in events.iter().enumerate() {
                let g_new = (ev.g)(r_new, &y_new);
                let g_old = g_prev[idx];
                if g_old != 0.0 && (g_new == 0.0 || g_new.signum() != g_old.signum()) {
                    let xtol = 4.0 * f64::EPSILON * r_new.abs() + 1e-300;
                    let re = root_bracket(|rr| (ev.g)(rr, &seg.eval(rr)), r, r_new, xtol)?;
                    let rec = EventRecord { index: idx, r: re, y: seg.eval(re) };
                    hits.push(rec);
                    if ev.terminal && terminal_hit.is_none_or(|t| re < t.r) {
                        terminal_hit = Some(rec);
                    }
                }
                g_prev[idx] = g_new;
            }
            hits.sort_by(|a, b| a.r.total_cmp(&b.r));
            if let Some(t) = terminal_hit {
                sol.events.extend(hits.into_iter().filter(|e| e.r <= t.r));
                sol.segments.push(seg);
                sol.nodes.push(t.r);
                sol.states.push(t.y);
                return Ok(sol);
            }
            sol.events.extend(hits);
            sol.segments.push(seg);
            r = r_new;
            y = y_new;
            k1 = k7;
            sol.nodes.push(r);
            sol.states.push(y);
            let factor = (0.9 * err_norm.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = (h * factor).min(limit(r, &y));
        } else {
            sol.rejected_steps += 1;
            let factor = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
            h *= factor;
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(t: f64) -> OdeOptions {
        OdeOptions::new(Tolerance::uniform(t).unwrap())
    }

    #[test]
    fn constant_source_zero_event_at_one() {
        // w'' = -1, w(0) = 0.5, w'(0) = 0  =>  w = 0.5 - r^2 / 2
        let ev = Event { g: Box::new(|_, y: &[f64; 2]| y[0]), terminal: true };
        let sol = ode_integrate(|_, y| [y[1], -1.0], 0.0, [0.5, 0.0], 10.0, &[ev], &opts(1e-10), None).unwrap();
        assert_eq!(sol.events.len(), 1);
        assert!((sol.events[0].r - 1.0).abs() < 1e-12);
        let mid = sol.eval(0.37);
        assert!((mid[0] - (0.5 - 0.37 * 0.37 / 2.0)).abs() < 1e-13);
    }

    #[test]
    fn cosine_quarter_period() {
        let tol = 1e-10;
        let sol = ode_integrate(
            |_, y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            std::f64::consts::FRAC_PI_2,
            &[],
            &opts(tol),
            None,
        )
        .unwrap();
        assert!(sol.states.last().unwrap()[0].abs() < 10.0 * tol);
    }

    #[test]
    fn dense_output_is_fourth_order_accurate() {
        let sol = ode_integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &[], &opts(1e-11), None).unwrap();
        let worst = (0..=400)
            .map(|i| {
                let r = 2.0 * i as f64 / 400.0;
                (sol.eval(r)[0] - r.exp()).abs() / r.exp()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "dense output error {worst:e}");
    }

    #[test]
    fn dense_derivative_matches_rhs() {
        let sol = ode_integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &[], &opts(1e-11), None).unwrap();
        let seg = &sol.segments[sol.segments.len() / 2];
        // endpoint derivatives reproduce the stage values
        assert!((seg.derivative(seg.r0)[0] - seg.eval(seg.r0)[0]).abs() < 1e-12 * seg.eval(seg.r0)[0]);
        let mid = seg.r0 + 0.5 * seg.h;
        assert!((seg.derivative(mid)[0] - mid.exp()).abs() < 1e-8 * mid.exp());
    }

    #[test]
    fn cubic_rhs_is_exact() {
        // y' = 3 r^2 + 2 r + 1 integrates exactly with a fifth-order pair
        let sol = ode_integrate(|r, _: &[f64; 1]| [3.0 * r * r + 2.0 * r + 1.0], 0.0, [0.0], 3.0, &[], &opts(1e-6), None)
            .unwrap();
        let exact = 27.0 + 9.0 + 3.0;
        assert!((sol.states.last().unwrap()[0] - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn max_steps_reported() {
        let mut o = opts(1e-12);
        o.tol.max_steps = 3;
        let r = ode_integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 50.0, &[], &o, None);
        assert!(matches!(r, Err(Error::MaxSteps { .. })));
    }
}
