use mems_branch::nonlinearity::{
    certify, concavity_onset, estimate_limits, find_k, relation_check, EvalMode, KBound, Nonlinearity, Quotient,
    TailGrid,
};
use proptest::prelude::*;

/// Richardson-extrapolated central differences; `h` relative to `1 - t`.
fn fd_first(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    let d = |h: f64| (f(t + h) - f(t - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn fd_second(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    let d = |h: f64| (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn builtins() -> Vec<Nonlinearity> {
    vec![
        Nonlinearity::power(0.5).unwrap(),
        Nonlinearity::power(1.0).unwrap(),
        Nonlinearity::power(3.0).unwrap(),
        Nonlinearity::exponential(),
        Nonlinearity::mems(),
        Nonlinearity::scaled_power(2.0, 10.0 / 9.0).unwrap(),
        Nonlinearity::castorina(1.2, 1.8, 2.0).unwrap(),
        Nonlinearity::castorina(0.6, 1.6, 0.7).unwrap(),
    ]
}

#[test]
fn exponential_primitive_matches_trapezoid() {
    let nl = Nonlinearity::exponential();
    let v0 = nl.eval(0.0).unwrap();
    assert!((v0.f - std::f64::consts::E).abs() < 1e-15 && v0.big_f == 0.0);
    // composite trapezoid in t with Richardson extrapolation
    let trap = |n: usize| {
        let h = 0.5 / n as f64;
        let mut sum = 0.5 * (nl.f(0.0) + nl.f(0.5));
        for i in 1..n {
            sum += nl.f(i as f64 * h);
        }
        sum * h
    };
    let oracle = (4.0 * trap(200_000) - trap(100_000)) / 3.0;
    let big_f = nl.eval(0.5).unwrap().big_f;
    assert!((big_f - oracle).abs() < 1e-10 * oracle, "{big_f} vs {oracle}");
}

#[test]
fn exponential_quotients_against_finite_differences() {
    let nl = Nonlinearity::exponential();
    let f = |t: f64| nl.f(t);
    let t = 0.9;
    // f varies on the scale (1-t)^2
    let h = 1e-4;
    let gamma_fd = f(t) * fd_second(f, t, h) / fd_first(f, t, h).powi(2);
    assert!((gamma_fd - 1.2).abs() < 1e-6);
    assert!((nl.cr_quotient(t).unwrap() - 1.2).abs() < 1e-12);
    let t = 0.5;
    let q_fd = fd_first(f, t, 1e-4) * (1.0 - t) / f(t);
    assert!((q_fd - 2.0).abs() < 1e-6);
    assert!((nl.q_quotient(t).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn power_quotient_examples() {
    let p2 = Nonlinearity::power(2.0).unwrap();
    let p1 = Nonlinearity::power(1.0).unwrap();
    let p3 = Nonlinearity::power(3.0).unwrap();
    assert_eq!(p2.cr_quotient(0.7).unwrap(), 1.5);
    assert_eq!(p1.cr_quotient(0.3).unwrap(), 2.0);
    assert_eq!(p3.q_quotient(0.25).unwrap(), 3.0);
    assert!((p2.m_quotient(0.9).unwrap() - 2.0).abs() < 1e-15);
    assert!((p1.m_quotient(0.99).unwrap() - 1.0).abs() < 1e-15);
    assert!(p2.m_quotient(0.0).is_err());
    // F = -log(1 - t) for p = 1
    assert!((p1.eval(0.75).unwrap().big_f - 4f64.ln()).abs() < 1e-15);
}

#[test]
fn exponential_gamma_limit_with_floor() {
    let g = estimate_limits(&Nonlinearity::exponential(), Quotient::Gamma, &TailGrid::with_floor(1e-6)).unwrap();
    assert!((g.lo - 1.0).abs() < 1e-3, "{g:?}");
}

#[test]
fn oscillating_limits_from_phase_sweep() {
    let (a, b) = (1.2, 1.8);
    let nl = Nonlinearity::castorina(a, b, 2.0).unwrap();
    let grid = TailGrid::default();
    let q = estimate_limits(&nl, Quotient::Q, &grid).unwrap();
    assert!((q.lo - a).abs() < 1e-2 && (q.hi - b).abs() < 1e-2, "{q:?}");
    let m = estimate_limits(&nl, Quotient::M, &grid).unwrap();
    assert!((m.lo - a).abs() < 1e-2 && (m.hi - b).abs() < 1e-2, "{m:?}");
    let g = estimate_limits(&nl, Quotient::Gamma, &grid).unwrap();
    assert!((g.lo - (1.0 + 1.0 / b)).abs() < 1e-2 && (g.hi - (1.0 + 1.0 / a)).abs() < 1e-2);
}

#[test]
fn oscillating_m_is_h() {
    let (a, b, eps) = (1.2, 1.8, 2.0);
    let nl = Nonlinearity::castorina(a, b, eps).unwrap();
    for t in [0.1, 0.5, 0.9, 0.999_999] {
        // direct evaluation of h at s = -log(1-t)
        let s: f64 = -(1.0f64 - t).ln();
        let h = (a + b) / 2.0 + (b - a) / 2.0 * (eps * (1.0 + (1.0 + s).ln()).ln()).sin();
        let m = nl.m_quotient(t).unwrap();
        assert!((m - h).abs() < 1e-12, "t = {t}: {m} vs {h}");
        // and log f / s agrees
        assert!((nl.f(t).ln() / s - h).abs() < 1e-9);
    }
}

#[test]
fn relations_exact_for_power() {
    let r = relation_check(&Nonlinearity::power(2.0).unwrap(), &TailGrid::default()).unwrap();
    assert!(r.max_gamma_defect < 1e-10 && r.max_m_defect < 1e-10);
}

#[test]
fn exponential_relation_defect_is_the_gap() {
    let r = relation_check(&Nonlinearity::exponential(), &TailGrid::default()).unwrap();
    for sample in &r.samples {
        assert!((sample.gamma_defect - sample.gap).abs() < 1e-9 * sample.gap.max(1e-3), "{sample:?}");
    }
    assert!(r.tail_gamma_defect < 1e-11);
}

#[test]
fn constant_family_relations_undefined() {
    assert!(relation_check(&Nonlinearity::constant(1.0).unwrap(), &TailGrid::default()).is_err());
}

#[test]
fn log_convex_families_have_gamma_at_least_one() {
    for nl in [Nonlinearity::power(0.3).unwrap(), Nonlinearity::power(4.0).unwrap(), Nonlinearity::exponential(), Nonlinearity::mems()] {
        for i in 0..200 {
            let t = 1.0 - 10f64.powf(-(i as f64) * 6.0 / 199.0);
            assert!(nl.cr_quotient(t).unwrap() >= 1.0 - 1e-9, "{} at {t}", nl.tag());
        }
    }
}

#[test]
fn gamma_bracket_for_nonintegrable_families() {
    let grid = TailGrid::default();
    for nl in builtins().into_iter().filter(|nl| nl.is_nonintegrable() && nl.is_singular()) {
        let g = estimate_limits(&nl, Quotient::Gamma, &grid).unwrap();
        assert!(g.hi >= 1.0 - 1e-3 && g.lo <= 2.0 + 1e-3, "{}: {g:?}", nl.tag());
    }
}

#[test]
fn certificate_invariants() {
    let grid = TailGrid::default();
    for nl in builtins() {
        let cert = certify(&nl, &grid, None).unwrap();
        for l in [cert.gamma, cert.q, cert.m].into_iter().flatten() {
            assert!(l.lo <= l.hi);
        }
        if let Some(theta) = cert.theta {
            assert!(theta > 0.0);
            for k in [cert.k, cert.k_tilde].into_iter().flatten() {
                if let KBound::Finite(v) = k {
                    assert!(v >= 0.0);
                }
            }
        }
    }
}

#[test]
fn finite_difference_second_derivative_all_builtins() {
    for nl in builtins() {
        for t in [0.05, 0.3, 0.6, 0.9, 0.99] {
            let (f, df, _) = nl.derivs(t);
            let h = 1e-2 * (1.0 - t).min(f / df);
            let fd = fd_second(|x| nl.f(x), t, h);
            let exact = nl.derivs(t).2;
            assert!((fd - exact).abs() < 1e-6 * exact.abs(), "{} t = {t}: {fd} vs {exact}", nl.tag());
        }
    }
}

#[test]
fn log_mode_castorina_matches_direct_request() {
    let nl = Nonlinearity::castorina(1.2, 1.8, 2.0).unwrap();
    let direct = nl.clone().with_mode(EvalMode::Direct);
    assert_eq!(nl.derivs(0.7), direct.derivs(0.7));
}

proptest! {
    #[test]
    fn power_quotients_exact(p in 0.05f64..8.0, t in 0.0f64..0.999_999) {
        let nl = Nonlinearity::power(p).unwrap();
        prop_assert!((nl.cr_quotient(t).unwrap() - (1.0 + 1.0 / p)).abs() < 1e-10);
        prop_assert!((nl.q_quotient(t).unwrap() - p).abs() < 1e-10);
        if t > 1e-6 {
            prop_assert!((nl.m_quotient(t).unwrap() - p).abs() < 1e-10);
        }
    }

    #[test]
    fn primitive_is_monotone(idx in 0usize..8, t1 in 0.0f64..0.99, t2 in 0.0f64..0.99) {
        prop_assume!((t1 - t2).abs() > 1e-9);
        let nl = &builtins()[idx];
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(nl.eval(hi).unwrap().big_f > nl.eval(lo).unwrap().big_f);
    }

    #[test]
    fn zero_k_means_zero_onset(idx in 0usize..8, frac in 0.05f64..1.5) {
        let nl = &builtins()[idx];
        let grid = TailGrid { points: 40, body_points: 100, phase_points: 800, ..TailGrid::default() };
        let gamma_lo = estimate_limits(nl, Quotient::Gamma, &grid).unwrap().lo;
        let theta = frac * (gamma_lo - 1.0).max(0.05);
        if find_k(nl, theta, &grid).unwrap() == KBound::Finite(0.0) {
            prop_assert_eq!(concavity_onset(nl, theta, &grid).unwrap(), Some(0.0));
        }
    }
}
