use std::f64::consts::PI;

use mems_branch::estimates::{
    extended_range, global_lp_sample, hardy_near_extremal, interior_linf_sample, lp_exponent, morrey_sample,
    nedev_sample, proof_test_function, subsolution_identities, truncated_power_test_function, verify,
    verify_hardy, verify_l1_laplacian_control, verify_stability_lemma_on_branch, w12_sample, EstimateConfig,
    EstimateTag, Mode, Trend,
};
use mems_branch::nonlinearity::{MonotoneTable, Nonlinearity, TailGrid};
use mems_branch::numerics::{ball_volume, sphere_area, Tolerance};
use mems_branch::radial_solver::{branch, solve_profile, BifurcationDiagram, BranchOptions, SGrid};
use mems_branch::spectral::TestFunction;
use mems_branch::Error;

fn sweep(nl: &Nonlinearity, n: usize, points: usize, cap: f64) -> BifurcationDiagram {
    let grid = SGrid { cap, uniform_points: points / 2, tail_points: points - points / 2, ..SGrid::default() };
    branch(nl, n, &BranchOptions { grid, ..BranchOptions::default() }).unwrap()
}

#[test]
fn lp_exponent_arithmetic_and_eligibility() {
    let (beta, p_bar) = lp_exponent(Some(0.495), Some(0.2), 3, 20.0).unwrap();
    assert_eq!(beta, Some(0.2));
    assert!((p_bar - 13.2).abs() < 1e-12);
    let top = 1.495f64.sqrt() - 1.0;
    let err = lp_exponent(Some(0.495), Some(top), 3, 20.0).unwrap_err();
    assert!(err.to_string().contains("eligibility interval"), "{err}");
    assert_eq!(lp_exponent(Some(0.495), None, 2, 20.0).unwrap().1, 20.0);
    assert!(lp_exponent(None, None, 4, 20.0).is_err());
}

#[test]
fn constant_family_closed_forms() {
    let c = 2.0;
    for n in [2usize, 3, 5] {
        let p = solve_profile(&Nonlinearity::constant(c).unwrap(), n, 0.3, &Tolerance::default()).unwrap();
        let g = p.lambda * c;
        let p_bar = 7.0;
        let glp = global_lp_sample(&p, p_bar).unwrap();
        assert!((glp.ratio - ball_volume(n, 1.0).powf(1.0 / p_bar)).abs() < 1e-9, "n={n}: {glp:?}");
        assert_eq!(nedev_sample(&p).unwrap().ratio, 0.0);
        let m = morrey_sample(&p).unwrap();
        let first_term = g * g * sphere_area(n) * (3.0f64 / 16.0).powi(2) / 2.0;
        assert!((m.numerator - first_term).abs() < 1e-10 * first_term, "n={n}: {} vs {first_term}", m.numerator);
        // u = g (1 - x²) / (2n): ‖Δu‖_{L¹(B_{3/4})} / ‖u‖_{L¹} = n(n+2)(3/4)^n
        let l1 = verify_l1_laplacian_control(&p).unwrap();
        let oracle = n as f64 * (n as f64 + 2.0) * 0.75f64.powi(n as i32);
        assert!((l1.ratio_raw - oracle).abs() < 1e-9 * oracle, "n={n}: {} vs {oracle}", l1.ratio_raw);
        assert!(l1.lhs <= l1.tested * (1.0 + 1e-9) && l1.ratio <= 1.0);
    }
}

#[test]
fn small_s_limits() {
    // u ≈ s (1 - x²), λ f(0) ≈ 2ns as s → 0
    let s = 1e-6;
    for n in [1usize, 3, 4] {
        let nf = n as f64;
        let area = sphere_area(n);
        let p = solve_profile(&Nonlinearity::mems(), n, s, &Tolerance::default()).unwrap();
        let linf = interior_linf_sample(&p).unwrap().ratio;
        let oracle = nf.powi(3) * (nf + 2.0).powi(2) / (2.0 * area * area);
        assert!((linf - oracle).abs() < 1e-3 * oracle, "n={n}: {linf} vs {oracle}");
        let w12 = w12_sample(&p).unwrap().ratio;
        let q = 0.75f64;
        let l1_34 = area * (q.powi(n as i32) / nf - q.powi(n as i32 + 2) / (nf + 2.0));
        let oracle = 2.0 * nf * ball_volume(n, 0.5).sqrt() / l1_34;
        assert!((w12 - oracle).abs() < 1e-3 * oracle, "n={n}: {w12} vs {oracle}");
    }
}

#[test]
fn mems_theorem_dimensions_are_bounded_and_control_grows() {
    // the pair is asserted together: the same checks that pass for n ≤ 6
    // must detect the singular regime in n = 7
    let coherent = [EstimateTag::InteriorLinf, EstimateTag::GlobalLinf, EstimateTag::Morrey];
    let mut bounded = Vec::new();
    for n in [3, 6] {
        let d = sweep(&Nonlinearity::mems(), n, 60, 1e-4);
        for tag in EstimateTag::ALL {
            let r = verify(tag, &d, &EstimateConfig::default()).unwrap();
            assert_eq!(r.verdict, Trend::Bounded, "mems n={n} {tag}: {:?}", r.samples.last());
            assert!(r.passed);
            if coherent.contains(&tag) {
                bounded.push(tag);
            }
        }
    }
    let d = sweep(&Nonlinearity::scaled_power(1.0, 6.0).unwrap(), 7, 80, 1e-4);
    let explore = EstimateConfig { mode: Mode::Explore, ..EstimateConfig::default() };
    for tag in coherent {
        let r = verify(tag, &d, &explore).unwrap();
        assert_eq!(r.verdict, Trend::Growing, "{tag}");
        assert!(r.passed, "exploration mode never fails");
        assert!(bounded.contains(&tag));
    }
    let linf = verify(EstimateTag::GlobalLinf, &d, &explore).unwrap();
    assert!(linf.margin.unwrap() < 1e-3);
}

#[test]
fn theorem_mode_enforces_dimension_range() {
    let d = sweep(&Nonlinearity::scaled_power(1.0, 6.0).unwrap(), 7, 10, 1e-2);
    assert!(matches!(verify(EstimateTag::InteriorLinf, &d, &EstimateConfig::default()), Err(Error::Config(_))));
    let d = sweep(&Nonlinearity::mems(), 2, 10, 1e-2);
    assert!(matches!(verify(EstimateTag::Morrey, &d, &EstimateConfig::default()), Err(Error::Config(_))));
    let explore = EstimateConfig { mode: Mode::Explore, ..EstimateConfig::default() };
    assert!(verify(EstimateTag::Morrey, &d, &explore).is_ok());
}

#[test]
fn low_dimensions_use_configured_exponent() {
    let d = sweep(&Nonlinearity::mems(), 2, 40, 1e-3);
    let r = verify(EstimateTag::InteriorLp, &d, &EstimateConfig::default()).unwrap();
    assert_eq!(r.params.p_bar, Some(20.0));
    assert_eq!(r.verdict, Trend::Bounded);
}

#[test]
fn reports_serialize() {
    let d = sweep(&Nonlinearity::mems(), 4, 20, 1e-3);
    let r = verify(EstimateTag::Nedev, &d, &EstimateConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    r.write_json(&dir.path().join("nedev.json")).unwrap();
    r.write_csv(&dir.path().join("nedev.csv")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("nedev.json")).unwrap()).unwrap();
    for key in ["tag", "params", "samples", "verdict", "version"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["tag"], "nedev");
    let csv = std::fs::read_to_string(dir.path().join("nedev.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s,ratio"));
    assert_eq!(csv.lines().count(), r.samples.len() + 1);
}

#[test]
fn stability_lemma_holds_on_stable_branch() {
    let d = sweep(&Nonlinearity::mems(), 3, 30, 1e-3);
    let grid = TailGrid::default();
    let cutoff = verify_stability_lemma_on_branch(&d, &grid, |_| TestFunction::cutoff(0.25, 0.5)).unwrap();
    let proof = verify_stability_lemma_on_branch(&d, &grid, |p| proof_test_function(p, 0.2, 0.25, 0.5)).unwrap();
    let power = verify_stability_lemma_on_branch(&d, &grid, |_| truncated_power_test_function(3, 1e-3, 0.25, 0.75)).unwrap();
    assert!(!cutoff.is_empty());
    for c in cutoff.iter().chain(&proof).chain(&power) {
        assert!(c.ratio <= 1.0 + 1e-6, "{c:?}");
        assert!(c.precursor_ratio <= 1.0 + 1e-6, "{c:?}");
        assert!(c.lhs > 0.0 && c.rhs.is_finite());
    }
}

#[test]
fn stability_lemma_rejects_nonvanishing_eta() {
    let d = sweep(&Nonlinearity::mems(), 3, 10, 1e-2);
    let r = verify_stability_lemma_on_branch(&d, &TailGrid::default(), |_| Ok(TestFunction::power_weight(0.0)));
    assert!(r.is_err());
}

#[test]
fn hardy_exact_and_near_extremal() {
    let h = verify_hardy(3, 0.0, &TestFunction::linear(1.0).unwrap()).unwrap();
    assert!((h.lhs - PI / 3.0).abs() < 1e-10 && (h.rhs - 4.0 * PI / 3.0).abs() < 1e-10);
    assert!((h.ratio - 0.25).abs() < 1e-8);
    let mut previous = 0.0;
    for delta in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let r = verify_hardy(5, 0.5, &hardy_near_extremal(5, 0.5, delta).unwrap()).unwrap().ratio;
        assert!(r < 1.0 && r > previous, "δ={delta}: {r}");
        previous = r;
    }
    assert!(previous > 0.8, "{previous}");
}

#[test]
fn hardy_random_cases() {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..20 {
        let n = 1 + (next() * 8.0) as usize;
        let a = (2.0 - n as f64) + 4.0 * next();
        let rho = 0.3 + 0.7 * next();
        let phi = match (next() * 3.0) as usize {
            0 => TestFunction::linear(rho).unwrap(),
            1 => TestFunction::cutoff(rho * next(), rho).unwrap(),
            _ => TestFunction::power_weight(next()).times(TestFunction::linear(rho).unwrap()),
        };
        let h = verify_hardy(n, a, &phi).unwrap();
        assert!(h.ratio <= 1.0 + 1e-10, "n={n} a={a} {phi:?}: {h:?}");
    }
}

#[test]
fn l1_laplacian_control_on_branch() {
    for n in [3, 6] {
        let d = sweep(&Nonlinearity::mems(), n, 30, 1e-3);
        for i in d.stable_indices() {
            let c = verify_l1_laplacian_control(&d.profiles[i]).unwrap();
            assert!(c.ratio <= 1.0 + 1e-4 && c.lhs <= c.tested * (1.0 + 1e-8), "n={n}: {c:?}");
        }
    }
}

#[test]
fn subsolution_identities_hold() {
    for (nl, n, s) in [
        (Nonlinearity::mems(), 3, 0.3),
        (Nonlinearity::mems(), 5, 0.5),
        (Nonlinearity::exponential(), 2, 0.6),
        (Nonlinearity::power(3.0).unwrap(), 4, 0.4),
    ] {
        let p = solve_profile(&nl, n, s, &Tolerance::default()).unwrap();
        let c = subsolution_identities(&p, 200).unwrap();
        assert!(c.max_error_primitive < 1e-4 && c.max_error_f < 1e-4, "{} n={n}: {c:?}", nl.tag());
    }
}

#[test]
fn extended_range_reported_for_log_concave_table() {
    // f = 1 + t + t²/10 is convex with γ = f f''/f'² < 1
    let t: Vec<f64> = (0..=400).map(|i| 0.999 * i as f64 / 400.0).collect();
    let f: Vec<f64> = t.iter().map(|t| 1.0 + t + 0.1 * t * t).collect();
    let nl = Nonlinearity::from_table(MonotoneTable::new(t, f).unwrap());
    let r = extended_range(&nl, &TailGrid::default()).unwrap();
    assert!(r.applies && r.gamma_lo < 1.0, "{r:?}");
    assert!((r.dimension_bound - (4.0 + 2.0 * r.gamma_lo.sqrt())).abs() < 1e-12);
    assert_eq!(r.max_dimension, 5);
}
