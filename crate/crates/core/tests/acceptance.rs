//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Closed-form oracles are computed here from scratch; library results are
//! compared against them, never against themselves.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use mems_branch::estimates::{
    proof_test_function, subsolution_identities, verify, verify_hardy, verify_l1_laplacian_control,
    verify_stability_lemma_on_branch, EstimateConfig, EstimateTag, Mode, Trend,
};
use mems_branch::nonlinearity::{
    estimate_limits, np_threshold, oscillation_intervals, relation_check, Nonlinearity, Quotient, TailGrid,
};
use mems_branch::numerics::Tolerance;
use mems_branch::radial_solver::{branch, solve_profile, BifurcationDiagram, BranchOptions, SGrid};
use mems_branch::spectral::{explicit_residual, explicit_singular_stability, rayleigh_min, SpectralOptions, TestFunction};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: mems_branch::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Deterministic uniform samples in (0, 1].
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 + 1.0) / (1u64 << 53) as f64
    }
}

fn c_pn(p: f64, n: usize) -> f64 {
    let k = 2.0 / (1.0 + p);
    k * (k + n as f64 - 2.0)
}

fn explicit_residuals() -> Check {
    let mut worst: f64 = 0.0;
    for (p, n) in [(1.0, 7), (2.0, 3), (2.0, 8), (3.0, 10)] {
        let library = lib(explicit_residual(p, n, 1e-3, 1.0 - 1e-3, 4001))?;
        // independent residual: derivatives of w by hand, f from the library family
        let nl = lib(Nonlinearity::scaled_power_for_dimension(p, n as f64))?;
        let f_oracle = |w: f64| c_pn(p, n) * (1.0 - w).powf(-p);
        let k = 2.0 / (1.0 + p);
        let mut oracle: f64 = 0.0;
        for i in 0..4001 {
            let r = 1e-3 + (1.0 - 2e-3) * i as f64 / 4000.0;
            let w = 1.0 - r.powf(k);
            let (dw, d2w) = (-k * r.powf(k - 1.0), -k * (k - 1.0) * r.powf(k - 2.0));
            ensure((nl.f(w) - f_oracle(w)).abs() <= 1e-13 * f_oracle(w), || format!("f mismatch at p={p}, n={n}"))?;
            oracle = oracle.max((d2w + (n as f64 - 1.0) / r * dw + nl.f(w)).abs() / f_oracle(w));
        }
        ensure(library < 1e-8 && oracle < 1e-8, || format!("(p, n) = ({p}, {n}): residual {library:e}, oracle {oracle:e}"))?;
        worst = worst.max(library).max(oracle);
    }
    Ok(format!("max residual {worst:.2e}"))
}

fn threshold_exactness() -> Check {
    let mut rng = Lcg(0x2545_f491_4f6c_dd1d);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = 10.0 * rng.next();
        let np = lib(np_threshold(p))?;
        let at = lib(explicit_singular_stability(p, np))?.margin;
        let below = lib(explicit_singular_stability(p, (np - 1e-3).max(2.0)))?;
        let above = lib(explicit_singular_stability(p, np + 1e-3))?;
        ensure(at.abs() < 1e-10, || format!("p = {p}: margin {at:e} at N(p)"))?;
        ensure(below.margin < 0.0 && !below.stable && above.margin > 0.0 && above.stable, || format!("p = {p}: no sign change"))?;
        worst = worst.max(at.abs());
    }
    let n1 = lib(np_threshold(1.0))?;
    let exact = 4.0 + 2.0 * 2f64.sqrt();
    ensure((n1 - exact).abs() < 1e-12 * exact, || format!("N(1) = {n1}"))?;
    Ok(format!("max |margin at N(p)| {worst:.1e}, N(1) = {n1:.12}"))
}

/// `f f''/f'²` from `ℓ = log f` by Richardson-extrapolated central differences,
/// using only values of `f`.
fn gamma_fd(nl: &Nonlinearity, t: f64) -> f64 {
    let ell = |x: f64| nl.f(x).ln();
    let d = |h: f64| {
        let (a, b) = (ell(t + h), ell(t - h));
        ((a - b) / (2.0 * h), (a - 2.0 * ell(t) + b) / (h * h))
    };
    let h = 1e-3 * (1.0 - t);
    let ((d1a, d2a), (d1b, d2b)) = (d(h), d(0.5 * h));
    let d1 = (4.0 * d1b - d1a) / 3.0;
    let d2 = (4.0 * d2b - d2a) / 3.0;
    1.0 + d2 / (d1 * d1)
}

fn quotient_closed_forms() -> Check {
    let grid = TailGrid::default();
    let mut worst: f64 = 0.0;
    for p in [0.5, 1.0, 2.0, 3.0, 4.5] {
        let nl = lib(Nonlinearity::power(p))?;
        for gap in grid.gaps() {
            let t = 1.0 - gap;
            let (g, q, m) = (lib(nl.cr_quotient(t))?, lib(nl.q_quotient(t))?, lib(nl.m_quotient(t))?);
            let err = (g - (1.0 + 1.0 / p)).abs().max((q - p).abs()).max((m - p).abs());
            ensure(err < 1e-10, || format!("power p = {p}, 1-t = {gap:e}: γ = {g}, q = {q}, m = {m}"))?;
            worst = worst.max(err);
        }
    }
    let exp = Nonlinearity::exponential();
    let mut fd_err: f64 = 0.0;
    for i in 0..=40 {
        let t = 0.9 * i as f64 / 40.0;
        let oracle = gamma_fd(&exp, t);
        let closed = 1.0 + 2.0 * (1.0 - t);
        let library = lib(exp.cr_quotient(t))?;
        fd_err = fd_err.max((closed - oracle).abs()).max((library - oracle).abs());
    }
    ensure(fd_err < 1e-8, || format!("exponential γ off the difference oracle by {fd_err:e}"))?;
    let lo = lib(estimate_limits(&exp, Quotient::Gamma, &TailGrid::with_floor(1e-6)))?.lo;
    ensure((lo - 1.0).abs() < 1e-3, || format!("exponential γ_lo = {lo}"))?;
    Ok(format!("power err {worst:.1e}, exponential fd err {fd_err:.1e}, γ_lo {lo:.6}"))
}

fn quotient_relations() -> Check {
    let grid = TailGrid::default();
    for nl in [lib(Nonlinearity::power(0.7))?, lib(Nonlinearity::power(3.0))?, Nonlinearity::mems()] {
        let r = lib(relation_check(&nl, &grid))?;
        ensure(r.max_gamma_defect < 1e-10 && r.max_m_defect < 1e-10, || {
            format!("{}: defects {:e}, {:e}", nl.tag(), r.max_gamma_defect, r.max_m_defect)
        })?;
        for gap in grid.gaps() {
            let t = 1.0 - gap;
            let q = lib(nl.q_quotient(t))?;
            ensure((lib(nl.cr_quotient(t))? - (1.0 + 1.0 / q)).abs() < 1e-10, || format!("{} γ at {gap:e}", nl.tag()))?;
            ensure((lib(nl.m_quotient(t))? - q).abs() < 1e-10, || format!("{} m at {gap:e}", nl.tag()))?;
        }
    }
    let (a, b) = (1.2, 1.8);
    let q = lib(estimate_limits(&lib(Nonlinearity::castorina(a, b, 2.0))?, Quotient::Q, &grid))?;
    ensure((q.lo - a).abs() < 1e-2 && (q.hi - b).abs() < 1e-2, || format!("oscillating q = [{}, {}]", q.lo, q.hi))?;
    let mut windows = 0;
    for (a, b) in [(0.6, 1.4), (1.2, 1.8), (0.9, 1.1)] {
        let r = lib(oscillation_intervals(a, b, 20.0, 0.0, f64::INFINITY))?;
        let growing = r.lengths.windows(2).all(|w| w[1] > w[0]);
        ensure(r.lengths.len() >= 3 && growing && r.lengths_increasing, || format!("a = {a}, b = {b}: lengths {:?}", r.lengths))?;
        windows += r.lengths.len();
    }
    Ok(format!("q = [{:.4}, {:.4}], {windows} growing windows", q.lo, q.hi))
}

fn gamma_bracket() -> Check {
    let families = [
        lib(Nonlinearity::power(0.5))?,
        lib(Nonlinearity::power(1.0))?,
        lib(Nonlinearity::power(3.0))?,
        Nonlinearity::mems(),
        Nonlinearity::exponential(),
        lib(Nonlinearity::scaled_power(1.0, 6.0))?,
        lib(Nonlinearity::castorina(1.2, 1.8, 2.0))?,
        lib(Nonlinearity::castorina(1.0, 3.0, 1.0))?,
    ];
    let mut tags = Vec::new();
    for nl in families.iter().filter(|nl| nl.is_singular() && nl.is_nonintegrable()) {
        let g = lib(estimate_limits(nl, Quotient::Gamma, &TailGrid::default()))?;
        ensure(g.hi >= 1.0 - 1e-3 && g.lo <= 2.0 + 1e-3, || format!("{}: γ in [{}, {}]", nl.tag(), g.lo, g.hi))?;
        tags.push(nl.tag());
    }
    ensure(tags.len() == 7, || format!("expected 7 nonintegrable families, got {tags:?}"))?;
    Ok(format!("{} families", tags.len()))
}

fn mems_sweep(n: usize, points: usize, cap: f64, tol: Tolerance, spectral: bool) -> Result<BifurcationDiagram, String> {
    let grid = SGrid { cap, uniform_points: points / 2, tail_points: points - points / 2, ..SGrid::default() };
    let opts = BranchOptions { grid, tol, spectral: spectral.then(SpectralOptions::default), ..BranchOptions::default() };
    lib(branch(&Nonlinearity::mems(), n, &opts))
}

fn branch_convergence() -> Check {
    let tol = Tolerance::default();
    let coarse = mems_sweep(2, 200, 1e-6, tol, false)?;
    let fine = mems_sweep(2, 400, 1e-6, tol.scaled(0.5), false)?;
    let rel = (coarse.lambda_star - fine.lambda_star).abs() / fine.lambda_star;
    ensure(rel < 1e-4, || format!("λ* {} vs {} (rel {rel:e})", coarse.lambda_star, fine.lambda_star))?;
    let s = 1e-4;
    let p = lib(solve_profile(&Nonlinearity::mems(), 2, s, &tol))?;
    let slope = p.lambda / s;
    let expected = 2.0 * 2.0 / Nonlinearity::mems().f0();
    ensure((slope / expected - 1.0).abs() < 1e-2, || format!("λ/s = {slope}"))?;
    Ok(format!("λ* = {:.8} (rel diff {rel:.1e}), λ/s = {slope:.6}", fine.lambda_star))
}

fn spectral_validation() -> Check {
    let opts = SpectralOptions::default();
    let mut dirichlet = Vec::new();
    for (n, exact) in [(1, PI * PI / 4.0), (3, PI * PI)] {
        let p = lib(solve_profile(&Nonlinearity::mems(), n, 1e-10, &Tolerance::default()))?;
        let mu = lib(rayleigh_min(&p, &opts))?.mu1;
        ensure((mu - exact).abs() < 1e-6, || format!("n = {n}: μ₁ = {mu}, expected {exact}"))?;
        dirichlet.push((mu - exact).abs());
    }
    let d = mems_sweep(2, 200, 1e-6, Tolerance::default(), true)?;
    let s_fold = d.s_fold.ok_or("no fold on the mems n = 2 branch")?;
    let below: Vec<f64> = d.points.iter().filter(|p| p.s < s_fold).map(|p| p.mu1.unwrap_or(f64::NAN)).collect();
    ensure(!below.is_empty() && below.iter().all(|&mu| mu > 0.0), || "μ₁ not positive below the fold".into())?;
    let fold = lib(rayleigh_min(d.fold_profile.as_ref().ok_or("fold not refined")?, &opts))?.mu1;
    ensure(fold.abs() < 1e-3, || format!("μ₁ at the fold = {fold}"))?;
    Ok(format!(
        "Dirichlet errors {:.1e}, {:.1e}; {} points below the fold, μ₁(fold) = {fold:.1e}",
        dirichlet[0],
        dirichlet[1],
        below.len()
    ))
}

fn theorem_confirmations() -> Check {
    let cfg = EstimateConfig::default();
    let mut lines = 0;
    for n in 3..=6 {
        let d = mems_sweep(n, 150, 1e-4, Tolerance::default(), false)?;
        let last = d.points.last().map_or(0.0, |p| p.s);
        ensure((last - (1.0 - 1e-4)).abs() < 1e-12, || format!("n = {n}: sweep ends at {last}"))?;
        for tag in EstimateTag::ALL {
            let r = lib(verify(tag, &d, &cfg))?;
            ensure(r.verdict == Trend::Bounded && r.passed, || format!("n = {n} {tag}: {:?}", r.verdict))?;
            lines += 1;
        }
    }
    Ok(format!("{lines} reports bounded"))
}

fn sharpness_control() -> Check {
    let nl = lib(Nonlinearity::scaled_power(1.0, 6.0))?;
    let grid = SGrid { cap: 1e-4, uniform_points: 75, tail_points: 75, ..SGrid::default() };
    let d = lib(branch(&nl, 7, &BranchOptions { grid, ..BranchOptions::default() }))?;
    let cfg = EstimateConfig { mode: Mode::Explore, ..EstimateConfig::default() };
    for tag in [EstimateTag::InteriorLinf, EstimateTag::GlobalLinf] {
        let r = lib(verify(tag, &d, &cfg))?;
        ensure(r.verdict == Trend::Growing, || format!("{tag}: {:?}", r.verdict))?;
    }
    let max_u = d.points.last().map_or(0.0, |p| p.max_u);
    ensure(max_u > 1.0 - 1e-3, || format!("max u at the cap = {max_u}"))?;
    Ok(format!("both growing, max u at the cap {max_u:.6}"))
}

fn inequality_verifiers() -> Check {
    let exact = lib(verify_hardy(3, 0.0, &lib(TestFunction::linear(1.0))?))?.ratio;
    ensure((exact - 0.25).abs() < 1e-8, || format!("exact Hardy ratio {exact}"))?;
    let mut rng = Lcg(0x9e37_79b9_7f4a_7c15);
    let mut hardy_max: f64 = 0.0;
    for _ in 0..20 {
        let n = 1 + ((rng.next() * 8.0) as usize).min(7);
        let a = (2.0 - n as f64) + 4.0 * rng.next();
        let rho = 0.3 + 0.7 * rng.next();
        let phi = match ((rng.next() * 3.0) as usize).min(2) {
            0 => lib(TestFunction::linear(rho))?,
            1 => lib(TestFunction::cutoff(0.99 * rho * rng.next(), rho))?,
            _ => TestFunction::power_weight(rng.next()).times(lib(TestFunction::linear(rho))?),
        };
        let r = lib(verify_hardy(n, a, &phi))?.ratio;
        ensure(r <= 1.0 + 1e-10, || format!("n = {n}, a = {a}: ratio {r}"))?;
        hardy_max = hardy_max.max(r);
    }
    // ten stable points: three in n = 3, 4 and two in n = 5, 6
    let (mut lemma_max, mut l1_max, mut checked): (f64, f64, usize) = (0.0, 0.0, 0);
    for (n, take) in [(3, 3), (4, 3), (5, 2), (6, 2)] {
        let d = mems_sweep(n, 40, 1e-3, Tolerance::default(), false)?;
        let stable = d.stable_indices();
        let picks: Vec<usize> = (0..take).map(|j| stable[(j + 1) * stable.len() / (take + 1)]).collect();
        let sub = BifurcationDiagram {
            points: picks.iter().map(|&i| d.points[i]).collect(),
            profiles: picks.iter().map(|&i| d.profiles[i].clone()).collect(),
            s_fold: None,
            ..d.clone()
        };
        let lemma = lib(verify_stability_lemma_on_branch(&sub, &TailGrid::default(), |p| proof_test_function(p, 0.2, 0.25, 0.5)))?;
        ensure(lemma.len() == take, || format!("n = {n}: {} lemma checks", lemma.len()))?;
        for c in &lemma {
            ensure(c.ratio <= 1.0 + 1e-4, || format!("n = {n}, s = {}: lemma ratio {}", c.s, c.ratio))?;
            lemma_max = lemma_max.max(c.ratio);
        }
        for p in &sub.profiles {
            let c = lib(verify_l1_laplacian_control(p))?;
            ensure(c.ratio <= 1.0 + 1e-4, || format!("n = {n}, s = {}: L1 ratio {}", c.s, c.ratio))?;
            l1_max = l1_max.max(c.ratio);
            checked += 1;
        }
    }
    ensure(checked == 10, || format!("{checked} branch points"))?;
    Ok(format!("Hardy max {hardy_max:.4}, lemma max {lemma_max:.4}, L1 max {l1_max:.4} at {checked} points"))
}

fn subsolution_checks() -> Check {
    let tol = Tolerance::default();
    let cases = [
        (Nonlinearity::mems(), 2, 0.2),
        (Nonlinearity::mems(), 3, 0.3),
        (Nonlinearity::mems(), 4, 0.5),
        (Nonlinearity::mems(), 5, 0.6),
        (Nonlinearity::mems(), 6, 0.7),
        (Nonlinearity::exponential(), 2, 0.6),
        (Nonlinearity::exponential(), 3, 0.4),
        (lib(Nonlinearity::power(3.0))?, 4, 0.4),
        (lib(Nonlinearity::power(1.0))?, 7, 0.9),
        (lib(Nonlinearity::castorina(1.2, 1.8, 2.0))?, 3, 0.4),
    ];
    let mut worst: f64 = 0.0;
    for (nl, n, s) in cases {
        let p = lib(solve_profile(&nl, n, s, &tol))?;
        let c = lib(subsolution_identities(&p, 200))?;
        let err = c.max_error_primitive.max(c.max_error_f);
        ensure(err < 1e-4, || format!("{} n = {n} s = {s}: error {err:e}", nl.tag()))?;
        worst = worst.max(err);
    }
    Ok(format!("10 profiles, max relative error {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 11] = [
        ("explicit-solution residual", Duration::from_secs(1), explicit_residuals),
        ("stability threshold exactness", Duration::from_secs(1), threshold_exactness),
        ("quotient closed forms", Duration::from_secs(1), quotient_closed_forms),
        ("tail quotient relations", Duration::from_secs(5), quotient_relations),
        ("gamma bracket for nonintegrable families", Duration::from_secs(5), gamma_bracket),
        ("branch self-convergence", Duration::from_secs(30), branch_convergence),
        ("spectral validation", Duration::from_secs(60), spectral_validation),
        ("theorem confirmations", Duration::from_secs(300), theorem_confirmations),
        ("sharpness control", Duration::from_secs(60), sharpness_control),
        ("inequality verifiers", Duration::from_secs(60), inequality_verifiers),
        ("subsolution identities", Duration::from_secs(10), subsolution_checks),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match (&result, elapsed <= *budget) {
            (Ok(_), true) => "PASS",
            _ => "FAIL",
        };
        let detail = match result {
            Ok(d) if elapsed <= *budget => d,
            Ok(d) => format!("{d}; over the {:.0?} budget", budget),
            Err(e) => e,
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("[{verdict}] {:>2}. {name} ({:.2?}): {detail}", i + 1, elapsed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
