//! First eigenvalue of the linearized operator along the MEMS branch in the
//! disk: positive on the minimal branch, zero at the fold, negative past it.
//!
//! ```text
//! cargo run --release --example stability_spectrum
//! ```

use mems_branch::nonlinearity::Nonlinearity;
use mems_branch::radial_solver::{branch, solve_profile, BranchOptions, SGrid};
use mems_branch::spectral::{rayleigh_min, SpectralOptions};

fn main() -> mems_branch::Result<()> {
    let spectral = SpectralOptions::default();
    let opts = BranchOptions {
        grid: SGrid { uniform_points: 12, tail_points: 8, ..SGrid::default() },
        spectral: Some(spectral),
        ..BranchOptions::default()
    };
    let d = branch(&Nonlinearity::mems(), 2, &opts)?;
    println!("{:>12} {:>12} {:>14}", "s", "lambda", "mu1");
    for p in &d.points {
        println!("{:>12.6} {:>12.8} {:>14.6e}", p.s, p.lambda, p.mu1.unwrap_or(f64::NAN));
    }
    if let Some(fp) = &d.fold_profile {
        let r = rayleigh_min(fp, &spectral)?;
        println!("fold s = {:.10}, lambda* = {:.10}, mu1 = {:.3e} ± {:.1e}", fp.s, fp.lambda, r.mu1, r.error_bar);
    }
    // small λ: the spectrum approaches the Dirichlet Laplacian, π² in n = 3
    let p = solve_profile(&Nonlinearity::mems(), 3, 1e-10, &opts.tol)?;
    let r = rayleigh_min(&p, &spectral)?;
    println!("n = 3, s = 1e-10: mu1 = {:.10} (pi^2 = {:.10})", r.mu1, std::f64::consts::PI.powi(2));
    Ok(())
}
