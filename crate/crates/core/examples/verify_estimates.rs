//! Runs every branch-level estimate on the MEMS branch in dimensions 3 to 6
//! and on the scaled-power control in dimension 7, printing the verdicts.
//!
//! ```text
//! cargo run --release --example verify_estimates
//! ```

use mems_branch::estimates::{verify, EstimateConfig, EstimateTag, Mode};
use mems_branch::nonlinearity::Nonlinearity;
use mems_branch::radial_solver::{branch, BranchOptions, SGrid};

fn main() -> mems_branch::Result<()> {
    let grid = SGrid { cap: 1e-4, uniform_points: 75, tail_points: 75, ..SGrid::default() };
    let opts = BranchOptions { grid, ..BranchOptions::default() };
    let runs = [
        (Nonlinearity::mems(), 3, Mode::Theorem),
        (Nonlinearity::mems(), 4, Mode::Theorem),
        (Nonlinearity::mems(), 5, Mode::Theorem),
        (Nonlinearity::mems(), 6, Mode::Theorem),
        (Nonlinearity::scaled_power(1.0, 6.0)?, 7, Mode::Explore),
    ];
    for (nl, n, mode) in runs {
        let diagram = branch(&nl, n, &opts)?;
        let cfg = EstimateConfig { mode, ..EstimateConfig::default() };
        println!("{} n={n} ({} stable points, λ* = {:.6})", nl.tag(), diagram.stable_indices().len(), diagram.lambda_star);
        for tag in EstimateTag::ALL {
            let report = verify(tag, &diagram, &cfg)?;
            let tail: Vec<String> = report.samples.iter().rev().take(4).rev().map(|p| format!("{:.4e}", p.ratio)).collect();
            println!("  {:<14} {:<12} max {:.4e}  tail [{}]", tag.name(), format!("{:?}", report.verdict), report.max_ratio, tail.join(", "));
        }
    }
    Ok(())
}
