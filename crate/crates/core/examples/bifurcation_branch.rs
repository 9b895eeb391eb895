//! The MEMS branch `s ↦ λ(s)` in dimensions 1 to 9: the fold value `λ*`,
//! where it sits, and whether the stable branch ends at a fold or runs into
//! the singularity. Writes `branch-n{n}.csv` into the temp directory.
//!
//! ```text
//! cargo run --release --example bifurcation_branch
//! ```

use mems_branch::nonlinearity::Nonlinearity;
use mems_branch::radial_solver::{branch, extremal_profile, BranchOptions, SGrid};

fn main() -> mems_branch::Result<()> {
    let opts = BranchOptions { grid: SGrid { uniform_points: 100, tail_points: 100, ..SGrid::default() }, ..BranchOptions::default() };
    let out = std::env::temp_dir();
    println!("{:>3} {:>12} {:>12} {:>6} {:>10}  extremal", "n", "lambda*", "s_fold", "turns", "sup max u");
    for n in 1..=9 {
        let d = branch(&Nonlinearity::mems(), n, &opts)?;
        let ext = extremal_profile(&d)?;
        let fold = d.s_fold.map_or("-".to_string(), |s| format!("{s:.8}"));
        println!(
            "{n:>3} {:>12.8} {fold:>12} {:>6} {:>10.6}  {:?}",
            d.lambda_star,
            d.turning_points.len(),
            ext.sup_max_u,
            ext.behavior
        );
        d.write_csv(&out.join(format!("branch-n{n}.csv")))?;
    }
    println!("CSV files in {}", out.display());
    Ok(())
}
