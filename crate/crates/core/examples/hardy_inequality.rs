//! Weighted Hardy inequality for radial functions: the exact case, random
//! admissible weights, and a family of test functions approaching the
//! extremal ratio 1.
//!
//! ```text
//! cargo run --release --example hardy_inequality
//! ```

use mems_branch::estimates::{hardy_near_extremal, verify_hardy};
use mems_branch::spectral::TestFunction;

fn main() -> mems_branch::Result<()> {
    let exact = verify_hardy(3, 0.0, &TestFunction::linear(1.0)?)?;
    println!("n = 3, a = 0, phi = (1-r)+: ratio {:.10} (exact 1/4)", exact.ratio);

    for (n, a) in [(3, 0.0), (5, -1.0), (4, 1.5)] {
        println!("n = {n}, a = {a}, constant {:.4}", (n as f64 + a - 2.0).powi(2) / 4.0);
        for delta in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
            let check = verify_hardy(n, a, &hardy_near_extremal(n, a, delta)?)?;
            println!("  delta = {delta:>7.0e}: ratio {:.6}", check.ratio);
        }
    }
    Ok(())
}
