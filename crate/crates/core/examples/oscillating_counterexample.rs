//! The oscillating family `(1-t)^{-h}` whose exponent wanders between `a`
//! and `b`: tail quotient limits from the phase sweep, and the growing
//! windows on which `h ≥ 1`.
//!
//! ```text
//! cargo run --release --example oscillating_counterexample
//! ```

use mems_branch::nonlinearity::{estimate_limits, oscillation_intervals, Nonlinearity, Quotient, TailGrid};

fn main() -> mems_branch::Result<()> {
    let (a, b, eps) = (1.2, 1.8, 2.0);
    let nl = Nonlinearity::castorina(a, b, eps)?;
    let grid = TailGrid::default();
    for (name, q) in [("gamma", Quotient::Gamma), ("q", Quotient::Q), ("m", Quotient::M)] {
        let l = estimate_limits(&nl, q, &grid)?;
        println!("{name:>6}: lo = {:.6}, hi = {:.6}", l.lo, l.hi);
    }
    println!("1 + 1/q at the extremes: {:.6}, {:.6}", 1.0 + 1.0 / b, 1.0 + 1.0 / a);

    for (a, b) in [(0.6, 1.4), (1.2, 1.8), (0.5, 0.9)] {
        let r = oscillation_intervals(a, b, 20.0, 0.0, f64::INFINITY)?;
        println!("a = {a}, b = {b}: {:?}, {} windows, lengths increasing: {}", r.regime, r.intervals.len(), r.lengths_increasing);
        for (lo, hi) in r.intervals.iter().take(5) {
            println!("    s in [{lo:.4e}, {hi:.4e}]");
        }
    }
    Ok(())
}
