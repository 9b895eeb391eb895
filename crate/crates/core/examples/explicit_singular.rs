//! The explicit singular solution `1 - |x|^{2/(1+p)}`: its stability
//! threshold `N(p)`, the Hardy margin on either side, and the ODE residual.
//!
//! ```text
//! cargo run --release --example explicit_singular
//! ```

use mems_branch::nonlinearity::np_threshold;
use mems_branch::spectral::{explicit_residual, explicit_singular_stability};

fn main() -> mems_branch::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>12}  stable dimensions up to 12", "p", "N(p)", "c(p,7)", "residual");
    for p in [0.5, 1.0, 2.0, 3.0, 5.0] {
        let np = np_threshold(p)?;
        let stable: Vec<String> = (2..=12)
            .filter(|&n| explicit_singular_stability(p, n as f64).is_ok_and(|s| s.stable))
            .map(|n| n.to_string())
            .collect();
        let residual = explicit_residual(p, 7, 1e-3, 1.0 - 1e-3, 2001)?;
        let c = mems_branch::nonlinearity::scaled_power_coefficient(p, 7.0)?;
        println!("{p:>5} {np:>10.6} {c:>10.6} {residual:>12.2e}  {}", stable.join(" "));
    }
    let s = explicit_singular_stability(1.0, 7.0)?;
    println!(
        "p = 1, n = 7: potential coefficient {:.6} against the Hardy constant {:.6}, margin {:.6}",
        s.c_hardy_form, s.hardy_constant, s.margin
    );
    Ok(())
}
