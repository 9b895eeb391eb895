//! Tail quotients, the θ certificate and the dimension thresholds of every
//! built-in singular family.
//!
//! ```text
//! cargo run --release --example nonlinearity_report
//! ```

use mems_branch::nonlinearity::{castorina_threshold, certify, np_threshold, KBound, Nonlinearity, TailGrid};

fn main() -> mems_branch::Result<()> {
    let families = [
        ("power p=1", Nonlinearity::power(1.0)?, Some(1.0)),
        ("power p=3", Nonlinearity::power(3.0)?, Some(3.0)),
        ("mems", Nonlinearity::mems(), Some(2.0)),
        ("exponential", Nonlinearity::exponential(), None),
        ("oscillating a=1.2 b=1.8", Nonlinearity::castorina(1.2, 1.8, 2.0)?, None),
    ];
    let grid = TailGrid::default();
    println!("{:<24} {:>17} {:>17} {:>8} {:>8} {:>9} {:>9}", "family", "gamma [lo, hi]", "q [lo, hi]", "theta", "K", "N(p)", "N#");
    for (name, nl, p) in families {
        let cert = certify(&nl, &grid, None)?;
        let range = |l: Option<mems_branch::nonlinearity::Limits>| match l {
            Some(l) => format!("[{:.4}, {:.4}]", l.lo, l.hi.min(1e4)),
            None => "-".into(),
        };
        let theta = cert.theta.map_or("-".into(), |t| format!("{t:.4}"));
        let k = match cert.k {
            Some(KBound::Finite(k)) => format!("{k:.3}"),
            Some(_) => "inf".into(),
            None => "-".into(),
        };
        let np = p.map_or("-".into(), |p| format!("{:.4}", np_threshold(p).unwrap()));
        let castorina = match (cert.cr_condition, cert.gamma, cert.m) {
            (true, Some(g), Some(m)) => castorina_threshold(g.lo, m.lo).map_or("-".into(), |v| format!("{v:.4}")),
            _ => "-".into(),
        };
        println!(
            "{name:<24} {:>17} {:>17} {theta:>8} {k:>8} {np:>9} {castorina:>9}",
            range(cert.gamma),
            range(cert.q)
        );
        if !cert.cr_condition {
            println!("{:<24} CR condition fails: gamma_lo is not above 1", "");
        }
    }
    Ok(())
}
