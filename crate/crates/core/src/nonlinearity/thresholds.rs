use crate::error::{domain, Result};

/// `N(p) = 2 + 4p/(1+p) + 4 sqrt(p/(1+p))`: the explicit singular solution
/// `1 - |x|^{2/(1+p)}` is stable exactly when `n ≥ N(p)`.
pub fn np_threshold(p: f64) -> Result<f64> {
    if !(p >= 0.0) || p.is_infinite() {
        return domain(format!("p must be nonnegative and finite (got {p})"));
    }
    let r = p / (1.0 + p);
    Ok(2.0 + 4.0 * r + 4.0 * r.sqrt())
}

/// `N# = 2/(1 + 1/m) · (γ + 2 + 2√γ + (γ - 1 - 1/m)₋)` from the tail
/// estimates `γ_lo > 1` and `m_lo ≥ 1`.
pub fn castorina_threshold(gamma_lo: f64, m_lo: f64) -> Result<f64> {
    if !(gamma_lo > 1.0 && gamma_lo.is_finite()) || !(m_lo >= 1.0 && m_lo.is_finite()) {
        return domain(format!("need γ_lo > 1 and m_lo ≥ 1 (got γ_lo = {gamma_lo}, m_lo = {m_lo})"));
    }
    let inv_m = 1.0 / m_lo;
    let negative_part = (-(gamma_lo - 1.0 - inv_m)).max(0.0);
    Ok(2.0 / (1.0 + inv_m) * (gamma_lo + 2.0 + 2.0 * gamma_lo.sqrt() + negative_part))
}

/// `4 + 2√γ`, the dimension bound of the extended-range estimates.
pub fn extended_dimension_bound(gamma_lo: f64) -> Result<f64> {
    if !(gamma_lo > 0.0 && gamma_lo.is_finite()) {
        return domain(format!("γ_lo must be positive (got {gamma_lo})"));
    }
    Ok(4.0 + 2.0 * gamma_lo.sqrt())
}

/// `c(p,n) = 2/(1+p) · (2/(1+p) + n - 2)`.
pub fn scaled_power_coefficient(p: f64, n: f64) -> Result<f64> {
    if !(p > 0.0) || !(n >= 1.0) {
        return domain(format!("need p > 0 and n ≥ 1 (got p = {p}, n = {n})"));
    }
    let k = 2.0 / (1.0 + p);
    let c = k * (k + n - 2.0);
    if c > 0.0 {
        Ok(c)
    } else {
        domain(format!("c(p, n) = {c} is not positive for p = {p}, n = {n}"))
    }
}
