use crate::error::{domain, Error, Result};

/// Smallest eigenpair of a generalized tridiagonal problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Eigenvector of the generalized problem `A v = μ M v`, normalized so that
    /// `vᵀ M v = 1` and its largest entry is positive.
    pub vector: Vec<f64>,
}

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        let prev = if q == 0.0 { f64::EPSILON * (off.abs() + 1.0) } else { q };
        q = d[i] - x - if i == 0 { 0.0 } else { off / prev };
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue and eigenvector of `A v = μ M v`, where `A` is symmetric
/// tridiagonal (`diagonal`, `off_diagonal`) and `M = diag(mass)` is positive.
///
/// The eigenvalue is located by bisection on Sturm counts of the symmetrized
/// matrix `M^{-1/2} A M^{-1/2}`; the vector comes from inverse iteration with a
/// shift just below it.
pub fn eig_tridiag_smallest(diagonal: &[f64], off_diagonal: &[f64], mass: &[f64]) -> Result<EigenPair> {
    let n = diagonal.len();
    if n == 0 {
        return domain("empty matrix");
    }
    if off_diagonal.len() + 1 != n || mass.len() != n {
        return domain("tridiagonal dimensions do not match");
    }
    if let Some((index, &value)) = mass.iter().enumerate().find(|(_, &m)| !(m > 0.0 && m.is_finite())) {
        return Err(Error::IndefiniteMass { index, value });
    }
    let scale: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let d: Vec<f64> = diagonal.iter().zip(&scale).map(|(a, s)| a * s * s).collect();
    let e: Vec<f64> = off_diagonal
        .iter()
        .enumerate()
        .map(|(i, a)| a * scale[i] * scale[i + 1])
        .collect();
    if d.iter().chain(e.iter()).any(|v| !v.is_finite()) {
        return domain("matrix entries must be finite");
    }

    // Gershgorin interval
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let span = (hi - lo).max(hi.abs().max(lo.abs())).max(f64::MIN_POSITIVE);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    while hi - lo > 4.0 * f64::EPSILON * span {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(&d, &e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value = 0.5 * (lo + hi);

    // inverse iteration on T - σ I with σ slightly below the eigenvalue (SPD)
    let shift = value - 1e-10 * span.max(1.0);
    let mut v = vec![1.0; n];
    for _ in 0..4 {
        v = solve_shifted(&d, &e, shift, &v)?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical {
                message: "inverse iteration broke down".into(),
                achieved: f64::NAN,
            });
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    let mut vector: Vec<f64> = v.iter().zip(&scale).map(|(x, s)| x * s).collect();
    let norm_m = vector.iter().zip(mass).map(|(x, m)| x * x * m).sum::<f64>().sqrt();
    let sign = if vector.iter().cloned().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc }) < 0.0 {
        -1.0
    } else {
        1.0
    };
    vector.iter_mut().for_each(|x| *x *= sign / norm_m);
    Ok(EigenPair { value, vector })
}

fn solve_shifted(d: &[f64], e: &[f64], shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut piv = d[0] - shift;
    if piv == 0.0 {
        piv = f64::EPSILON;
    }
    y[0] = rhs[0] / piv;
    for i in 1..n {
        c[i - 1] = e[i - 1] / piv;
        piv = d[i] - shift - e[i - 1] * c[i - 1];
        if piv == 0.0 {
            piv = f64::EPSILON;
        }
        y[i] = (rhs[i] - e[i - 1] * y[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        y[i] -= c[i] * y[i + 1];
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_gives_min_entry() {
        let p = eig_tridiag_smallest(&[3.0, -1.5, 2.0], &[0.0, 0.0], &[1.0; 3]).unwrap();
        assert!((p.value + 1.5).abs() < 1e-13);
        assert!((p.vector[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shift_moves_eigenvalue() {
        let d = [2.0, 2.0, 2.0, 2.0];
        let e = [-1.0, -1.0, -1.0];
        let m = [0.5, 1.0, 2.0, 1.0];
        let a = eig_tridiag_smallest(&d, &e, &m).unwrap().value;
        // adding 0.7 M to A shifts every eigenvalue by 0.7
        let d2: Vec<f64> = d.iter().zip(&m).map(|(x, w)| x + 0.7 * w).collect();
        let b = eig_tridiag_smallest(&d2, &e, &m).unwrap().value;
        assert!((b - a - 0.7).abs() < 1e-12);
    }

    #[test]
    fn indefinite_mass_rejected() {
        assert!(matches!(
            eig_tridiag_smallest(&[1.0, 1.0], &[0.0], &[1.0, 0.0]),
            Err(Error::IndefiniteMass { index: 1, .. })
        ));
    }

    #[test]
    fn dirichlet_laplacian_discrete_formula() {
        // -u'' on (0,1), Dirichlet, m interior points: 4 (m+1)^2 sin^2(pi / (2 (m+1)))
        let m = 199;
        let h = 1.0 / (m as f64 + 1.0);
        let d = vec![2.0 / (h * h); m];
        let e = vec![-1.0 / (h * h); m - 1];
        let p = eig_tridiag_smallest(&d, &e, &vec![1.0; m]).unwrap();
        let exact = 4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2);
        assert!((p.value - exact).abs() < 1e-9 * exact);
        assert!(p.vector.iter().all(|&x| x > 0.0));
    }
}
