use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{solve_profile, RadialProfile};
use crate::error::{domain, Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::numerics::{golden_section_max, Tolerance};
use crate::report;
use crate::spectral::{rayleigh_min, SpectralOptions};

/// Center values swept along the branch: uniform on `[s_min, split)`, then
/// geometric in the gap `t_max - s` from `t_max - split` down to `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SGrid {
    pub s_min: f64,
    pub split: f64,
    /// `δ_cap`: the sweep stops at `t_max - δ_cap`
    pub cap: f64,
    pub uniform_points: usize,
    pub tail_points: usize,
}

impl Default for SGrid {
    fn default() -> Self {
        Self { s_min: 1e-3, split: 0.5, cap: 1e-6, uniform_points: 60, tail_points: 60 }
    }
}

impl SGrid {
    pub fn points(&self, t_max: f64) -> Result<Vec<f64>> {
        let ok = self.s_min > 0.0
            && self.s_min < self.split
            && self.cap > 0.0
            && self.split < t_max - self.cap
            && self.uniform_points >= 1
            && self.tail_points >= 2;
        if !ok {
            return domain(format!(
                "s-grid needs 0 < s_min < split < t_max - cap (s_min = {}, split = {}, cap = {})",
                self.s_min, self.split, self.cap
            ));
        }
        let mut s: Vec<f64> = (0..self.uniform_points)
            .map(|i| self.s_min + (self.split - self.s_min) * i as f64 / self.uniform_points as f64)
            .collect();
        let (g0, g1) = ((t_max - self.split).ln(), self.cap.ln());
        s.extend((0..self.tail_points).map(|i| t_max - (g0 + (g1 - g0) * i as f64 / (self.tail_points - 1) as f64).exp()));
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchOptions {
    pub grid: SGrid,
    pub tol: Tolerance,
    /// compute `μ₁` at every branch point
    pub spectral: Option<SpectralOptions>,
    pub refine_fold: bool,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self { grid: SGrid::default(), tol: Tolerance::default(), spectral: None, refine_fold: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub s: f64,
    pub lambda: f64,
    pub max_u: f64,
    pub l1_norm: f64,
    pub mu1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurnKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub s: f64,
    pub lambda: f64,
    pub kind: TurnKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationDiagram {
    pub family: String,
    pub n: usize,
    pub singular_family: bool,
    pub points: Vec<BranchPoint>,
    /// largest `λ` seen, including the refined fold
    pub lambda_star: f64,
    pub s_at_lambda_star: f64,
    /// first local maximum of `λ(s)`, refined
    pub s_fold: Option<f64>,
    /// discrete turning points, in sweep order
    pub turning_points: Vec<TurningPoint>,
    pub options: BranchOptions,
    #[serde(skip)]
    pub profiles: Vec<RadialProfile>,
    #[serde(skip)]
    pub fold_profile: Option<RadialProfile>,
}

fn point_from(profile: &RadialProfile, spectral: Option<&SpectralOptions>) -> Result<BranchPoint> {
    let mu1 = match spectral {
        Some(opts) => Some(rayleigh_min(profile, opts)?.mu1),
        None => None,
    };
    Ok(BranchPoint { s: profile.s, lambda: profile.lambda, max_u: profile.max_u(), l1_norm: profile.l1_norm, mu1 })
}

/// Sweeps `s` over the grid, solving one profile per point (in parallel).
pub fn branch(nl: &Nonlinearity, n: usize, opts: &BranchOptions) -> Result<BifurcationDiagram> {
    let s_values = opts.grid.points(nl.t_max())?;
    let solved: Vec<(RadialProfile, BranchPoint)> = s_values
        .par_iter()
        .map(|&s| {
            let wrap = |e| Error::Branch { s, source: Box::new(e) };
            let profile = solve_profile(nl, n, s, &opts.tol).map_err(wrap)?;
            let point = point_from(&profile, opts.spectral.as_ref()).map_err(wrap)?;
            Ok((profile, point))
        })
        .collect::<Result<_>>()?;
    let (profiles, points): (Vec<_>, Vec<_>) = solved.into_iter().unzip();

    // λ changes below the shooting accuracy are rounding, not turns
    let noise = |lam: f64| 10.0 * opts.tol.bound(lam);
    let turning_points: Vec<TurningPoint> = points
        .windows(3)
        .filter_map(|w| {
            let (d0, d1) = (w[1].lambda - w[0].lambda, w[2].lambda - w[1].lambda);
            let eps = noise(w[1].lambda);
            let kind = if d0 > eps && d1 < -eps {
                TurnKind::Max
            } else if d0 < -eps && d1 > eps {
                TurnKind::Min
            } else {
                return None;
            };
            Some(TurningPoint { s: w[1].s, lambda: w[1].lambda, kind })
        })
        .collect();

    let (mut s_at_lambda_star, mut lambda_star) = points
        .iter()
        .map(|p| (p.s, p.lambda))
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    let mut s_fold = None;
    let mut fold_profile = None;
    if let Some(first_max) = turning_points.iter().find(|t| t.kind == TurnKind::Max) {
        s_fold = Some(first_max.s);
        if opts.refine_fold {
            let i = points.iter().position(|p| p.s == first_max.s).expect("turning point is a branch point");
            let (a, b) = (points[i - 1].s, points[i + 1].s);
            let (s_ref, lam) = golden_section_max(
                |s| solve_profile(nl, n, s, &opts.tol).map(|p| p.lambda),
                a,
                b,
                1e-9 * (b - a).max(1e-300) + 1e-13,
            )
            .map_err(|e| Error::Branch { s: first_max.s, source: Box::new(e) })?;
            s_fold = Some(s_ref);
            fold_profile = Some(solve_profile(nl, n, s_ref, &opts.tol)?);
            if lam > lambda_star {
                lambda_star = lam;
                s_at_lambda_star = s_ref;
            }
        }
    }
    Ok(BifurcationDiagram {
        family: nl.tag().to_string(),
        n,
        singular_family: nl.is_singular(),
        points,
        lambda_star,
        s_at_lambda_star,
        s_fold,
        turning_points,
        options: *opts,
        profiles,
        fold_profile,
    })
}

impl BifurcationDiagram {
    /// Whether a branch point is on the stable (minimal) branch: `μ₁ > 0` when
    /// the spectrum was computed, otherwise `s` not beyond the first fold.
    pub fn is_stable(&self, point: &BranchPoint) -> bool {
        match point.mu1 {
            Some(mu) => mu > 0.0,
            None => self.s_fold.is_none_or(|sf| point.s <= sf),
        }
    }

    /// Indices of the stable points before the first unstable one.
    pub fn stable_indices(&self) -> Vec<usize> {
        self.points.iter().take_while(|p| self.is_stable(p)).enumerate().map(|(i, _)| i).collect()
    }

    /// CSV `s,lambda,max_u,l1_norm,mu1`; `mu1` is empty when not computed.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self
            .points
            .iter()
            .map(|p| vec![Some(p.s), Some(p.lambda), Some(p.max_u), Some(p.l1_norm), p.mu1]);
        report::write_csv(path, &["s", "lambda", "max_u", "l1_norm", "mu1"], rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremalBehavior {
    /// `‖u‖_∞` stays away from 1 along the stable branch
    Regular,
    /// `‖u‖_∞ → 1` along the stable branch
    Singular,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalProfile {
    pub behavior: ExtremalBehavior,
    /// sup of `‖u‖_∞` over the stable part of the sweep
    pub sup_max_u: f64,
    /// `1 - sup_max_u`
    pub margin: f64,
    pub profile: RadialProfile,
}

/// Last profile of the stable branch (the refined fold profile when a fold
/// was found), flagged regular when the stable branch ends at a fold or the
/// family is not singular.
pub fn extremal_profile(diagram: &BifurcationDiagram) -> Result<ExtremalProfile> {
    let stable = diagram.stable_indices();
    let last = match stable.last() {
        Some(&i) => i,
        None if !diagram.profiles.is_empty() => diagram.profiles.len() - 1,
        None => return domain("empty bifurcation diagram"),
    };
    let profile = match &diagram.fold_profile {
        Some(fp) if fp.s >= diagram.profiles[last].s => fp.clone(),
        _ => diagram.profiles[last].clone(),
    };
    let sup_max_u = stable
        .iter()
        .map(|&i| diagram.points[i].max_u)
        .fold(profile.max_u(), f64::max);
    let behavior = if diagram.s_fold.is_some() || !diagram.singular_family {
        ExtremalBehavior::Regular
    } else {
        ExtremalBehavior::Singular
    };
    Ok(ExtremalProfile { behavior, sup_max_u, margin: 1.0 - sup_max_u, profile })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_grid_layout() {
        let g = SGrid::default();
        let s = g.points(1.0).unwrap();
        assert_eq!(s.len(), 120);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert!((s[s.len() - 1] - (1.0 - 1e-6)).abs() < 1e-15);
        assert!((s[60] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_grid_rejected() {
        let g = SGrid { s_min: 0.6, ..SGrid::default() };
        assert!(g.points(1.0).is_err());
    }
}
