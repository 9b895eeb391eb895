//! Radial solutions of `-Δu = λ f(u)` on the unit ball by shooting in the
//! center value `s = u(0)`, and the bifurcation branch `s ↦ λ(s)`.

mod branch;
mod profile;

pub use branch::{
    branch, extremal_profile, BifurcationDiagram, BranchOptions, BranchPoint, ExtremalBehavior, ExtremalProfile,
    SGrid, TurnKind, TurningPoint,
};
pub use profile::{solve_profile, RadialProfile, RadialState};
