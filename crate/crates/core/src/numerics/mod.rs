//! Shared numerical kernels: adaptive Runge–Kutta integration with dense
//! output and event location, adaptive Gauss–Kronrod quadrature, bracketing
//! root finding, monotone interpolation, a generalized tridiagonal eigensolver
//! and weighted radial integrals.
//!
//! Every kernel is a pure function of its inputs.

mod eigen;
mod grid;
mod interp;
mod ode;
mod quad;
mod radial;
mod roots;
mod tolerance;

pub use eigen::{eig_tridiag_smallest, sturm_count, EigenPair};
pub use grid::GridFunction;
pub use interp::{fritsch_carlson_slopes, hermite_cubic, hermite_cubic_integral};
pub use ode::{ode_integrate, DenseSegment, Event, EventRecord, OdeOptions, OdeSolution};
pub use quad::{gauss_legendre_10, quad_adaptive, QuadResult};
pub use radial::{ball_volume, radial_integral, radial_integral_fn, radial_integral_fn_weighted, sphere_area, TruncatedIntegral};
pub use roots::{golden_section_max, root_bracket};
pub use tolerance::Tolerance;
