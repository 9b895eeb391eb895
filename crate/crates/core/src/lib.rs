// negated comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimates;
pub mod nonlinearity;
pub mod numerics;
pub mod radial_solver;
pub mod report;
pub mod spectral;

pub use error::{Error, Result};
