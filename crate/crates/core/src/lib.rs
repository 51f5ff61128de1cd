//! Numerics for Besov–Morrey type spaces of analytic functions on the unit
//! disc: weights, disc quadrature, fractional derivatives of Taylor series,
//! Carleson-type measure constants and a series solver for linear ODEs.

pub mod cli;
pub mod discgeom;
pub mod error;
pub mod measures;
pub mod odesolve;
pub mod series;
pub mod special;
pub mod theoremlab;
pub mod weights;

pub use error::{Error, Result};
