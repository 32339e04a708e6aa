//! Special functions: integer-order Bessel functions of the first kind and the
//! Faddeeva function.

mod bessel;
mod faddeeva;

pub use bessel::{bessel_j, BesselOrder, MAX_ARGUMENT, MAX_ORDER};
pub use faddeeva::faddeeva;

/// Complex number used for line-shape evaluations.
pub type ComplexValue = num_complex::Complex64;
