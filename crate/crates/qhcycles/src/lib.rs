//! Limit-cycle analysis for planar vector fields that split into two
//! quasi-homogeneous components.
//!
//! The pipeline: polynomial input is decomposed into weighted-degree
//! components ([`vectorfield`]), reduced to a scalar periodic equation
//! dr/dθ on a cylinder ([`transforms`]), and then interrogated two ways:
//! exact sign certificates for uniqueness/stability criteria ([`criteria`],
//! backed by [`trigpoly`]) and validated numerics for locating the cycles
//! those criteria bound ([`dynamics`]).
//!
//! All symbolic data is carried as trigonometric polynomials with exact
//! rational coefficients; floating point enters only at the integration
//! and sampling layer.

pub mod battery;
pub mod criteria;
pub mod dynamics;
pub mod transforms;
pub mod trigpoly;
pub mod vectorfield;

/// Exact rational scalar used throughout the symbolic layer.
pub type Rat = num_rational::BigRational;

/// Orientation-aware stability of a periodic orbit in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// Builds a `Rat` from an integer pair, panicking on zero denominator.
/// Convenience for tests and built-in systems.
pub fn rat(num: i64, den: i64) -> Rat {
    use num_bigint::BigInt;
    Rat::new(BigInt::from(num), BigInt::from(den))
}
