//! High-order pyramidal finite elements for every slot of the de Rham complex.

pub mod element;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod meshfem;
pub mod quadrature;
pub mod ratpoly;
pub mod scalar;
pub mod spaces;

pub use error::{Error, Result};
pub use ratpoly::{Axis, FloatPoly, Monomial, RationalPoly, SpaceSpec};
pub use scalar::{Field, Real};

/// Exact coefficient field.
pub type Rational = num_rational::BigRational;

/// Affine pyramid in floating point.
pub type Pyramid = geometry::AffinePyramid<f64>;
/// Affine pyramid with exact vertices, for the analytic oracle.
pub type ExactPyramid = geometry::AffinePyramid<Rational>;
/// Conical product rule in double precision.
pub type Rule = quadrature::PyramidRule<f64>;
/// One-dimensional Gauss rule in double precision.
pub type Rule1 = quadrature::Rule1D<f64>;
