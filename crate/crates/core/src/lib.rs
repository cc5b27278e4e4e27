//! Exact and numerical tools for coadjoint orbits, enveloping algebras,
//! infinitesimal representations and central Fourier multipliers.
//!
//! Structure constants, polynomials and operators are exact over
//! [`Rational`] and [`GaussianRational`]. Group actions and grid numerics
//! are generic over a [`Field`] and usually run in `f64`.

pub mod enveloping;
pub mod error;
pub mod expr;
pub mod lie_core;
pub mod linalg;
pub mod multiplier;
pub mod orbit_examples;
pub mod rep_ops;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Field, GaussianRational, Rational};

pub type ExactFunctional = lie_core::Functional<Rational>;
pub type FloatFunctional = lie_core::Functional<f64>;
pub type ExactElement = lie_core::AlgebraElement<Rational>;
pub type FloatElement = lie_core::AlgebraElement<f64>;
pub type FloatWord = lie_core::GroupWord<f64>;
