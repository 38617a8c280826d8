//! Numerical toolkit for disks of the Riemann sphere as spectral sets.
//!
//! The crate certifies von Neumann disk criteria for square complex
//! matrices, classifies intersections of two sphere disks, normalizes
//! ring-shaped intersections onto the balanced annulus `{1/R <= |z| <= R}`,
//! evaluates the annulus functional calculus through its boundary
//! representation formula, and computes the closed-form and empirical
//! K-spectral bounds attached to that calculus.

pub mod bounds;
pub mod calculus;
pub mod estimator;
pub mod geometry;
pub mod linalg;
pub mod ratfun;
pub mod rng;

pub use linalg::{Matrix, PolarFactors};
pub use ratfun::{MatrixRationalFunction, RationalFunction};
