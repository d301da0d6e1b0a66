//! Numerical differential geometry for parametric surface patches in E^3.
//!
//! The crate evaluates order-2 jets of immersions x(u, v), assembles the three
//! fundamental forms, and applies Beltrami operators (gradient and
//! Laplace–Beltrami) taken with respect to any of the forms. On top of that it
//! fits pointwise relations of the shape `Δ^III x = Λ x (+ B)` over sampled
//! patches, recovers the closed-form coefficient polynomials of the third-form
//! Laplacian on ruled surfaces, and evaluates dedicated closed forms for two
//! quadric families.
//!
//! Sign convention: the Laplacian is the geometer's positive operator,
//! `Δ = −(1/√f) ∂_j(√f F^{ij} ∂_i ·)`, so that on the unit sphere with the
//! third form `Δ x = 2x` and coordinate functions of minimal surfaces in the
//! induced metric are harmonic with eigenvalue 0.

pub mod catalog;
pub mod config;
pub mod error;
pub mod fd;
pub mod fit;
pub mod operators;
pub mod quadric;
pub mod report;
pub mod ruled;
pub mod surface;
pub mod verify;

pub use error::GeomError;
pub use operators::Tolerances;
