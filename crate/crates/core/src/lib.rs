//! Numerical engine for 3-dimensional almost paracontact almost paracomplex
//! Riemannian (apapR) manifolds built over 2-dimensional paracomplex bases.
//!
//! Layers, bottom up:
//!
//! - [`expr`]: scalar-field expressions with exact second-order jets;
//! - [`tensor`]: small dense tensors, contraction, raising/lowering, frames;
//! - [`riemann`]: Levi-Civita connection, curvature, Ricci and sectional
//!   curvature of a metric given on a chart;
//! - [`apapr`]: structure axioms, fundamental tensor, Lee forms, associated
//!   metrics;
//! - [`classify`]: decomposition of the fundamental tensor into basic classes;
//! - [`constructions`]: base surfaces, the cone and the hyperbolic extension,
//!   and closed-form component tables;
//! - [`evaluate`]: all of the above at one point of a construction chart.

pub mod apapr;
pub mod classify;
pub mod constructions;
mod error;
pub mod evaluate;
pub mod expr;
pub mod riemann;
pub mod tensor;

pub use error::{Error, Result};
