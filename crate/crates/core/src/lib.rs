//! Quantum geometry and topological invariants of two-level Bloch Hamiltonians.
//!
//! A two-band Hamiltonian `H(k) = d(k)·σ` maps a 2-D parameter space onto the
//! Bloch sphere through `d̂ = d/|d|`. This crate computes, for such maps:
//!
//! - the quantum (Fubini-Study) metric and the Berry curvature, both in closed
//!   form for the built-in model and by finite differences for any [`DField`];
//! - the Chern number, i.e. the net Berry flux over `2π`;
//! - the bulk-only Euler number `(1/4π)∫R√det g`, which is only an integer when
//!   `d̂` covers the whole sphere;
//! - the Gauss-Bonnet Euler characteristic with the geodesic-curvature boundary
//!   term, which stays integral when the image of `d̂` is a spherical cap.
//!
//! The built-in model is
//!
//! ```text
//! H(kx, ky) = (Ω/2) [ -h - cos kx            α sin kx e^{-i ky} ]
//!                   [ α sin kx e^{i ky}      h + cos kx         ]
//! ```
//!
//! whose `d̂` covers the sphere twice for `|h| < 1` and a cap four times for
//! `|h| > 1`.

#![forbid(unsafe_code)]

pub mod bloch_model;
pub mod error;
pub mod invariants;
pub mod qgt;
pub mod surface_geometry;
pub mod sweep;

pub use bloch_model::{DField, DVec, EigenSystem, KPoint, ModelParams, UnitD};
pub use error::{Error, Result};
pub use invariants::{InvariantReport, QuadratureSpec, Rule};
pub use qgt::{Band, MetricTensor, QgtSample};
pub use surface_geometry::{CapGeometry, Christoffel};
