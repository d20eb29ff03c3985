//! Difference discrete differential geometry on hypercubic lattices.
//!
//! The crate builds the noncommutative differential calculus of a periodic
//! lattice (shifts `E_μ`, differences `Δ_μ`, the exterior algebra with
//! `dx^μ f = (E_μ f) dx^μ`) and on top of it matrix-valued connections,
//! their curvature, holonomy around plaquettes, the Bianchi identity, the
//! Abelian Chern density and discrete Lax pairs on an open 2D grid.
//!
//! Sections are row vectors acted on from the right, so a connection acts
//! as `a ↦ a·U_μ(x)` when transporting from `x` to `x + μ̂`.
//!
//! Directions are zero based throughout the library.

pub mod connection;
pub mod curvature;
pub mod error;
pub mod field;
pub mod forms;
pub mod io;
pub mod laxpair;
pub mod lattice;
pub mod linalg;
pub mod random;

pub use connection::{ConnectionB, ConnectionU, GaugeTransform, LatticePath};
pub use curvature::CurvatureField;
pub use error::{Error, Result};
pub use field::{LinkField, MatrixField, ScalarKind};
pub use forms::DiscreteForm;
pub use laxpair::{LaxSystem, WaveFunction};
pub use lattice::{Boundary, Lattice, Orientation, Site, Step};
pub use linalg::{Mat, Scalar};
