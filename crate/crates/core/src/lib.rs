//! Exact integral quadratic lattices.
//!
//! Lattices live in rational quadratic spaces and all arithmetic is exact.
//! On top of the lattice layer sit discriminant forms and gluing, the
//! halving correspondence between `B(2)⊕II₁,₁` and `B⊕I₁,₁`, quadratic
//! spaces over F₂, and the verifiers built from them.

pub mod corollaries;
pub mod discriminant;
pub mod error;
pub mod exactlin;
pub mod f2quad;
pub mod halving;
pub mod isometry;
pub mod lattice;
pub mod report;
pub mod theorem6;

pub use error::{LatticeError, Result};
pub use lattice::{Lattice, QSpace};
