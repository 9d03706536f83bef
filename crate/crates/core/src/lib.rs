//! Hierarchical grid-based key pre-distribution.
//!
//! Nodes are placed in a binary hierarchy of zones. Every grid at every level
//! owns a symmetric bivariate polynomial, and each node stores one share per
//! level. Any two nodes share the polynomial of the smallest grid containing
//! both, so every pair can agree on a key directly.
//!
//! * [`field`]: GF(q) arithmetic, Horner evaluation, Lagrange interpolation
//! * [`polynomial`]: symmetric bivariate polynomials, shares, threshold recovery
//! * [`topology`]: grid parameters, structured IDs, order queries
//! * [`keying`]: key ring assignment, key establishment, truncation, persistence
//! * [`analysis`]: closed-form connectivity, overhead and security calculators
//! * [`simulate`]: Monte Carlo and exhaustive checks of the closed forms

pub mod analysis;
pub mod error;
pub mod field;
pub mod keying;
pub mod polynomial;
pub mod rng;
pub mod simulate;
pub mod topology;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldModulus, UniPoly};
pub use keying::{assign_keying_material, DegreePolicy, Deployment, KeyRing, PathKey, PolicyKind};
pub use polynomial::{PolyShare, SymBivarPoly};
pub use topology::{make_grid, GridParams, NodeId};
