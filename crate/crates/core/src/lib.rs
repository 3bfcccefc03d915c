//! Exact computations behind the mirror of the Euler sequence on `ℙⁿ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] and [`polytope`]: the lattices `M`, `N`, lattice polytopes,
//!   polar duality, reflexive and Fano polytopes.
//! * [`fan`]: fans, torus-invariant divisors, support functions, Picard group
//!   and the projective-space fixtures.
//! * [`klyachko`]: equivariant vector bundles as filtration data and their
//!   weight decompositions.
//! * [`tropical`]: piecewise-affine lifts of tropical sections to the
//!   universal cover, surgery, and the weight comparison with `Ω¹`.
//! * [`mutation`]: Grothendieck-group level mutations of the Beilinson
//!   collection.

pub mod fan;
pub mod json;
pub mod klyachko;
pub mod lattice;
pub mod linalg;
pub mod mutation;
pub mod polytope;
pub mod tropical;

pub use lattice::{pair, Lattice, LatticeError, LatticeVector, RationalPoint};
