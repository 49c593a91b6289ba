//! Exact machinery for computing almost-sure diophantine exponents of
//! rationally-defined submanifolds of matrices and of rational nilpotent Lie
//! groups.
//!
//! Everything in this crate is exact: scalars are arbitrary-precision
//! rationals, subspaces are canonical reduced-row-echelon bases, and every
//! exponent comes out as a fraction together with a witness subspace and a
//! certificate of the generic sample points used to find it.
//!
//! Module map:
//!
//! - [`qlinalg`] — rational matrices, canonical subspaces, kernels and the
//!   lattice operations (sum, intersection, flag dimensions).
//! - [`freelie`] — the free nilpotent Lie algebra on `k` generators of step
//!   `s`: Lyndon-word basis, bracket normal forms, truncated BCH products.
//! - [`liealg`] — concrete nilpotent Lie algebras from structure constants:
//!   lower central series, laws ideals, growth exponents, metric weights.
//! - [`pencil`] — weighted volume functions ψ/φ, pencils, the submodular
//!   ratio maximum τ over a candidate family, Dirichlet lower bounds.
//! - [`repthy`] — closed-form number theory and representation theory
//!   (Möbius/Mertens, Weyl and hook-content dimensions, the explicit
//!   exponent formulas) used as independent oracles.

pub mod error;
pub mod qlinalg;
pub mod repthy;
pub mod freelie;
pub mod liealg;
pub mod pencil;
pub mod sampler;

pub use error::Error;
pub use qlinalg::{QMatrix, Rational, Subspace};
pub use sampler::RationalSampler;
