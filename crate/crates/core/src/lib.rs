//! Discrete breathers of Klein–Gordon lattices in the small-coupling limit.
//!
//! The crate computes stationary solitons of the discrete nonlinear
//! Schrödinger (dNLS) equation, continues them into time-periodic breathers
//! of the scaled discrete Klein–Gordon (dKG) lattice
//!
//! ```text
//! ü_n + u_n + ε u_n^{2p+1} = ε (Δu)_n
//! ```
//!
//! analyzes their Floquet spectrum with Krein signatures, builds the
//! resonant normal form of the lattice Hamiltonian by Lie transforms, and
//! integrates the lattice with symplectic splitting methods.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dnls;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod io;
pub mod kg_breather;
pub mod kg_spectrum;
pub mod lattice;
pub mod linalg;
pub mod normal_form;

pub use error::{Error, Result};
pub use lattice::{Boundary, LatticeGrid, RealField};
