//! Resonant normal form of the scaled lattice Hamiltonian by Lie transforms.
//!
//! Polynomials live in the complex coordinates `ζ_j = (u_j + i v_j)/√2`, in
//! which the harmonic action is `G = Σ|ζ_j|²` and its flow rotates every
//! monomial `ζ^α ζ̄^β` by `e^{i(|α|−|β|)t}`. Coefficients are either exact
//! Gaussian rationals or complex floats; powers of ε are kept as a grading so
//! that order-by-order homogeneity can be checked symbolically.

pub mod coeff;
pub mod lie;
pub mod poly;
pub mod soliton;
pub mod transform;

pub use coeff::{Coeff, GaussRational};
pub use lie::{
    lie_transform_normal_form, solve_homological, BudgetDiagnostics, NormalForm, NormalFormBudget, OrderNorms,
};
pub use poly::{build_scaled_hamiltonian, harmonic_action, Monomial, Poly};
pub use transform::{from_complex, to_complex, transform_state, CoordinateTransform, Direction};
pub use soliton::{continue_generalized_soliton, generalized_soliton_equation, GeneralizedSoliton, GeneralizedSolitonSolution};
