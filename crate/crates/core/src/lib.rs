//! Geometric algebra and calculus over Euclidean R^n, and a dynamics engine for
//! systems defined by a Hamiltonian constraint `H(q, P) = 0`, where `q` is a
//! point of configuration space and `P` a grade-D multivector momentum.
//!
//! Layout:
//! - [`multivector`]: products, grade operations, reversion, blade inverse.
//! - [`identities`]: randomized checks of the algebraic identities.
//! - [`calculus`]: numeric vector/multivector derivatives and outermorphisms.
//! - [`chain`]: simplicial chains, boundaries and directed integrals.
//! - [`hamiltonian`]: the constraint interface and the three built-in systems.
//! - [`solver`]: integrators, relaxation and residual diagnostics.
//! - [`hamilton_jacobi`]: local Hamilton-Jacobi residuals and conserved quantities.

pub mod calculus;
pub mod chain;
pub mod error;
pub mod hamilton_jacobi;
pub mod hamiltonian;
pub mod identities;
pub mod multivector;
pub mod solver;

pub use error::{Error, Result};
pub use multivector::{parse_multivector, Grade, Multivector};
