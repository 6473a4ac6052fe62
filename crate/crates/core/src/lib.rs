//! Verification engine for two-variable Hermite polynomial (TVHP) identities.
//!
//! The crate is split along the three independent routes used to check an
//! identity:
//!
//! * [`hermite`]: exact TVHP, Laguerre and Legendre coefficients plus residual
//!   evaluators for the scalar generating functions.
//! * [`boson`]: exact normal / antinormal ordering of two-mode boson
//!   expressions and the operator identities built on it.
//! * [`fock`]: truncated two-mode Fock-space states and operators.
//! * [`quad`]: Gauss–Hermite quadrature for complex-plane Gaussian integrals.
//!
//! Exact scalars live in [`scalar`].

pub mod boson;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod quad;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{ComplexPoint, GaussianRational};
