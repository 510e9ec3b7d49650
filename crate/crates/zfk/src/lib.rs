//! Travelling-wave toolkit for the Zeldovich–Frank-Kamenetskii (ZFK)
//! reaction-diffusion equation in the high-activation-energy regime.
//!
//! The equation is
//!
//! ```text
//! theta_t = theta_xx + (1 / 2 eps^2) theta (1 - theta) exp(-(1 - theta) / eps),
//! ```
//!
//! where `eps = 1/beta` is the reciprocal Zeldovich number. Fronts
//! `theta(x + c t)` solve the phase-plane system `theta' = eta`,
//! `eta' = c eta - omega(theta, eps)`, and exist precisely for speeds at or
//! above a minimal speed `cbar(eps) = 1 + 0.34405 eps + O(eps^2)`.
//!
//! The crate computes:
//!
//! * the phase-plane vector fields, equilibria and linearisations ([`model`]),
//! * the reactive-diffusive rescaling, blow-up chart, corner normal form and
//!   Hamiltonian separatrices ([`charts`]),
//! * the flat slow-manifold series, the slope quadratures behind the
//!   `cbar(eps)` expansion, and the first-order bifurcation function
//!   ([`asymptotics`]),
//! * two-sided heteroclinic shooting for `cbar(eps)` and full wave profiles
//!   ([`shooting`]),
//! * a method-of-lines validator that evolves the PDE from a computed profile
//!   and measures the front speed ([`pde`]),
//! * the acceptance checks wired into `zfk-cli verify` ([`verify`]).
//!
//! Everything is deterministic: no randomness, no hash-order iteration, and
//! all exponentially small factors are assembled in log space before a single
//! exponentiation.

// negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
// where the positive form would accept it
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod charts;
pub mod integrate;
pub mod model;
pub mod pde;
pub mod quad;
pub mod shooting;
pub mod verify;
