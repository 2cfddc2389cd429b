//! A numerical laboratory for the k-player gambler's ruin on the lattice
//! simplex.
//!
//! k players exchange single chips through fair games between uniformly
//! chosen pairs until someone is ruined. The crate computes, at desk
//! scale, the exact objects this chain is built from and the asymptotic
//! laws they obey:
//!
//! - [`simplex`]: enumeration and indexing of the lattice simplex, its
//!   reachable boundary, faces, and neighbor structure;
//! - [`kernel`]: the killed transition kernel as a sparse symmetric
//!   operator;
//! - [`spectral`]: the top eigenpair `(beta0, phi0)` by power iteration,
//!   with an on-disk eigenvector cache;
//! - [`absorption`]: exact boundary hitting laws through SPD solves;
//! - [`montecarlo`]: seeded, reproducible simulation for cross-checks;
//! - [`profile`]: closed-form comparators and the exponent constants
//!   `alpha`, `beta`, `lambda`;
//! - [`sphereig`]: the spherical-triangle Dirichlet eigenvalue that
//!   determines `alpha`, by finite elements;
//! - [`analysis`]: power-law fitting and bounded-ratio verification;
//! - [`verify`]: the acceptance checks tying everything together;
//! - [`cli`]: the command-line driver used by the `ruinlab` binary.
//!
//! The runnable `examples/` directory walks through each capability.

pub mod absorption;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod montecarlo;
pub mod profile;
pub mod simplex;
pub mod spectral;
pub mod sphereig;
pub mod verify;

pub use error::{Error, Result};
