//! Two-dimensional lattice theta functions and the minimization problems built on them.
//!
//! The crate evaluates `θ(s;z) = Σ exp(−sπ|mz+n|²/y)` and its midpoint-shifted companion,
//! locates the minimizers of the competing functionals
//! `W₁,ρ(z) = θ(2;(z+1)/2) + ρθ(1;z)` and `W₂,ρ(z) = θ(1;(z+1)/2) + ρθ(2;z)`,
//! and derives the Mueller-Ho phase diagram from them.
//!
//! Module map:
//! - [`theta_kernel`]: Jacobi thetas, the one-dimensional theta `ϑ(X;Y)`, lattice thetas.
//! - [`modular_domain`]: Moebius words, fundamental-domain reduction, the Cayley map.
//! - [`competing_functionals`]: `X, Y, A, B`, thresholds, branch solver, minimizers.
//! - [`mueller_ho`]: the interaction sum `J(z;a,b)`, energies, phase rows, critical points.
//! - [`verifier`]: brute-force oracles, bound kits, appendix polynomials and margins.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod competing_functionals;
pub mod error;
pub mod extended;
pub mod modular_domain;
pub mod mueller_ho;
pub mod report;
pub mod theta_kernel;
pub mod verifier;

pub use error::{Error, Result};
pub use theta_kernel::{Estimate, HalfPlanePoint, SeriesTruncation, ThetaKind};
