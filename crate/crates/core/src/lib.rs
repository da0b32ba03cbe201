//! Coherent states of polynomially deformed su(1,1) and su(2) algebras.
//!
//! The crate is organized bottom-up:
//!
//! * [`algebra`]: structure polynomials `f` and telescoped Casimir functions `g`.
//! * [`repspace`]: lowest-weight modules and their ladder matrices.
//! * [`conjugate`]: canonical conjugates and the map to the undeformed algebra.
//! * [`states`]: annihilation, exponential and displacement coherent states.
//! * [`realizations`]: exact multimode boson realizations, the brute-force oracle.
//! * [`measures`]: moment sequences and quadrature checks of measure densities.
//! * [`presets`]: named algebras shared by the CLI and [`verify`].
//! * [`specialfn`]: log-Gamma, Bessel K, hypergeometric series, quadrature.

pub mod algebra;
pub mod conjugate;
pub mod error;
pub mod export;
pub mod linalg;
pub mod measures;
pub mod poly;
pub mod presets;
pub mod repspace;
pub mod rational;
pub mod realizations;
pub mod specialfn;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use poly::Poly;
pub use rational::Rational;
