//! Special-function kernels: log-Gamma, modified Bessel K of real order,
//! generalized hypergeometric series and semi-infinite quadrature.

mod bessel;
mod gamma;
mod hypergeometric;
mod quadrature;

pub use bessel::{bessel_k, log_bessel_k};
pub use gamma::{log_gamma, log_gamma_signed};
pub use hypergeometric::{pfq, SeriesResult};
pub use quadrature::{quad_semi_infinite, quad_semi_infinite_rel};
