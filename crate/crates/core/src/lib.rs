//! Recurrence coefficients of monic polynomials orthogonal with respect to
//! the Hermite weight with one jump discontinuity,
//! `w(x) = e^{-x²}(1 - β/2 + β θ(x - x̃))`.
//!
//! Two independent routes are provided: [`oracle`] orthogonalizes the exact
//! moments in extended precision, [`recurrence`] iterates the nonlinear
//! difference equations satisfied by α_n and r_n. [`evolution`] checks the
//! x̃-dependence (Toda equations, Painlevé IV, Hankel determinants, free
//! energy) by finite differences and [`asymptotics`] covers large n at x̃ = 0.

pub mod asymptotics;
mod error;
pub mod evolution;
pub mod fd;
pub mod moments;
pub mod oracle;
pub mod precision;
pub mod recurrence;
pub mod special;
pub mod table;
pub mod weight;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use moments::{incomplete_integrals, moments, MomentVector};
pub use precision::PrecisionConfig;
pub use table::{CoeffTable, Source};
pub use weight::{eval_weight, WeightSpec};

pub use rug::Float;
