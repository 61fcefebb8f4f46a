//! Hermite moment tests for Gaussianity and their finite-sample behaviour.
//!
//! * [`hermite`]: exact Hermite algebra over the rationals and a stable
//!   normalized evaluator.
//! * [`bounds`]: the explicit upper/lower rates, the `N_d` floor, the exact
//!   small-`d` constants and the Stirling certificates behind the lower rate.
//! * [`statistics`]: the Hermite, raw-moment, Shenton–Bowman and higher-moment
//!   test statistics, their transformation matrices and reference laws.
//! * [`montecarlo`]: reproducible random streams, Kolmogorov distance
//!   estimation and the distance-versus-order experiment.
//! * [`fitting`]: the power-exponential fit `a·d^b·e^{cd}`.

pub mod bounds;
pub mod error;
pub mod fitting;
pub mod hermite;
pub mod montecarlo;
pub mod precision;
pub mod statistics;

pub use error::{Error, Result};
pub use precision::DoubleDouble;
