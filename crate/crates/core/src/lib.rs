//! Gaussian-state simulator for collision-model interferometric networks.
//!
//! A system mode, entangled with the first mode of a small memory block,
//! scatters stepwise through a growing chain of environment modes via
//! two-mode couplers. The crate tracks the covariance matrix and the
//! cumulative scattering matrix exactly, and evaluates bipartite and
//! tripartite mutual information between system, memory, and environment.

pub mod config;
pub mod engine;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod gaussian;
pub mod interferometer;
pub mod measures;
pub mod oracle;
pub mod presets;

pub use error::{Error, Result};
