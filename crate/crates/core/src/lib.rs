//! Langevin trajectories conditioned to join two configurations in a fixed time.
//!
//! The bridge drift is approximated by a memory integral of the effective
//! potential `V = |∇U|²/4 − (T/2)∇²U` along the path and solved by fixed-point
//! iteration with frozen noise. In one dimension an exact reference drift is
//! available from the spectral decomposition of `H = −D∂² + Dβ²V`.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod potentials;
pub mod quadrature;
pub mod solvers;
pub mod spectral;
pub mod trajectory;

pub use error::{BridgeError, Result};
