//! Fixed-point solvers for the approximate bridge equations.
//!
//! All schemes share the discretized update
//!
//! ```text
//! r⁽ⁿ⁺¹⁾(k+1) = r⁽ⁿ⁾(k) + dt·(r_f − r⁽ⁿ⁾(k))/(t_f − k·dt) + dt·M[r⁽ⁿ⁾](k) + sqrt(2D·dt)·ξ(k)
//! ```
//!
//! with the memory drift `M` (see [`memory_drift`]) and a noise path `ξ`
//! frozen across iterations. Endpoints of every iterate are pinned.

mod config;
mod cumulant;
mod fixed_point;
mod memory;

pub use config::{InitKind, SchemeKind, SolveReport, SolverConfig, SweepKind};
pub use cumulant::{cumulant_drift, cumulant_trajectory};
pub use fixed_point::{
    fixed_point_residual, fixed_point_solve, instanton_residual, sample_ensemble, EnsembleMember,
    FixedPointSolver,
};
pub use memory::memory_drift;
