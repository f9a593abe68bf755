//! Experiment pipelines behind the command-line tool.

mod commands;
mod config;
pub mod svg;

pub use commands::{
    cmd_free_bridge, cmd_instanton, cmd_mueller, cmd_quartic_compare, max_distance, run, saddle_proximity, RunOutcome,
    RunStatus, CONTOUR_GRID, CONTOUR_LEVELS, MUELLER_BOX,
};
pub use config::{Endpoint, Experiment, InitChoice, ProblemSection, RunConfig, SolverSection, Surface, SurfaceKind};
