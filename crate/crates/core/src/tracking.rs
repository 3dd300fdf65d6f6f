//! Event-driven wave-front tracking for the 3x3 system.

pub mod engine;
pub mod solution;
pub mod step;

pub use engine::{evolve, glimm_functional, initial_fronts, FtParams};
pub use solution::{EventKind, EventRecord, FrontRecord, FtSolution};
pub use step::StepFunction;
