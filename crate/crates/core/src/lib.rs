//! Front tracking for a 3x3 genuinely nonlinear hyperbolic system whose
//! entropy solutions can sustain infinitely many shock generations, plus a
//! scalar conservation-law module with sharp one-sided regularity checks.
//!
//! Layout:
//! - [`system`]: flux, Jacobian, characteristic fields and domain
//!   certification for the 3x3 system.
//! - [`riemann`]: exact and simplified Riemann solvers built on straight
//!   extreme wave curves.
//! - [`tracking`]: the event-driven front-tracking engine with Glimm
//!   functional bookkeeping and front genealogy.
//! - [`scenario`]: construction of the shock-pattern initial data and its
//!   admissible/adversarial perturbations.
//! - [`pattern`]: detection and verification of the reflection cascade in
//!   a finished run.
//! - [`scalar`]: Lax–Oleĭnik evaluation and regularity estimates for
//!   scalar convex conservation laws.

pub mod error;
pub mod pattern;
pub mod riemann;
pub mod scalar;
pub mod scenario;
pub mod state;
pub mod system;
pub mod tracking;

pub use error::{Error, Result};
pub use pattern::{
    decay_fit, extract_reflections, full_census, functionals_v13_r13, identify_big_2shocks,
    verify_pattern, wave_census, BigShockPair, Census, DecayFit, GenerationInfo, PatternReport,
    Region, Trajectory, Verdict,
};
pub use riemann::{
    solve_riemann, wave_curve, Family, RiemannSolution, Wave, WaveKind, NONPHYSICAL_SPEED,
};
pub use scenario::{
    adversarial_rarefaction, build_compression_profile, build_piecewise_datum, derive_params,
    mollify, perturb, DatumSpec, PerturbKind, ScenarioParams,
};
pub use state::{Mat3, State, ZERO_STATE};
pub use system::{EigenData, SystemParams};
pub use tracking::{
    evolve, glimm_functional, initial_fronts, EventKind, EventRecord, FrontRecord, FtParams,
    FtSolution, StepFunction,
};
