//! Shared fixtures for the criterion benches: representative inputs sized
//! like the real workloads (see `benches/hot_paths.rs`).

use fronttrack_core::scalar::{ConvexFlux, ProfileShape, ScalarProfile};
use fronttrack_core::tracking::FtParams;
use fronttrack_core::{
    build_compression_profile, build_piecewise_datum, derive_params, ScenarioParams, State,
    StepFunction, SystemParams,
};

/// A generic weak Riemann problem: all three waves present, none snapped.
pub fn riemann_fixture() -> (State, State, SystemParams) {
    let p = SystemParams::new(0.09).unwrap();
    let left = State::new(0.11, -0.23, 0.05);
    let right = State::new(0.08, -0.17, 0.01);
    (left, right, p)
}

/// The unperturbed two-jump scenario at `eps = 0.3`, with the tracking
/// parameters every certification run uses.
pub fn pattern_fixture() -> (StepFunction, FtParams, SystemParams, ScenarioParams) {
    let sp = derive_params(0.3).unwrap();
    let datum = build_piecewise_datum(&sp).unwrap();
    let ft = sp.default_ft_params();
    (datum, ft, sp.system().unwrap(), sp)
}

/// The compressive ramp profile and a horizon past its six-shock merge.
pub fn compression_fixture() -> (StepFunction, FtParams, SystemParams) {
    let sp = derive_params(0.3).unwrap();
    let datum = build_compression_profile(&sp, sp.omega / 100.0).unwrap();
    let mut ft = sp.default_ft_params();
    ft.t_end = 1.6;
    ft.clip = 60.0;
    (datum, ft, sp.system().unwrap())
}

/// A four-jump scalar datum and grid sized like the cross-validation runs.
pub fn scalar_fixture() -> (ConvexFlux, ScalarProfile, Vec<f64>) {
    let profile = ScalarProfile::new(
        ProfileShape::PiecewiseConstant {
            breaks: vec![-0.8, -0.3, 0.1, 0.5],
            values: vec![0.0, 0.3, -0.2, 0.25, -0.1],
        },
        -2.0,
        2.0,
    )
    .unwrap();
    let xs: Vec<f64> = (0..=400).map(|i| -4.0 + 8.0 * i as f64 / 400.0).collect();
    (ConvexFlux::square(), profile, xs)
}
