//! Randomized invariants that cut across modules: Riemann solutions must
//! reconstruct and be admissible, the extreme wave curves must keep their
//! algebraic shape, evolution must conserve the jump at every event and
//! never increase the Glimm functional, and the exact scalar solver must
//! satisfy both one-sided regularity estimates.

use proptest::prelude::*;

use fronttrack_core::riemann::hugoniot_residual;
use fronttrack_core::scalar::{
    check_adl_lower, check_oleinik, lax_oleinik_solve, ConvexFlux, FluxForm, ProfileShape,
    ScalarProfile,
};
use fronttrack_core::system::lambda;
use fronttrack_core::tracking::{evolve, glimm_functional, FtParams, StepFunction};
use fronttrack_core::{
    solve_riemann, wave_curve, EventKind, State, SystemParams, WaveKind, ZERO_STATE,
};

// =============================================================================
// Strategies
// =============================================================================

fn eta() -> impl Strategy<Value = f64> {
    0.005f64..0.24
}

/// A state comfortably inside the unit-ball domain.
fn small_state() -> impl Strategy<Value = State> {
    (-0.3f64..0.3, -0.3f64..0.3, -0.3f64..0.3).prop_map(|(u, v, w)| State::new(u, v, w))
}

/// A jump small enough that all three waves of its Riemann solution are weak.
fn small_jump() -> impl Strategy<Value = State> {
    (-0.04f64..0.04, -0.04f64..0.04, -0.04f64..0.04).prop_map(|(u, v, w)| State::new(u, v, w))
}

fn curve_param() -> impl Strategy<Value = f64> {
    -0.1f64..0.1
}

/// Strictly increasing breakpoints in `(-1, 1)` with a minimum gap, plus one
/// more value than breakpoints — the raw material of a step function.
fn step_data(
    max_jumps: usize,
) -> impl Strategy<Value = (Vec<f64>, Vec<State>)> {
    (
        prop::collection::vec(-1.0f64..1.0, 1..=max_jumps),
        prop::collection::vec(small_jump(), max_jumps + 1),
    )
        .prop_map(|(mut breaks, values)| {
            breaks.sort_by(f64::total_cmp);
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let values = values[..breaks.len() + 1].to_vec();
            (breaks, values)
        })
}

// =============================================================================
// Riemann solver and wave-curve algebra
// =============================================================================

proptest! {
    /// Chaining the three wave curves with the solved parameters lands on
    /// the right state, and every shock in the solution is a genuine
    /// admissible discontinuity.
    #[test]
    fn prop_riemann_reconstructs_and_is_admissible(
        eta in eta(),
        ul in small_state(),
        d in small_jump(),
    ) {
        let p = SystemParams::new(eta).unwrap();
        let ur = ul + d;
        let sol = solve_riemann(ul, ur, p).unwrap();

        let [t1, t2, t3] = sol.signed_strengths();
        let mut u = wave_curve(1, ul, t1, p).unwrap();
        u = wave_curve(2, u, t2, p).unwrap();
        u = wave_curve(3, u, t3, p).unwrap();
        let gap = (u - ur).norm();
        prop_assert!(gap <= 1e-10 * (1.0 + ur.norm()), "reconstruction gap {gap:e}");

        for w in &sol.waves {
            if w.kind != WaveKind::Shock {
                continue;
            }
            let (sigma, resid) = hugoniot_residual(w.left, w.right, p);
            prop_assert!(resid <= 1e-9, "RH residual {resid:e}");
            let fam = w.family.index();
            prop_assert!(
                lambda(fam, w.left, p) >= sigma - 1e-9
                    && sigma >= lambda(fam, w.right, p) - 1e-9,
                "shock of family {fam} is not compressive"
            );
        }
    }

    /// Waves of a Riemann solution are ordered left to right by speed.
    #[test]
    fn prop_riemann_waves_are_speed_ordered(
        eta in eta(),
        ul in small_state(),
        d in small_jump(),
    ) {
        let p = SystemParams::new(eta).unwrap();
        let sol = solve_riemann(ul, ul + d, p).unwrap();
        for pair in sol.waves.windows(2) {
            prop_assert!(
                pair[0].speed_hi <= pair[1].speed_lo + 1e-9,
                "speeds {} and {} out of order",
                pair[0].speed_hi,
                pair[1].speed_lo
            );
        }
    }

    /// The extreme wave curves are straight lines in the plane of constant
    /// `v`, so they commute and compose additively.
    #[test]
    fn prop_extreme_curves_commute_and_add(
        eta in eta(),
        u in small_state(),
        s in curve_param(),
        t in curve_param(),
    ) {
        let p = SystemParams::new(eta).unwrap();
        let a = wave_curve(3, wave_curve(1, u, s, p).unwrap(), t, p).unwrap();
        let b = wave_curve(1, wave_curve(3, u, t, p).unwrap(), s, p).unwrap();
        prop_assert!((a - b).norm() <= 1e-12, "curves do not commute: gap {:e}", (a - b).norm());

        for fam in [1, 3] {
            let two_steps = wave_curve(fam, wave_curve(fam, u, s, p).unwrap(), t, p).unwrap();
            let one_step = wave_curve(fam, u, s + t, p).unwrap();
            prop_assert!(
                (two_steps - one_step).norm() <= 1e-12,
                "family {fam} curve is not additive"
            );
        }
    }

    /// Along its own curve each extreme eigenvalue grows at the exact rate
    /// `4·eta` per unit parameter, and the middle eigenvalue does not move
    /// at all (`v` is untouched).
    #[test]
    fn prop_eigenvalues_linear_along_extreme_curves(
        eta in eta(),
        u in small_state(),
        t in curve_param(),
    ) {
        let p = SystemParams::new(eta).unwrap();
        for fam in [1, 3] {
            let shifted = wave_curve(fam, u, t, p).unwrap();
            let got = lambda(fam, shifted, p) - lambda(fam, u, p);
            prop_assert!(
                (got - 4.0 * eta * t).abs() <= 1e-12,
                "family {fam}: eigenvalue moved by {got:e}, expected {:e}",
                4.0 * eta * t
            );
            prop_assert_eq!(lambda(2, shifted, p), lambda(2, u, p));
        }
    }
}

// =============================================================================
// Step functions
// =============================================================================

proptest! {
    /// `l1_distance` behaves like a metric on any window containing the
    /// jumps: zero on the diagonal, symmetric, triangle inequality.
    #[test]
    fn prop_l1_distance_is_a_metric(
        fd in step_data(4),
        gd in step_data(4),
        hd in step_data(4),
    ) {
        let f = StepFunction::new(fd.0, fd.1).unwrap();
        let g = StepFunction::new(gd.0, gd.1).unwrap();
        let h = StepFunction::new(hd.0, hd.1).unwrap();
        let (lo, hi) = (-2.0, 2.0);

        prop_assert_eq!(f.l1_distance(&f, lo, hi), 0.0);
        let fg = f.l1_distance(&g, lo, hi);
        let gf = g.l1_distance(&f, lo, hi);
        prop_assert!((fg - gf).abs() <= 1e-12 * (1.0 + fg), "asymmetric: {fg} vs {gf}");

        let fh = f.l1_distance(&h, lo, hi);
        let gh = g.l1_distance(&h, lo, hi);
        prop_assert!(fh <= fg + gh + 1e-12, "triangle fails: {fh} > {fg} + {gh}");
    }

    /// Total variation is the sum of the component variations' l1 norms and
    /// is invariant under pruning zero jumps.
    #[test]
    fn prop_total_variation_consistent(fd in step_data(5)) {
        let f = StepFunction::new(fd.0, fd.1).unwrap();
        let sum: f64 = (0..3).map(|k| f.total_variation_component(k)).sum();
        // component sum uses the l1 norm of each jump, total uses the l2
        // norm, so they bracket each other
        prop_assert!(f.total_variation() <= sum + 1e-12);
        prop_assert!(sum <= 3f64.sqrt() * f.total_variation() + 1e-12);
        let pruned = f.pruned(0.0);
        prop_assert!((pruned.total_variation() - f.total_variation()).abs() <= 1e-12);
    }
}

// =============================================================================
// Front-tracking evolution
// =============================================================================

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// On any small datum the run completes, every interaction conserves
    /// the total jump across the event, and the Glimm functional never
    /// increases.
    #[test]
    fn prop_evolution_conserves_jumps_and_glimm_decreases(
        eta in 0.02f64..0.24,
        data in step_data(4),
    ) {
        let p = SystemParams::new(eta).unwrap();
        let datum = StepFunction::new(data.0, data.1).unwrap();
        let ft = FtParams::new(0.02, 1.5);
        let sol = evolve(&datum, &ft, p).unwrap();
        prop_assert!(!sol.truncated);

        let mut prev = sol.initial_f;
        for ev in &sol.events {
            if ev.kind != EventKind::Exit {
                let sum = |ids: &[u32]| -> State {
                    ids.iter()
                        .map(|&id| sol.front(id))
                        .fold(ZERO_STATE, |acc, f| acc + (f.right - f.left))
                };
                let gap = (sum(&ev.incoming) - sum(&ev.outgoing)).norm();
                prop_assert!(gap <= 1e-8, "event at t={} leaks a jump of {gap:e}", ev.t);
            }
            prop_assert!(
                ev.f_total <= prev + 1e-9 * (1.0 + prev.abs()),
                "Glimm functional rose from {prev} to {} at t={}",
                ev.f_total,
                ev.t
            );
            prev = ev.f_total;
        }
    }

    /// Sampling the solution at the start time returns the datum.
    #[test]
    fn prop_sample_at_birth_matches_datum(data in step_data(4)) {
        let p = SystemParams::new(0.1).unwrap();
        let datum = StepFunction::new(data.0, data.1).unwrap();
        let sol = evolve(&datum, &FtParams::new(0.05, 0.5), p).unwrap();
        let gap = sol.sample(sol.t_begin).l1_distance(&datum, -3.0, 3.0);
        prop_assert!(gap <= 1e-9, "initial profile off by {gap:e} in L1");
    }
}

// =============================================================================
// Scalar regularity estimates
// =============================================================================

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Both one-sided estimates hold for the exact solution of any uniformly
    /// convex flux and bounded piecewise-constant datum.
    #[test]
    fn prop_scalar_one_sided_estimates(
        flux_pick in 0usize..4,
        raw_breaks in prop::collection::vec(-1.0f64..1.0, 2..6),
        raw_values in prop::collection::vec(-0.8f64..0.8, 7),
        t in 0.3f64..2.0,
        a in -2.0f64..-0.5,
        b in 0.5f64..2.0,
    ) {
        let flux = match flux_pick {
            0 => ConvexFlux::burgers(),
            1 => ConvexFlux::square(),
            2 => ConvexFlux::new(FluxForm::Cosh, 1.0).unwrap(),
            _ => ConvexFlux::new(FluxForm::Quartic, 1.0).unwrap(),
        };
        let mut breaks = raw_breaks;
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-6);
        let values = raw_values[..breaks.len() + 1].to_vec();
        let profile = ScalarProfile::new(
            ProfileShape::PiecewiseConstant { breaks, values },
            -2.0,
            2.0,
        )
        .unwrap();
        let xs: Vec<f64> = (0..=160).map(|i| -4.0 + 8.0 * i as f64 / 160.0).collect();
        let sample = lax_oleinik_solve(&flux, &profile, t, &xs).unwrap();

        let ol = check_oleinik(&sample, &flux, 1e-9);
        prop_assert!(ol.pass, "one-sided Lipschitz ratio {}", ol.max_ratio);

        let adl = check_adl_lower(&sample, &flux, a, b, 1e-9).unwrap();
        prop_assert!(adl.pass, "lower estimate fails: {} < {}", adl.lhs, adl.rhs);
    }
}

// =============================================================================
// Degenerate inputs
// =============================================================================

#[test]
fn riemann_of_zero_jump_has_no_waves() {
    let p = SystemParams::new(0.09).unwrap();
    let u = State::new(0.1, -0.2, 0.05);
    let sol = solve_riemann(u, u, p).unwrap();
    assert!(sol.waves.is_empty());
}

#[test]
fn wave_curves_fix_their_base_point_at_zero_parameter() {
    let p = SystemParams::new(0.09).unwrap();
    let u = State::new(0.1, -0.2, 0.05);
    for fam in 1..=3 {
        assert_eq!(wave_curve(fam, u, 0.0, p).unwrap(), u);
    }
}

#[test]
fn glimm_functional_of_empty_population_is_zero() {
    assert_eq!(glimm_functional(&[], 100.0), (0.0, 0.0, 0.0));
}
