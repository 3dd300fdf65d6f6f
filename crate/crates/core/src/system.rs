//! The Baiti–Jenssen 3x3 system.
//!
//! Flux for the conservation law `U_t + F(U)_x = 0`, `U = (u, v, w)`:
//!
//! ```text
//! F1 = 4[(v-1)u - w]          + 2η[uw - u²(v-1)]
//! F2 = v²
//! F3 = 4[v(v-2)u - (v-1)w]    +  η[w² - u²(v-2)v]
//! ```
//!
//! with coupling constant `η ∈ (0, 1/4)`. On the working domain `|U| < 1` the
//! system is strictly hyperbolic with well-separated characteristic speeds
//!
//! ```text
//! λ1 = 2η[w - (v-2)u] - 4  ∈ [-6, -5/2]
//! λ2 = 2v                  ∈ [-2, 2]
//! λ3 = 2η[w - vu] + 4      ∈ [3, 5]
//! ```
//!
//! and every field is genuinely nonlinear: `∇λ1·r1 = 4η`, `∇λ2·r2 = 2`,
//! `∇λ3·r3 = -4η` (constants, never crossing zero).
//!
//! Two structural facts the rest of the crate leans on, both of which follow
//! from the eigenvectors `r1 = (1,0,v)` and `r3 = (1,0,v-2)` having zero
//! second component and depending on the state only through `v`:
//!
//! * the integral curves of the extreme fields are straight lines, and they
//!   coincide with the Hugoniot loci (verified exactly in `riemann`);
//! * `∇λ3·r1 = ∇λ1·r3 = 0`, so crossing a wave of the opposite extreme
//!   family leaves a front's characteristic speed untouched.
//!
//! The middle field decouples: `v` alone solves the scalar law
//! `v_t + (v²)_x = 0`, which `scalar` exploits for cross-validation.

use crate::error::{Error, Result};
use crate::state::{Mat3, State};
use serde::{Deserialize, Serialize};

/// Coupling constant of the flux.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SystemParams {
    pub eta: f64,
}

impl SystemParams {
    /// `eta` must lie in the open interval (0, 1/4).
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 0.25) {
            return Err(Error::InvalidParam(format!(
                "eta must lie in (0, 1/4), got {eta}"
            )));
        }
        Ok(SystemParams { eta })
    }
}

/// Full spectral data of `DF(U)`: eigenvalues ascending, right eigenvectors
/// in matching order, and the (constant) genuine-nonlinearity products
/// `∇λ_i · r_i`.
#[derive(Clone, Copy, Debug)]
pub struct EigenData {
    pub lambda: [f64; 3],
    pub r: [State; 3],
    pub gn: [f64; 3],
}

/// Flux evaluation.
pub fn flux(u: State, p: SystemParams) -> State {
    let State { u: a, v, w } = u;
    let eta = p.eta;
    State::new(
        4.0 * ((v - 1.0) * a - w) + 2.0 * eta * (a * w - a * a * (v - 1.0)),
        v * v,
        4.0 * (v * (v - 2.0) * a - (v - 1.0) * w) + eta * (w * w - a * a * (v - 2.0) * v),
    )
}

/// Jacobian `DF(U)`, hand-differentiated (tested against central differences).
pub fn jacobian(u: State, p: SystemParams) -> Mat3 {
    let State { u: a, v, w } = u;
    let eta = p.eta;
    Mat3([
        [
            4.0 * (v - 1.0) + 2.0 * eta * (w - 2.0 * a * (v - 1.0)),
            4.0 * a - 2.0 * eta * a * a,
            -4.0 + 2.0 * eta * a,
        ],
        [0.0, 2.0 * v, 0.0],
        [
            4.0 * v * (v - 2.0) - 2.0 * eta * a * v * (v - 2.0),
            8.0 * (v - 1.0) * a - 4.0 * w - 2.0 * eta * a * a * (v - 1.0),
            -4.0 * (v - 1.0) + 2.0 * eta * w,
        ],
    ])
}

/// Eigenvalues only (cheaper than [`eigen`]; used in hot loops).
pub fn eigenvalues(u: State, p: SystemParams) -> [f64; 3] {
    let State { u: a, v, w } = u;
    let eta = p.eta;
    [
        2.0 * eta * (w - (v - 2.0) * a) - 4.0,
        2.0 * v,
        2.0 * eta * (w - v * a) + 4.0,
    ]
}

/// Characteristic speed of one family.
pub fn lambda(family: usize, u: State, p: SystemParams) -> f64 {
    eigenvalues(u, p)[family - 1]
}

/// Right eigenvector of one family (families 1 and 3 are closed-form; family 2
/// is normalised to second component 1).
pub fn eigenvector(family: usize, u: State, p: SystemParams) -> State {
    match family {
        1 => State::new(1.0, 0.0, u.v),
        3 => State::new(1.0, 0.0, u.v - 2.0),
        2 => r2(u, p),
        _ => panic!("family must be 1, 2 or 3, got {family}"),
    }
}

/// Middle-field eigenvector with second component 1, from the 2x2 linear
/// system formed by rows 1 and 3 of `(DF - λ2·I) r = 0` (row 2 vanishes
/// identically because `F2` depends on `v` alone).
fn r2(u: State, p: SystemParams) -> State {
    let j = jacobian(u, p).0;
    let l2 = 2.0 * u.v;
    // (J11-λ2)a + J13 c = -J12 ;  J31 a + (J33-λ2) c = -J32
    let (a, c) = crate::state::solve2x2(
        j[0][0] - l2,
        j[0][2],
        j[2][0],
        j[2][2] - l2,
        -j[0][1],
        -j[2][1],
    )
    .expect("family-2 eigensystem is nonsingular on |U| < 1");
    State::new(a, 1.0, c)
}

/// Complete spectral data at a state, residual-certified:
/// `|DF·r - λr| ≤ 1e-9·|r|` for every field, ordering `λ1 < λ2 < λ3` strict.
pub fn eigen(u: State, p: SystemParams) -> Result<EigenData> {
    let lam = eigenvalues(u, p);
    let r = [
        eigenvector(1, u, p),
        eigenvector(2, u, p),
        eigenvector(3, u, p),
    ];
    let jac = jacobian(u, p);
    for i in 0..3 {
        let resid = (jac.mul_state(r[i]) - r[i] * lam[i]).norm();
        if !(resid <= 1e-9 * r[i].norm()) {
            return Err(Error::CertificationFailure {
                u: u.u,
                v: u.v,
                w: u.w,
                reason: format!("eigen residual {resid:.3e} for family {}", i + 1),
            });
        }
    }
    if !(lam[0] < lam[1] && lam[1] < lam[2]) {
        return Err(Error::CertificationFailure {
            u: u.u,
            v: u.v,
            w: u.w,
            reason: format!("eigenvalues not strictly ordered: {lam:?}"),
        });
    }
    Ok(EigenData {
        lambda: lam,
        r,
        gn: [4.0 * p.eta, 2.0, -4.0 * p.eta],
    })
}

/// Sweep a uniform `res³` grid of the ball `|U| < 1` and certify, at every
/// grid state: eigenvalue ranges `λ1 ∈ [-6,-5/2]`, `λ2 ∈ [-2,2]`,
/// `λ3 ∈ [3,5]`; spectral gaps `λ2-λ1 ≥ 1/2` and `λ3-λ2 ≥ 1`; and the
/// genuine-nonlinearity constants `∇λ·r = (4η, 2, -4η)` (checked by central
/// differences of λ along r, tolerance 1e-6 relative).
pub fn certify_domain(p: SystemParams, res: usize) -> Result<()> {
    if res < 2 {
        return Err(Error::InvalidParam("grid resolution must be >= 2".into()));
    }
    let coord = |i: usize| -0.99 + 1.98 * (i as f64) / ((res - 1) as f64);
    for iu in 0..res {
        for iv in 0..res {
            for iw in 0..res {
                let u = State::new(coord(iu), coord(iv), coord(iw));
                if u.norm() >= 1.0 {
                    continue;
                }
                let data = eigen(u, p)?;
                let fail = |reason: String| Error::CertificationFailure {
                    u: u.u,
                    v: u.v,
                    w: u.w,
                    reason,
                };
                let [l1, l2, l3] = data.lambda;
                if !(-6.0 <= l1 && l1 <= -2.5) {
                    return Err(fail(format!("lambda1 = {l1} outside [-6,-5/2]")));
                }
                if !(-2.0 <= l2 && l2 <= 2.0) {
                    return Err(fail(format!("lambda2 = {l2} outside [-2,2]")));
                }
                if !(3.0 <= l3 && l3 <= 5.0) {
                    return Err(fail(format!("lambda3 = {l3} outside [3,5]")));
                }
                if !(l2 - l1 >= 0.5 && l3 - l2 >= 1.0) {
                    return Err(fail(format!("spectral gaps too small: {:?}", data.lambda)));
                }
                for fam in 0..3 {
                    let dir = data.r[fam];
                    let h = 1e-5 / dir.norm().max(1.0);
                    let lp = eigenvalues(u + dir * h, p)[fam];
                    let lm = eigenvalues(u + dir * (-h), p)[fam];
                    let measured = (lp - lm) / (2.0 * h);
                    let expected = data.gn[fam];
                    if (measured - expected).abs() > 1e-6 * expected.abs().max(1.0) {
                        return Err(fail(format!(
                            "genuine-nonlinearity mismatch family {}: {measured} vs {expected}",
                            fam + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::ZERO_STATE;
    use approx::assert_abs_diff_eq;

    fn sp(eta: f64) -> SystemParams {
        SystemParams::new(eta).unwrap()
    }

    #[test]
    fn flux_fixed_points() {
        let p = sp(0.1);
        assert_eq!(flux(ZERO_STATE, p).as_array(), [0.0, 0.0, 0.0]);
        // eta -> 0 limit is linear in the first slot: F((1,0,0)) = (-4, 0, 0).
        let p_small = SystemParams { eta: 0.0 };
        assert_eq!(
            flux(State::new(1.0, 0.0, 0.0), p_small).as_array(),
            [-4.0, 0.0, 0.0]
        );
        assert_eq!(
            flux(State::new(0.0, 1.0, 0.0), p).as_array(),
            [0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let p = sp(0.17);
        let states = [
            ZERO_STATE,
            State::new(0.21, -0.4, 0.35),
            State::new(-0.5, 0.3, -0.2),
            State::new(0.05, 0.9, 0.1),
        ];
        let h = 1e-5;
        for u in states {
            let j = jacobian(u, p).0;
            for col in 0..3 {
                let mut e = ZERO_STATE;
                match col {
                    0 => e.u = 1.0,
                    1 => e.v = 1.0,
                    _ => e.w = 1.0,
                }
                let fp = flux(u + e * h, p);
                let fm = flux(u + e * (-h), p);
                let fd = (fp - fm) * (1.0 / (2.0 * h));
                let fd = fd.as_array();
                for row in 0..3 {
                    let scale = j[row][col].abs().max(1.0);
                    assert!(
                        (j[row][col] - fd[row]).abs() <= 1e-6 * scale,
                        "J[{row}][{col}] analytic {} vs FD {} at {u:?}",
                        j[row][col],
                        fd[row]
                    );
                }
            }
        }
    }

    #[test]
    fn eigen_at_origin() {
        let p = sp(0.1);
        let e = eigen(ZERO_STATE, p).unwrap();
        assert_eq!(e.lambda, [-4.0, 0.0, 4.0]);
        assert_eq!(e.r[0].as_array(), [1.0, 0.0, 0.0]);
        assert_eq!(e.r[2].as_array(), [1.0, 0.0, -2.0]);
        // middle eigenvector at the origin is the v-axis
        assert_abs_diff_eq!(e.r[1].u, 0.0, epsilon = 1e-12);
        assert_eq!(e.r[1].v, 1.0);
        assert_abs_diff_eq!(e.r[1].w, 0.0, epsilon = 1e-12);
        assert_eq!(e.gn, [0.4, 2.0, -0.4]);
    }

    #[test]
    fn eigen_on_v_axis() {
        let p = sp(0.2);
        let e = eigen(State::new(0.0, 1.0, 0.0), p).unwrap();
        assert_eq!(e.lambda, [-4.0, 2.0, 4.0]);
    }

    #[test]
    fn middle_eigenvector_matches_eta_zero_reduction() {
        // At eta = 0 rows 1 and 3 of (DF - λ2 I) r = 0 reduce to
        // a = (4w - 2u(v-2))/(v² - 4), c = (v-2)a/2 + u.
        let p = SystemParams { eta: 1e-12 };
        let u = State::new(0.3, -0.2, 0.4);
        let r = eigenvector(2, u, p);
        let a = (4.0 * u.w - 2.0 * u.u * (u.v - 2.0)) / (u.v * u.v - 4.0);
        let c = (u.v - 2.0) * a / 2.0 + u.u;
        assert_abs_diff_eq!(r.u, a, epsilon = 1e-9);
        assert_abs_diff_eq!(r.w, c, epsilon = 1e-9);
    }

    #[test]
    fn extreme_families_blind_to_each_other() {
        // ∇λ3·r1 = ∇λ1·r3 = 0 identically: nudging along the opposite extreme
        // eigenvector leaves the eigenvalue bitwise-stable to first order.
        let p = sp(0.22);
        let u = State::new(0.4, -0.3, 0.25);
        let h = 1e-6;
        let l3p = eigenvalues(u + eigenvector(1, u, p) * h, p)[2];
        let l3m = eigenvalues(u + eigenvector(1, u, p) * (-h), p)[2];
        assert!((l3p - l3m).abs() / (2.0 * h) < 1e-9);
        let l1p = eigenvalues(u + eigenvector(3, u, p) * h, p)[0];
        let l1m = eigenvalues(u + eigenvector(3, u, p) * (-h), p)[0];
        assert!((l1p - l1m).abs() / (2.0 * h) < 1e-9);
    }

    #[test]
    fn certify_small_grid_both_eta_extremes() {
        certify_domain(sp(0.01), 8).unwrap();
        certify_domain(sp(0.24), 8).unwrap();
    }

    #[test]
    fn params_reject_out_of_range_eta() {
        assert!(SystemParams::new(0.0).is_err());
        assert!(SystemParams::new(0.25).is_err());
        assert!(SystemParams::new(-0.1).is_err());
        assert!(SystemParams::new(f64::NAN).is_err());
    }
}
