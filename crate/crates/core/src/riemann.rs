//! Exact and simplified Riemann solvers for the Baiti–Jenssen system.
//!
//! The extreme wave curves are exceptionally clean: because `r1 = (1,0,v)`
//! and `r3 = (1,0,v-2)` have zero second component and depend on the state
//! only through `v`, they are constant along their own integral curves. The
//! integral curves are therefore straight lines, and a direct
//! Rankine–Hugoniot computation shows the shock curves coincide with them
//! *exactly* — no cubic correction. Both families use the single signed
//! parametrization
//!
//! ```text
//! Φ1(t)(U) = U + t·(1, 0, v)        λ1(Φ1(t)U) = λ1(U) + 4ηt
//! Φ3(t)(U) = U - t·(1, 0, v-2)      λ3(Φ3(t)U) = λ3(U) + 4ηt
//! ```
//!
//! with `t > 0` the rarefaction side and `t < 0` the shock side (Lax
//! admissibility is automatic since the characteristic speed is affine in
//! `t`), and shock speed the arithmetic mean of the side speeds. A further
//! consequence verified in the tests: 1- and 3-curves commute exactly, so
//! 1–3 interactions transmit both waves with unchanged strengths.
//!
//! The middle family rides the decoupled scalar law `v_t + (v²)_x = 0`; its
//! parameter is pinned to `t = v_R - v_L`. Shocks solve the remaining two
//! Rankine–Hugoniot components in `(u, w)` by damped Newton with the speed
//! `σ = v_L + v_R` known exactly from the scalar slot; rarefactions
//! integrate the `r2` field with a fourth-order march in `v`.

use crate::error::{Error, Result};
use crate::state::{solve2x2, State};
use crate::system::{self, SystemParams};
use serde::{Deserialize, Serialize};

/// Wave family labels. `NonPhysical` tags the residual jump travelling at
/// [`NONPHYSICAL_SPEED`] that the simplified solver emits instead of
/// resolving an interaction exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
    Three,
    NonPhysical,
}

impl Family {
    /// Physical family index 1..=3; panics on `NonPhysical`.
    pub fn index(self) -> usize {
        match self {
            Family::One => 1,
            Family::Two => 2,
            Family::Three => 3,
            Family::NonPhysical => panic!("non-physical fronts carry no family index"),
        }
    }

    pub fn from_index(i: usize) -> Family {
        match i {
            1 => Family::One,
            2 => Family::Two,
            3 => Family::Three,
            _ => panic!("family index must be 1..=3, got {i}"),
        }
    }

    /// Ordering rank used to decide whether two neighbouring fronts
    /// approach: a front of higher rank on the left always catches one of
    /// lower rank (speed ranges are disjoint and ordered). Non-physical
    /// fronts outrun everything, hence the top rank.
    pub fn rank(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
            Family::Three => 3,
            Family::NonPhysical => 4,
        }
    }

    pub fn is_physical(self) -> bool {
        self != Family::NonPhysical
    }
}

/// Speed assigned to non-physical fronts: strictly above every
/// characteristic speed on the working domain (all of which lie in
/// `[-6, 5]`), so they escape to the right without being caught.
pub const NONPHYSICAL_SPEED: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    NonPhysical,
}

/// One wave of a Riemann solution.
///
/// `strength` is non-negative: the wave-curve parameter modulus for
/// families 1 and 3, `|v⁺ - v⁻|` for family 2, and the jump norm for
/// non-physical waves. `speed_lo = speed_hi` for shocks (the RH speed);
/// for a rarefaction they are the fan edge speeds `λ(left) ≤ λ(right)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Wave {
    pub family: Family,
    pub kind: WaveKind,
    pub strength: f64,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl Wave {
    /// Signed wave-curve parameter: negative for shocks, positive for
    /// rarefactions, zero for non-physical jumps.
    pub fn signed_param(&self) -> f64 {
        match self.kind {
            WaveKind::Shock => -self.strength,
            WaveKind::Rarefaction => self.strength,
            WaveKind::NonPhysical => 0.0,
        }
    }
}

/// Ordered waves (left to right) joining `left` to `right`.
#[derive(Clone, Debug)]
pub struct RiemannSolution {
    pub left: State,
    pub right: State,
    pub waves: Vec<Wave>,
}

impl RiemannSolution {
    /// Signed wave-curve parameters `(t1, t2, t3)`, zero for absent waves.
    pub fn signed_strengths(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for w in &self.waves {
            if w.family.is_physical() {
                s[w.family.index() - 1] = w.signed_param();
            }
        }
        s
    }
}

/// State reached from `u` along the family-`fam` wave curve with signed
/// parameter `t` (`t > 0` rarefaction side, `t < 0` shock side). Families 1
/// and 3 are exact straight lines; family 2 dispatches to the dedicated
/// shock/rarefaction routines.
pub fn wave_curve(fam: usize, u: State, t: f64, p: SystemParams) -> Result<State> {
    match fam {
        1 => Ok(u + State::new(1.0, 0.0, u.v) * t),
        3 => Ok(u + State::new(1.0, 0.0, u.v - 2.0) * (-t)),
        2 => {
            if t == 0.0 {
                Ok(u)
            } else if t < 0.0 {
                Ok(middle_shock_state(u, t, p)?.0)
            } else {
                middle_rarefaction_state(u, t, p)
            }
        }
        _ => Err(Error::InvalidParam(format!("wave family {fam}"))),
    }
}

/// Right state of the Lax-admissible family-`i` shock of strength `s ≥ 0`
/// with left state `um`. The branch orientations are fixed once by the
/// genuine-nonlinearity signs (`∇λ1·r1 = 4η > 0` puts admissible 1-shocks
/// at `-s·r1`; `∇λ3·r3 = -4η < 0` puts 3-shocks at `+s·r3`; family-2 shocks
/// drop `v` by `s`).
pub fn shock_state(i: usize, s: f64, um: State, p: SystemParams) -> Result<State> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParam(format!("shock strength {s} < 0")));
    }
    wave_curve(i, um, -s, p)
}

/// Right state of the family-`i` rarefaction of strength `s ≥ 0` with left
/// state `um`, oriented so `λ_i` increases left to right.
pub fn rarefaction_state(i: usize, s: f64, um: State, p: SystemParams) -> Result<State> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParam(format!("rarefaction strength {s} < 0")));
    }
    let out = wave_curve(i, um, s, p)?;
    if out.norm() >= 1.0 {
        return Err(Error::DomainExit { norm: out.norm() });
    }
    Ok(out)
}

/// Rankine–Hugoniot residual `|F(R) - F(L) - σ(R - L)|` minimised over σ
/// (closed-form least squares); returns `(best σ, residual)`. This is the
/// verification oracle behind every shock claim in the crate.
pub fn hugoniot_residual(l: State, r: State, p: SystemParams) -> (f64, f64) {
    let df = system::flux(r, p) - system::flux(l, p);
    let du = r - l;
    let denom = du.dot(du);
    if denom == 0.0 {
        return (0.0, df.norm());
    }
    let sigma = df.dot(du) / denom;
    (sigma, (df - du * sigma).norm())
}

/// Exact shock speed of a family-`fam` shock joining `l` to `r`: the
/// arithmetic mean of the side characteristic speeds (exact for this flux
/// in all three families; for family 2 it reduces to `v_L + v_R`).
pub fn shock_speed(fam: usize, l: State, r: State, p: SystemParams) -> f64 {
    0.5 * (system::lambda(fam, l, p) + system::lambda(fam, r, p))
}

/// Family-2 shock with signed parameter `t = v_R - v_L < 0`. The `v` slot
/// and the speed `σ = v_L + v_R` come from the decoupled scalar law; the
/// `(u, w)` slots solve the first and third Rankine–Hugoniot components by
/// damped Newton with the analytic Jacobian, driven below 1e-12. Returns
/// the right state and σ.
pub fn middle_shock_state(l: State, t: f64, p: SystemParams) -> Result<(State, f64)> {
    debug_assert!(t < 0.0);
    let vr = l.v + t;
    let sigma = l.v + vr;
    let fl = system::flux(l, p);
    let resid = |ur: f64, wr: f64| -> (f64, f64) {
        let r = State::new(ur, vr, wr);
        let fr = system::flux(r, p);
        (
            fr.u - fl.u - sigma * (ur - l.u),
            fr.w - fl.w - sigma * (wr - l.w),
        )
    };
    let mut ur = l.u;
    let mut wr = l.w;
    let (mut g1, mut g2) = resid(ur, wr);
    let mut best = (g1 * g1 + g2 * g2).sqrt();
    for _ in 0..60 {
        if best <= 1e-12 {
            return Ok((State::new(ur, vr, wr), sigma));
        }
        // first and third rows of DF(r) - σI restricted to the (u,w) columns
        let j = system::jacobian(State::new(ur, vr, wr), p).0;
        let (mut du, mut dw) = solve2x2(
            j[0][0] - sigma,
            j[0][2],
            j[2][0],
            j[2][2] - sigma,
            -g1,
            -g2,
        )
        .ok_or_else(|| Error::NewtonDiverged {
            context: "middle-family shock: singular Newton matrix".into(),
            residual: best,
            iters: 0,
        })?;
        for _ in 0..30 {
            let (t1, t2) = resid(ur + du, wr + dw);
            let trial = (t1 * t1 + t2 * t2).sqrt();
            if trial < best {
                ur += du;
                wr += dw;
                g1 = t1;
                g2 = t2;
                best = trial;
                break;
            }
            du *= 0.5;
            dw *= 0.5;
        }
    }
    if best <= 1e-10 {
        return Ok((State::new(ur, vr, wr), sigma));
    }
    Err(Error::NewtonDiverged {
        context: format!("middle-family shock from {l:?} with t={t}"),
        residual: best,
        iters: 60,
    })
}

/// Family-2 rarefaction with parameter `t > 0`: integrate `U' = r2(U)` from
/// `l` by classical RK4 (the normalisation keeps `dv = ds`), then snap `v`
/// to the exact endpoint `v_L + t`.
pub fn middle_rarefaction_state(l: State, t: f64, p: SystemParams) -> Result<State> {
    debug_assert!(t > 0.0);
    let n = ((t / 1e-3).ceil() as usize).clamp(4, 4096);
    let h = t / n as f64;
    let mut u = l;
    let f = |s: State| system::eigenvector(2, s, p);
    for _ in 0..n {
        let k1 = f(u);
        let k2 = f(u + k1 * (h / 2.0));
        let k3 = f(u + k2 * (h / 2.0));
        let k4 = f(u + k3 * h);
        u = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    u.v = l.v + t; // exact by construction; removes accumulated roundoff
    if !u.is_finite() {
        return Err(Error::NewtonDiverged {
            context: format!("middle-family rarefaction from {l:?} with t={t}"),
            residual: f64::INFINITY,
            iters: n,
        });
    }
    Ok(u)
}

fn make_wave(fam: usize, t: f64, l: State, r: State, p: SystemParams) -> Wave {
    let family = Family::from_index(fam);
    if t < 0.0 {
        let sigma = shock_speed(fam, l, r, p);
        Wave {
            family,
            kind: WaveKind::Shock,
            strength: -t,
            left: l,
            right: r,
            speed_lo: sigma,
            speed_hi: sigma,
        }
    } else {
        Wave {
            family,
            kind: WaveKind::Rarefaction,
            strength: t,
            left: l,
            right: r,
            speed_lo: system::lambda(fam, l, p),
            speed_hi: system::lambda(fam, r, p),
        }
    }
}

/// Exact Riemann solver: finds signed parameters `(t1, t2, t3)` with
/// `Φ3(t3)Φ2(t2)Φ1(t1)(left) = right` to residual `1e-10`. `t2 = v_R - v_L`
/// is known a priori; the 2x2 system in `(t1, t3)` is solved by damped
/// Newton with a finite-difference Jacobian, seeded from the eigenbasis
/// decomposition of the jump. An extreme parameter is snapped to exactly
/// zero when that does not degrade the residual (tells truly absent waves
/// apart from weak ones).
pub fn solve_riemann(left: State, right: State, p: SystemParams) -> Result<RiemannSolution> {
    let jump = right - left;
    if jump.norm() == 0.0 {
        return Ok(RiemannSolution {
            left,
            right,
            waves: Vec::new(),
        });
    }
    let t2 = right.v - left.v;

    let mid = left + jump * 0.5;
    let e = system::eigen(mid, p)?;
    let (t1_0, t3_0) = decompose_extremes(jump, e.r[0], e.r[1], e.r[2]);

    let apply = |t1: f64, t3: f64| -> Result<State> {
        let a = wave_curve(1, left, t1, p)?;
        let b = wave_curve(2, a, t2, p)?;
        wave_curve(3, b, t3, p)
    };

    let mut t1 = t1_0;
    let mut t3 = t3_0;
    let mut res = apply(t1, t3)? - right;
    let mut best = res.norm();
    let tol = 1e-10 * (1.0 + right.norm());
    // polish well past the acceptance tolerance so the zero-snap below can
    // tell genuinely absent waves from weak ones
    let target = 1e-15 * (1.0 + right.norm());
    for iter in 0..80 {
        if best <= target {
            break;
        }
        let h1 = 1e-7 * (1.0 + t1.abs());
        let h3 = 1e-7 * (1.0 + t3.abs());
        let d1 = (apply(t1 + h1, t3)? - apply(t1 - h1, t3)?) * (1.0 / (2.0 * h1));
        let d3 = (apply(t1, t3 + h3)? - apply(t1, t3 - h3)?) * (1.0 / (2.0 * h3));
        // least-squares Newton step on the 3x2 system via normal equations
        let a11 = d1.dot(d1);
        let a13 = d1.dot(d3);
        let a33 = d3.dot(d3);
        let b1 = -d1.dot(res);
        let b3 = -d3.dot(res);
        let (mut s1, mut s3) =
            solve2x2(a11, a13, a13, a33, b1, b3).ok_or_else(|| Error::NewtonDiverged {
                context: "riemann: singular normal equations".into(),
                residual: best,
                iters: iter,
            })?;
        let mut improved = false;
        for _ in 0..40 {
            let trial = apply(t1 + s1, t3 + s3)? - right;
            if trial.norm() < best {
                t1 += s1;
                t3 += s3;
                res = trial;
                best = res.norm();
                improved = true;
                break;
            }
            s1 *= 0.5;
            s3 *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if best > tol {
        return Err(Error::NewtonDiverged {
            context: format!("riemann solve {left:?} -> {right:?}"),
            residual: best,
            iters: 80,
        });
    }

    let snap_tol = best.max(1e-14 * (1.0 + right.norm()));
    if t1 != 0.0 && t1.abs() < 1e-6 {
        let trial = (apply(0.0, t3)? - right).norm();
        if trial <= snap_tol {
            t1 = 0.0;
            best = trial;
        }
    }
    if t3 != 0.0 && t3.abs() < 1e-6 {
        let trial = (apply(t1, 0.0)? - right).norm();
        if trial <= snap_tol.max(best) {
            t3 = 0.0;
        }
    }

    let m1 = wave_curve(1, left, t1, p)?;
    let m2 = wave_curve(2, m1, t2, p)?;
    let mut waves = Vec::with_capacity(3);
    if t1 != 0.0 {
        waves.push(make_wave(1, t1, left, m1, p));
    }
    if t2 != 0.0 {
        waves.push(make_wave(2, t2, m1, m2, p));
    }
    if t3 != 0.0 {
        waves.push(make_wave(3, t3, m2, right, p));
    }
    // absorb the Newton residual into the final jump so the wave chain
    // reproduces `right` exactly
    if let Some(last) = waves.last_mut() {
        last.right = right;
    }
    validate_waves(&waves, p)?;
    Ok(RiemannSolution { left, right, waves })
}

fn decompose_extremes(jump: State, r1: State, r2: State, r3: State) -> (f64, f64) {
    let m = crate::state::Mat3([
        [r1.u, r2.u, r3.u],
        [r1.v, r2.v, r3.v],
        [r1.w, r2.w, r3.w],
    ]);
    match m.solve(jump) {
        Some(c) => (c.u, -c.w), // Φ3 moves along -r3
        None => (jump.u, -jump.w),
    }
}

/// Lax admissibility of every shock plus strict speed ordering across the
/// wave list, with `1e-9` slack.
fn validate_waves(waves: &[Wave], p: SystemParams) -> Result<()> {
    for w in waves {
        if w.kind != WaveKind::Shock {
            continue;
        }
        let fam = w.family.index();
        let ll = system::lambda(fam, w.left, p);
        let lr = system::lambda(fam, w.right, p);
        let slack = 1e-9 * (1.0 + w.speed_lo.abs());
        if !(lr <= w.speed_lo + slack && w.speed_lo <= ll + slack) {
            return Err(Error::Invariant(format!(
                "Lax inequality violated for family {fam}: λR={lr} σ={} λL={ll}",
                w.speed_lo
            )));
        }
    }
    for pair in waves.windows(2) {
        if !(pair[0].speed_hi < pair[1].speed_lo + 1e-9) {
            return Err(Error::Invariant(format!(
                "wave speeds out of order: {} !< {}",
                pair[0].speed_hi, pair[1].speed_lo
            )));
        }
    }
    Ok(())
}

/// Simplified (interaction-potential-controlled) Riemann solver used for
/// small interaction products: per physical family, apply the summed
/// incoming signed parameter from the left state in family order, then
/// close the gap to `right` with a single non-physical front at
/// [`NONPHYSICAL_SPEED`]. Outgoing physical parameters equal the incoming
/// sums exactly; everything unresolved lands in the non-physical jump.
pub fn solve_riemann_simplified(
    left: State,
    right: State,
    strengths: [f64; 3],
    p: SystemParams,
) -> Result<RiemannSolution> {
    let mut waves = Vec::with_capacity(4);
    let mut cur = left;
    for fam in 1..=3usize {
        let t = strengths[fam - 1];
        if t == 0.0 {
            continue;
        }
        let next = wave_curve(fam, cur, t, p)?;
        waves.push(make_wave(fam, t, cur, next, p));
        cur = next;
    }
    let gap = right - cur;
    if gap.norm() > 0.0 {
        waves.push(Wave {
            family: Family::NonPhysical,
            kind: WaveKind::NonPhysical,
            strength: gap.norm(),
            left: cur,
            right,
            speed_lo: NONPHYSICAL_SPEED,
            speed_hi: NONPHYSICAL_SPEED,
        });
    }
    Ok(RiemannSolution { left, right, waves })
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
    fn zero_strength_waves_are_identities() {
        let p = sp(0.1);
        let u = State::new(0.2, -0.1, 0.3);
        for i in 1..=3 {
            assert_eq!(shock_state(i, 0.0, u, p).unwrap().as_array(), u.as_array());
            assert_eq!(
                rarefaction_state(i, 0.0, u, p).unwrap().as_array(),
                u.as_array()
            );
        }
    }

    #[test]
    fn middle_shock_anchor() {
        // From (0, 0.1, 0) with strength 0.05: v drops to 0.05, σ = 0.15.
        let p = sp(0.1);
        let l = State::new(0.0, 0.1, 0.0);
        let r = shock_state(2, 0.05, l, p).unwrap();
        assert_abs_diff_eq!(r.v, 0.05, epsilon = 1e-14);
        let (s_best, resid) = hugoniot_residual(l, r, p);
        assert!(resid <= 1e-10, "RH residual {resid}");
        assert_abs_diff_eq!(s_best, 0.15, epsilon = 1e-9);
        assert_abs_diff_eq!(shock_speed(2, l, r, p), 0.15, epsilon = 1e-14);
    }

    #[test]
    fn extreme_rarefaction_anchor() {
        // family 1 from (0, 0.5, 0), strength 0.1: straight line along
        // +r1 = (1, 0, 0.5) since ∇λ1·r1 > 0
        let p = sp(0.1);
        let r = rarefaction_state(1, 0.1, State::new(0.0, 0.5, 0.0), p).unwrap();
        assert_eq!(r.as_array(), [0.1, 0.5, 0.05]);
    }

    #[test]
    fn middle_rarefaction_anchor() {
        let p = sp(0.1);
        let l = ZERO_STATE;
        let r = rarefaction_state(2, 0.1, l, p).unwrap();
        assert_eq!(r.v, 0.1);
        assert_eq!(system::lambda(2, l, p), 0.0);
        assert_abs_diff_eq!(system::lambda(2, r, p), 0.2, epsilon = 1e-12);
        // oracle: fixed-step fine integration agrees with the adaptive march
        let fine = {
            let mut u = l;
            let n = 1000;
            let h = 0.1 / n as f64;
            for _ in 0..n {
                let f = |s: State| system::eigenvector(2, s, p);
                let k1 = f(u);
                let k2 = f(u + k1 * (h / 2.0));
                let k3 = f(u + k2 * (h / 2.0));
                let k4 = f(u + k3 * h);
                u = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            }
            u
        };
        assert!((r - fine).norm() <= 1e-10);
    }

    #[test]
    fn extreme_shocks_satisfy_rankine_hugoniot_exactly() {
        let p = sp(0.09);
        let states = [
            ZERO_STATE,
            State::new(0.3, -0.4, 0.2),
            State::new(-0.2, 0.6, -0.3),
        ];
        for l in states {
            for s in [0.5, 0.11, 1e-3] {
                for fam in [1usize, 3] {
                    let r = shock_state(fam, s, l, p).unwrap();
                    let sigma = shock_speed(fam, l, r, p);
                    let resid = (system::flux(r, p) - system::flux(l, p) - (r - l) * sigma).norm();
                    assert!(
                        resid <= 1e-13,
                        "family {fam} RH residual {resid:.3e} at s={s}"
                    );
                    // Lax admissible
                    let ll = system::lambda(fam, l, p);
                    let lr = system::lambda(fam, r, p);
                    assert!(lr <= sigma && sigma <= ll);
                }
            }
        }
    }

    #[test]
    fn extreme_lambda_affine_along_curve() {
        // both signed parametrizations gain characteristic speed at rate
        // 4ηt (family 3 moves along -r3, flipping ∇λ3·r3 = -4η)
        let p = sp(0.21);
        let l = State::new(0.1, -0.2, 0.3);
        for t in [-0.4, 0.25] {
            for fam in [1usize, 3] {
                let r = wave_curve(fam, l, t, p).unwrap();
                assert_abs_diff_eq!(
                    system::lambda(fam, r, p),
                    system::lambda(fam, l, p) + 4.0 * p.eta * t,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn extreme_curves_commute_exactly() {
        let p = sp(0.18);
        let u = State::new(0.05, 0.4, -0.1);
        for (s, t) in [(-0.3, -0.2), (0.12, -0.4), (-0.07, 0.3)] {
            let a = wave_curve(3, wave_curve(1, u, s, p).unwrap(), t, p).unwrap();
            let b = wave_curve(1, wave_curve(3, u, t, p).unwrap(), s, p).unwrap();
            // exact commutation up to float associativity in the w slot
            assert_abs_diff_eq!(a.u, b.u, epsilon = 1e-15);
            assert_eq!(a.v, b.v);
            assert_abs_diff_eq!(a.w, b.w, epsilon = 1e-15);
        }
    }

    #[test]
    fn riemann_trivial_and_single_family_roundtrips() {
        let p = sp(0.09);
        let l = State::new(0.02, 0.1, -0.05);
        assert!(solve_riemann(l, l, p).unwrap().waves.is_empty());
        for fam in 1..=3usize {
            for t in [-0.2, 0.15] {
                let r = wave_curve(fam, l, t, p).unwrap();
                let sol = solve_riemann(l, r, p).unwrap();
                assert_eq!(sol.waves.len(), 1, "family {fam}, t={t}");
                let w = &sol.waves[0];
                assert_eq!(w.family.index(), fam);
                assert_abs_diff_eq!(w.signed_param(), t, epsilon = 1e-9);
                assert_eq!(
                    w.kind,
                    if t < 0.0 {
                        WaveKind::Shock
                    } else {
                        WaveKind::Rarefaction
                    }
                );
                // chain reproduces the right state exactly
                assert_eq!(sol.waves.last().unwrap().right.as_array(), r.as_array());
            }
        }
    }

    #[test]
    fn riemann_three_equal_shocks_between_pattern_plateaus() {
        // the two flat states of the big initial datum are joined by three
        // shocks of identical strength ω, families ordered 1, 2, 3
        let p = sp(0.09);
        let omega = 0.027;
        let eps = 0.3;
        let u_i = State::new(eps, omega, -eps);
        let u_ii = shock_state(
            3,
            omega,
            shock_state(2, omega, shock_state(1, omega, u_i, p).unwrap(), p).unwrap(),
            p,
        )
        .unwrap();
        let sol = solve_riemann(u_i, u_ii, p).unwrap();
        assert_eq!(sol.waves.len(), 3);
        for (k, w) in sol.waves.iter().enumerate() {
            assert_eq!(w.family.index(), k + 1);
            assert_eq!(w.kind, WaveKind::Shock);
            assert_abs_diff_eq!(w.strength, omega, epsilon = 1e-9);
            let (_, resid) = hugoniot_residual(w.left, w.right, p);
            assert!(resid <= 1e-9);
        }
        // middle speed is exactly v_L + v_R
        assert_abs_diff_eq!(
            sol.waves[1].speed_lo,
            sol.waves[1].left.v + sol.waves[1].right.v,
            epsilon = 1e-12
        );
        // speeds strictly increase across the solution
        assert!(sol.waves[0].speed_hi < sol.waves[1].speed_lo);
        assert!(sol.waves[1].speed_hi < sol.waves[2].speed_lo);
    }

    #[test]
    fn riemann_weak_jump_strengths_linearise() {
        let p = sp(0.2);
        let l = State::new(0.1, -0.3, 0.2);
        let delta = 1e-4;
        let e = system::eigen(l, p).unwrap();
        let jump = (e.r[0] * 0.4 + e.r[1] * (-0.7) + e.r[2] * 0.2) * delta;
        let sol = solve_riemann(l, l + jump, p).unwrap();
        let s = sol.signed_strengths();
        assert!((s[0] - 0.4 * delta).abs() <= 10.0 * delta * delta);
        assert!((s[1] + 0.7 * delta).abs() <= 10.0 * delta * delta);
        assert!((s[2] + 0.2 * delta).abs() <= 10.0 * delta * delta);
    }

    #[test]
    fn riemann_pure_middle_rarefaction_roundtrip() {
        let p = sp(0.12);
        let l = State::new(0.05, -0.2, 0.1);
        let r = rarefaction_state(2, 0.1, l, p).unwrap();
        let sol = solve_riemann(l, r, p).unwrap();
        assert_eq!(sol.waves.len(), 1);
        assert_eq!(sol.waves[0].family, Family::Two);
        assert_eq!(sol.waves[0].kind, WaveKind::Rarefaction);
        assert_abs_diff_eq!(sol.waves[0].strength, 0.1, epsilon = 1e-10);
    }

    #[test]
    fn simplified_solver_closes_with_nonphysical_front() {
        let p = sp(0.09);
        let l = State::new(0.01, 0.02, -0.03);
        let r = State::new(0.013, 0.021, -0.028);
        let sol = solve_riemann_simplified(l, r, [2e-3, -1e-3, 0.0], p).unwrap();
        let last = sol.waves.last().unwrap();
        assert_eq!(last.family, Family::NonPhysical);
        assert_eq!(last.speed_lo, NONPHYSICAL_SPEED);
        assert_eq!(last.right.as_array(), r.as_array());
        let s = sol.signed_strengths();
        assert_eq!(s[0], 2e-3);
        assert_eq!(s[1], -1e-3);
    }

    #[test]
    fn simplified_one_three_transmission_residual_tiny() {
        // a 1-front crossing a 3-front: outgoing strengths identical,
        // non-physical residual at roundoff (the curves commute exactly)
        let p = sp(0.09);
        let ul = State::new(0.1, 0.05, -0.08);
        let s3 = -0.012; // 3-shock on the left (faster, catches up)
        let s1 = -0.02;
        let mid = wave_curve(3, ul, s3, p).unwrap();
        let ur = wave_curve(1, mid, s1, p).unwrap();
        let sol = solve_riemann_simplified(ul, ur, [s1, 0.0, s3], p).unwrap();
        let np: f64 = sol
            .waves
            .iter()
            .filter(|w| w.family == Family::NonPhysical)
            .map(|w| w.strength)
            .sum();
        assert!(np <= 1e-10, "non-physical residual {np:.3e}");
        let s = sol.signed_strengths();
        assert_eq!(s[0], s1);
        assert_eq!(s[2], s3);
    }

    #[test]
    fn simplified_merging_middle_shocks_match_accurate() {
        let p = sp(0.09);
        let ul = State::new(0.0, 0.05, 0.0);
        let ta = -0.01;
        let tb = -0.02;
        let mid = wave_curve(2, ul, ta, p).unwrap();
        let ur = wave_curve(2, mid, tb, p).unwrap();
        let simp = solve_riemann_simplified(ul, ur, [0.0, ta + tb, 0.0], p).unwrap();
        let acc = solve_riemann(ul, ur, p).unwrap();
        // one merged 2-shock with additive v-jump in both solvers
        let s_simp = simp.signed_strengths();
        let s_acc = acc.signed_strengths();
        assert_eq!(s_simp[1], ta + tb);
        assert_abs_diff_eq!(s_acc[1], ta + tb, epsilon = 1e-12);
        // accurate outgoing extreme strengths are higher order: ≤ |ta·tb|·10
        assert!(s_acc[0].abs() <= 10.0 * (ta * tb).abs());
        assert!(s_acc[2].abs() <= 10.0 * (ta * tb).abs());
        // simplified non-physical residual is comparable to those
        let np: f64 = simp
            .waves
            .iter()
            .filter(|w| w.family == Family::NonPhysical)
            .map(|w| w.strength)
            .sum();
        assert!(np <= 100.0 * (ta * tb).abs(), "np = {np:.3e}");
    }

    #[test]
    fn lax_violation_rejected() {
        // an inadmissible "shock" built on the rarefaction side of the
        // 1-curve must be caught by the validator
        let p = sp(0.1);
        let l = ZERO_STATE;
        let r = wave_curve(1, l, 0.3, p).unwrap();
        let sigma = shock_speed(1, l, r, p);
        let bad = Wave {
            family: Family::One,
            kind: WaveKind::Shock,
            strength: 0.3,
            left: l,
            right: r,
            speed_lo: sigma,
            speed_hi: sigma,
        };
        assert!(validate_waves(&[bad], p).is_err());
    }
}
