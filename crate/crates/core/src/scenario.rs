//! Construction of the initial data used by the shock-pattern experiments.
//!
//! Everything here is parameterized by a single small quantity `eps`. From it
//! we derive the system coupling `eta`, the basic wave amplitude `omega`, the
//! admissible perturbation radius `r`, the horizon `t_tilde`, and the spatial
//! extent of the experiment. The data builders produce step functions whose
//! evolution exhibits two slow, counter-drifting 2-shocks that trap a
//! geometrically decaying ladder of reflected 1- and 3-shocks between them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{shock_state, wave_curve};
use crate::state::State;
use crate::system::SystemParams;
use crate::tracking::{FtParams, StepFunction};

/// Derived parameter pack for one experiment family.
///
/// All members are pure functions of `eps`; `derive_params` is deterministic
/// and bit-stable, so configurations can be reproduced from `eps` alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Small parameter controlling every scale below; in (0, 0.3].
    pub eps: f64,
    /// Half-distance between the two initial jump locations.
    pub q: f64,
    /// Coupling constant of the system, `eps^2`.
    pub eta: f64,
    /// Base wave amplitude, `eps^3`.
    pub omega: f64,
    /// Perturbation budget radius, `eps^10 / 4`.
    pub r: f64,
    /// Time horizon scale, `40 / omega`.
    pub t_tilde: f64,
    /// Half-width of the spatial clipping window, `12 * t_tilde + 40`.
    pub rho: f64,
    /// Perturbations must be supported strictly inside `(-a, a)`; `a = q + 7`.
    pub a: f64,
    /// Left background state `(eps, omega, -eps)`.
    pub u_i: State,
    /// Largest reflection generation whose predicted strength
    /// `omega^(j+1) * sqrt(eps)` stays above 1000 double-precision ulps.
    pub j_max_feasible: u32,
}

/// Derives the full parameter pack from `eps`. Rejects `eps` outside (0, 0.3].
pub fn derive_params(eps: f64) -> Result<ScenarioParams> {
    if !eps.is_finite() || eps <= 0.0 || eps > 0.3 {
        return Err(Error::InvalidParam(format!(
            "eps must lie in (0, 0.3], got {eps}"
        )));
    }
    let q = 20.0;
    let eta = eps * eps;
    let omega = eps.powi(3);
    let r = eps.powi(10) / 4.0;
    let t_tilde = 40.0 / omega;
    let rho = 12.0 * t_tilde + 40.0;
    let a = q + 7.0;
    let u_i = State::new(eps, omega, -eps);
    let noise = 1e3 * f64::EPSILON;
    let mut j_max_feasible = 0u32;
    while omega.powi(j_max_feasible as i32 + 2) * eps.sqrt() > noise {
        j_max_feasible += 1;
    }
    Ok(ScenarioParams {
        eps,
        q,
        eta,
        omega,
        r,
        t_tilde,
        rho,
        a,
        u_i,
        j_max_feasible,
    })
}

impl ScenarioParams {
    /// System parameters matching this scenario's coupling.
    pub fn system(&self) -> Result<SystemParams> {
        SystemParams::new(self.eta)
    }

    /// Estimated meeting time of the two slow 2-shocks: they drift toward
    /// each other at `±omega` from `∓q`, so they meet near `q / omega`.
    pub fn meeting_estimate(&self) -> f64 {
        self.q / self.omega
    }

    /// Tracking parameters tuned for this scenario: rarefaction resolution
    /// fine enough to certify three reflection generations above the noise
    /// floor, the full horizon `2 * t_tilde`, and clipping at `±rho`.
    pub fn default_ft_params(&self) -> FtParams {
        let delta_rar = self.omega.powi(4) * self.eps.sqrt() / 100.0;
        let mut p = FtParams::new(delta_rar, 2.0 * self.t_tilde);
        p.thresh_simplified = 1e-13;
        p.clip = self.rho;
        p.big2_threshold = self.omega / 2.0;
        p.max_fronts = 8_000_000;
        // Keep remainders an order above the deepest tracked reflection but
        // below everything certified, so debris does not snowball into
        // bookkeeping fronts.
        p.strength_floor = 1e-14;
        p
    }
}

fn domain_checked(s: State) -> Result<State> {
    let n = s.norm();
    if n >= 1.0 {
        return Err(Error::DomainExit { norm: n });
    }
    Ok(s)
}

/// Applies the three-shock composite of parameter `s` to `start`:
/// a 1-shock, then a 2-shock, then a 3-shock, each of strength `s`.
/// Returns the final state; the composite drops `v` by exactly `s`.
fn composite_shock(start: State, s: f64, p: SystemParams) -> Result<State> {
    let m1 = shock_state(1, s, start, p)?;
    let m2 = shock_state(2, s, m1, p)?;
    domain_checked(shock_state(3, s, m2, p)?)
}

/// The two-jump piecewise-constant datum: `u_i` left of `-q`, then at each of
/// `∓q` a jump realizing three exact shocks of strength `omega` (families
/// 1, 2, 3). The `v` component steps `omega -> 0 -> -omega`, so the two
/// 2-shocks drift at exactly `+omega` and `-omega` respectively.
pub fn build_piecewise_datum(sp: &ScenarioParams) -> Result<StepFunction> {
    let p = sp.system()?;
    let u_ii = composite_shock(sp.u_i, sp.omega, p)?;
    let u_iii = composite_shock(u_ii, sp.omega, p)?;
    StepFunction::new(vec![-sp.q, sp.q], vec![sp.u_i, u_ii, u_iii])
}

/// Number of staircase steps for a ramp of width `len` at cell size `mesh`.
fn ramp_steps(len: f64, mesh: f64) -> usize {
    (len / mesh).ceil() as usize
}

/// Appends a focusing staircase for `fam` to the profile under construction.
/// The ramp carries total shock parameter `total` spread over `n` equal
/// steps spanning `[x_left, x_left + len)`. Wave speeds decrease linearly
/// left to right with slope -1, so every adjacent pair meets one time unit
/// later at the single focal point `x_left + speed(x_left)`.
fn push_ramp(
    breaks: &mut Vec<f64>,
    values: &mut Vec<State>,
    fam: usize,
    total: f64,
    x_left: f64,
    len: f64,
    mesh: f64,
    p: SystemParams,
) -> Result<()> {
    let n = ramp_steps(len, mesh);
    let step = total / n as f64;
    let width = len / n as f64;
    let mut cur = *values.last().expect("profile starts with a value");
    for i in 0..n {
        breaks.push(x_left + width * i as f64);
        cur = domain_checked(shock_state(fam, step, cur, p)?)?;
        values.push(cur);
    }
    Ok(())
}

/// A compressive variant of the two-jump datum: each jump is replaced by a
/// block of three focusing staircases (families 1, 2, 3 from left to right,
/// separated by unit gaps, the 2-ramp centered on the jump location). Each
/// staircase collapses into a single shock one time unit after start, and
/// no staircase crosses another before focusing. Families 1 and 3 carry
/// parameter `0.75 * omega`; family 2 carries the full `omega` drop in `v`.
///
/// `mesh` is the staircase cell width and must satisfy `mesh <= omega / 100`.
pub fn build_compression_profile(sp: &ScenarioParams, mesh: f64) -> Result<StepFunction> {
    if !mesh.is_finite() || mesh <= 0.0 || mesh > sp.omega / 100.0 {
        return Err(Error::InvalidParam(format!(
            "mesh must lie in (0, omega/100] = (0, {:e}], got {mesh:e}",
            sp.omega / 100.0
        )));
    }
    let l2 = 2.0 * sp.omega;
    if ramp_steps(l2, mesh) > 100_000 {
        return Err(Error::InvalidParam(format!(
            "mesh {mesh:e} resolves the 2-ramp into more than 100000 cells"
        )));
    }
    let p = sp.system()?;
    let sigma = 0.75 * sp.omega;
    let l13 = 4.0 * sp.eta * sigma;

    let mut breaks = Vec::new();
    let mut values = vec![sp.u_i];
    for center in [-sp.q, sp.q] {
        // Speeds drop by (4*eta*param) across a 1- or 3-ramp and by
        // (2*omega) across the 2-ramp; widths equal the drops, giving the
        // unit focusing slope.
        push_ramp(
            &mut breaks,
            &mut values,
            1,
            sigma,
            center - 1.0 - l2 / 2.0 - l13,
            l13,
            mesh,
            p,
        )?;
        push_ramp(&mut breaks, &mut values, 2, sp.omega, center - l2 / 2.0, l2, mesh, p)?;
        push_ramp(
            &mut breaks,
            &mut values,
            3,
            sigma,
            center + 1.0 + l2 / 2.0,
            l13,
            mesh,
            p,
        )?;
    }
    StepFunction::new(breaks, values)
}

/// Cumulative distribution of the C^2 bump `(35/32)(1 - y^2)^3` on [-1, 1].
fn bump_cdf(y: f64) -> f64 {
    if y <= -1.0 {
        0.0
    } else if y >= 1.0 {
        1.0
    } else {
        let y2 = y * y;
        35.0 / 32.0 * (y * (1.0 - y2 * (1.0 - y2 * (0.6 - y2 / 7.0)))) + 0.5
    }
}

/// Convolution of a step function with the bump kernel of the given radius,
/// evaluated at one point.
fn mollified_value(f: &StepFunction, x: f64, radius: f64) -> State {
    let breaks = f.breakpoints();
    let values = f.values();
    let mut acc = State::new(0.0, 0.0, 0.0);
    for (j, v) in values.iter().enumerate() {
        let lo = if j == 0 { f64::NEG_INFINITY } else { breaks[j - 1] };
        let hi = if j == breaks.len() { f64::INFINITY } else { breaks[j] };
        let weight = bump_cdf((x - lo) / radius) - bump_cdf((x - hi) / radius);
        if weight != 0.0 {
            acc = acc + *v * weight;
        }
    }
    acc
}

/// Smooths `profile` by bump convolution and re-samples the result at the
/// midpoints of the profile's own cells (end plateaus are kept as they are).
/// The smoothing radius is halved until the total variation of the
/// modification falls below the scenario's perturbation radius `sp.r`; once
/// the radius drops below half the smallest cell the re-sampling reproduces
/// the input exactly, so the loop always terminates on sane profiles.
pub fn mollify(profile: &StepFunction, radius: f64, sp: &ScenarioParams) -> Result<StepFunction> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "mollification radius must be positive, got {radius}"
        )));
    }
    let breaks = profile.breakpoints();
    let values = profile.values();
    let mut rad = radius;
    let mut last_tv = f64::INFINITY;
    const MAX_ATTEMPTS: usize = 40;
    for attempt in 1..=MAX_ATTEMPTS {
        let mut out = values.to_vec();
        for j in 1..breaks.len() {
            let mid = 0.5 * (breaks[j - 1] + breaks[j]);
            out[j] = mollified_value(profile, mid, rad);
        }
        let mut tv = 0.0;
        for j in 0..breaks.len() {
            let d_right = out[j + 1] - values[j + 1];
            let d_left = out[j] - values[j];
            tv += (d_right - d_left).norm();
        }
        if tv < sp.r {
            return StepFunction::new(breaks.to_vec(), out);
        }
        last_tv = tv;
        rad /= 2.0;
        let _ = attempt;
    }
    Err(Error::MollifyFailure {
        tv: last_tv,
        budget: sp.r,
        attempts: MAX_ATTEMPTS,
    })
}

/// Which norm a perturbation is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbKind {
    /// Total-variation budget, realized as a comb of square teeth.
    Bv,
    /// Sup-norm plus derivative-sup budget, realized as a windowed
    /// low-frequency oscillation sampled onto a refinement grid.
    W1Inf,
}

/// A seeded, budgeted perturbation request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatumSpec {
    pub kind: PerturbKind,
    /// Size in the kind's norm; must be strictly below the scenario's `r`.
    pub budget: f64,
    pub seed: u64,
}

const TEETH: usize = 10;
const TOOTH_WIDTH: f64 = 0.25;

fn unit_axis(k: usize) -> State {
    match k {
        0 => State::new(1.0, 0.0, 0.0),
        1 => State::new(0.0, 1.0, 0.0),
        _ => State::new(0.0, 0.0, 1.0),
    }
}

/// Rebuilds `base` with an additive piecewise field described by extra
/// breakpoints and a value callback evaluated at a representative point of
/// each output cell.
fn overlay(
    base: &StepFunction,
    extra_breaks: &[f64],
    add: impl Fn(f64) -> State,
) -> Result<StepFunction> {
    let mut all: Vec<f64> = base
        .breakpoints()
        .iter()
        .chain(extra_breaks.iter())
        .copied()
        .collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let mut vals = Vec::with_capacity(all.len() + 1);
    for j in 0..=all.len() {
        let x = if j == 0 {
            all[0] - 1.0
        } else if j == all.len() {
            all[j - 1] + 1.0
        } else {
            0.5 * (all[j - 1] + all[j])
        };
        vals.push(base.value_at(x) + add(x));
    }
    StepFunction::new(all, vals)
}

/// Applies a seeded perturbation to `datum` and returns the perturbed datum
/// together with the measured size of the modification in the requested
/// norm. A zero budget returns the datum unchanged; budgets at or above the
/// scenario radius `sp.r` are rejected. The perturbation is always supported
/// strictly inside `(-a, a)` and is deterministic in the seed.
pub fn perturb(
    datum: &StepFunction,
    spec: &DatumSpec,
    sp: &ScenarioParams,
) -> Result<(StepFunction, f64)> {
    if !spec.budget.is_finite() || spec.budget < 0.0 {
        return Err(Error::InvalidParam(format!(
            "perturbation budget must be nonnegative, got {}",
            spec.budget
        )));
    }
    if spec.budget >= sp.r {
        return Err(Error::InvalidParam(format!(
            "perturbation budget {:e} is not below the admissible radius {:e}",
            spec.budget, sp.r
        )));
    }
    if spec.budget == 0.0 {
        return Ok((datum.clone(), 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        PerturbKind::Bv => perturb_bv(datum, spec, sp, &mut rng),
        PerturbKind::W1Inf => perturb_w1inf(datum, spec, sp, &mut rng),
    }
}

fn perturb_bv(
    datum: &StepFunction,
    spec: &DatumSpec,
    sp: &ScenarioParams,
    rng: &mut ChaCha8Rng,
) -> Result<(StepFunction, f64)> {
    let height = spec.budget / (2.0 * TEETH as f64);
    let margin = TOOTH_WIDTH;
    let lo = -sp.a + margin;
    let hi = sp.a - margin - TOOTH_WIDTH;
    let base_breaks = datum.breakpoints();
    let mut teeth: Vec<(f64, f64, State)> = Vec::with_capacity(TEETH);
    let mut attempts = 0;
    while teeth.len() < TEETH {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::InvalidParam(
                "could not place disjoint perturbation teeth clear of existing breakpoints"
                    .to_string(),
            ));
        }
        let l = rng.gen_range(lo..hi);
        let r = l + TOOTH_WIDTH;
        let clear_of_base = {
            let i = base_breaks.partition_point(|&b| b <= l);
            i == base_breaks.partition_point(|&b| b < r)
        };
        let clear_of_teeth = teeth.iter().all(|&(tl, tr, _)| r < tl || l > tr);
        if clear_of_base && clear_of_teeth {
            let axis = rng.gen_range(0..3usize);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            teeth.push((l, r, unit_axis(axis) * (sign * height)));
        }
    }
    let mut extra: Vec<f64> = Vec::with_capacity(2 * TEETH);
    for &(l, r, _) in &teeth {
        extra.push(l);
        extra.push(r);
    }
    let out = overlay(datum, &extra, |x| {
        let mut s = State::new(0.0, 0.0, 0.0);
        for &(l, r, bump) in &teeth {
            if x >= l && x < r {
                s = s + bump;
            }
        }
        s
    })?;
    Ok((out, 2.0 * TEETH as f64 * height))
}

fn perturb_w1inf(
    datum: &StepFunction,
    spec: &DatumSpec,
    sp: &ScenarioParams,
    rng: &mut ChaCha8Rng,
) -> Result<(StepFunction, f64)> {
    let half_width = 2.0;
    let center = rng.gen_range(-sp.a / 2.0..sp.a / 2.0);
    let axis = unit_axis(rng.gen_range(0..3usize));
    let modes: Vec<f64> = (1..=4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let shape = |x: f64| -> f64 {
        let y = (x - center) / half_width;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let window = (1.0 - y * y).powi(3);
        let mut s = 0.0;
        for (m, c) in modes.iter().enumerate() {
            s += c * ((m + 1) as f64 * std::f64::consts::PI * y).sin();
        }
        window * s
    };

    // Estimate the sup norms on a fine grid, but sample the overlay itself
    // coarsely: four half-oscillations need only dozens of cells, and every
    // extra step becomes a front that multiplies the interaction count.
    let n_est = 512usize;
    let dx_est = 2.0 * half_width / n_est as f64;
    let mut sup = 0.0f64;
    let mut dsup = 0.0f64;
    let mut prev = shape(center - half_width);
    for i in 1..=n_est {
        let g = shape(center - half_width + dx_est * i as f64);
        sup = sup.max(g.abs());
        dsup = dsup.max(((g - prev) / dx_est).abs());
        prev = g;
    }
    if sup + dsup == 0.0 {
        return Ok((datum.clone(), 0.0));
    }
    let amp = 0.9 * spec.budget / (sup + dsup);
    let measured = ((amp * (sup + dsup)) / 1e-12).round() * 1e-12;

    let n = 64usize;
    let dx = 2.0 * half_width / n as f64;
    let extra: Vec<f64> = (0..=n)
        .map(|i| center - half_width + dx * i as f64)
        .collect();
    let out = overlay(datum, &extra, |x| axis * (amp * shape(x)))?;
    Ok((out, measured))
}

fn intervals_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Prepends a family-3 rarefaction jump of the given strength at `placement`,
/// which must lie strictly left of `-a`. The insertion is validated
/// kinematically: with 3-family speeds in [3, 5], either the transit estimate
/// (time to reach the left 2-shock's drift line `x = -q + omega * t`) or the
/// overtake estimate (time to catch the pattern's leading 3-shock, closing at
/// the genuinely nonlinear rate `2 * eta * strength`) must intersect the late
/// window `[0.8 * t_tilde, t_tilde]`. A zero strength returns the datum
/// unchanged.
pub fn adversarial_rarefaction(
    datum: &StepFunction,
    sp: &ScenarioParams,
    strength: f64,
    placement: f64,
) -> Result<StepFunction> {
    if !strength.is_finite() || strength < 0.0 || strength > sp.omega {
        return Err(Error::InvalidParam(format!(
            "adversarial rarefaction strength must lie in [0, omega], got {strength:e}"
        )));
    }
    if strength == 0.0 {
        return Ok(datum.clone());
    }
    if !placement.is_finite() || placement >= -sp.a {
        return Err(Error::InvalidParam(format!(
            "adversarial placement must lie strictly left of -a = {}, got {placement}",
            -sp.a
        )));
    }
    let dist = -sp.q - placement;
    let window = (0.8 * sp.t_tilde, sp.t_tilde);
    let transit = (dist / (5.0 - sp.omega), dist / (3.0 - sp.omega));
    let closing = 2.0 * sp.eta * sp.omega;
    let overtake = (dist / closing, dist / (closing * sp.eps.sqrt()));
    if !intervals_overlap(transit, window) && !intervals_overlap(overtake, window) {
        return Err(Error::InvalidParam(format!(
            "placement {placement} cannot reach the pattern within [{:.3}, {:.3}]: \
             transit estimate [{:.3}, {:.3}], overtake estimate [{:.3}, {:.3}]",
            window.0, window.1, transit.0, transit.1, overtake.0, overtake.1
        )));
    }
    let first = datum.values()[0];
    let left = domain_checked(wave_curve(3, first, -strength, sp.system()?)?)?;
    let mut breaks = Vec::with_capacity(datum.breakpoints().len() + 1);
    breaks.push(placement);
    breaks.extend_from_slice(datum.breakpoints());
    let mut values = Vec::with_capacity(datum.values().len() + 1);
    values.push(left);
    values.extend_from_slice(datum.values());
    StepFunction::new(breaks, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::{solve_riemann, WaveKind};
    use crate::tracking::{evolve, initial_fronts};
    use approx::assert_relative_eq;

    #[test]
    fn derived_parameters_match_anchor_values() {
        let sp = derive_params(0.1).unwrap();
        assert_eq!(sp.q, 20.0);
        assert_relative_eq!(sp.eta, 0.01, max_relative = 1e-12);
        assert_relative_eq!(sp.omega, 1e-3, max_relative = 1e-12);
        assert_relative_eq!(sp.r, 2.5e-11, max_relative = 1e-12);
        assert_relative_eq!(sp.t_tilde, 4e4, max_relative = 1e-12);
        assert_relative_eq!(sp.rho, 480_040.0, max_relative = 1e-12);
        assert_eq!(sp.a, 27.0);
        assert_eq!(sp.j_max_feasible, 3);

        let sp3 = derive_params(0.3).unwrap();
        assert_relative_eq!(sp3.eta, 0.09, max_relative = 1e-12);
        assert_relative_eq!(sp3.omega, 0.027, max_relative = 1e-12);
        assert_relative_eq!(sp3.t_tilde, 40.0 / 0.027, max_relative = 1e-12);
        assert_relative_eq!(sp3.r, 0.3f64.powi(10) / 4.0, max_relative = 1e-12);
        assert_eq!(sp3.a, 27.0);
        assert_eq!(sp3.u_i, State::new(0.3, sp3.omega, -0.3));
        assert_eq!(sp3.j_max_feasible, 6);
    }

    #[test]
    fn derive_params_is_bit_stable_and_validates() {
        let a = derive_params(0.3).unwrap();
        let b = derive_params(0.3).unwrap();
        assert_eq!(a, b);
        assert!(derive_params(0.6).is_err());
        assert!(derive_params(0.0).is_err());
        assert!(derive_params(-0.1).is_err());
        assert!(derive_params(f64::NAN).is_err());
    }

    #[test]
    fn two_jump_datum_has_exact_v_plateaus_and_drift_speeds() {
        let sp = derive_params(0.3).unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        assert_eq!(z.breakpoints(), &[-20.0, 20.0]);
        let vs: Vec<f64> = z.values().iter().map(|s| s.v).collect();
        assert_eq!(vs[0], sp.omega);
        assert_eq!(vs[1], 0.0);
        assert_eq!(vs[2], -sp.omega);
        // State-space variation: the u-components of the 1- and 3-jumps
        // cancel within each composite, so TV sits below the 6*omega total
        // wave strength but well above the 2*omega of the v-steps alone.
        let tv = z.total_variation();
        assert!(
            tv > 4.0 * sp.omega && tv < 6.0 * sp.omega,
            "two-jump datum variation {tv} should be between 4 and 6 omega"
        );
    }

    #[test]
    fn two_jump_datum_seeds_six_fronts_with_unit_speeds() {
        let sp = derive_params(0.3).unwrap();
        let p = sp.system().unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        let fp = sp.default_ft_params();
        let fronts = initial_fronts(&z, &fp, p).unwrap();
        assert_eq!(fronts.len(), 6);
        for (i, f) in fronts.iter().enumerate() {
            let fam = [1usize, 2, 3][i % 3];
            assert_eq!(f.family.index(), fam, "front {i}");
            assert!(
                (f.strength - sp.omega).abs() <= 1e-10,
                "front {i} strength {} should be omega",
                f.strength
            );
        }
        // The two 2-shocks drift at exactly +/- omega.
        assert_relative_eq!(fronts[1].speed, sp.omega, max_relative = 1e-12);
        assert_relative_eq!(fronts[4].speed, -sp.omega, max_relative = 1e-12);
    }

    #[test]
    fn compression_profile_matches_two_jump_variation() {
        let sp = derive_params(0.3).unwrap();
        let mesh = sp.omega / 100.0;
        let v = build_compression_profile(&sp, mesh).unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        let ratio = v.total_variation() / z.total_variation();
        assert!(
            (0.25..=4.0).contains(&ratio),
            "variation ratio {ratio} out of range"
        );
        // 27 + 200 + 27 staircase cells per block.
        assert_eq!(v.breakpoints().len(), 2 * (27 + 200 + 27));
        assert!(build_compression_profile(&sp, sp.omega / 99.0).is_err());
        assert!(build_compression_profile(&sp, 0.0).is_err());
    }

    #[test]
    fn compression_staircases_focus_into_six_shocks() {
        let sp = derive_params(0.3).unwrap();
        let p = sp.system().unwrap();
        let v = build_compression_profile(&sp, sp.omega / 100.0).unwrap();
        let mut fp = sp.default_ft_params();
        fp.t_end = 3.0;
        fp.clip = 60.0;
        let sol = evolve(&v, &fp, p).unwrap();
        assert!(!sol.truncated);
        let live = sol.live_fronts_at(3.0);
        let big: Vec<_> = live
            .iter()
            .filter(|f| f.family.is_physical() && f.strength >= sp.omega / 5.0)
            .collect();
        assert_eq!(big.len(), 6, "expected six focused shocks");
        let fams: Vec<usize> = big.iter().map(|f| f.family.index()).collect();
        assert_eq!(fams, vec![1, 2, 3, 1, 2, 3]);
        for f in &big {
            match f.family.index() {
                2 => assert_relative_eq!(f.strength, sp.omega, max_relative = 1e-6),
                _ => assert_relative_eq!(f.strength, 0.75 * sp.omega, max_relative = 1e-6),
            }
        }
        // Each staircase collapses in a single many-front event at its focus.
        let gathers: Vec<_> = sol.events.iter().filter(|e| e.incoming.len() >= 27).collect();
        assert_eq!(gathers.len(), 6);
        for g in &gathers {
            assert!((g.t - 1.0).abs() < 1e-6, "focal time {}", g.t);
        }
    }

    #[test]
    fn mollify_with_tiny_radius_reproduces_the_profile() {
        let sp = derive_params(0.3).unwrap();
        let v = build_compression_profile(&sp, sp.omega / 100.0).unwrap();
        let out = mollify(&v, sp.omega / 800.0, &sp).unwrap();
        assert_eq!(out.breakpoints(), v.breakpoints());
        for (a, b) in out.values().iter().zip(v.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mollify_smooths_a_small_interior_step_on_first_attempt() {
        let sp = derive_params(0.3).unwrap();
        let h = sp.r / 2.0;
        let base = State::new(0.0, 0.0, 0.0);
        let stepped = StepFunction::new(
            vec![-1.0, 0.0, 1.0],
            vec![base, base, base + State::new(h, 0.0, 0.0), base + State::new(h, 0.0, 0.0)],
        )
        .unwrap();
        let out = mollify(&stepped, 0.75, &sp).unwrap();
        let mut tv = 0.0;
        let vals = stepped.values();
        let outs = out.values();
        for j in 0..stepped.breakpoints().len() {
            tv += ((outs[j + 1] - vals[j + 1]) - (outs[j] - vals[j])).norm();
        }
        assert!(tv < sp.r, "modification variation {tv:e} exceeds budget");
        assert!(outs[1] != vals[1], "interior midpoint should be smoothed");
    }

    #[test]
    fn mollify_rejects_an_unshrinkably_large_radius() {
        let sp = derive_params(0.3).unwrap();
        let v = build_compression_profile(&sp, sp.omega / 100.0).unwrap();
        match mollify(&v, 1e9, &sp) {
            Err(Error::MollifyFailure { attempts, .. }) => assert_eq!(attempts, 40),
            other => panic!("expected mollify failure, got {other:?}"),
        }
    }

    #[test]
    fn bv_comb_spends_its_budget_exactly_inside_the_support_bound() {
        let sp = derive_params(0.3).unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        let spec = DatumSpec {
            kind: PerturbKind::Bv,
            budget: sp.r / 2.0,
            seed: 11,
        };
        let (out, measured) = perturb(&z, &spec, &sp).unwrap();
        assert_relative_eq!(measured, spec.budget, max_relative = 1e-12);
        // Modification variation equals the budget: teeth are disjoint squares.
        let mut tv = 0.0;
        let mut prev = State::new(0.0, 0.0, 0.0);
        for j in 0..out.breakpoints().len() {
            let x = out.breakpoints()[j];
            let d = out.value_at(x) - z.value_at(x);
            tv += (d - prev).norm();
            prev = d;
        }
        assert_relative_eq!(tv, spec.budget, max_relative = 1e-9);
        for &b in out.breakpoints() {
            if !z.breakpoints().contains(&b) {
                assert!(b > -sp.a && b < sp.a, "tooth edge {b} outside support");
            }
        }
    }

    #[test]
    fn perturbations_are_seed_deterministic_and_validated() {
        let sp = derive_params(0.3).unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        let spec = DatumSpec {
            kind: PerturbKind::Bv,
            budget: sp.r / 2.0,
            seed: 7,
        };
        let (a, _) = perturb(&z, &spec, &sp).unwrap();
        let (b, _) = perturb(&z, &spec, &sp).unwrap();
        assert_eq!(a.breakpoints(), b.breakpoints());
        let other = DatumSpec { seed: 8, ..spec };
        let (c, _) = perturb(&z, &other, &sp).unwrap();
        assert_ne!(a.breakpoints(), c.breakpoints());

        let too_big = DatumSpec {
            kind: PerturbKind::Bv,
            budget: sp.r,
            seed: 1,
        };
        assert!(perturb(&z, &too_big, &sp).is_err());
        let zero = DatumSpec {
            kind: PerturbKind::Bv,
            budget: 0.0,
            seed: 1,
        };
        let (same, size) = perturb(&z, &zero, &sp).unwrap();
        assert_eq!(size, 0.0);
        assert_eq!(same.breakpoints(), z.breakpoints());
    }

    #[test]
    fn w1inf_perturbation_stays_under_budget_with_compact_support() {
        let sp = derive_params(0.3).unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        let spec = DatumSpec {
            kind: PerturbKind::W1Inf,
            budget: sp.r / 2.0,
            seed: 42,
        };
        let (out, measured) = perturb(&z, &spec, &sp).unwrap();
        assert!(measured > 0.0 && measured < spec.budget);
        for &b in out.breakpoints() {
            if !z.breakpoints().contains(&b) {
                assert!(b > -sp.a && b < sp.a);
            }
        }
        let sup: f64 = out
            .breakpoints()
            .iter()
            .map(|&x| (out.value_at(x) - z.value_at(x)).norm())
            .fold(0.0, f64::max);
        assert!(sup <= measured + 1e-12);
    }

    #[test]
    fn adversarial_insertion_is_a_pure_rarefaction_jump() {
        let sp = derive_params(0.3).unwrap();
        let p = sp.system().unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        let placement = -sp.a - 4.0 * sp.t_tilde;
        let out = adversarial_rarefaction(&z, &sp, sp.omega, placement).unwrap();
        assert_eq!(out.breakpoints()[0], placement);
        let sol = solve_riemann(out.values()[0], out.values()[1], p).unwrap();
        let nonzero: Vec<_> = sol.waves.iter().filter(|w| w.strength > 1e-13).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].family.index(), 3);
        assert_eq!(nonzero[0].kind, WaveKind::Rarefaction);
        assert_relative_eq!(nonzero[0].strength, sp.omega, max_relative = 1e-9);
    }

    #[test]
    fn adversarial_validation_accepts_both_kinematic_routes() {
        let sp = derive_params(0.3).unwrap();
        let z = build_piecewise_datum(&sp).unwrap();
        // Far placement: direct transit arrives near t_tilde.
        assert!(adversarial_rarefaction(&z, &sp, sp.omega, -sp.a - 4.0 * sp.t_tilde).is_ok());
        // Near placement: the overtake of the leading 3-shock lands in window.
        assert!(adversarial_rarefaction(&z, &sp, sp.omega, -sp.a - 0.05).is_ok());
        // Intermediate placements reach the pattern far outside the window.
        assert!(adversarial_rarefaction(&z, &sp, sp.omega, -sp.a - 50.0).is_err());
        // Placement inside the protected support is always rejected.
        assert!(adversarial_rarefaction(&z, &sp, sp.omega, -sp.a + 1.0).is_err());
        assert!(adversarial_rarefaction(&z, &sp, sp.omega, -sp.q).is_err());
        // Strength above omega is rejected; zero strength is the identity.
        assert!(adversarial_rarefaction(&z, &sp, 2.0 * sp.omega, -sp.a - 0.05).is_err());
        let same = adversarial_rarefaction(&z, &sp, 0.0, -sp.a - 0.05).unwrap();
        assert_eq!(same.breakpoints(), z.breakpoints());
    }
}
