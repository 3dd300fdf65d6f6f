//! Detection and certification of the trapped reflection cascade in a
//! finished front-tracking run.
//!
//! The expected picture: two strong 2-shocks drift toward each other from
//! `∓q`, and every extreme-family front caught between them bounces back and
//! forth, losing a fixed strength factor per reflection. This module stitches
//! the two 2-shock trajectories out of the front genealogy, extracts the
//! reflection ladder by generation, fits its geometric decay, takes censuses
//! of which families live on which side, and condenses everything into a
//! machine-checkable verdict.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{Family, WaveKind};
use crate::scenario::ScenarioParams;
use crate::tracking::{FtParams, FtSolution};

/// Piecewise-linear trajectory of one persistent front, stitched across the
/// events it survives. Front records are immutable, so a long-lived shock is
/// a chain of records glued at interaction events.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    /// Chain of front records, ordered by birth time.
    pub front_ids: Vec<u32>,
    pub birth_t: f64,
    pub death_t: f64,
    /// Largest strength jump across a stitch; the middle-family strength is
    /// conserved to second order per crossing, so this should stay tiny.
    pub max_drift: f64,
    /// (birth_t, birth_x, speed, end_t) per chain segment.
    segments: Vec<(f64, f64, f64, f64)>,
}

impl Trajectory {
    /// Position at time `t`, if the trajectory is alive then.
    pub fn x_at(&self, t: f64) -> Option<f64> {
        if t < self.birth_t || t > self.death_t {
            return None;
        }
        let seg = self
            .segments
            .iter()
            .find(|s| t <= s.3)
            .or_else(|| self.segments.last())?;
        Some(seg.1 + seg.2 * (t - seg.0))
    }

    pub fn alive_at(&self, t: f64) -> bool {
        t >= self.birth_t && t <= self.death_t
    }
}

/// The two stitched big 2-shock trajectories and their meeting point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BigShockPair {
    pub left: Trajectory,
    pub right: Trajectory,
    /// (t, x) of the event where the chains merge into one front, if they do
    /// within the run.
    pub meeting: Option<(f64, f64)>,
}

fn death_event_map(sol: &FtSolution) -> HashMap<u32, usize> {
    let mut map = HashMap::new();
    for (i, e) in sol.events.iter().enumerate() {
        for &id in &e.incoming {
            map.insert(id, i);
        }
    }
    map
}

/// Follows a starting front through its death events along outgoing
/// middle-family fronts of substantial strength.
fn stitch_chain(
    sol: &FtSolution,
    deaths: &HashMap<u32, usize>,
    start: u32,
    floor: f64,
) -> Trajectory {
    let mut ids = vec![start];
    let mut max_drift = 0.0f64;
    let mut cur = start;
    loop {
        let Some(&ei) = deaths.get(&cur) else { break };
        let succ = sol.events[ei]
            .outgoing
            .iter()
            .map(|&id| sol.front(id))
            .find(|f| f.family == Family::Two && f.strength >= floor);
        let Some(succ) = succ else { break };
        max_drift = max_drift.max((succ.strength - sol.front(cur).strength).abs());
        ids.push(succ.id);
        cur = succ.id;
    }
    let segments: Vec<(f64, f64, f64, f64)> = ids
        .iter()
        .map(|&id| {
            let f = sol.front(id);
            (
                f.birth_t,
                f.birth_x,
                f.speed,
                f.death_t.unwrap_or(sol.t_end),
            )
        })
        .collect();
    Trajectory {
        birth_t: segments[0].0,
        death_t: segments.last().unwrap().3,
        front_ids: ids,
        max_drift,
        segments,
    }
}

fn truncate_at(tr: &mut Trajectory, chain_pos: usize, sol: &FtSolution) {
    tr.front_ids.truncate(chain_pos);
    tr.segments.truncate(chain_pos);
    tr.death_t = tr
        .front_ids
        .last()
        .map(|&id| sol.front(id).death_t.unwrap_or(sol.t_end))
        .unwrap_or(tr.birth_t);
    tr.max_drift = tr
        .front_ids
        .windows(2)
        .map(|w| (sol.front(w[1]).strength - sol.front(w[0]).strength).abs())
        .fold(0.0, f64::max);
}

/// Finds the two long-lived middle-family shocks of the pattern: chains of
/// 2-front records of strength near `omega` starting close to `-q` and `+q`.
/// Returns `None` when either side has no such chain. If the chains merge,
/// both trajectories are truncated at the merge and the meeting point is
/// reported.
pub fn identify_big_2shocks(sol: &FtSolution, sp: &ScenarioParams) -> Option<BigShockPair> {
    let deaths = death_event_map(sol);
    let lo = sp.omega / 2.0;
    let hi = 2.0 * sp.omega;
    let is_start = |f: &crate::tracking::FrontRecord, center: f64| {
        f.family == Family::Two
            && f.strength >= lo
            && f.strength <= hi
            && (f.birth_x - center).abs() <= sp.q / 2.0
            && !f.parents.iter().any(|&p| {
                let pf = sol.front(p);
                pf.family == Family::Two && pf.strength >= lo && pf.strength <= hi
            })
    };
    let best_chain = |center: f64| -> Option<Trajectory> {
        sol.fronts
            .iter()
            .filter(|f| is_start(f, center))
            .map(|f| stitch_chain(sol, &deaths, f.id, sp.omega / 4.0))
            .max_by(|a, b| (a.death_t - a.birth_t).total_cmp(&(b.death_t - b.birth_t)))
    };
    let mut left = best_chain(-sp.q)?;
    let mut right = best_chain(sp.q)?;

    // A shared record means the two shocks merged; cut both chains there.
    let right_ids: HashSet<u32> = right.front_ids.iter().copied().collect();
    let shared = left.front_ids.iter().position(|id| right_ids.contains(id));
    let meeting = shared.map(|i| {
        let m = sol.front(left.front_ids[i]);
        let pos = right
            .front_ids
            .iter()
            .position(|&id| id == m.id)
            .expect("shared front present in both chains");
        truncate_at(&mut left, i, sol);
        truncate_at(&mut right, pos, sol);
        (m.birth_t, m.birth_x)
    });
    if left.front_ids.is_empty() || right.front_ids.is_empty() {
        return None;
    }
    Some(BigShockPair { left, right, meeting })
}

/// Summary of one reflection generation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GenerationInfo {
    pub generation: u32,
    /// Number of reflected fronts carrying this generation index.
    pub count: usize,
    pub max_strength: f64,
    /// Family (1 or 3) of the strongest front of the generation.
    pub family_of_max: usize,
    /// Birth time of the earliest reflection of the generation.
    pub first_birth_t: f64,
}

/// Extracts every reflection born on the two big-shock trajectories, grouped
/// by generation. A reflection is an extreme-family front emitted on the
/// trapped side: family 3 at the left shock, family 1 at the right shock
/// (extreme speeds have fixed signs, so these are the only fronts that can
/// re-enter the region). Emission of the opposite extreme family on the
/// trapped side is impossible and reported as an invariant violation.
pub fn extract_reflections(sol: &FtSolution, pair: &BigShockPair) -> Result<Vec<GenerationInfo>> {
    let left_ids: HashSet<u32> = pair.left.front_ids.iter().copied().collect();
    let right_ids: HashSet<u32> = pair.right.front_ids.iter().copied().collect();
    let mut by_gen: HashMap<u32, GenerationInfo> = HashMap::new();
    for e in &sol.events {
        let on_left = e.incoming.iter().any(|id| left_ids.contains(id));
        let on_right = e.incoming.iter().any(|id| right_ids.contains(id));
        // The merge event (and any event off both chains) emits no reflection.
        if on_left == on_right {
            continue;
        }
        let hit_by_extreme = e.incoming.iter().any(|&id| {
            matches!(sol.front(id).family, Family::One | Family::Three)
        });
        if !hit_by_extreme {
            continue;
        }
        let reflected_family = if on_left { Family::Three } else { Family::One };
        let wrong_family = if on_left { Family::One } else { Family::Three };
        for &id in &e.outgoing {
            let f = sol.front(id);
            if f.family == wrong_family {
                // Transmitted fronts leave the region; one moving back in
                // would break the trapping mechanism outright.
                let inward = if on_left { f.speed > 0.0 } else { f.speed < 0.0 };
                if inward {
                    return Err(Error::Invariant(format!(
                        "front {} of family {:?} re-enters the trapped region \
                         from the {} shock at t = {}",
                        f.id,
                        f.family,
                        if on_left { "left" } else { "right" },
                        e.t
                    )));
                }
                continue;
            }
            if f.family != reflected_family || f.generation == 0 {
                continue;
            }
            let info = by_gen.entry(f.generation).or_insert(GenerationInfo {
                generation: f.generation,
                count: 0,
                max_strength: 0.0,
                family_of_max: reflected_family.index(),
                first_birth_t: f.birth_t,
            });
            info.count += 1;
            info.first_birth_t = info.first_birth_t.min(f.birth_t);
            if f.strength > info.max_strength {
                info.max_strength = f.strength;
                info.family_of_max = reflected_family.index();
            }
        }
    }
    let mut out: Vec<GenerationInfo> = by_gen.into_values().collect();
    out.sort_by_key(|g| g.generation);
    Ok(out)
}

/// Geometric-decay fit of a generation strength ladder.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    /// Mean per-generation strength ratio `(s_n / s_1)^(1/(n-1))`.
    pub ratio: f64,
    /// Smallest constant with `omega^(g+1) * sqrt(eps) / k <= s_g <=
    /// k * omega^(g+1)` across the ladder (at least 1).
    pub k: f64,
}

/// Fits `strengths[g-1] = s_g` for `g = 1..=n` against the geometric ladder
/// `omega^(g+1)`. Requires at least two generations of positive strength.
pub fn decay_fit(strengths: &[f64], sp: &ScenarioParams) -> Result<DecayFit> {
    if strengths.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "decay fit needs at least two generations, got {}",
            strengths.len()
        )));
    }
    if let Some(bad) = strengths.iter().find(|&&s| !(s > 0.0)) {
        return Err(Error::InvalidParam(format!(
            "generation strengths must be positive, got {bad}"
        )));
    }
    let n = strengths.len();
    let ratio = (strengths[n - 1] / strengths[0]).powf(1.0 / (n - 1) as f64);
    let mut k = 1.0f64;
    for (i, &s) in strengths.iter().enumerate() {
        let target = sp.omega.powi(i as i32 + 2);
        k = k.max(s / target).max(sp.eps.sqrt() * target / s);
    }
    Ok(DecayFit { ratio, k })
}

/// Strength totals of the extreme-family fronts strictly between the two big
/// shocks at time `t`: `(shock total, rarefaction total)`.
pub fn functionals_v13_r13(sol: &FtSolution, pair: &BigShockPair, t: f64) -> Result<(f64, f64)> {
    let (Some(jl), Some(jr)) = (pair.left.x_at(t), pair.right.x_at(t)) else {
        return Err(Error::InvalidParam(format!(
            "t = {t} is outside the common lifetime of the two big shocks"
        )));
    };
    let mut v13 = 0.0;
    let mut r13 = 0.0;
    for f in sol.live_fronts_at(t) {
        if !matches!(f.family, Family::One | Family::Three) {
            continue;
        }
        let x = f.position_at(t);
        if x > jl && x < jr {
            match f.kind {
                WaveKind::Shock => v13 += f.strength,
                WaveKind::Rarefaction => r13 += f.strength,
                WaveKind::NonPhysical => {}
            }
        }
    }
    Ok((v13, r13))
}

/// Which side of the two big shocks a census looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Left,
    Between,
    Right,
}

/// Live physical front counts per family (index = family - 1) and region at
/// one time, with non-physical fronts tallied separately.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Census {
    pub t: f64,
    pub left: [usize; 3],
    pub between: [usize; 3],
    pub right: [usize; 3],
    pub np: usize,
}

impl Census {
    /// The trapping property: no middle or right-moving family survives left
    /// of the pattern, none of the middle or left-moving family to its right.
    pub fn confinement_ok(&self) -> bool {
        self.left[1] == 0 && self.left[2] == 0 && self.right[0] == 0 && self.right[1] == 0
    }

    pub fn physical_total(&self) -> usize {
        self.left.iter().sum::<usize>()
            + self.between.iter().sum::<usize>()
            + self.right.iter().sum::<usize>()
    }
}

/// Full per-region, per-family census at time `t`. Fronts sitting exactly on
/// a big-shock trajectory (the big shocks themselves) count as `Between`.
pub fn full_census(sol: &FtSolution, pair: &BigShockPair, t: f64) -> Result<Census> {
    let (Some(jl), Some(jr)) = (pair.left.x_at(t), pair.right.x_at(t)) else {
        return Err(Error::InvalidParam(format!(
            "t = {t} is outside the common lifetime of the two big shocks"
        )));
    };
    let mut c = Census { t, ..Census::default() };
    for f in sol.live_fronts_at(t) {
        if f.family == Family::NonPhysical {
            c.np += 1;
            continue;
        }
        let x = f.position_at(t);
        let bucket = if x < jl {
            &mut c.left
        } else if x > jr {
            &mut c.right
        } else {
            &mut c.between
        };
        bucket[f.family.index() - 1] += 1;
    }
    Ok(c)
}

/// Count of live fronts of the given families in one region at time `t`.
pub fn wave_census(
    sol: &FtSolution,
    pair: &BigShockPair,
    t: f64,
    region: Region,
    families: &[usize],
) -> Result<usize> {
    let c = full_census(sol, pair, t)?;
    let bucket = match region {
        Region::Left => c.left,
        Region::Between => c.between,
        Region::Right => c.right,
    };
    Ok(families.iter().map(|&f| bucket[f - 1]).sum())
}

/// Machine-checkable outcome of a pattern verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Every check passed: the run certifies the pattern.
    Pass,
    /// At least one structural check failed.
    Fail,
    /// The run stopped on its front budget; no verdict either way.
    Incomplete,
}

/// Everything `verify_pattern` measured, plus the condensed verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternReport {
    pub verdict: Verdict,
    /// Both big 2-shock trajectories were found.
    pub big_shocks_found: bool,
    /// (t, x) where the two big shocks merged, if they did.
    pub meeting: Option<(f64, f64)>,
    /// Deepest reflection generation observed.
    pub generations_found: u32,
    /// Per-generation ladder, all generations observed.
    pub generations: Vec<GenerationInfo>,
    /// Decay fit over the certified prefix `1..=min_generations`.
    pub decay: Option<DecayFit>,
    pub decay_ok: bool,
    /// Censuses taken across the late-time window; all must trap.
    pub censuses: Vec<Census>,
    pub confinement_ok: bool,
    /// Certified generations clear the resolution noise floor.
    pub strengths_clear_noise: bool,
    /// `10 * (non-physical total + rarefaction resolution)`.
    pub noise_floor: f64,
    pub np_total: f64,
    /// Events where one family carried both signs.
    pub cancellations: usize,
    /// (t, shock total, rarefaction total) between the big shocks.
    pub functionals: Vec<(f64, f64, f64)>,
    pub truncated: bool,
    pub min_generations: u32,
    pub k_cap: f64,
    /// Human-readable anomalies that did not by themselves decide the verdict.
    pub notes: Vec<String>,
}

/// Verifies that a finished run realizes the trapped reflection pattern:
/// both big 2-shocks present, at least `min_generations` reflection
/// generations with geometric decay constant at most `k_cap`, confinement
/// censuses clean across the late window, and every certified generation
/// strength above ten times the resolution noise floor. A truncated run
/// yields `Incomplete`.
pub fn verify_pattern(
    sol: &FtSolution,
    sp: &ScenarioParams,
    ft: &FtParams,
    min_generations: u32,
    k_cap: f64,
) -> PatternReport {
    let mut notes = Vec::new();
    let np_total = sol.np_total();
    let noise_floor = 10.0 * (np_total + ft.delta_rar);
    let cancellations = sol.events.iter().filter(|e| e.cancellation).count();

    let pair = identify_big_2shocks(sol, sp);
    let mut report = PatternReport {
        verdict: Verdict::Fail,
        big_shocks_found: pair.is_some(),
        meeting: None,
        generations_found: 0,
        generations: Vec::new(),
        decay: None,
        decay_ok: false,
        censuses: Vec::new(),
        confinement_ok: false,
        strengths_clear_noise: false,
        noise_floor,
        np_total,
        cancellations,
        functionals: Vec::new(),
        truncated: sol.truncated,
        min_generations,
        k_cap,
        notes: Vec::new(),
    };
    let Some(pair) = pair else {
        report.notes.push("big 2-shock pair not found".to_string());
        if sol.truncated {
            report.verdict = Verdict::Incomplete;
        }
        return report;
    };
    report.meeting = pair.meeting;
    let drift = pair.left.max_drift.max(pair.right.max_drift);
    if drift > sp.omega * sp.omega {
        notes.push(format!(
            "big-shock strength drift {drift:e} exceeds omega^2 across a crossing"
        ));
    }

    match extract_reflections(sol, &pair) {
        Ok(gens) => {
            report.generations_found = gens.iter().map(|g| g.generation).max().unwrap_or(0);
            report.generations = gens;
        }
        Err(e) => {
            notes.push(format!("reflection extraction failed: {e}"));
        }
    }

    // Decay and noise clearance over the certified prefix.
    let prefix: Vec<f64> = (1..=min_generations)
        .filter_map(|g| {
            report
                .generations
                .iter()
                .find(|gi| gi.generation == g)
                .map(|gi| gi.max_strength)
        })
        .collect();
    if prefix.len() == min_generations as usize {
        match decay_fit(&prefix, sp) {
            Ok(fit) => {
                report.decay_ok = fit.k <= k_cap;
                if !report.decay_ok {
                    notes.push(format!("decay constant {} exceeds cap {k_cap}", fit.k));
                }
                report.decay = Some(fit);
            }
            Err(e) => notes.push(format!("decay fit failed: {e}")),
        }
        report.strengths_clear_noise = prefix.iter().all(|&s| s > noise_floor);
        if !report.strengths_clear_noise {
            notes.push(format!(
                "a certified generation sits below the noise floor {noise_floor:e}"
            ));
        }
    } else {
        notes.push(format!(
            "only {} of the first {min_generations} generations materialized",
            prefix.len()
        ));
    }

    // Confinement censuses across the late window.
    let t_cap = pair
        .left
        .death_t
        .min(pair.right.death_t)
        .min(sol.t_end)
        * 0.999;
    let t0 = 8.0 / sp.omega;
    if t0 < t_cap {
        let samples = 9;
        let mut all_ok = true;
        for i in 0..samples {
            let t = t0 + (t_cap - t0) * i as f64 / (samples - 1) as f64;
            match full_census(sol, &pair, t) {
                Ok(c) => {
                    all_ok &= c.confinement_ok();
                    if let Ok((v13, r13)) = functionals_v13_r13(sol, &pair, t) {
                        report.functionals.push((t, v13, r13));
                    }
                    report.censuses.push(c);
                }
                Err(e) => {
                    all_ok = false;
                    notes.push(format!("census at t = {t} failed: {e}"));
                }
            }
        }
        report.confinement_ok = all_ok;
        if !all_ok {
            notes.push("a forbidden family survived outside the pattern".to_string());
        }
    } else {
        report.confinement_ok = true;
        notes.push(format!(
            "census window empty: big shocks gone by t = {t_cap:.3} < 8/omega = {t0:.3}"
        ));
    }

    report.notes = notes;
    report.verdict = if sol.truncated {
        Verdict::Incomplete
    } else if report.big_shocks_found
        && report.generations_found >= min_generations
        && report.decay_ok
        && report.confinement_ok
        && report.strengths_clear_noise
    {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    report
}
