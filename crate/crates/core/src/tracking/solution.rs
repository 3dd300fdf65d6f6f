//! Output records of a front-tracking run: the full front genealogy, the
//! event log, and profile reconstruction at arbitrary times.

use crate::riemann::{Family, WaveKind};
use crate::state::State;
use crate::tracking::step::StepFunction;
use serde::{Deserialize, Serialize};

/// One straight-line front segment. A front is born at an event (or in the
/// initial datum), travels at constant `speed`, and dies at its next event
/// or survives to the end of the run (`death_t = None`). Fronts that pass
/// through an interaction "unchanged" still get a fresh record; chains are
/// reconstructed downstream from the event log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrontRecord {
    pub id: u32,
    pub family: Family,
    pub kind: WaveKind,
    pub birth_t: f64,
    pub birth_x: f64,
    pub death_t: Option<f64>,
    pub death_x: Option<f64>,
    pub speed: f64,
    /// Non-negative wave strength (wave-curve parameter modulus; jump norm
    /// for non-physical fronts).
    pub strength: f64,
    pub left: State,
    pub right: State,
    /// Number of reflections off strong middle-family fronts in this
    /// front's ancestry — 0 for fronts of the initial datum.
    pub generation: u32,
    /// Incoming front ids of the birth event; empty for initial fronts.
    pub parents: Vec<u32>,
}

impl FrontRecord {
    pub fn position_at(&self, t: f64) -> f64 {
        self.birth_x + self.speed * (t - self.birth_t)
    }

    pub fn alive_at(&self, t: f64) -> bool {
        t >= self.birth_t && self.death_t.map_or(true, |d| t < d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// Fronts met and were resolved by the accurate solver.
    Accurate,
    /// Fronts met and were resolved by the simplified solver.
    Simplified,
    /// A front reached the clip boundary and was retired.
    Exit,
}

/// One entry of the event log, with the Glimm functional evaluated over the
/// complete post-event front population.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub x: f64,
    pub kind: EventKind,
    pub incoming: Vec<u32>,
    pub outgoing: Vec<u32>,
    /// Total wave strength V after the event.
    pub v_total: f64,
    /// Interaction potential Q after the event.
    pub q_total: f64,
    /// Glimm functional F = V + C·Q after the event.
    pub f_total: f64,
    /// Set when incoming fronts of one family carried opposite signs —
    /// a cancellation, the mechanism that shuts a reflection cascade down.
    pub cancellation: bool,
}

/// Complete result of a front-tracking run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FtSolution {
    pub fronts: Vec<FrontRecord>,
    pub events: Vec<EventRecord>,
    /// Constant state to the left of every front.
    pub left_state: State,
    pub t_begin: f64,
    pub t_end: f64,
    /// Set when the run stopped early on the front budget.
    pub truncated: bool,
    /// Total variation of the initial profile.
    pub initial_tv: f64,
    /// Glimm functional of the initial front population.
    pub initial_f: f64,
    /// Mass of non-physical remainders discarded at roundoff scale instead
    /// of being tracked as fronts.
    #[serde(default)]
    pub np_dropped: f64,
}

impl FtSolution {
    pub fn front(&self, id: u32) -> &FrontRecord {
        &self.fronts[id as usize]
    }

    /// Total non-physical mass the run produced, tracked or discarded.
    pub fn np_total(&self) -> f64 {
        // A non-physical front is re-recorded every time it crosses another
        // front, so summing record strengths would count the same dropped
        // mass once per crossing. Count the mass when it is first shed, plus
        // whatever an event adds on top of what its non-physical parents
        // already carried.
        let shed: f64 = self
            .fronts
            .iter()
            .filter(|f| f.family == Family::NonPhysical)
            .map(|f| {
                let inherited: f64 = f
                    .parents
                    .iter()
                    .map(|&p| self.front(p))
                    .filter(|p| p.family == Family::NonPhysical)
                    .map(|p| p.strength)
                    .sum();
                (f.strength - inherited).max(0.0)
            })
            .sum();
        self.np_dropped + shed
    }

    /// Fronts alive at time `t`, sorted left to right. At an event time the
    /// post-event population is returned (births are closed, deaths open).
    pub fn live_fronts_at(&self, t: f64) -> Vec<&FrontRecord> {
        let mut live: Vec<&FrontRecord> =
            self.fronts.iter().filter(|f| f.alive_at(t)).collect();
        live.sort_by(|a, b| {
            a.position_at(t)
                .total_cmp(&b.position_at(t))
                .then(a.birth_t.total_cmp(&b.birth_t))
                .then(a.id.cmp(&b.id))
        });
        live
    }

    /// Profile at time `t` as a step function. Coincident front positions
    /// (transient ties at roundoff scale) are folded into a single jump.
    pub fn sample(&self, t: f64) -> StepFunction {
        let live = self.live_fronts_at(t);
        if live.is_empty() {
            return StepFunction::constant(self.left_state);
        }
        let mut bp: Vec<f64> = Vec::with_capacity(live.len());
        let mut vals: Vec<State> = Vec::with_capacity(live.len() + 1);
        vals.push(self.left_state);
        for f in &live {
            let x = f.position_at(t);
            if bp.last().is_some_and(|&b| !(b < x)) {
                *vals.last_mut().unwrap() = f.right;
            } else {
                bp.push(x);
                vals.push(f.right);
            }
        }
        StepFunction::new(bp, vals).expect("live fronts yield a valid step function")
    }

    /// Sum of strengths over live fronts at `t`, split by family
    /// `[1, 2, 3, non-physical]`.
    pub fn strength_by_family_at(&self, t: f64) -> [f64; 4] {
        let mut s = [0.0; 4];
        for f in self.fronts.iter().filter(|f| f.alive_at(t)) {
            s[f.family.rank() as usize - 1] += f.strength;
        }
        s
    }
}
