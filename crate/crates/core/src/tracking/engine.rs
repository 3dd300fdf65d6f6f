//! The wave-front tracking engine.
//!
//! The approximate solution is a finite set of straight-line fronts.
//! Between interactions nothing happens; the engine jumps from collision to
//! collision with an event queue. Each event consumes the participating
//! fronts and emits the fronts of a local Riemann solution — either the
//! accurate one, or (when the product of incoming strengths is below
//! `thresh_simplified`) a simplified one that preserves the incoming wave
//! parameters exactly and dumps the unresolved remainder into a
//! non-physical front moving at `np_speed`, faster than every
//! characteristic.
//!
//! Determinism: the queue is keyed by `(t, x, insertion sequence)` under a
//! total order, ties resolve leftmost-first, and no iteration order depends
//! on hashing, so repeated runs are bit-identical.
//!
//! Stale queue entries are skipped lazily: an entry fires only if both its
//! fronts are still alive and still adjacent. Front trajectories never
//! change after birth (a front surviving an interaction is reborn with a
//! fresh id), which is what makes the lazy check sufficient.

use crate::error::{Error, Result};
use crate::riemann::{self, Family, Wave, WaveKind};
use crate::state::State;
use crate::system::{self, SystemParams};
use crate::tracking::solution::{EventKind, EventRecord, FrontRecord, FtSolution};
use crate::tracking::step::StepFunction;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Speed differences below this are treated as parallel motion: no
/// collision is scheduled. Keeps degenerate near-ties (at the rounding
/// scale of the characteristic speeds) from generating zero-advance events.
const SPEED_EPS: f64 = 1e-13;

/// Interval of events between full recomputations of the Glimm functional
/// (it is maintained incrementally in between).
const GLIMM_REFRESH: usize = 1024;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FtParams {
    /// Maximum strength of a single rarefaction front; stronger fans are
    /// split into equal pieces.
    pub delta_rar: f64,
    /// Interactions with strength product below this threshold are
    /// resolved by the simplified solver.
    pub thresh_simplified: f64,
    /// Speed of non-physical fronts; must exceed every characteristic
    /// speed (all of which lie in `[-6, 5]`).
    pub np_speed: f64,
    pub t_end: f64,
    /// Budget on the total number of fronts ever created; exceeding it
    /// stops the run with the `truncated` flag set.
    pub max_fronts: usize,
    /// Fronts leaving `[-clip, clip]` are retired.
    pub clip: f64,
    /// An extreme front emitted off a middle front at least this strong
    /// — with no incoming front of its own family to continue — counts
    /// as a reflection and starts the next generation. `INFINITY`
    /// disables lineage.
    pub big2_threshold: f64,
    /// Weight of the interaction potential in `F = V + C·Q`.
    pub glimm_c: f64,
    /// Waves weaker than this are dropped outright (their jump lands in
    /// the event's non-physical remainder).
    pub strength_floor: f64,
}

impl FtParams {
    pub fn new(delta_rar: f64, t_end: f64) -> FtParams {
        FtParams {
            delta_rar,
            thresh_simplified: delta_rar * delta_rar * delta_rar,
            np_speed: riemann::NONPHYSICAL_SPEED,
            t_end,
            max_fronts: 2_000_000,
            clip: f64::INFINITY,
            big2_threshold: f64::INFINITY,
            glimm_c: 100.0,
            strength_floor: 1e-15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam(msg));
        if !(self.delta_rar > 0.0 && self.delta_rar.is_finite()) {
            return bad(format!("delta_rar = {} must be positive", self.delta_rar));
        }
        if !(self.thresh_simplified > 0.0) {
            return bad(format!(
                "thresh_simplified = {} must be positive",
                self.thresh_simplified
            ));
        }
        if !(self.np_speed > 5.0) {
            return bad(format!(
                "np_speed = {} must exceed the fastest characteristic",
                self.np_speed
            ));
        }
        if !(self.t_end >= 0.0) {
            return bad(format!("t_end = {} must be non-negative", self.t_end));
        }
        if self.max_fronts == 0 {
            return bad("max_fronts must be at least 1".into());
        }
        if !(self.clip > 0.0) {
            return bad(format!("clip = {} must be positive", self.clip));
        }
        if !(self.glimm_c >= 0.0) {
            return bad(format!("glimm_c = {} must be non-negative", self.glimm_c));
        }
        if !(self.strength_floor >= 0.0 && self.strength_floor < self.delta_rar) {
            return bad(format!(
                "strength_floor = {} must sit in [0, delta_rar)",
                self.strength_floor
            ));
        }
        Ok(())
    }
}

/// Whether the ordered pair (`a` strictly left of `b`) approaches: faster
/// family on the left, or same physical family with at least one shock.
fn approaching(a: &FrontRecord, b: &FrontRecord) -> bool {
    let (ra, rb) = (a.family.rank(), b.family.rank());
    if ra != rb {
        ra > rb
    } else if a.family.is_physical() {
        a.kind == WaveKind::Shock || b.kind == WaveKind::Shock
    } else {
        false
    }
}

fn pair_q(a: &FrontRecord, b: &FrontRecord) -> f64 {
    if approaching(a, b) {
        a.strength * b.strength
    } else {
        0.0
    }
}

/// Total strength V, interaction potential Q and Glimm functional
/// `F = V + c·Q` of a left-to-right front population.
pub fn glimm_functional(fronts: &[&FrontRecord], c: f64) -> (f64, f64, f64) {
    let v: f64 = fronts.iter().map(|f| f.strength).sum();
    let mut q = 0.0;
    for i in 0..fronts.len() {
        for j in i + 1..fronts.len() {
            q += pair_q(fronts[i], fronts[j]);
        }
    }
    (v, q, v + c * q)
}

/// Meeting point of two fronts, or `None` when the left one does not catch
/// the right one. Positions may briefly overlap by roundoff after a
/// many-front event; the meeting time is clamped forward.
fn meet(a: &FrontRecord, b: &FrontRecord) -> Option<(f64, f64)> {
    let ds = a.speed - b.speed;
    if !(ds > SPEED_EPS) {
        return None;
    }
    let t0 = a.birth_t.max(b.birth_t);
    let dt = ((b.position_at(t0) - a.position_at(t0)) / ds).max(0.0);
    let t = t0 + dt;
    Some((t, 0.5 * (a.position_at(t) + b.position_at(t))))
}

#[derive(Clone, Copy, Debug)]
enum Trigger {
    Collide(u32, u32),
    Exit(u32),
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    t: f64,
    x: f64,
    seq: u64,
    trigger: Trigger,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Entry) -> bool {
        self.cmp(o) == std::cmp::Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Entry) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    fn cmp(&self, o: &Entry) -> std::cmp::Ordering {
        self.t
            .total_cmp(&o.t)
            .then(self.x.total_cmp(&o.x))
            .then(self.seq.cmp(&o.seq))
    }
}

struct Seed {
    family: Family,
    kind: WaveKind,
    strength: f64,
    left: State,
    right: State,
    speed: f64,
}

/// Convert solver waves into front seeds: shocks travel at their RH speed,
/// rarefactions are split into at most `delta_rar`-strong pieces each
/// travelling at the characteristic speed of its right state, non-physical
/// jumps travel at `np_speed`.
fn seeds_from_waves(waves: &[Wave], p: &FtParams, sys: SystemParams) -> Result<Vec<Seed>> {
    let mut out = Vec::with_capacity(waves.len());
    for w in waves {
        match w.kind {
            WaveKind::Shock => out.push(Seed {
                family: w.family,
                kind: w.kind,
                strength: w.strength,
                left: w.left,
                right: w.right,
                speed: w.speed_lo,
            }),
            WaveKind::NonPhysical => out.push(Seed {
                family: w.family,
                kind: w.kind,
                strength: w.strength,
                left: w.left,
                right: w.right,
                speed: p.np_speed,
            }),
            WaveKind::Rarefaction => {
                let fam = w.family.index();
                let n = ((w.strength / p.delta_rar).ceil() as usize).max(1);
                let piece = w.strength / n as f64;
                let mut cur = w.left;
                for k in 0..n {
                    let next = if k + 1 == n {
                        w.right
                    } else {
                        riemann::rarefaction_state(fam, piece, cur, sys)?
                    };
                    out.push(Seed {
                        family: w.family,
                        kind: WaveKind::Rarefaction,
                        strength: piece,
                        left: cur,
                        right: next,
                        speed: system::lambda(fam, next, sys),
                    });
                    cur = next;
                }
            }
        }
    }
    Ok(out)
}

/// Fronts of the initial datum: an accurate Riemann solution at every
/// breakpoint, rarefactions split. Generation 0, no parents.
pub fn initial_fronts(
    datum: &StepFunction,
    p: &FtParams,
    sys: SystemParams,
) -> Result<Vec<FrontRecord>> {
    p.validate()?;
    let mut recs: Vec<FrontRecord> = Vec::new();
    for (k, &x) in datum.breakpoints().iter().enumerate() {
        let l = datum.values()[k];
        let r = datum.values()[k + 1];
        if (r - l).norm() <= p.strength_floor {
            continue;
        }
        let sol = riemann::solve_riemann(l, r, sys)?;
        for s in seeds_from_waves(&sol.waves, p, sys)? {
            recs.push(FrontRecord {
                id: recs.len() as u32,
                family: s.family,
                kind: s.kind,
                birth_t: 0.0,
                birth_x: x,
                death_t: None,
                death_x: None,
                speed: s.speed,
                strength: s.strength,
                left: s.left,
                right: s.right,
                generation: 0,
                parents: Vec::new(),
            });
        }
    }
    Ok(recs)
}

struct Tracker<'a> {
    p: &'a FtParams,
    sys: SystemParams,
    recs: Vec<FrontRecord>,
    alive: Vec<bool>,
    prev: Vec<Option<u32>>,
    next: Vec<Option<u32>>,
    head: Option<u32>,
    heap: BinaryHeap<Reverse<Entry>>,
    seq: u64,
    now: f64,
    v: f64,
    q: f64,
    events: Vec<EventRecord>,
    truncated: bool,
    np_dropped: f64,
}

impl<'a> Tracker<'a> {
    fn new(initial: Vec<FrontRecord>, p: &'a FtParams, sys: SystemParams) -> Tracker<'a> {
        let n = initial.len();
        let mut tr = Tracker {
            p,
            sys,
            recs: initial,
            alive: vec![true; n],
            prev: vec![None; n],
            next: vec![None; n],
            head: None,
            heap: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            v: 0.0,
            q: 0.0,
            events: Vec::new(),
            truncated: false,
            np_dropped: 0.0,
        };
        for i in 0..n {
            if i > 0 {
                tr.prev[i] = Some(i as u32 - 1);
            }
            if i + 1 < n {
                tr.next[i] = Some(i as u32 + 1);
            }
        }
        if n > 0 {
            tr.head = Some(0);
        }
        let order = tr.order();
        let refs: Vec<&FrontRecord> = order.iter().map(|&i| &tr.recs[i as usize]).collect();
        let (v, q, _) = glimm_functional(&refs, p.glimm_c);
        tr.v = v;
        tr.q = q;
        for pair in order.windows(2) {
            tr.schedule_pair(Some(pair[0]), Some(pair[1]));
        }
        for &i in &order {
            tr.schedule_exit(i);
        }
        tr
    }

    fn order(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.recs.len());
        let mut cur = self.head;
        while let Some(i) = cur {
            out.push(i);
            cur = self.next[i as usize];
        }
        out
    }

    fn rec(&self, id: u32) -> &FrontRecord {
        &self.recs[id as usize]
    }

    fn push_entry(&mut self, t: f64, x: f64, trigger: Trigger) {
        let seq = self.seq;
        self.seq += 1;
        self.heap.push(Reverse(Entry { t, x, seq, trigger }));
    }

    fn schedule_pair(&mut self, l: Option<u32>, r: Option<u32>) {
        let (Some(l), Some(r)) = (l, r) else { return };
        let Some((t, x)) = meet(self.rec(l), self.rec(r)) else {
            return;
        };
        let t = t.max(self.now);
        if t <= self.p.t_end {
            self.push_entry(t, x, Trigger::Collide(l, r));
        }
    }

    fn schedule_exit(&mut self, id: u32) {
        if !self.p.clip.is_finite() {
            return;
        }
        let r = self.rec(id);
        let (t, x) = if r.speed > 0.0 {
            ((self.p.clip - r.birth_x) / r.speed + r.birth_t, self.p.clip)
        } else if r.speed < 0.0 {
            (
                (-self.p.clip - r.birth_x) / r.speed + r.birth_t,
                -self.p.clip,
            )
        } else {
            return;
        };
        let t = t.max(self.now);
        if t <= self.p.t_end {
            self.push_entry(t, x, Trigger::Exit(id));
        }
    }

    /// Remove `run` (contiguous in list order) and insert `outgoing` in its
    /// place, updating V and Q incrementally with one pass over the list.
    fn replace_run(&mut self, run: &[u32], outgoing: &[u32]) {
        let order = self.order();
        let i0 = order
            .iter()
            .position(|&i| i == run[0])
            .expect("run head is live");
        let i1 = i0 + run.len() - 1;
        debug_assert_eq!(&order[i0..=i1], run, "run must be contiguous");
        for (idx, &id) in order.iter().enumerate() {
            if idx >= i0 && idx <= i1 {
                continue;
            }
            for &p in run {
                self.q -= if idx < i0 {
                    pair_q(self.rec(id), self.rec(p))
                } else {
                    pair_q(self.rec(p), self.rec(id))
                };
            }
            for &o in outgoing {
                self.q += if idx < i0 {
                    pair_q(self.rec(id), self.rec(o))
                } else {
                    pair_q(self.rec(o), self.rec(id))
                };
            }
        }
        for a in 0..run.len() {
            self.v -= self.rec(run[a]).strength;
            for b in a + 1..run.len() {
                self.q -= pair_q(self.rec(run[a]), self.rec(run[b]));
            }
        }
        for a in 0..outgoing.len() {
            self.v += self.rec(outgoing[a]).strength;
            for b in a + 1..outgoing.len() {
                self.q += pair_q(self.rec(outgoing[a]), self.rec(outgoing[b]));
            }
        }

        // splice the linked order
        let before = self.prev[run[0] as usize];
        let after = self.next[*run.last().unwrap() as usize];
        for &id in run {
            self.alive[id as usize] = false;
        }
        let mut cursor = before;
        for &id in outgoing {
            match cursor {
                Some(c) => self.next[c as usize] = Some(id),
                None => self.head = Some(id),
            }
            self.prev[id as usize] = cursor;
            cursor = Some(id);
        }
        match cursor {
            Some(c) => self.next[c as usize] = after,
            None => self.head = after,
        }
        if let Some(a) = after {
            self.prev[a as usize] = cursor;
        }
    }

    fn refresh_glimm(&mut self) {
        let order = self.order();
        let refs: Vec<&FrontRecord> = order.iter().map(|&i| &self.recs[i as usize]).collect();
        let (v, q, _) = glimm_functional(&refs, self.p.glimm_c);
        debug_assert!(
            (v - self.v).abs() <= 1e-6 * (1.0 + v.abs())
                && (q - self.q).abs() <= 1e-6 * (1.0 + q.abs()),
            "incremental Glimm bookkeeping drifted: V {v} vs {}, Q {q} vs {}",
            self.v,
            self.q
        );
        self.v = v;
        self.q = q;
    }

    /// Gather the maximal contiguous run of fronts converging on `(t, x)`.
    fn gather(&self, mut run: Vec<u32>, t: f64, x: f64) -> Vec<u32> {
        let tol = 1e-12 * (1.0 + x.abs() + 12.0 * t);
        loop {
            let first = run[0];
            let Some(c) = self.prev[first as usize] else {
                break;
            };
            let cr = self.rec(c);
            if cr.speed > self.rec(first).speed && (cr.position_at(t) - x).abs() <= tol {
                run.insert(0, c);
            } else {
                break;
            }
        }
        loop {
            let last = *run.last().unwrap();
            let Some(d) = self.next[last as usize] else {
                break;
            };
            let dr = self.rec(d);
            if dr.speed < self.rec(last).speed && (dr.position_at(t) - x).abs() <= tol {
                run.push(d);
            } else {
                break;
            }
        }
        run
    }

    fn process(&mut self, e: Entry) -> Result<()> {
        match e.trigger {
            Trigger::Exit(id) => {
                if !self.alive[id as usize] {
                    return Ok(());
                }
                self.now = e.t;
                let before = self.prev[id as usize];
                let after = self.next[id as usize];
                self.replace_run(&[id], &[]);
                self.recs[id as usize].death_t = Some(e.t);
                self.recs[id as usize].death_x = Some(e.x);
                self.record_event(e.t, e.x, EventKind::Exit, vec![id], Vec::new(), false);
                self.schedule_pair(before, after);
                Ok(())
            }
            Trigger::Collide(l, r) => {
                if !self.alive[l as usize] || !self.alive[r as usize] {
                    return Ok(());
                }
                if self.next[l as usize] != Some(r) {
                    return Ok(());
                }
                self.now = e.t;
                let run = self.gather(vec![l, r], e.t, e.x);
                self.resolve(e.t, e.x, run)
            }
        }
    }

    fn resolve(&mut self, t: f64, x: f64, run: Vec<u32>) -> Result<()> {
        let ul = self.rec(run[0]).left;
        let ur = self.rec(*run.last().unwrap()).right;

        let mut sums = [0.0f64; 3];
        // Pairwise interaction weight of the run: for two fronts this is the
        // usual strength product; for a gather it keeps a focal collapse of
        // many small fronts (whose raw product underflows) on the accurate
        // path, so its composition defect is resolved instead of shed.
        let mut weight = 0.0;
        let mut strength_sum = 0.0;
        let mut has_np = false;
        let mut has_big2 = false;
        let mut has_extreme = false;
        let mut pos = [false; 3];
        let mut neg = [false; 3];
        let mut gen = 0u32;
        let mut fam_gen: [Option<u32>; 3] = [None; 3];
        for &id in &run {
            let r = self.rec(id);
            if r.family == Family::NonPhysical {
                has_np = true;
                continue;
            }
            gen = gen.max(r.generation);
            let k = r.family.index() - 1;
            fam_gen[k] = Some(fam_gen[k].map_or(r.generation, |g| g.max(r.generation)));
            let signed = match r.kind {
                WaveKind::Shock => -r.strength,
                _ => r.strength,
            };
            sums[k] += signed;
            weight += r.strength * strength_sum;
            strength_sum += r.strength;
            if signed > 0.0 {
                pos[k] = true;
            } else {
                neg[k] = true;
            }
            match r.family {
                Family::Two => has_big2 |= r.strength >= self.p.big2_threshold,
                _ => has_extreme = true,
            }
        }
        let cancellation = (0..3).any(|k| pos[k] && neg[k]);
        let bump = (has_big2 && has_extreme) as u32;

        let jump = ur - ul;
        let (waves, kind) = if jump.norm() <= self.p.strength_floor {
            self.np_dropped += jump.norm();
            (Vec::new(), EventKind::Simplified)
        } else if !has_np && weight >= self.p.thresh_simplified {
            (
                riemann::solve_riemann(ul, ur, self.sys)?.waves,
                EventKind::Accurate,
            )
        } else {
            for s in &mut sums {
                if s.abs() <= self.p.strength_floor {
                    *s = 0.0;
                }
            }
            let mut ws = riemann::solve_riemann_simplified(ul, ur, sums, self.sys)?.waves;
            // A non-physical remainder at roundoff scale is not worth a
            // front of its own: discard it but keep the discarded mass on
            // the books, so the reported noise total stays honest.
            for w in &ws {
                if !w.family.is_physical() && w.strength <= self.p.strength_floor {
                    self.np_dropped += w.strength;
                }
            }
            ws.retain(|w| w.family.is_physical() || w.strength > self.p.strength_floor);
            (ws, EventKind::Simplified)
        };

        let seeds = seeds_from_waves(&waves, self.p, self.sys)?;
        let mut outgoing = Vec::with_capacity(seeds.len());
        for s in seeds {
            let id = self.recs.len() as u32;
            // A front continuing its own family's lineage keeps that
            // lineage's generation; a genuinely new extreme front born off a
            // strong middle front is the next reflection. Anything else
            // (debris, remainders) carries the event's generation unchanged,
            // so unrelated lineages never inflate each other.
            let generation = match s.family {
                Family::One | Family::Three => match fam_gen[s.family.index() - 1] {
                    Some(g) => g,
                    None => gen + bump,
                },
                Family::Two => fam_gen[1].unwrap_or(gen),
                Family::NonPhysical => gen,
            };
            self.recs.push(FrontRecord {
                id,
                family: s.family,
                kind: s.kind,
                birth_t: t,
                birth_x: x,
                death_t: None,
                death_x: None,
                speed: s.speed,
                strength: s.strength,
                left: s.left,
                right: s.right,
                generation,
                parents: run.clone(),
            });
            self.alive.push(true);
            self.prev.push(None);
            self.next.push(None);
            outgoing.push(id);
        }

        let before = self.prev[run[0] as usize];
        let after = self.next[*run.last().unwrap() as usize];
        self.replace_run(&run, &outgoing);
        for &id in &run {
            self.recs[id as usize].death_t = Some(t);
            self.recs[id as usize].death_x = Some(x);
        }
        self.record_event(t, x, kind, run, outgoing.clone(), cancellation);

        match outgoing.first() {
            Some(&first) => {
                self.schedule_pair(before, Some(first));
                self.schedule_pair(Some(*outgoing.last().unwrap()), after);
            }
            None => self.schedule_pair(before, after),
        }
        for &id in &outgoing {
            self.schedule_exit(id);
        }
        if self.recs.len() > self.p.max_fronts {
            self.truncated = true;
        }
        Ok(())
    }

    fn record_event(
        &mut self,
        t: f64,
        x: f64,
        kind: EventKind,
        incoming: Vec<u32>,
        outgoing: Vec<u32>,
        cancellation: bool,
    ) {
        let f = self.v + self.p.glimm_c * self.q;
        self.events.push(EventRecord {
            t,
            x,
            kind,
            incoming,
            outgoing,
            v_total: self.v,
            q_total: self.q,
            f_total: f,
            cancellation,
        });
        if self.events.len() % GLIMM_REFRESH == 0 {
            self.refresh_glimm();
        }
    }
}

/// Run front tracking on `datum` up to `p.t_end`.
///
/// Never fails on the front budget: hitting `max_fronts` returns the
/// partial solution with `truncated` set. Errors indicate genuinely
/// unresolvable states (solver divergence, invalid parameters).
pub fn evolve(datum: &StepFunction, p: &FtParams, sys: SystemParams) -> Result<FtSolution> {
    let initial = initial_fronts(datum, p, sys)?;
    let initial_tv = datum.total_variation();
    let mut tracker = Tracker::new(initial, p, sys);
    let refs: Vec<&FrontRecord> = tracker
        .order()
        .iter()
        .map(|&i| &tracker.recs[i as usize])
        .collect();
    let (_, _, initial_f) = glimm_functional(&refs, p.glimm_c);
    drop(refs);

    if tracker.recs.len() > p.max_fronts {
        tracker.truncated = true;
    } else {
        while let Some(Reverse(e)) = tracker.heap.pop() {
            if e.t > p.t_end {
                break;
            }
            tracker.process(e)?;
            if tracker.truncated {
                break;
            }
        }
    }

    Ok(FtSolution {
        left_state: datum.left_limit(),
        fronts: tracker.recs,
        events: tracker.events,
        t_begin: 0.0,
        t_end: p.t_end,
        truncated: tracker.truncated,
        initial_tv,
        initial_f,
        np_dropped: tracker.np_dropped,
    })
}
