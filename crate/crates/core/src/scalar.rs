//! Entropy solutions of scalar uniformly convex conservation laws
//! `u_t + f(u)_x = 0` via the Lax–Oleĭnik variational formula, plus checkers
//! for the classical one-sided regularity estimates:
//!
//! * Oleĭnik: `u(t,b) - u(t,a) ≤ (b-a)/(t·c)` where `c = inf f''`;
//! * the two-sided lower companion `u(t,b) - u(t,a) ≥ -2(y₊-y₋)/(t·c)`
//!   in terms of the extreme backward characteristics `y∓` of `[a,b]`
//!   (Ambrosio–De Lellis);
//! * an empirical probe of Schaeffer-type genericity: finitely many shocks,
//!   count stable under small smooth perturbations of the datum.
//!
//! The value at `(t, x)` is `u = (f')⁻¹((x-y*)/t)` where `y*` minimises
//! `G(y) = ∫₀ʸ u₀ + t·L((x-y)/t)` and `L` is the Legendre transform of `f`.
//! Minimisers are located by a grid scan refined by golden-section search,
//! with brackets narrowed by the monotonicity of `y*` in `x`; for piecewise
//! constant data the per-piece stationary points and the kinks are also
//! evaluated in closed form, which makes Riemann problems exact.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// flux
// ---------------------------------------------------------------------------

/// Analytic form of a uniformly convex flux.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum FluxForm {
    /// `f(z) = a z² + b z`, `a > 0`. Legendre transform in closed form.
    Quadratic { a: f64, b: f64 },
    /// `f(z) = cosh z`; `f'' = cosh ≥ 1` everywhere, inverse slope `asinh`.
    Cosh,
    /// `f(z) = z⁴/4 + z²/2`; `f'' = 3z² + 1 ≥ 1`, inverse slope by bisection.
    Quartic,
}

/// A uniformly convex flux together with its convexity constant
/// `c_conv ≤ inf f''` on the working interval.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexFlux {
    pub form: FluxForm,
    pub c_conv: f64,
}

impl ConvexFlux {
    pub fn new(form: FluxForm, c_conv: f64) -> Result<Self> {
        if !(c_conv > 0.0) {
            return Err(Error::InvalidParam(format!(
                "convexity constant must be positive, got {c_conv}"
            )));
        }
        if let FluxForm::Quadratic { a, .. } = form {
            if !(a > 0.0) {
                return Err(Error::InvalidParam(format!(
                    "quadratic flux needs a > 0, got {a}"
                )));
            }
        }
        Ok(ConvexFlux { form, c_conv })
    }

    /// Burgers flux `z²/2` with `c_conv = 1`.
    pub fn burgers() -> Self {
        ConvexFlux {
            form: FluxForm::Quadratic { a: 0.5, b: 0.0 },
            c_conv: 1.0,
        }
    }

    /// The flux `z²` of the decoupled middle field of the 3x3 system
    /// (`c_conv = 2`).
    pub fn square() -> Self {
        ConvexFlux {
            form: FluxForm::Quadratic { a: 1.0, b: 0.0 },
            c_conv: 2.0,
        }
    }

    pub fn value(&self, z: f64) -> f64 {
        match self.form {
            FluxForm::Quadratic { a, b } => a * z * z + b * z,
            FluxForm::Cosh => z.cosh(),
            FluxForm::Quartic => 0.25 * z.powi(4) + 0.5 * z * z,
        }
    }

    pub fn deriv(&self, z: f64) -> f64 {
        match self.form {
            FluxForm::Quadratic { a, b } => 2.0 * a * z + b,
            FluxForm::Cosh => z.sinh(),
            FluxForm::Quartic => z.powi(3) + z,
        }
    }

    pub fn deriv2(&self, z: f64) -> f64 {
        match self.form {
            FluxForm::Quadratic { a, .. } => 2.0 * a,
            FluxForm::Cosh => z.cosh(),
            FluxForm::Quartic => 3.0 * z * z + 1.0,
        }
    }

    /// `sup f''` over `[-m, m]` (used for census thresholds).
    pub fn max_deriv2(&self, m: f64) -> f64 {
        match self.form {
            FluxForm::Quadratic { a, .. } => 2.0 * a,
            FluxForm::Cosh => m.abs().cosh(),
            FluxForm::Quartic => 3.0 * m * m + 1.0,
        }
    }

    /// Inverse of the (strictly increasing) derivative.
    pub fn inv_deriv(&self, xi: f64) -> Result<f64> {
        match self.form {
            FluxForm::Quadratic { a, b } => Ok((xi - b) / (2.0 * a)),
            FluxForm::Cosh => Ok(xi.asinh()),
            FluxForm::Quartic => {
                // expand a bracket, then bisect f'(z) = xi
                let mut r = 1.0 + xi.abs();
                let mut k = 0;
                while self.deriv(r) < xi {
                    r *= 2.0;
                    k += 1;
                    if k > 60 {
                        return Err(Error::BracketFailure(format!(
                            "inverse slope bracket did not close for xi={xi}"
                        )));
                    }
                }
                let (mut lo, mut hi) = (-r, r);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.deriv(mid) < xi {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// Legendre transform `L(ξ) = sup_z (ξz - f(z))`; closed form for the
    /// quadratic and cosh cases, stationary-point evaluation otherwise.
    pub fn legendre(&self, xi: f64) -> Result<f64> {
        match self.form {
            FluxForm::Quadratic { a, b } => Ok((xi - b) * (xi - b) / (4.0 * a)),
            FluxForm::Cosh => Ok(xi * xi.asinh() - (1.0 + xi * xi).sqrt()),
            FluxForm::Quartic => {
                let z = self.inv_deriv(xi)?;
                Ok(xi * z - self.value(z))
            }
        }
    }

    /// Sample `f''` on `[-m, m]` by central differences and reject if any
    /// sample drops below `c_conv / 2`.
    pub fn verify_convexity(&self, m: f64) -> Result<()> {
        let n = 129;
        for i in 0..n {
            let z = -m + 2.0 * m * (i as f64) / ((n - 1) as f64);
            let h = 1e-4 * (1.0 + z.abs());
            let dd = (self.value(z + h) - 2.0 * self.value(z) + self.value(z - h)) / (h * h);
            if dd < 0.5 * self.c_conv {
                return Err(Error::NonConvexFlux {
                    value: dd,
                    bound: 0.5 * self.c_conv,
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// initial data
// ---------------------------------------------------------------------------

/// Shape of an initial datum with an exact primitive.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ProfileShape {
    Constant(f64),
    /// `values[j]` on `(breaks[j-1], breaks[j])`; left-continuous at breaks.
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
    /// Nodes `(xs[i], us[i])`, linear in between, constant beyond the ends.
    PiecewiseLinear { xs: Vec<f64>, us: Vec<f64> },
    /// `amp · sin(freq·x + phase)`.
    Sin { amp: f64, freq: f64, phase: f64 },
    /// `-arctan x` (smooth decreasing datum, bound π/2).
    NegArctan,
    /// Pointwise sum of shapes (used for perturbed data).
    Sum(Vec<ProfileShape>),
}

impl ProfileShape {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ProfileShape::Constant(c) => *c,
            ProfileShape::PiecewiseConstant { breaks, values } => {
                let j = breaks.partition_point(|&b| b < x);
                values[j]
            }
            ProfileShape::PiecewiseLinear { xs, us } => {
                if x <= xs[0] {
                    return us[0];
                }
                if x >= xs[xs.len() - 1] {
                    return us[us.len() - 1];
                }
                let j = xs.partition_point(|&b| b < x);
                let (x0, x1) = (xs[j - 1], xs[j]);
                let th = (x - x0) / (x1 - x0);
                us[j - 1] + th * (us[j] - us[j - 1])
            }
            ProfileShape::Sin { amp, freq, phase } => amp * (freq * x + phase).sin(),
            ProfileShape::NegArctan => -x.atan(),
            ProfileShape::Sum(parts) => parts.iter().map(|s| s.eval(x)).sum(),
        }
    }

    /// Exact primitive `∫₀ˣ u₀(s) ds`.
    pub fn primitive(&self, x: f64) -> f64 {
        match self {
            ProfileShape::Constant(c) => c * x,
            ProfileShape::PiecewiseConstant { breaks, values } => {
                let (a, b, sign) = if x >= 0.0 {
                    (0.0, x, 1.0)
                } else {
                    (x, 0.0, -1.0)
                };
                sign * pwc_integral(breaks, values, a, b)
            }
            ProfileShape::PiecewiseLinear { xs, us } => {
                let (a, b, sign) = if x >= 0.0 {
                    (0.0, x, 1.0)
                } else {
                    (x, 0.0, -1.0)
                };
                sign * pwl_integral(xs, us, a, b)
            }
            ProfileShape::Sin { amp, freq, phase } => {
                amp / freq * (phase.cos() - (freq * x + phase).cos())
            }
            ProfileShape::NegArctan => -(x * x.atan() - 0.5 * (1.0 + x * x).ln()),
            ProfileShape::Sum(parts) => parts.iter().map(|s| s.primitive(x)).sum(),
        }
    }

    /// An upper bound on `sup |u₀|` (exact except for sums, where it is the
    /// triangle-inequality bound).
    pub fn bound(&self) -> f64 {
        match self {
            ProfileShape::Constant(c) => c.abs(),
            ProfileShape::PiecewiseConstant { values, .. } => {
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            ProfileShape::PiecewiseLinear { us, .. } => {
                us.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            ProfileShape::Sin { amp, .. } => amp.abs(),
            ProfileShape::NegArctan => std::f64::consts::FRAC_PI_2,
            ProfileShape::Sum(parts) => parts.iter().map(|s| s.bound()).sum(),
        }
    }
}

fn pwc_integral(breaks: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = a;
    for (j, &bp) in breaks.iter().enumerate() {
        if bp <= lo {
            continue;
        }
        let hi = bp.min(b);
        if hi > lo {
            total += values[j] * (hi - lo);
            lo = hi;
        }
        if bp >= b {
            break;
        }
    }
    if b > lo {
        let j = breaks.partition_point(|&bp| bp < b);
        total += values[j] * (b - lo);
    }
    total
}

fn pwl_integral(xs: &[f64], us: &[f64], a: f64, b: f64) -> f64 {
    let n = xs.len();
    let eval = |x: f64| -> f64 {
        if x <= xs[0] {
            us[0]
        } else if x >= xs[n - 1] {
            us[n - 1]
        } else {
            let j = xs.partition_point(|&p| p < x);
            us[j - 1] + (x - xs[j - 1]) / (xs[j] - xs[j - 1]) * (us[j] - us[j - 1])
        }
    };
    // segment boundaries clipped to (a, b); trapezoid rule is exact per piece
    let mut pts = vec![a];
    for &p in xs {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.push(b);
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += 0.5 * (eval(w[0]) + eval(w[1])) * (w[1] - w[0]);
    }
    total
}

/// An initial datum: shape, working interval, and the sup bound `M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalarProfile {
    pub shape: ProfileShape,
    pub x_lo: f64,
    pub x_hi: f64,
    pub bound: f64,
}

impl ScalarProfile {
    pub fn new(shape: ProfileShape, x_lo: f64, x_hi: f64) -> Result<Self> {
        if !(x_lo < x_hi) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::InvalidParam(format!(
                "working interval [{x_lo}, {x_hi}] is empty or not finite"
            )));
        }
        if let ProfileShape::PiecewiseConstant { breaks, values } = &shape {
            if values.len() != breaks.len() + 1 || breaks.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParam(
                    "piecewise-constant profile needs sorted breaks and breaks+1 values".into(),
                ));
            }
        }
        if let ProfileShape::PiecewiseLinear { xs, us } = &shape {
            if xs.len() != us.len() || xs.len() < 2 || xs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParam(
                    "piecewise-linear profile needs sorted nodes with matching values".into(),
                ));
            }
        }
        let bound = shape.bound();
        Ok(ScalarProfile {
            shape,
            x_lo,
            x_hi,
            bound,
        })
    }

    /// Two-state Riemann datum with the jump at `x = 0`.
    pub fn riemann(ul: f64, ur: f64, x_lo: f64, x_hi: f64) -> Result<Self> {
        ScalarProfile::new(
            ProfileShape::PiecewiseConstant {
                breaks: vec![0.0],
                values: vec![ul, ur],
            },
            x_lo,
            x_hi,
        )
    }

    /// Piecewise-constant reconstruction of a computed sample (cell edges at
    /// midpoints between sample positions); used for semigroup re-solves.
    pub fn from_sample(sample: &ScalarSolutionSample) -> Result<Self> {
        let xs = &sample.xs;
        let breaks: Vec<f64> = xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        ScalarProfile::new(
            ProfileShape::PiecewiseConstant {
                breaks,
                values: sample.us.clone(),
            },
            xs[0],
            xs[xs.len() - 1],
        )
    }
}

// ---------------------------------------------------------------------------
// Lax–Oleĭnik solver
// ---------------------------------------------------------------------------

/// Point samples of the entropy solution at one time, with the backward
/// minimizers that produced them. Carries its inputs so that the
/// characteristic map and the estimate checkers can re-solve at off-grid
/// positions.
#[derive(Clone, Debug)]
pub struct ScalarSolutionSample {
    pub t: f64,
    pub xs: Vec<f64>,
    pub us: Vec<f64>,
    /// Backward minimizers, non-decreasing (leftmost minimizer at ties).
    pub ys: Vec<f64>,
    pub flux: ConvexFlux,
    pub profile: ScalarProfile,
}

const GOLDEN_ITERS: usize = 90;
const SCAN_POINTS: usize = 256;

/// Minimise a unimodal-over-cell objective by golden-section search.
fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

struct PointSolver<'a> {
    flux: &'a ConvexFlux,
    profile: &'a ScalarProfile,
    t: f64,
    slow: f64, // f'(-M)
    fast: f64, // f'(M)
}

impl<'a> PointSolver<'a> {
    fn new(flux: &'a ConvexFlux, profile: &'a ScalarProfile, t: f64) -> Self {
        let m = profile.bound;
        PointSolver {
            flux,
            profile,
            t,
            slow: flux.deriv(-m),
            fast: flux.deriv(m),
        }
    }

    fn objective(&self, x: f64, y: f64) -> f64 {
        // Legendre evaluation cannot fail for the closed forms; the quartic
        // bisection only fails on absurd arguments, mapped to +inf so the
        // scan simply avoids them.
        let l = self.flux.legendre((x - y) / self.t).unwrap_or(f64::INFINITY);
        self.profile.shape.primitive(y) + self.t * l
    }

    /// Minimise `G(y)` for the sample position `x`, restricted to
    /// `y ≥ floor` (monotonicity of minimizers). Returns `(y*, u)`.
    fn solve_point(&self, x: f64, floor: f64) -> Result<(f64, f64)> {
        let best_y = if let ProfileShape::PiecewiseConstant { breaks, values } =
            &self.profile.shape
        {
            self.minimize_piecewise_constant(x, floor, breaks, values)
        } else {
            self.minimize_scan(x, floor)
        };
        let u = self.flux.inv_deriv((x - best_y) / self.t)?;
        Ok((best_y, u))
    }

    /// For piecewise-constant data `G` is strictly convex on each piece
    /// (`G'` there is `u_j - (f')⁻¹((x-y)/t)`, strictly increasing), so the
    /// global minimum is attained at a per-piece stationary point — the free
    /// characteristic `y = x - t·f'(u_j)` — or at a kink. Enumerating those
    /// exactly makes Riemann data bitwise clean; ties go to the leftmost
    /// candidate (left-continuous convention at shocks).
    fn minimize_piecewise_constant(
        &self,
        x: f64,
        floor: f64,
        breaks: &[f64],
        values: &[f64],
    ) -> f64 {
        let mut cands: Vec<f64> = Vec::with_capacity(breaks.len() + values.len() + 1);
        for (j, &uj) in values.iter().enumerate() {
            let y = x - self.t * self.flux.deriv(uj);
            let left_ok = j == 0 || breaks[j - 1] < y;
            let right_ok = j == breaks.len() || y < breaks[j];
            if left_ok && right_ok {
                cands.push(y);
            }
        }
        cands.extend_from_slice(breaks);
        if floor.is_finite() {
            cands.push(floor);
        }
        cands.sort_by(f64::total_cmp);
        let mut best_y = f64::NAN;
        let mut best_g = f64::INFINITY;
        for y in cands {
            if y < floor {
                continue;
            }
            let gy = self.objective(x, y);
            if gy < best_g {
                best_g = gy;
                best_y = y;
            }
        }
        best_y
    }

    /// General path: grid scan, golden-section refinement, then a polish
    /// that bisects the sign change of `G'(y) = u0(y) - (f')⁻¹((x-y)/t)`.
    /// The polish matters: value comparisons alone pin a smooth minimum only
    /// to ~sqrt(eps), while `G'` has O(1) slope there (and jumps through
    /// zero at kinks, so those are found too).
    fn minimize_scan(&self, x: f64, floor: f64) -> f64 {
        let pad = 1e-6 * (1.0 + x.abs() + self.t);
        let lo = (x - self.t * self.fast - pad).max(floor);
        let hi = (x - self.t * self.slow + pad).max(lo + pad);
        let g = |y: f64| self.objective(x, y);

        let n = SCAN_POINTS;
        let mut best_y = lo;
        let mut best_g = g(lo);
        for i in 1..=n {
            let y = lo + (hi - lo) * (i as f64) / (n as f64);
            let gy = g(y);
            if gy < best_g {
                best_g = gy;
                best_y = y;
            }
        }
        let cell = (hi - lo) / (n as f64);
        let (cell_lo, cell_hi) = ((best_y - cell).max(lo), (best_y + cell).min(hi));
        let refined = golden_min(&g, cell_lo, cell_hi);
        let g_refined = g(refined);
        if g_refined < best_g {
            best_g = g_refined;
            best_y = refined;
        }
        let dg = |y: f64| -> f64 {
            self.profile.shape.eval(y)
                - self
                    .flux
                    .inv_deriv((x - y) / self.t)
                    .unwrap_or(f64::INFINITY)
        };
        let (mut pa, mut pb) = (cell_lo, cell_hi);
        if dg(pa) < 0.0 && dg(pb) > 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (pa + pb);
                if dg(mid) < 0.0 {
                    pa = mid;
                } else {
                    pb = mid;
                }
            }
            let cand = 0.5 * (pa + pb);
            let g_cand = g(cand);
            // accept the polished point up to value noise: it refines the
            // same basin the scan selected
            if g_cand <= best_g + 1e-12 * (1.0 + best_g.abs()) {
                best_y = cand;
            }
        }
        best_y
    }
}

/// Solve the scalar law at time `t` on the sorted positions `xs`.
pub fn lax_oleinik_solve(
    flux: &ConvexFlux,
    u0: &ScalarProfile,
    t: f64,
    xs: &[f64],
) -> Result<ScalarSolutionSample> {
    if !(t > 0.0) {
        return Err(Error::InvalidParam(format!("time must be positive, got {t}")));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam(
            "sample positions must be strictly increasing".into(),
        ));
    }
    flux.verify_convexity(u0.bound + 1.0)?;

    let solver = PointSolver::new(flux, u0, t);
    let mut us = Vec::with_capacity(xs.len());
    let mut ys = Vec::with_capacity(xs.len());
    let mut floor = f64::NEG_INFINITY;
    for &x in xs {
        // every search path in solve_point is hard-bounded below by the
        // floor, so minimizer monotonicity holds by construction
        let (y, u) = solver.solve_point(x, floor)?;
        floor = y;
        ys.push(y);
        us.push(u);
    }

    let sample = ScalarSolutionSample {
        t,
        xs: xs.to_vec(),
        us,
        ys,
        flux: flux.clone(),
        profile: u0.clone(),
    };
    sample.validate()?;
    Ok(sample)
}

impl ScalarSolutionSample {
    fn validate(&self) -> Result<()> {
        if self.ys.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invariant(
                "backward minimizers are not monotone".into(),
            ));
        }
        let m = self.profile.bound + 1e-9 * (1.0 + self.profile.bound);
        if let Some(bad) = self.us.iter().find(|u| u.abs() > m) {
            return Err(Error::Invariant(format!(
                "sample value {bad} exceeds the datum bound {}",
                self.profile.bound
            )));
        }
        Ok(())
    }

    /// Re-solve at a single position (same time, same inputs).
    pub fn value_at(&self, x: f64) -> Result<(f64, f64)> {
        let solver = PointSolver::new(&self.flux, &self.profile, self.t);
        solver.solve_point(x, f64::NEG_INFINITY)
    }

    /// Median grid spacing (census thresholds scale with it).
    pub fn spacing(&self) -> f64 {
        let mut gaps: Vec<f64> = self.xs.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(f64::total_cmp);
        gaps[gaps.len() / 2]
    }
}

// ---------------------------------------------------------------------------
// characteristic map
// ---------------------------------------------------------------------------

/// Forward characteristic map `X(t, y)`: the free-flight position
/// `y + t·f'(u₀(y))` when `y` survives as a backward minimizer, otherwise
/// the position of the shock that swallowed `y` (located by bisection in
/// `x`). Monotone non-decreasing in `y`; left-continuous at shocks.
pub fn characteristic_map(sample: &ScalarSolutionSample, y: f64) -> Result<f64> {
    let solver = PointSolver::new(&sample.flux, &sample.profile, sample.t);
    let t = sample.t;
    let x_free = y + t * sample.flux.deriv(sample.profile.shape.eval(y));
    let tol = 1e-10 * (1.0 + y.abs() + x_free.abs());
    // free iff y is (one of) the minimizer(s) at its own free-flight position
    let (y_star, _) = solver.solve_point(x_free, f64::NEG_INFINITY)?;
    if (y_star - y).abs() <= tol || same_objective(&solver, x_free, y_star, y) {
        return Ok(x_free);
    }

    // swallowed: find the x whose minimizer interval straddles y. The
    // minimizer map x ↦ y*(x) is monotone, so bisect on y*(x) < y.
    let m = sample.profile.bound;
    let mut lo = y - t * sample.flux.deriv(m).abs() - 1.0;
    let mut hi = y + t * sample.flux.deriv(-m).abs() + t * sample.flux.deriv(m).abs() + 1.0;
    let (y_lo, _) = solver.solve_point(lo, f64::NEG_INFINITY)?;
    if y_lo >= y {
        return Err(Error::BracketFailure(format!(
            "characteristic map: no sampled x has minimizer left of y={y}; widen the range"
        )));
    }
    let (y_hi, _) = solver.solve_point(hi, f64::NEG_INFINITY)?;
    if y_hi <= y {
        return Err(Error::BracketFailure(format!(
            "characteristic map: no sampled x has minimizer right of y={y}; widen the range"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (ym, _) = solver.solve_point(mid, f64::NEG_INFINITY)?;
        if ym < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * (1.0 + lo.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn same_objective(solver: &PointSolver, x: f64, y_star: f64, y: f64) -> bool {
    // y attains (numerically) the same minimum as y_star: also counts as free
    let g_star = solver.objective(x, y_star);
    let g_y = solver.objective(x, y);
    (g_y - g_star).abs() <= 1e-11 * (1.0 + g_star.abs())
}

// ---------------------------------------------------------------------------
// regularity estimate checkers
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OleinikReport {
    /// `max over pairs a<b of (u(t,b)-u(t,a))·t·c_conv/(b-a)`; passing means
    /// `≤ 1 + tol`. (The maximum over all pairs equals the maximum over
    /// adjacent pairs: difference quotients over a chain are convex
    /// combinations of the per-link quotients.)
    pub max_ratio: f64,
    pub witness: Option<(f64, f64)>,
    pub pass: bool,
}

/// One-sided Lipschitz (Oleĭnik) check: `u(t,b)-u(t,a) ≤ (b-a)/(t·c)`.
pub fn check_oleinik(sample: &ScalarSolutionSample, flux: &ConvexFlux, tol: f64) -> OleinikReport {
    let mut max_ratio = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 1..sample.xs.len() {
        let (a, b) = (sample.xs[i - 1], sample.xs[i]);
        let ratio = (sample.us[i] - sample.us[i - 1]) * sample.t * flux.c_conv / (b - a);
        if ratio > max_ratio {
            max_ratio = ratio;
            witness = Some((a, b));
        }
    }
    OleinikReport {
        max_ratio,
        witness,
        pass: max_ratio <= 1.0 + tol,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdlReport {
    pub lhs: f64,
    pub rhs: f64,
    pub y_minus: f64,
    pub y_plus: f64,
    pub pass: bool,
}

/// Lower one-sided estimate on `[a, b]`:
/// `u(t,b) - u(t,a) ≥ -2(y₊ - y₋)/(t·c)` where `y₋ = sup{y : X(t,y) < a}`
/// and `y₊ = inf{y : X(t,y) > b}` are the extreme backward characteristics.
pub fn check_adl_lower(
    sample: &ScalarSolutionSample,
    flux: &ConvexFlux,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<AdlReport> {
    if !(a < b) {
        return Err(Error::InvalidParam(format!("need a < b, got {a}, {b}")));
    }
    let t = sample.t;
    let m = sample.profile.bound;
    let span = t * (flux.deriv(m).abs() + flux.deriv(-m).abs()) + 1.0;

    // y_minus: bisection on the monotone predicate X(y) < a
    let y_minus = bisect_characteristic(sample, a, span, true)?;
    let y_plus = bisect_characteristic(sample, b, span, false)?;

    let (_, ua) = sample.value_at(a)?;
    let (_, ub) = sample.value_at(b)?;
    let lhs = ub - ua;
    let rhs = -2.0 * (y_plus - y_minus) / (t * flux.c_conv);
    Ok(AdlReport {
        lhs,
        rhs,
        y_minus,
        y_plus,
        pass: lhs >= rhs - tol,
    })
}

/// `sup{y : X(y) < target}` when `upper` is true, `inf{y : X(y) > target}`
/// otherwise.
fn bisect_characteristic(
    sample: &ScalarSolutionSample,
    target: f64,
    span: f64,
    upper: bool,
) -> Result<f64> {
    let mut lo = target - span;
    let mut hi = target + span;
    let x_lo = characteristic_map(sample, lo)?;
    let x_hi = characteristic_map(sample, hi)?;
    if upper && !(x_lo < target) || !upper && !(x_hi > target) {
        return Err(Error::BracketFailure(format!(
            "characteristic bracket [{lo}, {hi}] does not straddle {target}"
        )));
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        let x_mid = characteristic_map(sample, mid)?;
        let keep_low = if upper { x_mid < target } else { !(x_mid > target) };
        if keep_low {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-11 * (1.0 + lo.abs()) {
            break;
        }
    }
    Ok(if upper { lo } else { hi })
}

// ---------------------------------------------------------------------------
// shock census and genericity probe
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShockDetection {
    pub position: f64,
    /// Signed jump `u(x⁺) - u(x⁻)`; entropy makes every detection negative.
    pub jump: f64,
}

/// Detect shocks in a sample: runs of cells with a decreasing jump steeper
/// than both `jump_threshold` and `slope_cap·h` (the cap separates genuine
/// jumps from rarefaction gradients `~1/(t·c)`); adjacent detections merge.
pub fn shock_census(
    sample: &ScalarSolutionSample,
    jump_threshold: f64,
    slope_cap: f64,
) -> Vec<ShockDetection> {
    let mut out = Vec::new();
    let n = sample.xs.len();
    let mut i = 1;
    while i < n {
        let h = sample.xs[i] - sample.xs[i - 1];
        let du = sample.us[i] - sample.us[i - 1];
        if du < -jump_threshold.max(slope_cap * h) {
            // extend the run over consecutive flagged cells
            let start = i - 1;
            let mut end = i;
            let mut steepest = (i, du);
            while end + 1 < n {
                let h2 = sample.xs[end + 1] - sample.xs[end];
                let du2 = sample.us[end + 1] - sample.us[end];
                if du2 < -jump_threshold.max(slope_cap * h2) {
                    end += 1;
                    if du2 < steepest.1 {
                        steepest = (end, du2);
                    }
                } else {
                    break;
                }
            }
            out.push(ShockDetection {
                position: 0.5 * (sample.xs[steepest.0 - 1] + sample.xs[steepest.0]),
                jump: sample.us[end] - sample.us[start],
            });
            i = end + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Default census threshold: `10·h·sup|f''|·TV(sample)`.
pub fn default_jump_threshold(sample: &ScalarSolutionSample, flux: &ConvexFlux) -> f64 {
    let tv: f64 = sample.us.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    10.0 * sample.spacing() * flux.max_deriv2(sample.profile.bound) * tv.max(1e-30)
}

/// Default slope cap: twice the Oleĭnik bound `1/(t·c)` — smooth pieces of
/// the entropy solution can never decrease that fast.
pub fn default_slope_cap(flux: &ConvexFlux, t: f64) -> f64 {
    2.0 / (t * flux.c_conv)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeTrial {
    pub trial: usize,
    /// Census cardinality per probe time at the full amplitude.
    pub counts: Vec<usize>,
    /// Census cardinality per probe time at half amplitude (same draw).
    pub counts_halved: Vec<usize>,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub times: Vec<f64>,
    pub amplitude: f64,
    pub trials: Vec<ProbeTrial>,
    pub all_stable: bool,
}

/// Empirical genericity probe: perturb the datum by a random finite Fourier
/// sum with decaying coefficients (seeded), census the shocks at each probe
/// time, halve the amplitude keeping the same draw, and flag any trial whose
/// census cardinality changes.
pub fn schaeffer_probe(
    flux: &ConvexFlux,
    u0: &ScalarProfile,
    times: &[f64],
    trials: usize,
    amplitude: f64,
    seed: u64,
) -> Result<ProbeReport> {
    if times.iter().any(|&t| t <= 0.0) {
        return Err(Error::InvalidParam("probe times must be positive".into()));
    }
    let period = u0.x_hi - u0.x_lo;
    let base_freq = 2.0 * std::f64::consts::PI / period;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        times: times.to_vec(),
        amplitude,
        trials: Vec::with_capacity(trials),
        all_stable: true,
    };
    let n_grid = 1201;
    let xs: Vec<f64> = (0..n_grid)
        .map(|i| u0.x_lo + period * (i as f64) / ((n_grid - 1) as f64))
        .collect();
    for trial in 0..trials {
        let modes: Vec<(f64, f64, f64)> = (1..=6)
            .map(|m| {
                let rho: f64 = rng.gen_range(-1.0..1.0);
                let phase: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                (rho / (m * m) as f64, base_freq * m as f64, phase)
            })
            .collect();
        let perturbed = |scale: f64| -> Result<ScalarProfile> {
            let mut parts = vec![u0.shape.clone()];
            for &(amp_rel, freq, phase) in &modes {
                parts.push(ProfileShape::Sin {
                    amp: amplitude * scale * amp_rel,
                    freq,
                    phase,
                });
            }
            ScalarProfile::new(ProfileShape::Sum(parts), u0.x_lo, u0.x_hi)
        };
        let census_counts = |profile: &ScalarProfile| -> Result<Vec<usize>> {
            times
                .iter()
                .map(|&t| {
                    let sample = lax_oleinik_solve(flux, profile, t, &xs)?;
                    let thr = default_jump_threshold(&sample, flux);
                    let cap = default_slope_cap(flux, t);
                    Ok(shock_census(&sample, thr, cap).len())
                })
                .collect()
        };
        let counts = census_counts(&perturbed(1.0)?)?;
        let counts_halved = census_counts(&perturbed(0.5)?)?;
        let stable = counts == counts_halved;
        report.all_stable &= stable;
        report.trials.push(ProbeTrial {
            trial,
            counts,
            counts_halved,
            stable,
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// discrete L¹ helper
// ---------------------------------------------------------------------------

/// Exact L¹ distance between the piecewise-constant reconstructions of two
/// samples (cell edges at midpoints), over the overlap of their spans.
pub fn sample_l1_distance(s1: &ScalarSolutionSample, s2: &ScalarSolutionSample) -> f64 {
    let lo = s1.xs[0].max(s2.xs[0]);
    let hi = s1.xs[s1.xs.len() - 1].min(s2.xs[s2.xs.len() - 1]);
    if lo >= hi {
        return 0.0;
    }
    let edges = |s: &ScalarSolutionSample| -> Vec<f64> {
        s.xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    };
    let e1 = edges(s1);
    let e2 = edges(s2);
    let mut cuts: Vec<f64> = e1
        .iter()
        .chain(e2.iter())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let value = |s: &ScalarSolutionSample, edges: &[f64], x: f64| -> f64 {
        let j = edges.partition_point(|&e| e < x);
        s.us[j]
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        total += (value(s1, &e1, mid) - value(s2, &e2, mid)).abs() * (w[1] - w[0]);
    }
    total
}
