//! Piecewise-constant profiles: the data format shared by initial data,
//! front-tracking snapshots and the scenario builders.

use crate::error::{Error, Result};
use crate::state::State;
use serde::{Deserialize, Serialize};

/// A piecewise-constant function of `x` with values in state space:
/// `values[i]` on `(breakpoints[i-1], breakpoints[i])`, with `values[0]`
/// to the left of everything and `values.last()` to the right. Evaluation
/// at a breakpoint returns the right limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<State>,
}

impl StepFunction {
    pub fn constant(s: State) -> StepFunction {
        StepFunction {
            breakpoints: Vec::new(),
            values: vec![s],
        }
    }

    /// Requires strictly increasing finite breakpoints and exactly one more
    /// value than breakpoint.
    pub fn new(breakpoints: Vec<f64>, values: Vec<State>) -> Result<StepFunction> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidParam(format!(
                "step function needs {} values for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || values.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParam("non-finite step function data".into()));
        }
        if breakpoints.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidParam(
                "step function breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[State] {
        &self.values
    }

    pub fn value_at(&self, x: f64) -> State {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        self.values[i]
    }

    pub fn left_limit(&self) -> State {
        self.values[0]
    }

    pub fn right_limit(&self) -> State {
        *self.values.last().unwrap()
    }

    /// Total variation: sum of Euclidean jump norms.
    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|p| (p[1] - p[0]).norm()).sum()
    }

    /// Total variation of a single component (0 = u, 1 = v, 2 = w).
    pub fn total_variation_component(&self, k: usize) -> f64 {
        self.values
            .windows(2)
            .map(|p| (p[1].as_array()[k] - p[0].as_array()[k]).abs())
            .sum()
    }

    /// Drop jumps of norm ≤ `tol` by merging cells (keeps the left value).
    pub fn pruned(&self, tol: f64) -> StepFunction {
        let mut bp = Vec::with_capacity(self.breakpoints.len());
        let mut vals = vec![self.values[0]];
        for (i, &b) in self.breakpoints.iter().enumerate() {
            let next = self.values[i + 1];
            if (next - *vals.last().unwrap()).norm() > tol {
                bp.push(b);
                vals.push(next);
            }
        }
        StepFunction {
            breakpoints: bp,
            values: vals,
        }
    }

    /// Exact L¹ distance of the component-wise difference over `[lo, hi]`
    /// via the common refinement of the two cut sets.
    pub fn l1_distance(&self, other: &StepFunction, lo: f64, hi: f64) -> f64 {
        assert!(lo < hi, "empty integration window");
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut acc = 0.0;
        for pair in cuts.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            let d = self.value_at(mid) - other.value_at(mid);
            acc += (d.u.abs() + d.v.abs() + d.w.abs()) * (pair[1] - pair[0]);
        }
        acc
    }
}
