//! Small fixed-size linear algebra for 3-component states.
//!
//! Nothing here knows about any particular flux; it is the arithmetic layer
//! shared by the system, Riemann and tracking modules.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Conserved state `(u, v, w)` of the 3x3 system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

pub const ZERO_STATE: State = State { u: 0.0, v: 0.0, w: 0.0 };

impl State {
    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        State { u, v, w }
    }

    pub fn norm(self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    pub fn dot(self, o: State) -> f64 {
        self.u * o.u + self.v * o.v + self.w * o.w
    }

    pub fn is_finite(self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.is_finite()
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }
}

impl Add for State {
    type Output = State;
    fn add(self, o: State) -> State {
        State::new(self.u + o.u, self.v + o.v, self.w + o.w)
    }
}

impl AddAssign for State {
    fn add_assign(&mut self, o: State) {
        *self = *self + o;
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, o: State) -> State {
        State::new(self.u - o.u, self.v - o.v, self.w - o.w)
    }
}

impl Mul<f64> for State {
    type Output = State;
    fn mul(self, k: f64) -> State {
        State::new(self.u * k, self.v * k, self.w * k)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.u, -self.v, -self.w)
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn mul_state(&self, s: State) -> State {
        let m = &self.0;
        State::new(
            m[0][0] * s.u + m[0][1] * s.v + m[0][2] * s.w,
            m[1][0] * s.u + m[1][1] * s.v + m[1][2] * s.w,
            m[2][0] * s.u + m[2][1] * s.v + m[2][2] * s.w,
        )
    }

    /// Solve `M x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when the pivot collapses (singular to machine precision).
    pub fn solve(&self, b: State) -> Option<State> {
        let mut a = [
            [self.0[0][0], self.0[0][1], self.0[0][2], b.u],
            [self.0[1][0], self.0[1][1], self.0[1][2], b.v],
            [self.0[2][0], self.0[2][1], self.0[2][2], b.w],
        ];
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col].abs() < 1e-300 {
                return None;
            }
            a.swap(col, piv);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        let mut x = [0.0f64; 3];
        for row in (0..3).rev() {
            let mut s = a[row][3];
            for k in row + 1..3 {
                s -= a[row][k] * x[k];
            }
            x[row] = s / a[row][row];
        }
        Some(State::new(x[0], x[1], x[2]))
    }
}

/// Solve the 2x2 system `[[a,b],[c,d]]·(x,y) = (e,f)`.
pub fn solve2x2(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Option<(f64, f64)> {
    let det = a * d - b * c;
    if det.abs() < 1e-300 {
        return None;
    }
    Some(((e * d - b * f) / det, (a * f - e * c) / det))
}
