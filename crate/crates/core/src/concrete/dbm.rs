//! Difference-bound matrices over integer (rescaled) clock constants.
//!
//! Entry `(i, j)` bounds `x_i - x_j`; index 0 is the constant-zero clock.
//! Bounds are encoded as `2c + 1` for `≤ c`, `2c` for `< c`, so the
//! integer order is the bound order.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::constraints::{Context, Inequality, Polyhedron, Relation};

pub(crate) const INF: i64 = i64::MAX;
pub(crate) const LE_ZERO: i64 = 1;

pub(crate) fn bound(c: i64, strict: bool) -> i64 {
    2 * c + if strict { 0 } else { 1 }
}

pub(crate) fn constant(b: i64) -> i64 {
    b >> 1
}

pub(crate) fn is_strict(b: i64) -> bool {
    b & 1 == 0
}

fn add(a: i64, b: i64) -> i64 {
    if a == INF || b == INF {
        return INF;
    }
    ((a & !1) + (b & !1)) | (a & b & 1)
}

/// One elementary constraint `x_p - x_q ≺ c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct DiffBound {
    pub p: usize,
    pub q: usize,
    pub b: i64,
}

/// A canonical, nonempty zone over `n` clocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClockZone {
    dim: usize,
    m: Vec<i64>,
}

impl ClockZone {
    /// The single valuation with every clock at zero.
    pub fn zero(clocks: usize) -> Self {
        let dim = clocks + 1;
        ClockZone {
            dim,
            m: vec![LE_ZERO; dim * dim],
        }
    }

    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, b: i64) {
        self.m[i * self.dim + j] = b;
    }

    /// Floyd–Warshall closure; false if the zone became empty.
    fn close(&mut self) -> bool {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k);
                if ik == INF {
                    continue;
                }
                for j in 0..n {
                    let via = add(ik, self.get(k, j));
                    if via < self.get(i, j) {
                        self.set(i, j, via);
                    }
                }
            }
            if (0..n).any(|i| self.get(i, i) < LE_ZERO) {
                return false;
            }
        }
        (0..n).all(|i| self.get(i, i) >= LE_ZERO)
    }

    /// Intersects with the bounds; `None` if the result is empty.
    pub(crate) fn constrain(&self, bounds: &[DiffBound]) -> Option<ClockZone> {
        let mut z = self.clone();
        let mut changed = false;
        for d in bounds {
            if d.b < z.get(d.p, d.q) {
                z.set(d.p, d.q, d.b);
                changed = true;
            }
        }
        if !changed {
            return Some(z);
        }
        z.close().then_some(z)
    }

    pub fn up(&self) -> ClockZone {
        let mut z = self.clone();
        for i in 1..self.dim {
            z.set(i, 0, INF);
        }
        z
    }

    pub(crate) fn reset(&self, clocks: &[usize]) -> ClockZone {
        let mut z = self.clone();
        for &c in clocks {
            let i = c + 1;
            for j in 0..self.dim {
                let zero_j = z.get(0, j);
                let j_zero = z.get(j, 0);
                z.set(i, j, zero_j);
                z.set(j, i, j_zero);
            }
            z.set(i, i, LE_ZERO);
        }
        z
    }

    /// Classical maximal-constant extrapolation (`max[i]` per clock).
    pub(crate) fn extrapolate(&self, max: &[i64]) -> ClockZone {
        let mut z = self.clone();
        let mk = |i: usize| if i == 0 { 0 } else { max[i - 1] };
        let mut changed = false;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let b = z.get(i, j);
                if b != INF && b > bound(mk(i), false) {
                    z.set(i, j, INF);
                    changed = true;
                } else if b < bound(-mk(j), true) {
                    z.set(i, j, bound(-mk(j), true));
                    changed = true;
                }
            }
        }
        if changed {
            let ok = z.close();
            debug_assert!(ok, "extrapolation cannot empty a zone");
        }
        z
    }

    /// The zone as a polyhedron in clock units divided by `scale`.
    pub fn to_polyhedron(&self, scale: i64) -> Polyhedron {
        let n = self.clocks();
        let ctx = Context::new(n, 0);
        let mut atoms = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let b = self.get(i, j);
                if i == j || b == INF {
                    continue;
                }
                let mut coeffs = vec![BigInt::zero(); n];
                if i > 0 {
                    coeffs[i - 1] += scale;
                }
                if j > 0 {
                    coeffs[j - 1] -= scale;
                }
                let rel = if is_strict(b) {
                    Relation::Lt
                } else {
                    Relation::Le
                };
                atoms.push(Inequality::new(coeffs, BigInt::from(-constant(b)), rel));
            }
        }
        Polyhedron::from_inequalities(ctx, atoms)
            .expect("dimension matches")
            .canonicalize()
    }
}
