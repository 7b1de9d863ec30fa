//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! Every interval carries a 7-point Gauss / 15-point Kronrod pair; the interval with
//! the largest error estimate is bisected until the summed estimate falls below
//! `max(abs_tol, rel_tol * |integral|)`. Long ranges are pre-split at logarithmically
//! spaced points so integrands with a peak near the origin and power-law tails do
//! not depend on bisection to find their structure.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sum::NeumaierSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and work limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadPolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadPolicy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 1_000_000,
        }
    }
}

impl QuadPolicy {
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = (fc * WGK[7]).abs();
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let resabs = abs * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(50.0 * f64::EPSILON * resabs);
    Piece { lo, hi, value, error }
}

/// Integrates `f` over `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, policy: &QuadPolicy) -> Result<QuadEstimate> {
    integrate_pieces(f, &[lo, hi], policy)
}

/// Integrates `f` over `[points[0], points[last]]` with the given initial partition.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], policy: &QuadPolicy) -> Result<QuadEstimate> {
    if points.len() < 2 {
        return Err(invalid("quadrature needs at least two partition points"));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(invalid("quadrature bounds must be finite"));
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("quadrature partition must be nondecreasing"));
    }
    let lo = points[0];
    let hi = points[points.len() - 1];
    if lo == hi {
        return Ok(QuadEstimate {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }

    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&f, w[0], w[1]));
        }
    }
    let mut subdivisions = 0usize;
    let (mut value, mut error) = totals(heap.iter());
    let mut frozen_error = 0.0;

    loop {
        if error <= policy.target(value) || !value.is_finite() {
            // running totals drift; confirm against a fresh sum
            let (v, e) = totals(heap.iter().chain(frozen.iter()));
            value = v;
            error = e;
            if !value.is_finite() {
                return Err(Error::Quadrature {
                    lo,
                    hi,
                    partial: value,
                    error_estimate: error,
                    subdivisions,
                });
            }
            if error <= policy.target(value) {
                return Ok(QuadEstimate {
                    value,
                    error,
                    subdivisions,
                });
            }
        }
        let fail = |value, error, subdivisions| Error::Quadrature {
            lo,
            hi,
            partial: value,
            error_estimate: error,
            subdivisions,
        };
        let Some(worst) = heap.pop() else {
            return Err(fail(value, error, subdivisions));
        };
        if subdivisions >= policy.max_subdivisions {
            return Err(fail(value, error, subdivisions));
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let width = worst.hi - worst.lo;
        if width <= 8.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs()) || mid <= worst.lo || mid >= worst.hi {
            frozen_error += worst.error;
            frozen.push(worst);
            if heap.is_empty() || frozen_error > policy.target(value) {
                let (v, e) = totals(heap.iter().chain(frozen.iter()));
                if e > policy.target(v) && (heap.is_empty() || frozen_error > policy.target(v)) {
                    return Err(fail(v, e, subdivisions));
                }
            }
            continue;
        }
        let left = kronrod15(&f, worst.lo, mid);
        let right = kronrod15(&f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
}

fn totals<'a>(pieces: impl Iterator<Item = &'a Piece>) -> (f64, f64) {
    let mut value = NeumaierSum::new();
    let mut error = 0.0;
    for p in pieces {
        value.add(p.value);
        error += p.error;
    }
    (value.value(), error)
}

/// Partition of `[lo, hi]` at zero and at `±scale·10^k`, `k ≥ 0`, plus `±scale·10^{-1}`.
pub fn log_breakpoints(lo: f64, hi: f64, scale: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    if lo < 0.0 && hi > 0.0 {
        pts.push(0.0);
    }
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let reach = lo.abs().max(hi.abs());
    let mut r = 0.1 * scale;
    while r < reach {
        for x in [r, -r] {
            if x > lo && x < hi {
                pts.push(x);
            }
        }
        r *= 10.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
