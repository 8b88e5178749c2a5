//! Globally adaptive 1-D quadrature on a finite interval, Gauss–Kronrod
//! (7, 15) with bisection of the interval carrying the largest error
//! estimate.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

/// Kronrod 15-point abscissae on [0, 1] side of the symmetric pair.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_47,
    0.0,
];

/// Kronrod weights matching `XGK`.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss 7-point weights, matching the odd-indexed entries of `XGK`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Number of equal panels before adaptive refinement starts, so localized
/// peaks cannot hide between the nodes of a single wide panel.
const INITIAL_PANELS: usize = 64;
const MAX_INTERVALS: usize = 4_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadFailure {
    /// Total error estimate when refinement stalled.
    pub error_estimate: f64,
}

struct Interval {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for i in 0..7 {
        let x = half * XGK[i];
        let fsum = f(center - x) + f(center + x);
        resk += WGK[i] * fsum;
        if i % 2 == 1 {
            resg += WG[i / 2] * fsum;
        }
    }
    let value = resk * half;
    let error = ((resk - resg) * half).abs();
    (value, error)
}

/// Integrates `f` over `[lo, hi]` until the summed error estimate drops
/// below `max(abs_tol, rel_tol · |integral|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, QuadFailure> {
    debug_assert!(lo < hi);
    let mut heap = BinaryHeap::new();
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for p in 0..INITIAL_PANELS {
        let a = lo + p as f64 * width;
        let b = if p + 1 == INITIAL_PANELS { hi } else { a + width };
        let (v, e) = gk15(&f, a, b);
        total += v;
        total_err += e;
        heap.push(Interval { lo: a, hi: b, value: v, error: e });
    }
    let mut count = INITIAL_PANELS;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if count >= MAX_INTERVALS {
            return Err(QuadFailure { error_estimate: total_err });
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            // interval can no longer be split in floating point
            return Err(QuadFailure { error_estimate: total_err });
        }
        let (v1, e1) = gk15(&f, worst.lo, mid);
        let (v2, e2) = gk15(&f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Interval { lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Interval { lo: mid, hi: worst.hi, value: v2, error: e2 });
        count += 1;
    }
    Ok(total)
}
