//! Cross-checks an oracle's closed-form derivatives against finite
//! differences.
//!
//! Each `D^k f` with `|k| >= 1` is compared with a Richardson-extrapolated
//! central difference of `D^{k - e_j} f` along the first axis `j` with
//! `k_j > 0`, so every order is tested against the one below it and the
//! chain bottoms out at `value`.

use serde::Serialize;

use crate::index::{enumerate_multi_indices, MultiIndex};
use crate::oracle::FunctionOracle;

/// Default step of the coarse central difference.
pub const STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdMismatch {
    pub index: MultiIndex,
    pub point: Vec<f64>,
    pub claimed: f64,
    pub estimate: f64,
    pub allowed: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FdReport {
    pub checked: usize,
    pub mismatches: Vec<FdMismatch>,
}

impl FdReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn central(oracle: &dyn FunctionOracle, k: &MultiIndex, x: &[f64], axis: usize, h: f64) -> (f64, f64) {
    let mut hi = x.to_vec();
    let mut lo = x.to_vec();
    hi[axis] += h;
    lo[axis] -= h;
    let (a, b) = (oracle.derivative(k, &hi), oracle.derivative(k, &lo));
    ((a - b) / (2.0 * h), f64::EPSILON * (a.abs() + b.abs()) / h)
}

/// Checks every `D^k f` with `|k| <= max_order` at each point. A claimed
/// value passes when it lies within `max(tol, 10 * (discretization estimate
/// + rounding estimate))` of the extrapolated difference.
pub fn finite_diff_validate(oracle: &dyn FunctionOracle, max_order: u32, points: &[Vec<f64>], tol: f64) -> FdReport {
    let d = oracle.dim();
    let mut report = FdReport::default();
    let indices = enumerate_multi_indices(d, max_order + 1);
    for x in points {
        let v = oracle.value(x);
        let zero = oracle.derivative(&MultiIndex::zeros(d), x);
        report.checked += 1;
        if (zero - v).abs() > tol.max(4.0 * f64::EPSILON * v.abs()) {
            report.mismatches.push(FdMismatch {
                index: MultiIndex::zeros(d),
                point: x.clone(),
                claimed: zero,
                estimate: v,
                allowed: tol,
            });
        }
        for k in indices.iter().filter(|k| k.order() > 0) {
            let axis = k.exponents().iter().position(|&e| e > 0).expect("nonzero order");
            let mut lower = k.exponents().to_vec();
            lower[axis] -= 1;
            let lower = MultiIndex::new(lower);
            let (coarse, r1) = central(oracle, &lower, x, axis, STEP);
            let (fine, r2) = central(oracle, &lower, x, axis, STEP / 2.0);
            let estimate = (4.0 * fine - coarse) / 3.0;
            let allowed = tol.max(10.0 * ((estimate - fine).abs() + r1 + r2));
            let claimed = oracle.derivative(k, x);
            report.checked += 1;
            let agrees = (claimed - estimate).abs() <= allowed;
            if !agrees {
                report.mismatches.push(FdMismatch {
                    index: k.clone(),
                    point: x.clone(),
                    claimed,
                    estimate,
                    allowed,
                });
            }
        }
    }
    report
}
