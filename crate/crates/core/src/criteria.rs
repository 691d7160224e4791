//! Closed-form smoothness criteria evaluated on initial data.

use crate::initial::{validation_grid, InitialData};
use crate::model::DerivativeState;

/// Δ = ((V1⁰)′)² + 2(E1⁰)′ + 2B0(V2⁰)′ − B0² − 1 at `rho`.
///
/// The nonrelativistic solution stays C¹ for all time iff Δ < 0 at every point.
/// The data's momentum slots are read as the velocities V1⁰, V2⁰.
pub fn criterion_nonrel(data: &InitialData, rho: f64) -> f64 {
    let (_, d) = data.sample(rho);
    nonrel_delta(&d, data.b0)
}

pub fn nonrel_delta(d: &DerivativeState, b0: f64) -> f64 {
    d.p1 * d.p1 + 2.0 * d.e + 2.0 * b0 * d.p2 - b0 * b0 - 1.0
}

/// The small-amplitude constant-K2 condition 2e + 2B0·p2 − 2B0² − 1 < 0.
pub fn criterion_rel_smallamp(deriv: &DerivativeState, b0: f64) -> bool {
    rel_smallamp_margin(deriv, b0) < 0.0
}

/// Left-hand side of the small-amplitude constant-K2 condition.
pub fn rel_smallamp_margin(deriv: &DerivativeState, b0: f64) -> f64 {
    2.0 * deriv.e + 2.0 * b0 * deriv.p2 - 2.0 * b0 * b0 - 1.0
}

/// Verdict of a pointwise criterion over one period of the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionSummary {
    /// Largest value of the criterion's left-hand side on the grid.
    pub max_value: f64,
    pub argmax: f64,
    /// True when the strict inequality holds at every grid point.
    pub smooth: bool,
}

fn summarize(data: &InitialData, f: impl Fn(&DerivativeState) -> f64) -> CriterionSummary {
    let mut best = CriterionSummary { max_value: f64::NEG_INFINITY, argmax: 0.0, smooth: true };
    for rho in validation_grid(data.domain_length) {
        let (_, d) = data.sample(rho);
        let v = f(&d);
        if v > best.max_value {
            best.max_value = v;
            best.argmax = rho;
        }
    }
    best.smooth = best.max_value < 0.0;
    best
}

pub fn nonrel_summary(data: &InitialData) -> CriterionSummary {
    summarize(data, |d| nonrel_delta(d, data.b0))
}

pub fn rel_smallamp_summary(data: &InitialData) -> CriterionSummary {
    summarize(data, |d| rel_smallamp_margin(d, data.b0))
}
