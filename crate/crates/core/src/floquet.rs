//! Floquet stability of Hill and Mathieu equations z″ + K(τ)z = 0.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::characteristics::{integrate, Breaking};
use crate::config::{Dynamics, SimConfig};
use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::model::{c1_of, DerivativeState, FieldState};
use crate::ode::{self, StepControl};
use crate::reductions::linearized::to_q_linear;
use crate::reductions::{q_linear_rhs, HillCoefficients, ReferenceOrbit};

pub const DEFAULT_MARGIN: f64 = 1e-12;
const MONODROMY_REL_TOL: f64 = 1e-12;
const MONODROMY_ABS_TOL: f64 = 1e-14;

/// Mathieu parameters from the second-order expansion of K(θ) about rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuParams {
    /// Mean of K(θ).
    pub a_hat: f64,
    /// Half amplitude of its cos(2√(1+B0²)θ) term.
    pub b_hat: f64,
    pub a: f64,
    pub b: f64,
}

pub fn mathieu_params(epsilon: f64, b0: f64) -> MathieuParams {
    let w2 = 1.0 + b0 * b0;
    let c = 8.0 * b0 * b0 * w2 + 3.0;
    let e2 = epsilon * epsilon;
    let a_hat = w2 - c / (4.0 * w2) * e2;
    let b_hat = c / (8.0 * w2) * e2;
    MathieuParams { a_hat, b_hat, a: a_hat / w2, b: b_hat / w2 }
}

/// −1 − (π²/2048)·(8B0²(1+B0²)+3)³/(1+B0²)⁶·ε⁶.
pub fn asymptotic_coshmupi(epsilon: f64, b0: f64) -> f64 {
    -1.0 - asymptotic_coefficient(b0) * epsilon.powi(6)
}

/// Coefficient of ε⁶ in [`asymptotic_coshmupi`].
pub fn asymptotic_coefficient(b0: f64) -> f64 {
    let w2 = 1.0 + b0 * b0;
    PI * PI / 2048.0 * (8.0 * b0 * b0 * w2 + 3.0).powi(3) / w2.powi(6)
}

/// Fundamental solutions at the end of one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    /// z1(T), z1′(T) with z1(0) = 1, z1′(0) = 0.
    pub z1: f64,
    pub z1_prime: f64,
    /// z2(T), z2′(T) with z2(0) = 0, z2′(0) = 1.
    pub z2: f64,
    pub z2_prime: f64,
}

impl Monodromy {
    pub fn half_trace(&self) -> f64 {
        0.5 * (self.z1 + self.z2_prime)
    }

    /// Equals 1 for any Hill equation.
    pub fn wronskian(&self) -> f64 {
        self.z1 * self.z2_prime - self.z2 * self.z1_prime
    }
}

pub fn monodromy(k: impl Fn(f64) -> f64, period: f64) -> Result<Monodromy> {
    let f = |t: f64, y: &[f64; 4]| {
        let kt = k(t);
        [y[1], -kt * y[0], y[3], -kt * y[2]]
    };
    let control = StepControl::adaptive(MONODROMY_REL_TOL, MONODROMY_ABS_TOL);
    let (_, y) = ode::solve(f, 0.0, [1.0, 0.0, 0.0, 1.0], period, control, 50_000_000, |_| true)?;
    Ok(Monodromy { z1: y[0], z1_prime: y[1], z2: y[2], z2_prime: y[3] })
}

/// Half-trace of the monodromy; equals z1(T) when K is even.
pub fn monodromy_coshmupi(k: impl Fn(f64) -> f64, period: f64) -> Result<f64> {
    Ok(monodromy(k, period)?.half_trace())
}

/// Truncated Mathieu equation with K(τ) = a − 2b cos 2τ over τ ∈ [0, π].
pub fn mathieu_coshmupi(a: f64, b: f64) -> Result<f64> {
    monodromy_coshmupi(|t| a - 2.0 * b * (2.0 * t).cos(), PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    StableOscillatory,
    UnstableGrowing,
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::StableOscillatory => "stable-oscillatory",
            Stability::UnstableGrowing => "unstable-growing",
            Stability::Marginal => "marginal",
        })
    }
}

pub fn classify(cosh_mu_pi: f64) -> Stability {
    classify_with_margin(cosh_mu_pi, DEFAULT_MARGIN)
}

pub fn classify_with_margin(cosh_mu_pi: f64, margin: f64) -> Stability {
    let m = cosh_mu_pi.abs();
    if m > 1.0 + margin {
        Stability::UnstableGrowing
    } else if m < 1.0 - margin {
        Stability::StableOscillatory
    } else {
        Stability::Marginal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetResult {
    pub cosh_mu_pi: f64,
    pub classification: Stability,
    pub mathieu_a: f64,
    pub mathieu_b: f64,
    pub wronskian: f64,
    /// Period of K over which the monodromy was taken.
    pub k_period: f64,
    pub k_min: f64,
    pub k_max: f64,
}

/// Reference orbit of the small-perturbation family: K1 = 0, K2 = 2 + ε²,
/// started at P2 = E1 = 0.
pub fn small_perturbation_orbit(epsilon: f64, b0: f64) -> Result<ReferenceOrbit> {
    let half = 1.0 + 0.5 * epsilon * epsilon;
    ReferenceOrbit::compute(b0, (half * half - 1.0).sqrt(), 0.0, 0.0)
}

/// Monodromy of the untruncated Hill equation on the small-perturbation orbit.
///
/// With K1 = 0 the orbit satisfies P(θ + T/2) = −P(θ), so K has period T/2;
/// the half-trace is invariant under the rescaling θ → √(1+B0²)θ.
pub fn hill_floquet(epsilon: f64, b0: f64) -> Result<FloquetResult> {
    let orbit = small_perturbation_orbit(epsilon, b0)?;
    let hill = HillCoefficients::new(orbit, b0);
    let k_period = 0.5 * hill.period();
    let m = monodromy(|t| hill.k(t), k_period)?;
    let (k_min, k_max) = hill.k_range(512);
    let p = mathieu_params(epsilon, b0);
    Ok(FloquetResult {
        cosh_mu_pi: m.half_trace(),
        classification: classify(m.half_trace()),
        mathieu_a: p.a,
        mathieu_b: p.b,
        wronskian: m.wronskian(),
        k_period,
        k_min,
        k_max,
    })
}

/// The same for the truncated Mathieu equation with the expanded parameters.
pub fn mathieu_floquet(epsilon: f64, b0: f64) -> Result<FloquetResult> {
    let p = mathieu_params(epsilon, b0);
    let m = monodromy(|t| p.a - 2.0 * p.b * (2.0 * t).cos(), PI)?;
    Ok(FloquetResult {
        cosh_mu_pi: m.half_trace(),
        classification: classify(m.half_trace()),
        mathieu_a: p.a,
        mathieu_b: p.b,
        wronskian: m.wronskian(),
        k_period: PI,
        k_min: p.a - 2.0 * p.b,
        k_max: p.a + 2.0 * p.b,
    })
}

/// Orbit samples over one period with the affine propagator of (η1, η2).
struct PeriodMap {
    period: f64,
    /// θ_j, the orbit state there, and η(θ_j) = Φ_j η(0) + b_j.
    samples: Vec<(f64, FieldState, [[f64; 2]; 2], [f64; 2])>,
}

impl PeriodMap {
    fn compute(state: &FieldState, c1: f64, b0: f64, samples: usize) -> Result<Self> {
        let period = ReferenceOrbit::compute(b0, state.p1, state.p2, state.e1)?.period;
        let rate = |_: f64, y: &[f64; 9]| {
            let st = FieldState::new(0.0, 0.0, y[0], y[1], y[2]);
            let r = crate::characteristics::rhs_rel(&st, b0);
            let c = q_linear_rhs(0.0, 0.0, &st, c1, b0);
            let a1 = q_linear_rhs(1.0, 0.0, &st, c1, b0);
            let a2 = q_linear_rhs(0.0, 1.0, &st, c1, b0);
            let a = [[a1[0] - c[0], a2[0] - c[0]], [a1[1] - c[1], a2[1] - c[1]]];
            [
                r.p1,
                r.p2,
                r.e1,
                a[0][0] * y[3] + a[0][1] * y[4],
                a[1][0] * y[3] + a[1][1] * y[4],
                a[0][0] * y[5] + a[0][1] * y[6],
                a[1][0] * y[5] + a[1][1] * y[6],
                a[0][0] * y[7] + a[0][1] * y[8] + c[0],
                a[1][0] * y[7] + a[1][1] * y[8] + c[1],
            ]
        };
        let y0 = [state.p1, state.p2, state.e1, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let mut out = Vec::with_capacity(samples);
        let mut next = 1;
        let at = |j: usize| period * j as f64 / samples as f64;
        let record = |t: f64, y: &[f64; 9]| {
            (t, FieldState::new(t, 0.0, y[0], y[1], y[2]), [[y[3], y[5]], [y[4], y[6]]], [y[7], y[8]])
        };
        let control = StepControl::adaptive(MONODROMY_REL_TOL, MONODROMY_ABS_TOL);
        let (_, y_end) = ode::solve(rate, 0.0, y0, period, control, 10_000_000, |seg| {
            while next < samples && at(next) <= seg.t1() {
                out.push(record(at(next), &seg.eval(at(next))));
                next += 1;
            }
            true
        })?;
        out.push(record(period, &y_end));
        Ok(Self { period, samples: out })
    }
}

fn affine(m: &[[f64; 2]; 2], b: &[f64; 2], x: [f64; 2]) -> [f64; 2] {
    [m[0][0] * x[0] + m[0][1] * x[1] + b[0], m[1][0] * x[0] + m[1][1] * x[1] + b[1]]
}

/// Breaking time of one relativistic characteristic whose orbit is periodic,
/// found by iterating the one-period map of the derivative system.
///
/// In (η1, η2) = (e, p1)/(e − 1) the derivative system is affine with
/// periodic coefficients, and the Lagrangian Jacobian ∂ρ/∂ρ0 equals
/// (1 − e0)(1 − η1), so breaking is the first time η1 reaches 1. That
/// crossing is located on `samples` points per period and the last stretch
/// is integrated directly, so the result uses the same threshold rule as
/// [`integrate`]. Cost does not grow with the number of steps a direct
/// integration over `horizon` would take.
pub fn propagated_breaking(
    seed: (FieldState, DerivativeState),
    config: &SimConfig,
    samples: usize,
) -> Result<Option<Breaking>> {
    config.validate()?;
    if config.dynamics != Dynamics::Relativistic {
        return Err(Error::validation("propagated breaking needs the relativistic model"));
    }
    let (s0, d0) = seed;
    let b0 = config.b0;
    let c1 = c1_of(&d0, b0).ok_or_else(|| Error::validation("e = 1 at the seed"))?;
    let map = PeriodMap::compute(&s0, c1, b0, samples.max(16))?;
    let (phi_t, b_t) = (map.samples.last().unwrap().2, map.samples.last().unwrap().3);
    let (e1, e2) = to_q_linear(&d0);
    let mut eta = [e1, e2];
    let side = (1.0 - eta[0]).signum();
    let periods = (config.horizon / map.period).ceil() as u64;
    let mut prev = (0.0, s0, eta);
    for n in 0..periods {
        let base = n as f64 * map.period;
        for (t, state, phi, b) in &map.samples {
            let here = affine(phi, b, eta);
            if (1.0 - here[0]) * side <= 0.0 {
                let (t_prev, st, h) = prev;
                let e = h[0] / (h[0] - 1.0);
                let deriv = DerivativeState::new(h[1] * (e - 1.0), b0 + c1 * (e - 1.0), e);
                let span = 2.0 * (base + t - t_prev);
                let local = SimConfig { horizon: span, output_times: vec![], sample_interval: Some(span), ..config.clone() };
                let start = FieldState { theta: 0.0, rho: s0.rho, ..st };
                let trace = integrate(Dynamics::Relativistic, (start, deriv), &local)?;
                return Ok(trace.breaking.map(|br| Breaking {
                    time: br.time + t_prev,
                    extrapolated: br.extrapolated.map(|x| x + t_prev),
                    ..br
                }));
            }
            prev = (base + t, *state, here);
            if base + t >= config.horizon {
                return Ok(None);
            }
        }
        eta = affine(&phi_t, &b_t, eta);
    }
    Ok(None)
}

/// Earliest propagated breaking over the ensemble seeds, with the seed.
pub fn propagated_ensemble(data: &InitialData, config: &SimConfig, samples: usize) -> Result<Vec<(f64, Result<Option<Breaking>>)>> {
    data.validate()?;
    let seeds = data.seeds(config.n_characteristics);
    Ok(seeds
        .par_iter()
        .map(|&rho| (rho, propagated_breaking(data.sample(rho), config, samples)))
        .collect())
}
