//! Hill normal form of the derivative system along a periodic reference orbit.
//!
//! Along the orbit the coefficients F1 = (1+P1²)/γ³, F2 = P1P2/γ³,
//! F3 = (1+P2²)/γ³ are known functions of θ. Their θ-derivatives are taken
//! with second-order jets pushed through the characteristic flow.

use std::f64::consts::PI;

use crate::characteristics::rhs_rel;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::FieldState;
use crate::ode::{Dopri5, Segment, StepControl};

const ORBIT_REL_TOL: f64 = 1e-13;
const ORBIT_ABS_TOL: f64 = 1e-15;
const MAX_PERIOD: f64 = 1e4;

/// One period of a solution of the characteristic system, with dense output.
#[derive(Debug, Clone)]
pub struct ReferenceOrbit {
    pub b0: f64,
    pub start: FieldState,
    pub period: f64,
    segments: Vec<Segment<3>>,
}

fn rate(b0: f64, y: &[f64; 3]) -> [f64; 3] {
    let r = rhs_rel(&FieldState::new(0.0, 0.0, y[0], y[1], y[2]), b0);
    [r.p1, r.p2, r.e1]
}

impl ReferenceOrbit {
    /// Integrates from (P1, P2, E1) at θ = 0 until the first return to the
    /// plane through the start point normal to the flow.
    pub fn compute(b0: f64, p1: f64, p2: f64, e1: f64) -> Result<Self> {
        let start = FieldState::new(0.0, 0.0, p1, p2, e1);
        let y0 = [p1, p2, e1];
        let f0 = rate(b0, &y0);
        let speed2: f64 = f0.iter().map(|v| v * v).sum();
        if speed2 < 1e-28 {
            // at rest: linear frequency √(1+B0²)
            return Ok(Self { b0, start, period: 2.0 * PI / (1.0 + b0 * b0).sqrt(), segments: vec![] });
        }
        let section = |y: &[f64; 3]| (0..3).map(|i| (y[i] - y0[i]) * f0[i]).sum::<f64>();
        let mut f = |_: f64, y: &[f64; 3]| rate(b0, y);
        let mut solver = Dopri5::new(&mut f, 0.0, y0, StepControl::adaptive(ORBIT_REL_TOL, ORBIT_ABS_TOL));
        let mut segments = Vec::new();
        let mut left = false;
        while solver.t() < MAX_PERIOD {
            let seg = solver.step(&mut f, MAX_PERIOD)?;
            let (g0, g1) = (section(&seg.start()), section(&seg.end()));
            segments.push(seg);
            if g1 < 0.0 {
                left = true;
            }
            if left && g0 < 0.0 && g1 >= 0.0 {
                let period = seg.bisect(seg.t0, seg.t1(), 1e-15, |_, y| section(y));
                return Ok(Self { b0, start, period, segments });
            }
        }
        Err(Error::validation("reference orbit did not close"))
    }

    pub fn state(&self, theta: f64) -> FieldState {
        let t = theta.rem_euclid(self.period);
        if self.segments.is_empty() {
            return FieldState { theta, ..self.start };
        }
        let i = self.segments.partition_point(|s| s.t1() < t).min(self.segments.len() - 1);
        let y = self.segments[i].eval(t);
        FieldState::new(theta, 0.0, y[0], y[1], y[2])
    }

    /// (P1, P2, E1) as second-order jets in θ.
    pub fn jets(&self, theta: f64) -> [Jet; 3] {
        let s = self.state(theta);
        let y = [s.p1, s.p2, s.e1];
        let d1 = rate(self.b0, &y);
        let first = [0, 1, 2].map(|i| Jet::new(y[i], d1[i], 0.0));
        let d2 = jet_rate(self.b0, &first);
        [0, 1, 2].map(|i| Jet::new(y[i], d1[i], d2[i].d1))
    }
}

fn jet_rate(b0: f64, y: &[Jet; 3]) -> [Jet; 3] {
    let g = (y[0].square() + y[1].square() + 1.0).sqrt();
    let v1 = y[0] / g;
    let v2 = y[1] / g;
    [-y[2] - v2 * b0, v1 * b0, v1]
}

/// F, M, G, N and K along a reference orbit for a given C1.
#[derive(Debug, Clone)]
pub struct HillCoefficients {
    pub orbit: ReferenceOrbit,
    pub b0: f64,
    pub c1: f64,
    f3_at_zero: f64,
}

impl HillCoefficients {
    pub fn new(orbit: ReferenceOrbit, c1: f64) -> Self {
        let b0 = orbit.b0;
        let mut h = Self { orbit, b0, c1, f3_at_zero: 1.0 };
        h.f3_at_zero = h.f(0.0)[2].v;
        h
    }

    /// Period of the coefficients (that of the orbit).
    pub fn period(&self) -> f64 {
        self.orbit.period
    }

    pub fn f(&self, theta: f64) -> [Jet; 3] {
        let [p1, p2, _] = self.orbit.jets(theta);
        let g2 = p1.square() + p2.square() + 1.0;
        let inv_g3 = (g2 * g2.sqrt()).recip();
        [(p1.square() + 1.0) * inv_g3, p1 * p2 * inv_g3, (p2.square() + 1.0) * inv_g3]
    }

    pub fn m(&self, theta: f64) -> [Jet; 3] {
        let [f1, f2, f3] = self.f(theta);
        [f1 * (self.b0 * self.b0) + 1.0, f2 * self.b0, f3]
    }

    /// K(θ) = M1M3 − M2² − M2′ − ¾(M1′)²/M1² + (M1″ + 2M2M1′)/(2M1).
    pub fn k(&self, theta: f64) -> f64 {
        let [m1, m2, m3] = self.m(theta);
        m1.v * m3.v - m2.v * m2.v - m2.d1 - 0.75 * m1.d1 * m1.d1 / (m1.v * m1.v)
            + (m1.d2 + 2.0 * m2.v * m1.d1) / (2.0 * m1.v)
    }

    /// [G1, G2, G3] of the second-order equation for η1.
    pub fn g(&self, theta: f64) -> [f64; 3] {
        let [f1, f2, f3] = self.f(theta);
        let b0 = self.b0;
        let g1 = (self.c1 - b0) * (f2.d1 - b0 * f2.v * f2.v + b0 * f1.v * f3.v - f2.v * f3.d1 / f3.v);
        let g2 = f3.v * (1.0 + b0 * b0 * f1.v) - b0 * b0 * f2.v * f2.v + b0 * f2.d1 - b0 * f2.v * f3.d1 / f3.v;
        [g1, g2, -f3.d1 / f3.v]
    }

    /// [N1, N2] after removing the first-derivative term.
    pub fn n(&self, theta: f64) -> [f64; 2] {
        let f3 = self.f(theta)[2];
        let [g1, g2, g3] = self.g(theta);
        let g3_prime = -(f3.d2 * f3.v - f3.d1 * f3.d1) / (f3.v * f3.v);
        [g1 * (self.f3_at_zero / f3.v).sqrt(), g2 - 0.25 * g3 * g3 - 0.5 * g3_prime]
    }

    /// (min, max) of K over `n` uniform samples of one period.
    pub fn k_range(&self, n: usize) -> (f64, f64) {
        (0..n)
            .map(|i| self.k(self.period() * i as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}
