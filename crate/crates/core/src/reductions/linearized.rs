//! Changes of variables that make the derivative system linear or separable.

use crate::error::{Error, Result};
use crate::model::{DerivativeState, FieldState};
use crate::ode::{self, Dopri5, Segment, StepControl};

/// F1 = (1+P1²)/γ³, F2 = P1P2/γ³, F3 = (1+P2²)/γ³.
pub fn f_coefficients(state: &FieldState) -> [f64; 3] {
    let g = state.gamma();
    let g3 = g * g * g;
    [(1.0 + state.p1 * state.p1) / g3, state.p1 * state.p2 / g3, (1.0 + state.p2 * state.p2) / g3]
}

/// Which L2 coefficient to use in the constant-K2 linear equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum L2Form {
    /// L2 = −(1+P2²)(E1γ + B0P2)/(γ³P1) − B0P1P2/γ³, obtained by
    /// eliminating p1 and e with the K2 and C1 constraints.
    #[default]
    Derived,
    /// The same with E1γ + P2 in place of E1γ + B0P2; agrees only for B0 = 1.
    UnitCoupling,
}

/// (L1, L2) with ds/dθ = −L1s² − L2s for s = p2 − B0.
pub fn l_coefficients(state: &FieldState, c1: f64, b0: f64, form: L2Form) -> Result<(f64, f64)> {
    if state.p1 == 0.0 {
        return Err(Error::PoleCrossing { theta: state.theta });
    }
    if c1 == 0.0 {
        return Err(Error::validation("the constant-K2 linear equation needs C1 != 0"));
    }
    let (p1, p2, e1) = (state.p1, state.p2, state.e1);
    let g = state.gamma();
    let g3 = g * g * g;
    let w = 1.0 + p2 * p2;
    let l1 = -w * (e1 * g + c1 * p2) / (c1 * g3 * p1) - p1 * p2 / g3;
    let coupling = match form {
        L2Form::Derived => b0,
        L2Form::UnitCoupling => 1.0,
    };
    let l2 = -w * (e1 * g + coupling * p2) / (g3 * p1) - b0 * p1 * p2 / g3;
    Ok((l1, l2))
}

/// dy/dθ = L1 + L2·y for y = 1/(p2 − B0) on a constant-K2 orbit.
pub fn constant_k2_linear_rhs(y: f64, state: &FieldState, c1: f64, b0: f64, form: L2Form) -> Result<f64> {
    let (l1, l2) = l_coefficients(state, c1, b0, form)?;
    Ok(l1 + l2 * y)
}

/// Regular value of y where P1 vanishes: the pole parts of L1 and L2 cancel.
pub fn y_at_pole(state: &FieldState, c1: f64, b0: f64) -> f64 {
    let eg = state.e1 * state.gamma();
    -(eg + c1 * state.p2) / (c1 * (eg + b0 * state.p2))
}

/// Rates of (u, λ, σ) = (e, e − 1, p2)/p1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlamRates {
    pub u: f64,
    pub lambda: f64,
    pub sigma: f64,
}

pub fn ulam_rhs(u: f64, lambda: f64, sigma: f64, state: &FieldState, b0: f64) -> UlamRates {
    let [f1, f2, f3] = f_coefficients(state);
    let drift = b0 * f1 * sigma - b0 * f2;
    UlamRates {
        u: u * u + b0 * f1 * u * sigma - b0 * f2 * u - f2 * sigma + f3,
        lambda: lambda * (u + drift),
        sigma: b0 * f1 * sigma * sigma + u * sigma - 2.0 * b0 * f2 * sigma + b0 * f3,
    }
}

/// (u, λ) rates once σ is eliminated through C1.
pub fn ulam_reduced_rhs(u: f64, lambda: f64, state: &FieldState, c1: f64, b0: f64) -> (f64, f64) {
    let [f1, f2, f3] = f_coefficients(state);
    let m1 = 1.0 + b0 * b0 * f1;
    let cross = b0 * (c1 - b0) * f1;
    (
        m1 * u * u + cross * u * lambda - 2.0 * b0 * f2 * u - (c1 - b0) * f2 * lambda + f3,
        m1 * u * lambda + cross * lambda * lambda - b0 * f2 * lambda,
    )
}

pub fn to_ulam(deriv: &DerivativeState) -> (f64, f64, f64) {
    (deriv.e / deriv.p1, (deriv.e - 1.0) / deriv.p1, deriv.p2 / deriv.p1)
}

/// Inverse of [`to_ulam`] given C1; also returns σ from u and λ.
pub fn from_ulam(u: f64, lambda: f64, c1: f64, b0: f64) -> (DerivativeState, f64) {
    let den = u - lambda;
    (
        DerivativeState::new(1.0 / den, b0 + c1 * lambda / den, u / den),
        b0 * u + (c1 - b0) * lambda,
    )
}

/// Rates of (η1, η2) = (u/λ, 1/λ) = (e/(e−1), p1/(e−1)).
pub fn q_linear_rhs(eta1: f64, eta2: f64, state: &FieldState, c1: f64, b0: f64) -> [f64; 2] {
    let [f1, f2, f3] = f_coefficients(state);
    [
        -b0 * f2 * eta1 + f3 * eta2 - (c1 - b0) * f2,
        -(1.0 + b0 * b0 * f1) * eta1 + b0 * f2 * eta2 - b0 * (c1 - b0) * f1,
    ]
}

pub fn to_q_linear(deriv: &DerivativeState) -> (f64, f64) {
    (deriv.e / (deriv.e - 1.0), deriv.p1 / (deriv.e - 1.0))
}

/// dp1/dθ on the branch p2 ≡ B0, e ≡ 1.
pub fn riccati_rhs(p1: f64, state: &FieldState, b0: f64) -> f64 {
    let g = state.gamma();
    let g3 = g * g * g;
    let cross = p1 * state.p2 - b0 * state.p1;
    -1.0 - (b0 * b0 + p1 * p1 + cross * cross) / g3
}

/// y(θ) on a constant-K2 characteristic, with p2 = B0 + 1/y.
#[derive(Debug, Clone)]
pub struct LinearizedTrace {
    pub theta: Vec<f64>,
    pub y: Vec<f64>,
    /// Zeros of P1 that were stepped across.
    pub poles: Vec<f64>,
    /// First θ where |p2| exceeded the threshold, if any.
    pub breaking: Option<f64>,
    pub b0: f64,
}

impl LinearizedTrace {
    pub fn p2(&self) -> Vec<f64> {
        self.y.iter().map(|y| self.b0 + 1.0 / y).collect()
    }
}

struct Track {
    segments: Vec<Segment<3>>,
}

impl Track {
    fn state(&self, t: f64) -> FieldState {
        let i = self.segments.partition_point(|s| s.t1() < t).min(self.segments.len() - 1);
        let y = self.segments[i].eval(t);
        FieldState::new(t, 0.0, y[0], y[1], y[2])
    }
}

/// Half-width of the gap stepped over at each zero of P1.
const POLE_GAP: f64 = 3e-3;

/// Integrates y along the characteristic from `seed` over [0, horizon].
///
/// The orbit is integrated first with dense output. The coefficients of the
/// y equation have simple poles where P1 = 0, but every solution is regular
/// there and passes through [`y_at_pole`]. Each pole is crossed by the cubic
/// through that value and y at θp − δ, θp − 2δ, θp − 3δ, evaluated at θp + δ.
/// A value error near the pole turns into a slope error divided by the
/// distance, so the gap is kept wide and the hop is fourth order.
pub fn constant_k2_trace(
    seed: (FieldState, DerivativeState),
    b0: f64,
    horizon: f64,
    form: L2Form,
    rel_tol: f64,
    blowup_threshold: f64,
) -> Result<LinearizedTrace> {
    let (s0, d0) = seed;
    let c1 = crate::model::c1_of(&d0, b0).ok_or_else(|| Error::validation("C1 is undefined at the seed"))?;
    let s = d0.p2 - b0;
    if s == 0.0 {
        return Err(Error::validation("p2 = B0 at the seed: s stays zero and y is infinite"));
    }

    let control = StepControl::adaptive(rel_tol, rel_tol * 1e-2);
    let mut segments = Vec::new();
    let mut poles = Vec::new();
    ode::solve(
        |_, y: &[f64; 3]| {
            let r = crate::characteristics::rhs_rel(&FieldState::new(0.0, 0.0, y[0], y[1], y[2]), b0);
            [r.p1, r.p2, r.e1]
        },
        0.0,
        [s0.p1, s0.p2, s0.e1],
        horizon,
        control,
        50_000_000,
        |seg: &Segment<3>| {
            let (a, b) = (seg.start()[0], seg.end()[0]);
            if a != 0.0 && (a > 0.0) != (b > 0.0) {
                poles.push(seg.bisect(seg.t0, seg.t1(), 1e-14, |_, y| y[0] * a.signum()));
            }
            segments.push(*seg);
            true
        },
    )?;
    let track = Track { segments };

    let mut out = LinearizedTrace { theta: vec![0.0], y: vec![1.0 / s], poles: poles.clone(), breaking: None, b0 };
    let mut t = 0.0;
    let mut y = 1.0 / s;
    let mut rhs = |th: f64, v: &[f64; 1]| {
        let st = track.state(th);
        [constant_k2_linear_rhs(v[0], &st, c1, b0, form).unwrap_or(f64::NAN)]
    };
    let poles: Vec<f64> = poles.into_iter().filter(|&p| p - 3.0 * POLE_GAP > 0.0 && p + POLE_GAP < horizon).collect();
    for k in 0..=poles.len() {
        let stops: Vec<f64> = match poles.get(k) {
            Some(&tp) => (1..=3).rev().map(|j| tp - j as f64 * POLE_GAP).collect(),
            None => vec![horizon],
        };
        let mut approach = Vec::with_capacity(3);
        let mut solver = Dopri5::new(&mut rhs, t, [y], control);
        for &stop in &stops {
            if stop < t {
                return Err(Error::PoleCrossing { theta: stop });
            }
            while solver.t() < stop {
                let seg = solver.step(&mut rhs, stop)?;
                let v = seg.end()[0];
                out.theta.push(seg.t1());
                out.y.push(v);
                if (b0 + 1.0 / v).abs() >= blowup_threshold {
                    out.breaking = Some(seg.t1());
                    return Ok(out);
                }
            }
            approach.push(solver.y()[0]);
        }
        if let Some(&tp) = poles.get(k) {
            let yp = y_at_pole(&track.state(tp), c1, b0);
            // Lagrange weights at +δ for nodes 0, −δ, −2δ, −3δ.
            y = 4.0 * yp - 6.0 * approach[2] + 4.0 * approach[1] - approach[0];
            t = tp + POLE_GAP;
            out.theta.push(t);
            out.y.push(y);
        }
    }
    Ok(out)
}
