//! Dormand–Prince 5(4) with PI step-size control, continuous (dense) output
//! and event location by bisection on the dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Adaptive { rel_tol: f64, abs_tol: f64 },
    Fixed(f64),
}

impl StepControl {
    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        StepControl::Adaptive { rel_tol, abs_tol }
    }
}

/// Continuous extension of one accepted step on [t0, t0 + h].
#[derive(Debug, Clone, Copy)]
pub struct Segment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.rcont[0]
    }

    pub fn end(&self) -> [f64; N] {
        self.eval(self.t1())
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }

    /// Locates a sign change of `g` inside the segment by bisection.
    ///
    /// `g(t_lo)` and `g(t_hi)` must have opposite signs (or `g(t_hi) = 0`).
    /// Returns the right end of the final bracket, where `g` has the sign of `g(t_hi)`.
    pub fn bisect(&self, mut t_lo: f64, mut t_hi: f64, tol: f64, g: impl Fn(f64, &[f64; N]) -> f64) -> f64 {
        let g_lo = g(t_lo, &self.eval(t_lo));
        let lo_sign = g_lo > 0.0;
        while t_hi - t_lo > tol {
            let mid = 0.5 * (t_lo + t_hi);
            if mid <= t_lo || mid >= t_hi {
                break;
            }
            if (g(mid, &self.eval(mid)) > 0.0) == lo_sign {
                t_lo = mid;
            } else {
                t_hi = mid;
            }
        }
        t_hi
    }
}

/// Integrator state between steps.
#[derive(Debug, Clone)]
pub struct Dopri5<const N: usize> {
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    facold: f64,
    last_rejected: bool,
    control: StepControl,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<const N: usize> Dopri5<N> {
    pub fn new<F>(f: &mut F, t0: f64, y0: [f64; N], control: StepControl) -> Self
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let k1 = f(t0, &y0);
        let h = match control {
            StepControl::Fixed(h) => h,
            StepControl::Adaptive { rel_tol, abs_tol } => initial_step(f, t0, &y0, &k1, rel_tol, abs_tol),
        };
        Self { t: t0, y: y0, k1, h, facold: 1e-4, last_rejected: false, control, accepted: 0, rejected: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Advances by one accepted step, never past `t_max`.
    pub fn step<F>(&mut self, f: &mut F, t_max: f64) -> Result<Segment<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        loop {
            let remaining = t_max - self.t;
            let mut h = self.h.min(remaining);
            // avoid a sliver of a final step
            if remaining - h < 1e-3 * h {
                h = remaining;
            }
            if !(h > 0.0) || self.t + h == self.t || h < 16.0 * f64::EPSILON * self.t.abs() {
                return Err(Error::StepSizeUnderflow { theta: self.t, partial: None });
            }
            let (t, y, k1) = (self.t, &self.y, &self.k1);
            let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
            let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y1 = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + h, &y1);
            let finite = y1.iter().chain(k7.iter()).all(|v| v.is_finite());

            let err = match self.control {
                StepControl::Fixed(_) => 0.0,
                StepControl::Adaptive { rel_tol, abs_tol } => {
                    let mut sum = 0.0;
                    for i in 0..N {
                        let e = h
                            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                        let sk = abs_tol + rel_tol * y[i].abs().max(y1[i].abs());
                        sum += (e / sk) * (e / sk);
                    }
                    (sum / N as f64).sqrt()
                }
            };

            if !finite || !err.is_finite() {
                self.rejected += 1;
                self.last_rejected = true;
                if let StepControl::Fixed(_) = self.control {
                    return Err(Error::StepSizeUnderflow { theta: self.t, partial: None });
                }
                self.h = 0.1 * h;
                continue;
            }

            let fac11 = err.powf(EXPO);
            if err <= 1.0 {
                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    rcont[0][i] = y[i];
                    rcont[1][i] = ydiff;
                    rcont[2][i] = bspl;
                    rcont[3][i] = ydiff - h * k7[i] - bspl;
                    rcont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let seg = Segment { t0: t, h, rcont };
                if let StepControl::Adaptive { .. } = self.control {
                    let fac = (fac11 / self.facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                    let mut hnew = h / fac;
                    if self.last_rejected {
                        hnew = hnew.min(h);
                    }
                    self.facold = err.max(1e-4);
                    // keep the proposal when the step was clipped at t_max
                    self.h = if h < self.h { self.h.min(hnew.max(h)) } else { hnew };
                }
                self.t = if h == remaining { t_max } else { t + h };
                self.y = y1;
                self.k1 = k7;
                self.last_rejected = false;
                self.accepted += 1;
                return Ok(seg);
            }
            self.rejected += 1;
            self.last_rejected = true;
            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
        }
    }
}

fn initial_step<const N: usize, F>(f: &mut F, t0: f64, y0: &[f64; N], f0: &[f64; N], rtol: f64, atol: f64) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N]| {
        let s: f64 = (0..N)
            .map(|i| {
                let sk = atol + rtol * y0[i].abs();
                (v[i] / sk).powi(2)
            })
            .sum();
        (s / N as f64).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrates from `t0` to `t_end`, handing every accepted segment to `observe`.
///
/// `observe` may return `false` to stop early. Returns the final time and state.
pub fn solve<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    control: StepControl,
    max_steps: usize,
    mut observe: O,
) -> Result<(f64, [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Segment<N>) -> bool,
{
    let mut solver = Dopri5::new(&mut f, t0, y0, control);
    while solver.t() < t_end {
        if solver.accepted >= max_steps {
            return Err(Error::TooManySteps(max_steps));
        }
        let seg = solver.step(&mut f, t_end)?;
        if !observe(&seg) {
            break;
        }
    }
    Ok((solver.t(), *solver.y()))
}
