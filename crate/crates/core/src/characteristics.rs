//! Characteristic systems and their integration.
//!
//! Along dρ/dθ = V1 the PDE reduces to ODEs for (P1, P2, E1); differentiating
//! in ρ gives the extended system for (p1, p2, e) = ∂ρ(P1, P2, E1). Both are
//! integrated together as one 7-vector `[P1, P2, E1, ρ, p1, p2, e]`.

use rayon::prelude::*;

use crate::config::{Dynamics, SimConfig};
use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::model::{c1_of, lorentz_gamma, DerivativeState, FieldState, FirstIntegrals};
use crate::ode::{Dopri5, Segment, StepControl};

pub const DIM: usize = 7;
pub type CharVector = [f64; DIM];

/// Event location tolerance in θ.
pub const EVENT_TOL: f64 = 1e-10;
/// Underflow this close to the extrapolated blow-up time counts as breaking.
pub const UNDERFLOW_WINDOW: f64 = 1e-8;
/// C1 drift tracking is suspended while |e − 1| is below this.
pub const C1_SUSPEND: f64 = 1e-4;

/// Time derivatives of (P1, P2, E1, ρ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldRate {
    pub p1: f64,
    pub p2: f64,
    pub e1: f64,
    pub rho: f64,
}

pub fn rhs_rel(state: &FieldState, b0: f64) -> FieldRate {
    let g = state.gamma();
    let v1 = state.p1 / g;
    let v2 = state.p2 / g;
    FieldRate { p1: -state.e1 - b0 * v2, p2: b0 * v1, e1: v1, rho: v1 }
}

/// ∂ρV1, ∂ρV2 from the momentum derivatives.
pub fn velocity_derivatives(state: &FieldState, deriv: &DerivativeState) -> (f64, f64) {
    let g = state.gamma();
    let q = (deriv.p1 * state.p1 + deriv.p2 * state.p2) / (g * g * g);
    (deriv.p1 / g - state.p1 * q, deriv.p2 / g - state.p2 * q)
}

pub fn rhs_rel_extended(state: &FieldState, deriv: &DerivativeState, b0: f64) -> DerivativeState {
    let (vq1, vq2) = velocity_derivatives(state, deriv);
    DerivativeState {
        p1: -vq1 * deriv.p1 - b0 * vq2 - deriv.e,
        p2: -vq1 * deriv.p2 + b0 * vq1,
        e: (1.0 - deriv.e) * vq1,
    }
}

/// Nonrelativistic system; the momentum slots hold V1, V2.
pub fn rhs_nonrel(state: &FieldState, b0: f64) -> FieldRate {
    FieldRate { p1: -state.e1 - b0 * state.p2, p2: b0 * state.p1, e1: state.p1, rho: state.p1 }
}

pub fn rhs_nonrel_extended(deriv: &DerivativeState, b0: f64) -> DerivativeState {
    let (v1, v2, e) = (deriv.p1, deriv.p2, deriv.e);
    DerivativeState { p1: -v1 * v1 - b0 * v2 - e, p2: (b0 - v2) * v1, e: (1.0 - e) * v1 }
}

pub fn pack(state: &FieldState, deriv: &DerivativeState) -> CharVector {
    [state.p1, state.p2, state.e1, state.rho, deriv.p1, deriv.p2, deriv.e]
}

pub fn unpack(theta: f64, y: &CharVector) -> (FieldState, DerivativeState) {
    (
        FieldState::new(theta, y[3], y[0], y[1], y[2]),
        DerivativeState::new(y[4], y[5], y[6]),
    )
}

fn magnitude(y: &CharVector) -> f64 {
    y[4].abs().max(y[5].abs()).max(y[6].abs())
}

impl Dynamics {
    pub fn rate(self, theta: f64, y: &CharVector, b0: f64) -> CharVector {
        let (s, d) = unpack(theta, y);
        let (f, g) = match self {
            Dynamics::Relativistic => (rhs_rel(&s, b0), rhs_rel_extended(&s, &d, b0)),
            Dynamics::Nonrelativistic => (rhs_nonrel(&s, b0), rhs_nonrel_extended(&d, b0)),
        };
        [f.p1, f.p2, f.e1, f.rho, g.p1, g.p2, g.e]
    }

    /// Conserved quantities along characteristics. For the nonrelativistic
    /// system the energy V1² + V2² + E1² takes the place of K2.
    pub fn integrals(self, state: &FieldState, deriv: &DerivativeState, b0: f64) -> FirstIntegrals {
        let k2 = match self {
            Dynamics::Relativistic => 2.0 * lorentz_gamma(state.p1, state.p2) + state.e1 * state.e1,
            Dynamics::Nonrelativistic => state.p1 * state.p1 + state.p2 * state.p2 + state.e1 * state.e1,
        };
        FirstIntegrals { k1: state.p2 - b0 * state.e1, k2, c1: c1_of(deriv, b0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub theta: f64,
    pub state: FieldState,
    pub deriv: DerivativeState,
}

/// Which derivative crossed the blow-up threshold first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupComponent {
    P1,
    P2,
    E,
}

impl BlowupComponent {
    fn of(d: &DerivativeState) -> Self {
        let m = d.magnitude();
        if d.e.abs() == m {
            BlowupComponent::E
        } else if d.p1.abs() == m {
            BlowupComponent::P1
        } else {
            BlowupComponent::P2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breaking {
    /// First θ with max(|p1|, |p2|, |e|) ≥ D.
    pub time: f64,
    pub component: BlowupComponent,
    /// Singularity time from a reciprocal fit to the last decade of growth.
    pub extrapolated: Option<f64>,
    /// Reclassified step-size underflow rather than a threshold crossing.
    pub from_underflow: bool,
}

/// Largest relative drift of the conserved quantities before breaking.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegralsDrift {
    pub k1: f64,
    pub k2: f64,
    pub c1: f64,
    /// Residual of p2 = B0 + C1(e − 1) relative to max(1, |p2|).
    pub c1_identity: f64,
}

impl IntegralsDrift {
    pub fn max(&self) -> f64 {
        self.k1.max(self.k2).max(self.c1).max(self.c1_identity)
    }
}

#[derive(Debug, Clone)]
pub struct CharacteristicTrace {
    pub rho0: f64,
    pub b0: f64,
    pub dynamics: Dynamics,
    pub blowup_threshold: f64,
    pub samples: Vec<Sample>,
    pub breaking: Option<Breaking>,
    pub integrals_drift: IntegralsDrift,
    pub initial_integrals: FirstIntegrals,
    /// (θ, max|derivative|) at accepted steps once growth enters the last decade below D.
    pub growth: Vec<(f64, f64)>,
    pub steps: usize,
}

impl CharacteristicTrace {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trace has at least the seed sample")
    }

    /// The sample recorded at exactly `theta`, if any.
    pub fn sample_at(&self, theta: f64) -> Option<&Sample> {
        let tol = 1e-12 * theta.abs().max(1.0);
        self.samples.iter().find(|s| (s.theta - theta).abs() <= tol)
    }

    pub fn final_time(&self) -> f64 {
        self.last().theta
    }
}

struct DriftTracker {
    b0: f64,
    dynamics: Dynamics,
    init: FirstIntegrals,
    drift: IntegralsDrift,
}

impl DriftTracker {
    fn update(&mut self, theta: f64, y: &CharVector) {
        let (s, d) = unpack(theta, y);
        let now = self.dynamics.integrals(&s, &d, self.b0);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let dr = &mut self.drift;
        dr.k1 = dr.k1.max(rel(now.k1, self.init.k1));
        dr.k2 = dr.k2.max(rel(now.k2, self.init.k2));
        if let Some(c0) = self.init.c1 {
            if (d.e - 1.0).abs() >= C1_SUSPEND {
                if let Some(c) = now.c1 {
                    dr.c1 = dr.c1.max(rel(c, c0));
                }
            }
            let resid = (d.p2 - self.b0 - c0 * (d.e - 1.0)).abs() / d.p2.abs().max(1.0);
            dr.c1_identity = dr.c1_identity.max(resid);
        }
    }
}

/// Fits max|derivative| ≈ c/(θ* − θ) to the supplied points by least squares
/// on the reciprocal and returns θ*.
pub fn extrapolate_blowup(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let t_ref = points.last()?.0;
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, m) in points {
        let x = t - t_ref;
        let y = 1.0 / m;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let den = n * sxx - sx * sx;
    if den == 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / den;
    let intercept = (sy - slope * sx) / n;
    if !(slope < 0.0) {
        return None;
    }
    Some(t_ref - intercept / slope)
}

/// Integrates one characteristic from `seed` (taken at θ = `seed.0.theta`).
pub fn integrate(dynamics: Dynamics, seed: (FieldState, DerivativeState), config: &SimConfig) -> Result<CharacteristicTrace> {
    config.validate()?;
    let (s0, d0) = seed;
    let b0 = config.b0;
    let t0 = s0.theta;
    let t_end = t0 + config.horizon;
    let threshold = config.blowup_threshold;
    let mut f = |t: f64, y: &CharVector| dynamics.rate(t, y, b0);
    let y0 = pack(&s0, &d0);
    let init = dynamics.integrals(&s0, &d0, b0);

    let mut trace = CharacteristicTrace {
        rho0: s0.rho,
        b0,
        dynamics,
        blowup_threshold: threshold,
        samples: vec![Sample { theta: t0, state: s0, deriv: d0 }],
        breaking: None,
        integrals_drift: IntegralsDrift::default(),
        initial_integrals: init,
        growth: Vec::new(),
        steps: 0,
    };
    if magnitude(&y0) >= threshold {
        trace.breaking = Some(Breaking { time: t0, component: BlowupComponent::of(&d0), extrapolated: None, from_underflow: false });
        return Ok(trace);
    }

    let mut tracker = DriftTracker { b0, dynamics, init, drift: IntegralsDrift::default() };
    let mut outputs: Vec<f64> = config.output_times.iter().copied().filter(|&t| t > t0 && t <= t_end).collect();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    let mut next_output = 0usize;
    let mut next_grid = config.sample_interval.map(|dt| (1usize, dt));

    let control = StepControl::adaptive(config.rel_tol, config.abs_tol);
    let mut solver = Dopri5::new(&mut f, t0, y0, control);

    let push = |trace: &mut CharacteristicTrace, theta: f64, y: &CharVector| {
        let (state, deriv) = unpack(theta, y);
        if trace.samples.last().map_or(true, |s| theta > s.theta) {
            trace.samples.push(Sample { theta, state, deriv });
        }
    };

    while solver.t() < t_end {
        if solver.accepted >= config.max_steps {
            return Err(Error::TooManySteps(config.max_steps));
        }
        let seg: Segment<DIM> = match solver.step(&mut f, t_end) {
            Ok(seg) => seg,
            Err(Error::StepSizeUnderflow { theta, .. }) => {
                trace.steps = solver.accepted;
                trace.integrals_drift = tracker.drift;
                let y = *solver.y();
                push(&mut trace, theta, &y);
                let extrapolated = extrapolate_blowup(&trace.growth);
                if let Some(ts) = extrapolated {
                    if (theta - ts).abs() <= UNDERFLOW_WINDOW * ts.abs().max(1.0) {
                        let (_, d) = unpack(theta, &y);
                        trace.breaking = Some(Breaking {
                            time: theta,
                            component: BlowupComponent::of(&d),
                            extrapolated,
                            from_underflow: true,
                        });
                        return Ok(trace);
                    }
                }
                return Err(Error::StepSizeUnderflow { theta, partial: Some(Box::new(trace)) });
            }
            Err(e) => return Err(e),
        };
        let t1 = seg.t1();
        let y1 = seg.end();
        let m1 = magnitude(&y1);

        // scheduled outputs strictly before a possible crossing are handled below
        let crossing = if m1 >= threshold {
            let tc = seg.bisect(seg.t0, t1, EVENT_TOL, |_, y| magnitude(y) - threshold);
            Some(tc)
        } else {
            None
        };
        let t_stop = crossing.unwrap_or(t1);

        let mut due = Vec::new();
        if let Some((ref mut k, dt)) = next_grid {
            loop {
                let tg = t0 + *k as f64 * dt;
                if tg > t_stop || tg > t_end {
                    break;
                }
                due.push(tg);
                *k += 1;
            }
        }
        while next_output < outputs.len() && outputs[next_output] <= t_stop {
            due.push(outputs[next_output]);
            next_output += 1;
        }
        due.sort_by(f64::total_cmp);
        for t in due {
            push(&mut trace, t, &seg.eval(t));
        }

        if let Some(tc) = crossing {
            let mut yc = seg.eval(tc);
            let mut tc = tc;
            if magnitude(&yc) < threshold {
                tc = t1;
                yc = y1;
            }
            trace.growth.push((tc, magnitude(&yc)));
            push(&mut trace, tc, &yc);
            trace.steps = solver.accepted;
            trace.integrals_drift = tracker.drift;
            let (_, d) = unpack(tc, &yc);
            trace.breaking = Some(Breaking {
                time: tc,
                component: BlowupComponent::of(&d),
                extrapolated: extrapolate_blowup(&trace.growth),
                from_underflow: false,
            });
            return Ok(trace);
        }

        tracker.update(t1, &y1);
        if m1 >= threshold / 10.0 {
            trace.growth.push((t1, m1));
        } else {
            trace.growth.clear();
        }
        if config.sample_interval.is_none() {
            push(&mut trace, t1, &y1);
        }
    }
    let y = *solver.y();
    push(&mut trace, solver.t(), &y);
    trace.steps = solver.accepted;
    trace.integrals_drift = tracker.drift;
    Ok(trace)
}

/// Breaking time of a trace and the extrapolated singularity time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakingEstimate {
    pub threshold_time: f64,
    pub extrapolated: Option<f64>,
}

pub fn breaking_time(trace: &CharacteristicTrace) -> Option<BreakingEstimate> {
    trace.breaking.map(|b| BreakingEstimate {
        threshold_time: b.time,
        extrapolated: b.extrapolated.or_else(|| extrapolate_blowup(&trace.growth)),
    })
}

#[derive(Debug)]
pub struct Ensemble {
    pub seeds: Vec<f64>,
    pub traces: Vec<Result<CharacteristicTrace>>,
}

impl Ensemble {
    /// Earliest breaking over all traces: the breaking time of the solution.
    pub fn min_breaking_time(&self) -> Option<f64> {
        self.traces
            .iter()
            .filter_map(|t| t.as_ref().ok()?.breaking.map(|b| b.time))
            .min_by(f64::total_cmp)
    }

    pub fn ok_traces(&self) -> impl Iterator<Item = &CharacteristicTrace> {
        self.traces.iter().filter_map(|t| t.as_ref().ok())
    }

    pub fn failures(&self) -> usize {
        self.traces.iter().filter(|t| t.is_err()).count()
    }
}

/// One trace per seed, seeds uniformly spaced on [0, L). Seeds run in parallel;
/// the output order follows the seeds.
pub fn ensemble(data: &InitialData, config: &SimConfig) -> Result<Ensemble> {
    config.validate()?;
    if data.b0 != config.b0 {
        return Err(Error::validation(format!("data B0 = {} differs from config B0 = {}", data.b0, config.b0)));
    }
    let seeds = data.seeds(config.n_characteristics);
    let traces = seeds
        .par_iter()
        .map(|&rho| integrate(config.dynamics, data.sample(rho), config))
        .collect();
    Ok(Ensemble { seeds, traces })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S3: f64 = 1.732_050_807_568_877_2;

    fn fs(p1: f64, p2: f64, e1: f64) -> FieldState {
        FieldState::new(0.0, 0.0, p1, p2, e1)
    }

    #[test]
    fn rhs_rel_examples() {
        assert_eq!(rhs_rel(&fs(0.0, 0.0, 0.0), 4.0), FieldRate::default());
        assert_eq!(rhs_rel(&fs(0.0, 0.0, 1.0), 2.0), FieldRate { p1: -1.0, p2: 0.0, e1: 0.0, rho: 0.0 });
        let r = rhs_rel(&fs(S3, 0.0, 0.0), 1.0);
        assert_eq!(r.p1, 0.0);
        for v in [r.p2, r.e1, r.rho] {
            assert!((v - S3 / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rhs_rel_extended_examples() {
        let z = fs(0.0, 0.0, 0.0);
        assert_eq!(rhs_rel_extended(&z, &DerivativeState::new(1.0, 0.0, 0.0), 0.0), DerivativeState::new(-1.0, 0.0, 1.0));
        assert_eq!(rhs_rel_extended(&z, &DerivativeState::new(0.0, 1.0, 0.0), 2.0), DerivativeState::new(-2.0, 0.0, 0.0));
        assert_eq!(rhs_rel_extended(&z, &DerivativeState::new(0.0, 0.0, 1.0), 1.0), DerivativeState::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn rhs_nonrel_examples() {
        assert_eq!(rhs_nonrel(&fs(0.0, 0.0, 0.0), 1.0), FieldRate::default());
        assert_eq!(rhs_nonrel(&fs(1.0, 0.0, 0.0), 1.0), FieldRate { p1: 0.0, p2: 1.0, e1: 1.0, rho: 1.0 });
        assert_eq!(rhs_nonrel(&fs(0.0, 1.0, 0.0), 1.0), FieldRate { p1: -1.0, p2: 0.0, e1: 0.0, rho: 0.0 });
        assert_eq!(rhs_nonrel_extended(&DerivativeState::default(), 1.0), DerivativeState::default());
        assert_eq!(rhs_nonrel_extended(&DerivativeState::new(1.0, 0.0, 0.0), 0.0), DerivativeState::new(-1.0, 0.0, 1.0));
        assert_eq!(rhs_nonrel_extended(&DerivativeState::new(0.0, 1.0, 0.0), 1.0), DerivativeState::new(-1.0, 0.0, 0.0));
    }

    /// The extended system is the ρ-derivative of the field system: compare
    /// with a central difference of two neighbouring characteristics' rates.
    #[test]
    fn extended_rhs_is_rho_derivative() {
        let b0 = 0.8;
        let profile = |r: f64| fs(0.3 * r.cos(), 0.2 * (2.0 * r).sin(), 0.1 + 0.4 * r.sin());
        let dprof = |r: f64| DerivativeState::new(-0.3 * r.sin(), 0.4 * (2.0 * r).cos(), 0.4 * r.cos());
        let r = 0.7;
        let h = 1e-5;
        let (a, b) = (rhs_rel(&profile(r + h), b0), rhs_rel(&profile(r - h), b0));
        let fd = DerivativeState::new((a.p1 - b.p1) / (2.0 * h), (a.p2 - b.p2) / (2.0 * h), (a.e1 - b.e1) / (2.0 * h));
        // d/dθ(∂ρu) = ∂ρ(du/dθ along char) − vq1·∂ρu; compare the source part
        let s = profile(r);
        let d = dprof(r);
        let ext = rhs_rel_extended(&s, &d, b0);
        let (vq1, _) = velocity_derivatives(&s, &d);
        assert!((ext.p1 + vq1 * d.p1 - fd.p1).abs() < 1e-8);
        assert!((ext.p2 + vq1 * d.p2 - fd.p2).abs() < 1e-8);
        assert!((ext.e + vq1 * d.e - fd.e).abs() < 1e-8);
    }

    #[test]
    fn equilibrium_is_constant() {
        let cfg = SimConfig::new(1.0, 100.0);
        let t = integrate(Dynamics::Relativistic, (FieldState::default(), DerivativeState::default()), &cfg).unwrap();
        assert!(t.breaking.is_none());
        assert!(t.samples.iter().all(|s| s.state.p1 == 0.0 && s.deriv.e == 0.0));
        assert_eq!(t.final_time(), 100.0);
        assert!(breaking_time(&t).is_none());
    }

    #[test]
    fn riccati_branch_breaks() {
        // P2⁰ = B0·ρ, so p2 ≡ B0 and p1 obeys a Riccati equation that blows up
        let b0 = 1.0;
        let cfg = SimConfig::new(b0, 20.0);
        let t = integrate(
            Dynamics::Relativistic,
            (FieldState::default(), DerivativeState::new(0.0, b0, 0.0)),
            &cfg,
        )
        .unwrap();
        let b = t.breaking.expect("finite breaking");
        assert!(b.time < 5.0);
        assert!(t.last().deriv.magnitude() >= cfg.blowup_threshold);
        // p2 stays pinned at B0
        assert!(t.samples.iter().all(|s| (s.deriv.p2 - b0).abs() < 1e-8));
        let est = breaking_time(&t).unwrap();
        let ts = est.extrapolated.unwrap();
        assert!(ts >= est.threshold_time && ts - est.threshold_time < 1e-3, "{ts} {}", est.threshold_time);
    }

    #[test]
    fn extrapolation_recovers_pole() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| {
            let t = 1.0 - 1e-3 / (1.0 + i as f64);
            (t, 2.0 / (1.0 - t))
        }).collect();
        assert!((extrapolate_blowup(&pts).unwrap() - 1.0).abs() < 1e-12);
        assert!(extrapolate_blowup(&pts[..2]).is_none());
    }

    #[test]
    fn nonrel_positive_delta_breaks() {
        // V1⁰ = 0, V2⁰ = 0, (E1⁰)' = 1 at the seed and B0 = 0: Δ = 1 > 0
        let cfg = SimConfig { dynamics: Dynamics::Nonrelativistic, ..SimConfig::new(0.0, 20.0) };
        let t = integrate(cfg.dynamics, (FieldState::default(), DerivativeState::new(0.0, 0.0, 1.0)), &cfg).unwrap();
        assert!(t.breaking.is_some());
    }

    #[test]
    fn sampling_grid_and_outputs() {
        let cfg = SimConfig {
            sample_interval: Some(0.5),
            output_times: vec![0.3, 1.234],
            ..SimConfig::new(1.0, 3.0)
        };
        let seed = (FieldState::new(0.0, 0.0, 0.1, 0.0, 0.0), DerivativeState::new(0.0, 0.1, 0.05));
        let t = integrate(Dynamics::Relativistic, seed, &cfg).unwrap();
        let thetas: Vec<f64> = t.samples.iter().map(|s| s.theta).collect();
        assert!(thetas.windows(2).all(|w| w[1] > w[0]));
        for want in [0.3, 0.5, 1.0, 1.234, 1.5, 2.0, 2.5, 3.0] {
            assert!(t.sample_at(want).is_some(), "missing sample at {want}");
        }
    }

    #[test]
    fn outputs_inside_a_single_step_are_all_kept() {
        let cfg = SimConfig {
            sample_interval: Some(0.01),
            output_times: vec![0.005, 0.0051, 0.0152],
            rel_tol: 1e-3,
            abs_tol: 1e-3,
            ..SimConfig::new(0.5, 0.05)
        };
        let seed = (FieldState::new(0.0, 0.0, 0.01, 0.0, 0.0), DerivativeState::new(0.0, 0.0, 0.0));
        let t = integrate(Dynamics::Relativistic, seed, &cfg).unwrap();
        assert!(t.steps < 5);
        for want in [0.005, 0.0051, 0.01, 0.0152, 0.02, 0.05] {
            assert!(t.sample_at(want).is_some(), "missing sample at {want}");
        }
    }
}
