//! Traveling waves P2 = 𝒫(ρ − wθ) with K1, K2 fixed.
//!
//! Along a characteristic dξ/dθ = V1 − w, so d𝒫/dξ = B0P1/(P1 − wγ). In the
//! angle P2 = c + r sin φ used for the scalar route this becomes
//! dξ/dφ = (sgn(B0)·r cos φ·√h − wD)/(|B0|√h), which is smooth; the profile
//! stays single-valued while dξ/dφ keeps its sign and breaks where it vanishes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::scalar::{gamma_numerator, radicand, turning_points, TurningPoints};

const PHI_STEPS_PER_TURN: usize = 512;
const BISECT_TOL: f64 = 1e-14;

/// Which denominator to use in the profile equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WaveDenominator {
    /// −(B0²K2 − (𝒫−K1)²)·w + 2B0²·P1, from d𝒫/dξ = B0P1/(P1 − wγ).
    #[default]
    Derived,
    /// −(B0²K2 − (𝒫−K1)²)·w + 2B0²·𝒫, kept for comparison.
    ProfileValue,
}

/// d𝒫/dξ at a profile value. `branch_sign` is the sign of P1.
pub fn profile_rhs(p: f64, k1: f64, k2: f64, b0: f64, w: f64, branch_sign: f64, form: WaveDenominator) -> Result<f64> {
    let rad = radicand(p, k1, k2, b0);
    if rad < 0.0 {
        return Err(Error::Domain { radicand: rad, at: p });
    }
    let d = gamma_numerator(p, k1, k2, b0);
    let s = branch_sign.signum();
    let den = match form {
        WaveDenominator::Derived => -d * w + s * rad.sqrt(),
        WaveDenominator::ProfileValue => -d * w + 2.0 * b0 * b0 * p,
    };
    if den == 0.0 {
        return Err(Error::ZeroDenominator { at: p });
    }
    Ok(s * b0 * rad.sqrt() / den)
}

#[derive(Debug, Clone)]
pub struct TravelingWave {
    pub w: f64,
    pub k1: f64,
    pub k2: f64,
    pub b0: f64,
    pub xi: Vec<f64>,
    /// 𝒫(ξ) at the sample points.
    pub profile: Vec<f64>,
    pub p1: Vec<f64>,
    pub e1: Vec<f64>,
    /// First ξ where P1 − wγ vanished: the profile breaks there.
    pub terminated_at: Option<f64>,
    /// ξ-length of one oscillation, equal to |w|·T.
    pub wavelength: Option<f64>,
}

struct Angle<'a> {
    tp: &'a TurningPoints,
    w: f64,
}

impl Angle<'_> {
    fn eta(&self, phi: f64) -> f64 {
        self.tp.center() + self.tp.half_width() * phi.sin()
    }

    fn numerator(&self, phi: f64) -> f64 {
        let (b0, eta) = (self.tp.b0, self.eta(phi));
        let h = self.tp.cofactor(eta).max(0.0).sqrt();
        b0.signum() * self.tp.half_width() * phi.cos() * h - self.w * gamma_numerator(eta, self.tp.k1, self.tp.k2, b0)
    }

    fn dxi(&self, phi: f64) -> f64 {
        let h = self.tp.cofactor(self.eta(phi)).sqrt();
        self.numerator(phi) / (self.tp.b0.abs() * h)
    }

    fn xi_between(&self, a: f64, b: f64) -> f64 {
        super::scalar::gauss_panel(|p| self.dxi(p), a, b)
    }

    fn fields(&self, phi: f64) -> (f64, f64, f64) {
        let (b0, k1) = (self.tp.b0, self.tp.k1);
        let eta = self.eta(phi);
        let p1 = b0.signum() * self.tp.half_width() * phi.cos() * self.tp.cofactor(eta).max(0.0).sqrt() / (2.0 * b0 * b0);
        (p1, eta, (eta - k1) / b0)
    }
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    while (hi - lo).abs() > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Profile on ξ ∈ [0, xi_max] starting from 𝒫(0) = `p2_at_0` on the branch
/// sign(P1) = `branch_sign`.
pub fn traveling_wave(w: f64, k1: f64, k2: f64, b0: f64, xi_max: f64, p2_at_0: f64, branch_sign: f64) -> Result<TravelingWave> {
    if !(xi_max > 0.0) {
        return Err(Error::validation("xi_max must be positive"));
    }
    let rad = radicand(p2_at_0, k1, k2, b0);
    if rad < -1e-12 {
        return Err(Error::Domain { radicand: rad, at: p2_at_0 });
    }
    let tp = turning_points(k1, k2, b0, p2_at_0)?;
    let mut wave = TravelingWave { w, k1, k2, b0, xi: vec![], profile: vec![], p1: vec![], e1: vec![], terminated_at: None, wavelength: None };
    if tp.is_degenerate() {
        let n = 65;
        for i in 0..n {
            wave.xi.push(xi_max * i as f64 / (n - 1) as f64);
            wave.profile.push(tp.center());
            wave.p1.push(0.0);
            wave.e1.push((tp.center() - k1) / b0);
        }
        return Ok(wave);
    }
    let angle = Angle { tp: &tp, w };
    let s = ((p2_at_0 - tp.center()) / tp.half_width()).clamp(-1.0, 1.0);
    let phi0 = if b0 * branch_sign < 0.0 { PI - s.asin() } else { s.asin() };

    // march φ in the direction that makes ξ increase
    let dir = if angle.dxi(phi0) >= 0.0 { 1.0 } else { -1.0 };
    let step = dir * 2.0 * PI / PHI_STEPS_PER_TURN as f64;
    let record = |wave: &mut TravelingWave, xi: f64, phi: f64| {
        let (p1, p2, e1) = angle.fields(phi);
        wave.xi.push(xi);
        wave.profile.push(p2);
        wave.p1.push(p1);
        wave.e1.push(e1);
    };

    let g0 = angle.numerator(phi0);
    let crosses = |phi: f64| g0 != 0.0 && (angle.numerator(phi) > 0.0) != (g0 > 0.0);
    if !(1..=PHI_STEPS_PER_TURN).any(|i| crosses(phi0 + step * i as f64)) {
        let turn: f64 = (0..PHI_STEPS_PER_TURN).map(|i| angle.xi_between(phi0 + step * i as f64, phi0 + step * (i + 1) as f64)).sum();
        wave.wavelength = Some(turn.abs());
    }

    let mut phi = phi0;
    let mut xi = 0.0;
    record(&mut wave, xi, phi);
    for _ in 0..10_000_000usize {
        let next = phi + step;
        if crosses(next) {
            let pc = bisect(phi, next, |p| angle.numerator(p));
            let xc = xi + angle.xi_between(phi, pc);
            if xc <= xi_max {
                record(&mut wave, xc, pc);
                wave.terminated_at = Some(xc);
                return Ok(wave);
            }
        }
        let dx = angle.xi_between(phi, next);
        if xi + dx >= xi_max {
            let pe = bisect(phi, next, |p| angle.xi_between(phi, p) - (xi_max - xi));
            record(&mut wave, xi_max, pe);
            return Ok(wave);
        }
        xi += dx;
        phi = next;
        record(&mut wave, xi, phi);
    }
    Err(Error::TooManySteps(10_000_000))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::scalar::period;

    #[test]
    fn equilibrium_profile_is_flat() {
        let wave = traveling_wave(1.0, 0.0, 2.0, 1.0, 5.0, 0.0, 1.0).unwrap();
        assert!(wave.profile.iter().all(|&p| p.abs() < 1e-7));
        assert!(wave.terminated_at.is_none());
    }

    #[test]
    fn fast_wave_is_periodic() {
        let (k1, k2, b0, w) = (0.0, 2.01, 1.0, 10.0);
        let t = period(k1, k2, b0, 0.0).unwrap();
        let wave = traveling_wave(w, k1, k2, b0, 2.0 * w * t, 0.0, 1.0).unwrap();
        assert!(wave.terminated_at.is_none());
        let lambda = wave.wavelength.unwrap();
        assert!((lambda - w * t).abs() < 1e-9 * lambda, "{lambda} vs {}", w * t);
        let tp = turning_points(k1, k2, b0, 0.0).unwrap();
        assert!(wave.profile.iter().all(|&p| p >= tp.p2_minus - 1e-12 && p <= tp.p2_plus + 1e-12));
    }

    #[test]
    fn slow_wave_breaks() {
        let wave = traveling_wave(0.01, 0.0, 2.01, 1.0, 100.0, 0.0, 1.0).unwrap();
        let xt = wave.terminated_at.expect("profile breaks");
        assert!(xt > 0.0 && xt < 100.0);
        let n = wave.xi.len();
        let (p1, p2) = (wave.p1[n - 1], wave.profile[n - 1]);
        let g = gamma_numerator(p2, 0.0, 2.01, 1.0) / 2.0;
        assert!((p1 - 0.01 * g).abs() < 1e-10);
    }

    #[test]
    fn profile_value_denominator_differs() {
        let p = 0.03;
        let a = profile_rhs(p, 0.0, 2.01, 1.0, 10.0, 1.0, WaveDenominator::Derived).unwrap();
        let b = profile_rhs(p, 0.0, 2.01, 1.0, 10.0, 1.0, WaveDenominator::ProfileValue).unwrap();
        assert!((a - b).abs() > 1e-6);
    }
}
