//! Scalar P2 dynamics with K1, K2 fixed, its turning points and period.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::ode::{self, StepControl};

/// Roots closer than this (relative) are merged into a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-7;
const PERIOD_TOL: f64 = 1e-10;

/// B0²K2 − (η − K1)², which equals 2B0²γ on the orbit.
pub fn gamma_numerator(eta: f64, k1: f64, k2: f64, b0: f64) -> f64 {
    let d = eta - k1;
    b0 * b0 * k2 - d * d
}

/// (B0²K2 − (η−K1)²)² − 4B0⁴(η² + 1).
pub fn radicand(eta: f64, k1: f64, k2: f64, b0: f64) -> f64 {
    let d = gamma_numerator(eta, k1, k2, b0);
    let b4 = b0.powi(4);
    d * d - 4.0 * b4 * (eta * eta + 1.0)
}

/// Monic coefficients [c3, c2, c1, c0] of the radicand as a quartic in η.
fn quartic(k1: f64, k2: f64, b0: f64) -> [f64; 4] {
    let a = b0 * b0 * k2 - k1 * k1;
    let b4 = b0.powi(4);
    [-4.0 * k1, 4.0 * k1 * k1 - 2.0 * a - 4.0 * b4, 4.0 * k1 * a, a * a - 4.0 * b4]
}

fn horner(c: &[f64; 4], x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut dp = 0.0;
    for &ci in c {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

/// dP2/dθ = ±B0·√radicand / (B0²K2 − (P2−K1)²); `branch_sign` is the sign of P1.
pub fn p2_scalar_rhs(p2: f64, k1: f64, k2: f64, b0: f64, branch_sign: f64) -> Result<f64> {
    if b0 == 0.0 {
        return Err(Error::validation("the scalar P2 equation needs B0 != 0"));
    }
    let rad = radicand(p2, k1, k2, b0);
    if rad < 0.0 {
        return Err(Error::Domain { radicand: rad, at: p2 });
    }
    let den = gamma_numerator(p2, k1, k2, b0);
    if den == 0.0 {
        return Err(Error::ZeroDenominator { at: p2 });
    }
    Ok(branch_sign.signum() * b0 * rad.sqrt() / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurningPoints {
    pub p2_minus: f64,
    pub p2_plus: f64,
    /// Real roots of the radicand, ascending, double roots listed twice.
    pub all_roots: Vec<f64>,
    pub(crate) k1: f64,
    pub(crate) k2: f64,
    pub(crate) b0: f64,
}

impl TurningPoints {
    pub fn is_degenerate(&self) -> bool {
        self.p2_plus == self.p2_minus
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.p2_plus + self.p2_minus)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.p2_plus - self.p2_minus)
    }

    /// h(η) > 0 with radicand = (P⁺ − η)(η − P⁻)·h(η).
    pub fn cofactor(&self, eta: f64) -> f64 {
        let c = quartic(self.k1, self.k2, self.b0);
        let s = self.p2_plus + self.p2_minus;
        let p = self.p2_plus * self.p2_minus;
        // synthetic division by η² − sη + p
        let q1 = c[0] + s;
        let q0 = c[1] + s * q1 - p;
        -(eta * eta + q1 * eta + q0)
    }
}

/// Real roots of the radicand from companion-matrix eigenvalues, polished by
/// Newton, and the admissible pair bracketing `p2_seed`.
pub fn turning_points(k1: f64, k2: f64, b0: f64, p2_seed: f64) -> Result<TurningPoints> {
    if b0 == 0.0 {
        return Err(Error::validation("turning points need B0 != 0"));
    }
    if !(k2 >= 2.0) {
        return Err(Error::validation(format!("K2 = {k2} is below the minimum 2")));
    }
    let c = quartic(k1, k2, b0);
    let companion = Matrix4::new(
        -c[0], -c[1], -c[2], -c[3],
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
    );
    let scale = 1.0 + c.iter().fold(0.0_f64, |m, v| m.max(v.abs())).powf(0.25);
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= DOUBLE_ROOT_TOL.sqrt() * scale)
        .map(|z| {
            let mut x = z.re;
            for _ in 0..2 {
                let (p, dp) = horner(&c, x);
                if dp != 0.0 {
                    let nx = x - p / dp;
                    if nx.is_finite() && horner(&c, nx).0.abs() <= p.abs() {
                        x = nx;
                    }
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);

    let close = |a: f64, b: f64| (a - b).abs() <= DOUBLE_ROOT_TOL * scale;
    let admissible = |lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        gamma_numerator(mid, k1, k2, b0) > 0.0 && (close(lo, hi) || radicand(mid, k1, k2, b0) > 0.0)
    };
    let tp = |lo: f64, hi: f64, roots: Vec<f64>| TurningPoints { p2_minus: lo, p2_plus: hi, all_roots: roots, k1, k2, b0 };

    for w in roots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if close(lo, hi) && close(p2_seed, lo) && gamma_numerator(lo, k1, k2, b0) > 0.0 {
            let m = 0.5 * (lo + hi);
            return Ok(tp(m, m, roots.clone()));
        }
        let slack = DOUBLE_ROOT_TOL * scale;
        if lo - slack <= p2_seed && p2_seed <= hi + slack && !close(lo, hi) && admissible(lo, hi) {
            return Ok(tp(lo, hi, roots.clone()));
        }
    }
    Err(Error::NoBracketingRoots { seed: p2_seed })
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn rule16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// ∫ f over [a, b] with one 16-point Gauss–Legendre panel.
pub(crate) fn gauss_panel(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule16().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// ∫ f over [a, b], Gauss–Legendre panels doubled until successive
/// estimates agree to `tol`.
pub(crate) fn integrate_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let rule = rule16();
    let estimate = |panels: usize| {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let mid = a + (k as f64 + 0.5) * h;
                rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
            })
            .sum::<f64>()
    };
    let mut panels = 1;
    let mut prev = estimate(panels);
    while panels < 1 << 16 {
        panels *= 2;
        let next = estimate(panels);
        if (next - prev).abs() < tol {
            return next;
        }
        prev = next;
    }
    prev
}

/// Oscillation period along the characteristic through `p2_seed`.
///
/// With η = c + r sin φ the endpoint singularities cancel and the integrand is
/// smooth; a double root gives the small-amplitude limit directly.
pub fn period(k1: f64, k2: f64, b0: f64, p2_seed: f64) -> Result<f64> {
    let tp = turning_points(k1, k2, b0, p2_seed)?;
    Ok(period_of(&tp))
}

pub fn period_of(tp: &TurningPoints) -> f64 {
    let (c, r) = (tp.center(), tp.half_width());
    let integrand = |phi: f64| {
        let eta = c + r * phi.sin();
        gamma_numerator(eta, tp.k1, tp.k2, tp.b0) / tp.cofactor(eta).sqrt()
    };
    let scale = 2.0 / tp.b0.abs();
    if tp.is_degenerate() {
        return scale * PI * integrand(0.0);
    }
    scale * integrate_panels(integrand, -FRAC_PI_2, FRAC_PI_2, PERIOD_TOL / scale)
}

/// P2(θ) at the requested times from the scalar equation.
///
/// The branch of ± is tracked through the angle φ with P2 = c + r sin φ,
/// for which dφ/dθ = |B0|·√h(P2)/(B0²K2 − (P2−K1)²) never changes sign;
/// passing a turning point is the same as cos φ changing sign.
pub fn p2_route(k1: f64, k2: f64, b0: f64, p2_0: f64, p1_0: f64, thetas: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let tp = turning_points(k1, k2, b0, p2_0)?;
    let (c, r) = (tp.center(), tp.half_width());
    if tp.is_degenerate() {
        return Ok(vec![c; thetas.len()]);
    }
    let s = ((p2_0 - c) / r).clamp(-1.0, 1.0);
    let phi0 = if (b0 * p1_0) < 0.0 { PI - s.asin() } else { s.asin() };
    let mut f = |_: f64, y: &[f64; 1]| {
        let eta = c + r * y[0].sin();
        [b0.abs() * tp.cofactor(eta).sqrt() / gamma_numerator(eta, k1, k2, b0)]
    };
    let mut out = Vec::with_capacity(thetas.len());
    let mut t = 0.0;
    let mut y = [phi0];
    for &target in thetas {
        if target < t {
            return Err(Error::validation("output times must be nondecreasing and nonnegative"));
        }
        if target > t {
            let (t1, y1) = ode::solve(&mut f, t, y, target, StepControl::adaptive(rel_tol, rel_tol * 1e-2), 10_000_000, |_| true)?;
            t = t1;
            y = y1;
        }
        out.push(c + r * y[0].sin());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        assert_eq!(p2_scalar_rhs(0.0, 0.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
        let v = p2_scalar_rhs(0.0, 0.0, 2.01, 1.0, 1.0).unwrap();
        assert!((v - 0.0401f64.sqrt() / 2.01).abs() < 1e-13);
        assert!((v - 0.099626).abs() < 1e-6);
        assert_eq!(p2_scalar_rhs(0.0, 0.0, 2.01, 1.0, -1.0).unwrap(), -v);
        assert!(matches!(p2_scalar_rhs(0.5, 0.0, 2.01, 1.0, 1.0), Err(Error::Domain { .. })));
        assert!(p2_scalar_rhs(0.0, 0.0, 2.01, 0.0, 1.0).is_err());
    }

    #[test]
    fn quartic_expansion_matches_radicand() {
        let (k1, k2, b0) = (0.3, 2.7, -1.4);
        let c = quartic(k1, k2, b0);
        for &x in &[-2.0, -0.3, 0.0, 0.9, 3.1] {
            let r = radicand(x, k1, k2, b0);
            assert!((horner(&c, x).0 - r).abs() < 1e-10 * r.abs().max(1.0));
        }
    }

    #[test]
    fn equilibrium_double_root() {
        let tp = turning_points(0.0, 2.0, 1.0, 0.0).unwrap();
        assert!(tp.is_degenerate());
        assert!(tp.p2_plus.abs() < 1e-7);
        assert_eq!(tp.all_roots.len(), 4);
        let t = period_of(&tp);
        assert!((t - 2.0 * PI / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn small_orbit_roots_closed_form() {
        // η⁴ − 8.02η² + 0.0401 = 0: η² = 4.01 − √(4.01² − 0.0401)
        let tp = turning_points(0.0, 2.01, 1.0, 0.0).unwrap();
        let eta = (4.01 - (4.01f64 * 4.01 - 0.0401).sqrt()).sqrt();
        assert!((tp.p2_plus - eta).abs() < 1e-13);
        assert!((tp.p2_minus + eta).abs() < 1e-13);
        assert!((eta - 0.1 / 2f64.sqrt()).abs() < 0.01);
        let mid = radicand(0.5 * (tp.p2_plus + tp.p2_minus), 0.0, 2.01, 1.0);
        assert!(mid > 0.0);
    }

    #[test]
    fn far_seed_has_no_bracket() {
        // radicand is positive at 5 but B0²K2 − η² < 0 there
        assert!(radicand(5.0, 0.0, 2.01, 1.0) > 0.0);
        assert!(matches!(turning_points(0.0, 2.01, 1.0, 5.0), Err(Error::NoBracketingRoots { .. })));
    }

    #[test]
    fn seed_on_a_turning_point() {
        let tp = turning_points(0.0, 2.01, 1.0, 0.0).unwrap();
        let at = turning_points(0.0, 2.01, 1.0, tp.p2_plus).unwrap();
        assert_eq!(at.p2_plus, tp.p2_plus);
        assert_eq!(at.p2_minus, tp.p2_minus);
    }

    #[test]
    fn period_near_small_amplitude_limit() {
        let eps2 = 0.01;
        for b0 in [1.0f64, 2.0, -2.0] {
            let t = period(0.0, 2.0 + eps2, b0, 0.0).unwrap();
            let t0 = 2.0 * PI / (1.0 + b0 * b0).sqrt();
            assert!((t - t0).abs() <= 2.0 * eps2, "{b0}: {t} vs {t0}");
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let r = integrate_panels(|x| x.powi(9) + 3.0 * x * x, -1.0, 2.0, 1e-14);
        assert!((r - ((1024.0 - 1.0) / 10.0 + 9.0)).abs() < 1e-11);
    }

    #[test]
    fn route_stays_in_band_and_returns() {
        let (k1, k2, b0) = (0.0, 2.01, 1.0);
        let t = period(k1, k2, b0, 0.0).unwrap();
        let p2 = p2_route(k1, k2, b0, 0.0, 0.1, &[0.0, 0.25 * t, 0.5 * t, t], 1e-12).unwrap();
        let tp = turning_points(k1, k2, b0, 0.0).unwrap();
        assert!((p2[1] - tp.p2_plus).abs() < 1e-9);
        assert!(p2[2].abs() < 1e-9);
        assert!(p2[3].abs() < 1e-9);
    }
}
