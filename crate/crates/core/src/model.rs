//! Domain types and the algebraic maps of the dimensionless model.

/// Lagrangian unknowns at time `theta` on the characteristic through `rho`.
///
/// In the nonrelativistic model the momentum slots carry the velocities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldState {
    pub theta: f64,
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
    pub e1: f64,
}

impl FieldState {
    pub fn new(theta: f64, rho: f64, p1: f64, p2: f64, e1: f64) -> Self {
        Self { theta, rho, p1, p2, e1 }
    }

    pub fn gamma(&self) -> f64 {
        lorentz_gamma(self.p1, self.p2)
    }

    pub fn is_finite(&self) -> bool {
        [self.theta, self.rho, self.p1, self.p2, self.e1]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Spatial derivatives ∂ρP1, ∂ρP2, ∂ρE1 carried along a characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivativeState {
    pub p1: f64,
    pub p2: f64,
    pub e: f64,
}

impl DerivativeState {
    pub fn new(p1: f64, p2: f64, e: f64) -> Self {
        Self { p1, p2, e }
    }

    /// max(|p1|, |p2|, |e|), the quantity watched by the blow-up detector.
    pub fn magnitude(&self) -> f64 {
        self.p1.abs().max(self.p2.abs()).max(self.e.abs())
    }

    pub fn density(&self) -> f64 {
        density(self.e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegrals {
    pub k1: f64,
    pub k2: f64,
    /// `None` when the derivative state sits on the e = 1 branch or was not supplied.
    pub c1: Option<f64>,
}

/// Below this distance from e = 1 the C1 integral is reported as undefined.
pub const C1_DEGENERACY: f64 = 1e-14;

pub fn lorentz_gamma(p1: f64, p2: f64) -> f64 {
    (1.0 + p1 * p1 + p2 * p2).sqrt()
}

pub fn velocities(p1: f64, p2: f64) -> (f64, f64) {
    let g = lorentz_gamma(p1, p2);
    (p1 / g, p2 / g)
}

/// K1 = P2 − B0·E1 and K2 = 2γ + E1².
pub fn first_integrals(state: &FieldState, b0: f64) -> FirstIntegrals {
    FirstIntegrals {
        k1: state.p2 - b0 * state.e1,
        k2: 2.0 * state.gamma() + state.e1 * state.e1,
        c1: None,
    }
}

/// First integrals including C1 of the derivative system.
pub fn all_integrals(state: &FieldState, deriv: &DerivativeState, b0: f64) -> FirstIntegrals {
    FirstIntegrals {
        c1: c1_of(deriv, b0),
        ..first_integrals(state, b0)
    }
}

/// C1 = (p2 − B0)/(e − 1), undefined on the e = 1 branch.
pub fn c1_of(deriv: &DerivativeState, b0: f64) -> Option<f64> {
    let den = deriv.e - 1.0;
    if den.abs() < C1_DEGENERACY {
        None
    } else {
        Some((deriv.p2 - b0) / den)
    }
}

/// Electron density N = 1 − ∂ρE1.
pub fn density(e: f64) -> f64 {
    1.0 - e
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn gamma_examples() {
        assert_eq!(lorentz_gamma(0.0, 0.0), 1.0);
        assert!((lorentz_gamma(S3, 0.0) - 2.0).abs() < 1e-15);
        assert!((lorentz_gamma(3.0, 4.0) - 26f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(velocities(0.0, 0.0), (0.0, 0.0));
        let (v1, v2) = velocities(S3, 0.0);
        assert!((v1 - S3 / 2.0).abs() < 1e-15 && v2 == 0.0);
        let (v1, v2) = velocities(0.0, S3);
        assert!(v1 == 0.0 && (v2 - S3 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn integral_examples() {
        let fi = first_integrals(&FieldState::new(0.0, 0.0, 0.0, 0.0, 0.0), 3.0);
        assert_eq!((fi.k1, fi.k2), (0.0, 2.0));
        let fi = first_integrals(&FieldState::new(0.0, 0.0, 0.0, 1.0, 0.0), 2.0);
        assert_eq!(fi.k1, 1.0);
        assert!((fi.k2 - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        let fi = first_integrals(&FieldState::new(0.0, 0.0, S3, 0.0, 1.0), 1.0);
        assert_eq!(fi.k1, -1.0);
        assert!((fi.k2 - 5.0).abs() < 1e-14);
    }

    #[test]
    fn c1_examples() {
        assert_eq!(c1_of(&DerivativeState::new(0.0, 1.5, 0.0), 1.5), Some(0.0));
        assert_eq!(c1_of(&DerivativeState::new(0.0, 2.0, 0.0), 1.0), Some(-1.0));
        assert_eq!(c1_of(&DerivativeState::new(0.0, 0.0, 1.0), 1.0), None);
        let fi = all_integrals(&FieldState::default(), &DerivativeState::new(0.0, 2.0, 0.0), 1.0);
        assert_eq!(fi.c1, Some(-1.0));
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(0.0), 1.0);
        assert_eq!(density(0.5), 0.5);
        assert_eq!(density(-1.0), 2.0);
    }

    proptest! {
        #[test]
        fn gamma_at_least_one(p1 in -1e3f64..1e3, p2 in -1e3f64..1e3) {
            let g = lorentz_gamma(p1, p2);
            prop_assert!(g >= 1.0);
            if p1 != 0.0 || p2 != 0.0 {
                // equality only at rest, up to the resolution of 1 + x²
                prop_assert!(g > 1.0 || p1 * p1 + p2 * p2 < 4.0 * f64::EPSILON);
            }
        }

        #[test]
        fn subluminal(p1 in -1e6f64..1e6, p2 in -1e6f64..1e6) {
            let (v1, v2) = velocities(p1, p2);
            prop_assert!(v1 * v1 + v2 * v2 < 1.0);
        }

        #[test]
        fn density_complements_e(e in -1e6f64..1e6) {
            prop_assert!((density(e) + e - 1.0).abs() <= f64::EPSILON * e.abs().max(1.0));
        }

        #[test]
        fn k2_at_least_two(p1 in -10f64..10., p2 in -10f64..10., e1 in -10f64..10., b0 in -5f64..5.) {
            let fi = first_integrals(&FieldState::new(0.0, 0.0, p1, p2, e1), b0);
            prop_assert!(fi.k2 >= 2.0);
        }
    }
}
