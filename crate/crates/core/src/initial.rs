//! Initial data families.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{DerivativeState, FieldState};
use crate::profile::Profile;

/// Points of the uniform grid used to validate family invariants.
pub const VALIDATION_POINTS: usize = 1024;
/// Tolerance for family invariants on the validation grid.
pub const FAMILY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    General,
    /// P2⁰ − B0·E1⁰ ≡ k1.
    ConstantK1 { k1: f64 },
    /// 2γ⁰ + (E1⁰)² ≡ k2.
    ConstantK2 { k2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    pub fn value(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            BranchSign::Minus
        } else {
            BranchSign::Plus
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BranchSign::Plus => BranchSign::Minus,
            BranchSign::Minus => BranchSign::Plus,
        }
    }
}

/// Initial profiles P1⁰, P2⁰, E1⁰ on an `domain_length`-periodic line.
///
/// For the nonrelativistic model the momentum profiles are read as V1⁰, V2⁰.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub domain_length: f64,
    pub b0: f64,
    pub p1: Profile,
    pub p2: Profile,
    pub e1: Profile,
    pub family: Family,
}

impl InitialData {
    pub fn general(b0: f64, domain_length: f64, p1: Profile, p2: Profile, e1: Profile) -> Result<Self> {
        let data = Self { domain_length, b0, p1, p2, e1, family: Family::General };
        data.validate()?;
        Ok(data)
    }

    /// P2⁰ := B0·E1⁰ + k1.
    pub fn constant_k1(b0: f64, domain_length: f64, p1: Profile, e1: Profile, k1: f64) -> Result<Self> {
        let p2 = e1.scale(b0) + k1;
        let data = Self { domain_length, b0, p1, p2, e1, family: Family::ConstantK1 { k1 } };
        data.validate()?;
        Ok(data)
    }

    /// P1⁰ := ±√(((k2 − (E1⁰)²)/2)² − 1 − (P2⁰)²) with one global sign.
    ///
    /// The radicand must be strictly positive on the validation grid, except for
    /// the equilibrium k2 = 2 with vanishing P2⁰, E1⁰, which yields P1⁰ ≡ 0.
    pub fn constant_k2(
        b0: f64,
        domain_length: f64,
        p2: Profile,
        e1: Profile,
        k2: f64,
        sign: BranchSign,
    ) -> Result<Self> {
        if !(k2 >= 2.0) {
            return Err(Error::validation(format!("K2 = {k2} is below the minimum 2")));
        }
        let half = (Profile::constant(k2) - e1.square()).scale(0.5);
        let radicand = half.square() - p2.square() + -1.0;
        let grid = validation_grid(domain_length);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut worst_at = 0.0;
        for &rho in &grid {
            let r = radicand.value(rho);
            if r < lo {
                lo = r;
                worst_at = rho;
            }
            hi = hi.max(r);
        }
        let p1 = if k2 == 2.0 && lo.abs() <= FAMILY_TOL && hi.abs() <= FAMILY_TOL {
            Profile::zero()
        } else if lo <= 0.0 {
            return Err(Error::Domain { radicand: lo, at: worst_at });
        } else {
            radicand.sqrt().scale(sign.value())
        };
        let data = Self { domain_length, b0, p1, p2, e1, family: Family::ConstantK2 { k2 } };
        data.validate()?;
        Ok(data)
    }

    /// The small-perturbation family
    /// P1⁰ = ε cos kρ, P2⁰ = εB0/√(1+B0²) sin kρ, E1⁰ = ε/√(1+B0²) sin kρ.
    ///
    /// It has K1 ≡ 0, while K2 is constant only to O(ε²).
    pub fn small_perturbation(b0: f64, epsilon: f64, k: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !(k > 0.0) {
            return Err(Error::validation("small perturbation needs epsilon >= 0 and k > 0"));
        }
        let w = (1.0 + b0 * b0).sqrt();
        Self::constant_k1(
            b0,
            2.0 * PI / k,
            Profile::cos(epsilon, k, 0.0),
            Profile::sin(epsilon / w, k, 0.0),
            0.0,
        )
    }

    pub fn equilibrium(b0: f64, domain_length: f64) -> Result<Self> {
        Self::general(b0, domain_length, Profile::zero(), Profile::zero(), Profile::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.domain_length > 0.0) || !self.domain_length.is_finite() {
            return Err(Error::validation("domain length must be positive"));
        }
        if !self.b0.is_finite() {
            return Err(Error::validation("B0 must be finite"));
        }
        let grid = validation_grid(self.domain_length);
        for &rho in &grid {
            let (s, d) = self.sample(rho);
            if !s.is_finite() || ![d.p1, d.p2, d.e].iter().all(|v| v.is_finite()) {
                return Err(Error::validation(format!("profile is not finite at rho = {rho}")));
            }
        }
        match self.family {
            Family::General => {}
            Family::ConstantK1 { k1 } => {
                if let Some(rho) = grid.iter().copied().find(|&r| (self.k1_at(r) - k1).abs() > FAMILY_TOL) {
                    return Err(Error::validation(format!("K1 is not constant at rho = {rho}")));
                }
            }
            Family::ConstantK2 { k2 } => {
                if let Some(rho) = grid.iter().copied().find(|&r| (self.k2_at(r) - k2).abs() > FAMILY_TOL) {
                    return Err(Error::validation(format!("K2 is not constant at rho = {rho}")));
                }
            }
        }
        Ok(())
    }

    /// Field values and exact spatial derivatives at `rho`, at θ = 0.
    pub fn sample(&self, rho: f64) -> (FieldState, DerivativeState) {
        let a = self.p1.jet(rho);
        let b = self.p2.jet(rho);
        let c = self.e1.jet(rho);
        (
            FieldState::new(0.0, rho, a.v, b.v, c.v),
            DerivativeState::new(a.d1, b.d1, c.d1),
        )
    }

    pub fn k1_at(&self, rho: f64) -> f64 {
        self.p2.value(rho) - self.b0 * self.e1.value(rho)
    }

    pub fn k2_at(&self, rho: f64) -> f64 {
        let (s, _) = self.sample(rho);
        2.0 * s.gamma() + s.e1 * s.e1
    }

    /// `n` seeds uniformly spaced on [0, L).
    pub fn seeds(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.domain_length * i as f64 / n as f64).collect()
    }
}

pub fn validation_grid(length: f64) -> Vec<f64> {
    (0..VALIDATION_POINTS)
        .map(|i| length * i as f64 / VALIDATION_POINTS as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_from_constant_k2() {
        let d = InitialData::constant_k2(1.0, 2.0 * PI, Profile::zero(), Profile::zero(), 2.0, BranchSign::Plus).unwrap();
        for &rho in &[0.0, 1.0, 4.0] {
            let (s, g) = d.sample(rho);
            assert_eq!((s.p1, s.p2, s.e1), (0.0, 0.0, 0.0));
            assert_eq!((g.p1, g.p2, g.e), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn small_perturbation_amplitude() {
        let d = InitialData::small_perturbation(1.0, 0.1, 1.0).unwrap();
        let v = d.p2.value(PI / 2.0);
        assert!((v - 0.1 / 2f64.sqrt()).abs() < 1e-15);
        assert!((v - 0.070711).abs() < 1e-6);
        assert_eq!(d.family, Family::ConstantK1 { k1: 0.0 });
    }

    #[test]
    fn constant_k2_rejects_negative_radicand() {
        // radicand at ρ = π/2 is ((2 − 0.25)/2)² − 1 < 0
        let r: f64 = ((2.0 - 0.25) / 2.0f64).powi(2) - 1.0;
        assert!((r + 0.234375).abs() < 1e-15);
        let err = InitialData::constant_k2(1.0, 2.0 * PI, Profile::zero(), Profile::sin(0.5, 1.0, 0.0), 2.0, BranchSign::Plus);
        assert!(matches!(err, Err(Error::Domain { .. })));
    }

    #[test]
    fn constant_k2_rejects_small_k2() {
        let err = InitialData::constant_k2(1.0, 1.0, Profile::zero(), Profile::zero(), 1.9, BranchSign::Plus);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn family_integrals_constant_on_dense_grid() {
        let eps = 0.05;
        let a = 0.5 * eps / 2f64.sqrt();
        let e1 = Profile::sin(a, 3.0, 0.0);
        let k2d = InitialData::constant_k2(1.0, 2.0 * PI / 3.0, e1.clone(), e1.clone(), 2.0 + eps * eps, BranchSign::Minus).unwrap();
        let k1d = InitialData::constant_k1(0.7, 2.0 * PI, Profile::cos(0.2, 1.0, 0.1), Profile::sin(0.3, 2.0, 0.0), 0.25).unwrap();
        for i in 0..1000 {
            let rho = 7.3 * i as f64 / 1000.0;
            assert!((k2d.k2_at(rho) - (2.0 + eps * eps)).abs() < 1e-12);
            assert!((k1d.k1_at(rho) - 0.25).abs() < 1e-12);
        }
        assert!(k2d.p1.value(0.1) < 0.0);
    }

    #[test]
    fn general_family_rejects_bad_length() {
        assert!(InitialData::equilibrium(1.0, 0.0).is_err());
        assert!(InitialData::equilibrium(1.0, -1.0).is_err());
    }
}
