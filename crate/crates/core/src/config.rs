use crate::error::{Error, Result};

/// Which characteristic system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dynamics {
    #[default]
    Relativistic,
    /// γ = 1 and P = V.
    Nonrelativistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub b0: f64,
    /// Final time θ_max.
    pub horizon: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Derivative magnitude D at which a characteristic is declared broken.
    pub blowup_threshold: f64,
    pub n_characteristics: usize,
    pub epsilon: Option<f64>,
    pub dynamics: Dynamics,
    /// Uniform output spacing in θ; `None` records every accepted step.
    pub sample_interval: Option<f64>,
    /// Extra output times, hit exactly through dense output.
    pub output_times: Vec<f64>,
    pub max_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            b0: 0.0,
            horizon: 10.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            blowup_threshold: 1e6,
            n_characteristics: 64,
            epsilon: None,
            dynamics: Dynamics::Relativistic,
            sample_interval: None,
            output_times: Vec::new(),
            max_steps: 50_000_000,
        }
    }
}

impl SimConfig {
    pub fn new(b0: f64, horizon: f64) -> Self {
        Self { b0, horizon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::validation(m));
        if !self.b0.is_finite() {
            return fail("B0 must be finite");
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return fail("horizon must be positive");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return fail("rel_tol must lie in (0, 1)");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return fail("abs_tol must lie in (0, 1)");
        }
        if !(self.blowup_threshold > 1.0) {
            return fail("blowup threshold must exceed 1");
        }
        if self.n_characteristics < 1 {
            return fail("need at least one characteristic");
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0) || !eps.is_finite() {
                return fail("epsilon must be non-negative");
            }
        }
        if let Some(dt) = self.sample_interval {
            if !(dt > 0.0) {
                return fail("sample interval must be positive");
            }
        }
        Ok(())
    }
}
