//! Exact reductions of the characteristic system: the scalar P2 equation,
//! oscillation period, traveling waves and the changes of variables that
//! linearize the derivative system.

pub mod hill;
pub mod linearized;
pub mod scalar;
pub mod wave;

pub use hill::{HillCoefficients, ReferenceOrbit};
pub use linearized::{constant_k2_linear_rhs, q_linear_rhs, ulam_rhs, L2Form, LinearizedTrace, UlamRates};
pub use scalar::{p2_route, p2_scalar_rhs, period, radicand, turning_points, TurningPoints};
pub use wave::{traveling_wave, TravelingWave, WaveDenominator};
