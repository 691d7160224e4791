//! Cold-plasma upper-hybrid oscillations in a constant magnetic field:
//! characteristics, wave breaking, periods, traveling waves, Hill/Mathieu
//! stability and an Eulerian cross-check.

pub mod characteristics;
pub mod cli;
pub mod config;
pub mod criteria;
pub mod error;
pub mod eulerian;
pub mod floquet;
pub mod initial;
pub mod jet;
pub mod model;
pub mod ode;
pub mod profile;
pub mod reductions;

pub use config::{Dynamics, SimConfig};
pub use error::{Error, Result};
pub use model::{DerivativeState, FieldState, FirstIntegrals};
