//! On the branch p2 ≡ B0 with zero electric field the derivative p1 obeys a
//! Riccati equation and blows up in finite time. The detected breaking time
//! is compared with the extrapolated singularity.

use coldwave::characteristics::{integrate, Sample};
use coldwave::model::{DerivativeState, FieldState};
use coldwave::SimConfig;

fn main() -> coldwave::Result<()> {
    let b0 = 1.0;
    let seed = (FieldState::new(0.0, 0.0, 0.0, 0.0, 0.0), DerivativeState::new(0.0, b0, 0.0));
    let config = SimConfig::new(b0, 20.0);
    let trace = integrate(config.dynamics, seed, &config)?;
    match trace.breaking {
        Some(b) => {
            println!("threshold crossed at theta = {:.10} ({:?})", b.time, b.component);
            if let Some(t) = b.extrapolated {
                println!("extrapolated singularity at theta = {t:.10}");
            }
        }
        None => println!("no breaking before theta = {}", trace.final_time()),
    }
    let Sample { deriv, .. } = trace.last();
    println!("last derivatives: p1 {:.3e}, p2 {:.3e}, e {:.3e}", deriv.p1, deriv.p2, deriv.e);
    Ok(())
}
