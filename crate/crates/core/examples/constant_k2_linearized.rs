//! On constant-K2 data the derivative system reduces to one linear equation
//! for y = 1/(p2 − B0). Its solution, carried across the coefficient poles,
//! is compared with p2 from the full characteristic system.

use coldwave::characteristics::integrate;
use coldwave::initial::{BranchSign, InitialData};
use coldwave::profile::Profile;
use coldwave::reductions::linearized::constant_k2_trace;
use coldwave::reductions::L2Form;
use coldwave::SimConfig;

fn main() -> coldwave::Result<()> {
    let (b0, eps): (f64, f64) = (1.0, 0.05);
    let a = 0.5 * eps / (1.0 + b0 * b0).sqrt();
    let k = 0.3 / a;
    let e1 = Profile::sin(a, k, 0.0);
    let data = InitialData::constant_k2(b0, 2.0 * std::f64::consts::PI / k, e1.scale(b0), e1, 2.0 + eps * eps, BranchSign::Plus)?;
    let seed = data.sample(0.4 / k);
    let horizon = 20.0;
    let lin = constant_k2_trace(seed.clone(), b0, horizon, L2Form::Derived, 1e-11, 1e6)?;
    let config = SimConfig { output_times: lin.theta.clone(), ..SimConfig::new(b0, horizon) };
    let full = integrate(config.dynamics, seed, &config)?;
    println!("{} poles crossed", lin.poles.len());
    let mut worst: f64 = 0.0;
    for (theta, p2) in lin.theta.iter().zip(lin.p2()) {
        if let Some(s) = full.sample_at(*theta) {
            worst = worst.max((s.deriv.p2 - p2).abs());
        }
    }
    println!("max |p2 linear - p2 full| = {worst:.3e}");
    Ok(())
}
