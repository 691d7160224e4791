//! Ensemble of characteristics on constant-K2 data that violates the smooth
//! regime: the earliest breaking over the ensemble and where it happens.

use coldwave::characteristics::ensemble;
use coldwave::initial::{BranchSign, InitialData};
use coldwave::profile::Profile;
use coldwave::SimConfig;

fn main() -> coldwave::Result<()> {
    let (b0, eps): (f64, f64) = (1.0, 0.05);
    let a = 0.5 * eps / (1.0 + b0 * b0).sqrt();
    let k = 0.9 / a;
    let e1 = Profile::sin(a, k, 0.0);
    let data = InitialData::constant_k2(b0, 2.0 * std::f64::consts::PI / k, e1.scale(b0), e1, 2.0 + eps * eps, BranchSign::Plus)?;
    let config = SimConfig { n_characteristics: 32, ..SimConfig::new(b0, 40.0) };
    let ens = ensemble(&data, &config)?;
    for trace in ens.ok_traces() {
        if let Some(b) = trace.breaking {
            println!("rho {:.5}: breaks at {:.6}", trace.rho0, b.time);
        }
    }
    println!("earliest breaking: {:?}, failures: {}", ens.min_breaking_time(), ens.failures());
    Ok(())
}
