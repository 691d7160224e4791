//! Follows one characteristic of the small-perturbation family for ten
//! periods and reports how well the first integrals are conserved.

use coldwave::characteristics::integrate;
use coldwave::cli::config::linear_period;
use coldwave::initial::InitialData;
use coldwave::SimConfig;

fn main() -> coldwave::Result<()> {
    let (b0, eps) = (1.0, 0.1);
    let data = InitialData::small_perturbation(b0, eps, 1.0)?;
    let period = linear_period(b0);
    let config = SimConfig { sample_interval: Some(period / 4.0), ..SimConfig::new(b0, 10.0 * period) };
    let trace = integrate(config.dynamics, data.sample(0.3), &config)?;

    println!("{:>10} {:>12} {:>12} {:>12}", "theta", "P1", "P2", "E1");
    for s in &trace.samples {
        println!("{:>10.4} {:>12.6} {:>12.6} {:>12.6}", s.theta, s.state.p1, s.state.p2, s.state.e1);
    }
    let d = trace.integrals_drift;
    println!("steps {}, drift K1 {:.2e} K2 {:.2e} C1 {:.2e}", trace.steps, d.k1, d.k2, d.c1_identity);
    Ok(())
}
