//! The characteristic ensemble against the Eulerian grid solver after one
//! period, at two grid resolutions.

use coldwave::characteristics::ensemble;
use coldwave::cli::config::linear_period;
use coldwave::eulerian::{cross_check, evolve, initial_snapshot, GridConfig};
use coldwave::initial::InitialData;
use coldwave::SimConfig;

fn main() -> coldwave::Result<()> {
    let (b0, eps) = (1.0, 0.1);
    let data = InitialData::small_perturbation(b0, eps, 1.0)?;
    let theta = linear_period(b0);
    let config = SimConfig { n_characteristics: 256, output_times: vec![theta], ..SimConfig::new(b0, theta) };
    let chars = ensemble(&data, &config)?;
    for n in [1024, 2048] {
        let grid = evolve(initial_snapshot(&data, n)?, data.domain_length, b0, &GridConfig::new(n), &[theta])?;
        let report = cross_check(&chars, &grid, theta)?;
        println!(
            "n = {n}: max error P1 {:.2e} P2 {:.2e} E1 {:.2e}, coverage {:.4}",
            report.max_error[0], report.max_error[1], report.max_error[2], report.coverage
        );
    }
    Ok(())
}
