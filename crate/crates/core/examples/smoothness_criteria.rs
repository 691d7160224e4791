//! The nonrelativistic smoothness criterion against simulation: data with
//! a negative criterion everywhere stays smooth, amplified data breaks.

use coldwave::characteristics::ensemble;
use coldwave::criteria::nonrel_summary;
use coldwave::initial::InitialData;
use coldwave::profile::Profile;
use coldwave::{Dynamics, SimConfig};
use std::f64::consts::PI;

fn main() -> coldwave::Result<()> {
    let b0 = 1.0;
    for amp in [0.3, 0.6, 0.9, 1.2] {
        let data = InitialData::general(
            b0,
            2.0 * PI,
            Profile::cos(amp, 1.0, 0.0),
            Profile::sin(0.5 * amp, 1.0, 0.0),
            Profile::sin(amp, 1.0, 0.0),
        )?;
        let verdict = nonrel_summary(&data);
        let config = SimConfig {
            dynamics: Dynamics::Nonrelativistic,
            blowup_threshold: 1e3,
            n_characteristics: 32,
            ..SimConfig::new(b0, 10.0 * 2.0 * PI / (1.0 + b0 * b0).sqrt())
        };
        let broke = ensemble(&data, &config)?.min_breaking_time();
        println!("amplitude {amp}: max criterion {:+.4}, smooth predicted {}, breaking {:?}", verdict.max_value, verdict.smooth, broke);
    }
    Ok(())
}
