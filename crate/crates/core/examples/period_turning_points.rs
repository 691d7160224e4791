//! Turning points of P2 from the quartic and the oscillation period from
//! the singular quadrature, against the return time of the full orbit.

use coldwave::cli::config::linear_period;
use coldwave::initial::InitialData;
use coldwave::reductions::scalar::period_of;
use coldwave::reductions::{turning_points, ReferenceOrbit};

fn main() -> coldwave::Result<()> {
    let eps = 0.1;
    println!("{:>5} {:>12} {:>14} {:>14} {:>14}", "B0", "P2+", "period", "return map", "linear");
    for b0 in [0.5, 1.0, 2.0, 4.0] {
        let data = InitialData::small_perturbation(b0, eps, 1.0)?;
        let rho = 0.7;
        let (s, _) = data.sample(rho);
        let tp = turning_points(data.k1_at(rho), data.k2_at(rho), b0, s.p2)?;
        let orbit = ReferenceOrbit::compute(b0, s.p1, s.p2, s.e1)?;
        println!(
            "{b0:>5} {:>12.8} {:>14.10} {:>14.10} {:>14.10}",
            tp.p2_plus,
            period_of(&tp),
            orbit.period,
            linear_period(b0)
        );
    }
    Ok(())
}
