//! Floquet half-trace of the Hill equation along the small-perturbation
//! orbit, of its truncated Mathieu form, and of the asymptotic formula.

use coldwave::floquet::{asymptotic_coshmupi, hill_floquet, mathieu_floquet};

fn main() -> coldwave::Result<()> {
    println!("{:>6} {:>4} {:>14} {:>14} {:>14}  {}", "eps", "B0", "hill+1", "mathieu+1", "asymptotic+1", "hill verdict");
    for b0 in [0.5, 1.0, 2.0] {
        for eps in [0.05, 0.1] {
            let hill = hill_floquet(eps, b0)?;
            let mathieu = mathieu_floquet(eps, b0)?;
            println!(
                "{eps:>6} {b0:>4} {:>14.4e} {:>14.4e} {:>14.4e}  {}",
                hill.cosh_mu_pi + 1.0,
                mathieu.cosh_mu_pi + 1.0,
                asymptotic_coshmupi(eps, b0) + 1.0,
                hill.classification
            );
        }
    }
    Ok(())
}
