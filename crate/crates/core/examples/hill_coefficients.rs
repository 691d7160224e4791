//! Coefficients of the Hill normal form along a reference orbit: the range
//! of the potential, and the vanishing first-order coefficient when C1 = B0.

use coldwave::floquet::small_perturbation_orbit;
use coldwave::reductions::HillCoefficients;

fn main() -> coldwave::Result<()> {
    let b0 = 1.0;
    for eps in [0.0, 0.05, 0.1] {
        let hill = HillCoefficients::new(small_perturbation_orbit(eps, b0)?, b0);
        let (lo, hi) = hill.k_range(512);
        let t = hill.period();
        let n1 = (0..256).map(|i| hill.n(t * i as f64 / 256.0)[0].abs()).fold(0.0, f64::max);
        println!("eps {eps}: period {t:.10}, potential in [{lo:.8}, {hi:.8}], max |N1| {n1:.2e}");
    }
    Ok(())
}
