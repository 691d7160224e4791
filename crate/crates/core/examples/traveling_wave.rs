//! Traveling-wave profiles for a fast wave, which is periodic, and for a
//! slow one, which terminates where P1 reaches wγ.

use coldwave::reductions::traveling_wave;

fn main() -> coldwave::Result<()> {
    let (b0, k2) = (1.0, 2.02);
    for w in [10.0, 0.05] {
        let wave = traveling_wave(w, 0.0, k2, b0, 60.0, 0.0, 1.0)?;
        println!("w = {w}: {} points", wave.xi.len());
        match (wave.wavelength, wave.terminated_at) {
            (Some(l), _) => println!("  periodic with wavelength {l:.8}"),
            (_, Some(xi)) => println!("  profile breaks at xi = {xi:.8}"),
            _ => println!("  neither periodic nor broken within the window"),
        }
        let step = (wave.xi.len() / 8).max(1);
        for i in (0..wave.xi.len()).step_by(step) {
            println!("  xi {:>10.5}  P1 {:>10.6}  P2 {:>10.6}  E1 {:>10.6}", wave.xi[i], wave.p1[i], wave.profile[i], wave.e1[i]);
        }
    }
    Ok(())
}
