//! Damped-sinusoid radio pulse, its analytic signal and spectrum.

use terrapulse::constants::wavenumber;
use terrapulse::signal::{analytic_signal, PulseSpec};

fn main() -> terrapulse::Result<()> {
    let k0 = wavenumber(2e8);
    let pulse = PulseSpec::damped_with_length(9.0, k0)?;
    let signal = analytic_signal(&pulse);
    let s: Vec<f64> = (0..=60).map(|j| -3.0 + 0.5 * j as f64).collect();
    println!("{:>6} {:>9} {:>9} {:>9}", "s", "F(s)", "Re F⁺", "|F⁺|");
    for sample in signal.samples(&s).iter().step_by(4) {
        println!("{:6.1} {:9.4} {:9.4} {:9.4}", sample.s, sample.value, sample.plus.re, sample.envelope);
    }
    let (lo, hi) = pulse.band(1.0);
    println!("band [{lo:.3}, {hi:.3}] 1/m holds {:.1}% of the spectral energy", 100.0 * pulse.spectral_energy(lo, hi) / pulse.positive_spectral_energy());
    for j in 0..=8 {
        let k = k0 * (0.5 + 0.125 * j as f64);
        println!("|F̃⁺({k:.3})| = {:.4}", pulse.analytic_spectrum(k).norm());
    }
    Ok(())
}
