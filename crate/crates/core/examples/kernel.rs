//! Kernel of the nonlocal impedance condition for a few conductivities.

use terrapulse::media::SoilModel;
use terrapulse::tdpe::{kernel_primitive, ImpedanceKernel};

fn main() -> terrapulse::Result<()> {
    let ds = 0.5;
    for sigma in [0.001, 0.01, 0.1] {
        let soil = SoilModel::from_siemens(10.0, sigma)?;
        let kernel = ImpedanceKernel::new(&soil, ds, 201)?;
        let p = kernel.params;
        println!("σ = {sigma} S/m: r = {:.4}, q = {:.4} 1/m, N(0) = r − q = {:.4}", p.r, p.q, kernel.samples[0]);
        for m in (0..=200).step_by(40) {
            println!("  N({:5.1} m) = {:.5e}", m as f64 * ds, kernel.samples[m]);
        }
        println!("  ∫₀^100 N = {:.4}, ∫₀^10⁴ N = {:.4}", kernel.total_weight(), kernel_primitive(p, 1e4));
    }
    Ok(())
}
