//! Reflection coefficients of the three ground models against grazing angle.
//!
//! cargo run --example reflection -- [epsilon] [sigma S/m] [frequency Hz]

use num_complex::Complex64;
use terrapulse::constants::wavenumber;
use terrapulse::media::{brewster_angle, reflection_coefficient, ReflectionModel, SoilModel};

fn arg(i: usize, default: f64) -> f64 {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> terrapulse::Result<()> {
    let soil = SoilModel::from_siemens(arg(1, 10.0), arg(2, 0.0))?;
    let eps: Complex64 = soil.complex_permittivity(wavenumber(arg(3, 2e8)))?;
    println!("ε̃ = {eps:.4}, Brewster angle of the real part {:.2}°", brewster_angle(eps.re).to_degrees());
    println!("{:>8} {:>10} {:>10} {:>10}", "β (deg)", "fresnel", "leontovich", "modified");
    for j in 0..=18 {
        let beta = (5.0 * j as f64).to_radians();
        let r: Vec<f64> = ReflectionModel::ALL
            .iter()
            .map(|&m| reflection_coefficient(m, eps, beta).map(|r| r.norm()))
            .collect::<terrapulse::Result<_>>()?;
        println!("{:8.1} {:10.5} {:10.5} {:10.5}", beta.to_degrees(), r[0], r[1], r[2]);
    }
    Ok(())
}
