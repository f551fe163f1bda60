//! Monochromatic Gaussian beam in free space, PE against the exact beam.

use std::time::Instant;

use terrapulse::constants::wavenumber;
use terrapulse::pe::{gaussian_exact, solve_pe, GaussianBeamSpec, GridSpec, GroundCondition, PeProblem, TopCondition};
use terrapulse::terrain::TerrainProfile;

fn main() -> terrapulse::Result<()> {
    let k = wavenumber(2e8);
    let beam = GaussianBeamSpec::new(250.0, 20.0, f64::INFINITY, 0.01)?;
    for (dx, dz) in [(8.0, 2.0), (4.0, 1.0), (2.0, 0.5), (1.0, 0.25)] {
        let grid = GridSpec::new(2000.0, 500.0, dx, dz)?;
        let started = Instant::now();
        let problem = PeProblem::with_beam(
            grid,
            k,
            &beam,
            GroundCondition::Transparent,
            TopCondition::Transparent,
            TerrainProfile::flat(0.0),
        )?;
        let sol = solve_pe(problem, grid.n_x, 1, &[2000.0])?;
        let got = &sol.stations[0].column;
        let want = gaussian_exact(&beam, k, 2000.0, &grid.z_values());
        let num: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = want.iter().map(|b| b.norm_sqr()).sum();
        println!(
            "dx {dx:4} dz {dz:5}: relative L2 error {:.3e} in {:.3} s",
            (num / den).sqrt(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
