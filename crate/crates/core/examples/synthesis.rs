//! Narrowband pulse by Fourier synthesis of monochromatic PE runs.

use terrapulse::media::SoilModel;
use terrapulse::pe::{GaussianBeamSpec, GridSpec, GroundCondition, PeProblem, TopCondition};
use terrapulse::signal::PulseSpec;
use terrapulse::synthesis::{band_coverage, check_anti_phantom, run_sweep, sweep_wavenumbers};
use terrapulse::terrain::TerrainProfile;

fn main() -> terrapulse::Result<()> {
    let pulse = PulseSpec::gaussian(40.0, 1.0)?;
    let beam = GaussianBeamSpec::new(30.0, 8.0, f64::INFINITY, -0.05)?;
    let soil = SoilModel::from_siemens(10.0, 0.01)?;
    let s_grid: Vec<f64> = (0..=100).map(|j| 2.0 * j as f64).collect();
    let (lo, hi) = pulse.band(3.0);
    let dk = 2.0 * std::f64::consts::PI / (4.0 * 200.0);
    check_anti_phantom(dk, 200.0)?;
    let ks = sweep_wavenumbers(lo, hi, dk)?;
    println!("{} wavenumbers over [{lo:.3}, {hi:.3}], band coverage {:.6}", ks.len(), band_coverage(&pulse, lo, hi));
    let sweep = run_sweep(
        &ks,
        |k| {
            PeProblem::with_beam(
                GridSpec::new(400.0, 120.0, 1.0, 0.25)?,
                k,
                &beam,
                GroundCondition::Impedance(soil),
                TopCondition::Transparent,
                TerrainProfile::flat(0.0),
            )
        },
        400,
        8,
        &[400.0],
    )?;
    let block = sweep.station_block(&pulse, 0, &s_grid)?;
    for iz in (0..block.nz).step_by(5) {
        let (l, peak) = (0..block.nx)
            .map(|l| (l, block.get(l, iz).norm()))
            .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
        println!("z {:5.1}: envelope peak {peak:.4} at s = {:.0}", block.z(iz), s_grid[l]);
    }
    Ok(())
}
