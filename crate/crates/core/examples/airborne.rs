//! Airborne radar geometry over a 100 km path with earth bulge, hybrid solver only.
//!
//! cargo run --release --example airborne -- [dx] [dz] [roughness m] [smoothing m]

use std::time::Instant;

use terrapulse::constants::{wavenumber, EQUIVALENT_EARTH_RADIUS};
use terrapulse::hybrid::{run_hybrid, HybridProblem};
use terrapulse::media::SoilModel;
use terrapulse::pe::{GaussianBeamSpec, GridSpec, GroundCondition, TopCondition};
use terrapulse::signal::PulseSpec;
use terrapulse::terrain::{SyntheticTerrain, TerrainProfile};

fn arg(i: usize, default: f64) -> f64 {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> terrapulse::Result<()> {
    let range = 100e3;
    let (dx, dz) = (arg(1, 10.0), arg(2, 1.0));
    let k0 = wavenumber(141e6);
    let pulse = PulseSpec::gaussian(75.0, k0)?;
    let beam = GaussianBeamSpec::new(5300.0, 800.0, 10e3, -0.05)?;
    let terrain = TerrainProfile::synthetic(SyntheticTerrain {
        seed: 7,
        n_bumps: 25,
        amplitude: arg(3, 40.0),
        corr_length: 2500.0,
        extent: range,
    })?
    .with_bulge(range, EQUIVALENT_EARTH_RADIUS);
    println!("bulge at midrange {:.1} m", terrain.height(range / 2.0)?);

    let s_grid: Vec<f64> = (0..=350).map(|j| -100.0 + 4.0 * j as f64).collect();
    let z_stride = (10.0 / dz).round().max(1.0) as usize;
    let started = Instant::now();
    let sol = run_hybrid(&HybridProblem {
        grid: GridSpec::new(range, 9000.0, dx, dz)?,
        beam,
        pulse,
        ground: GroundCondition::Impedance(SoilModel::from_siemens(10.0, 0.01)?),
        top: TopCondition::Transparent,
        terrain,
        delta: 1.25e-4,
        smoothing: arg(4, 300.0),
        stations: vec![range],
        s_grid: s_grid.clone(),
        x_stride: 100,
        z_stride,
    })?;
    println!(
        "hybrid {:.1} s (pe {:.1} s), delta {}",
        started.elapsed().as_secs_f64(),
        sol.timing.pe.as_secs_f64(),
        sol.delta
    );

    let station = &sol.stations[0];
    let block = &station.transient;
    for iz in (0..block.nz).step_by(25) {
        let env: Vec<f64> = (0..block.nx).map(|l| block.get(l, iz).norm()).collect();
        let peaks: Vec<(f64, f64)> = (1..env.len() - 1)
            .filter(|&l| env[l] > env[l - 1] && env[l] >= env[l + 1] && env[l] > 0.05 * 1.0)
            .map(|l| (s_grid[l], env[l]))
            .collect();
        let full = iz * z_stride;
        println!(
            "z {:7.0}  phi_i {:?} phi_r {:?} peaks {:?}",
            block.z(iz),
            station.incident.get(0, full).map(|p| (p.re.round(), (p.im * 10.0).round() / 10.0)),
            station.reflected.get(0, full).map(|p| (p.re.round(), (p.im * 10.0).round() / 10.0)),
            peaks.iter().map(|(s, e)| (s.round(), (e * 1000.0).round() / 1000.0)).collect::<Vec<_>>()
        );
    }
    Ok(())
}
