//! Hybrid solver against the time-domain solver on a 7 km path.
//!
//! cargo run --release --example hybrid

use std::time::Instant;

use terrapulse::constants::wavenumber;
use terrapulse::hybrid::{run_hybrid, HybridProblem};
use terrapulse::media::SoilModel;
use terrapulse::pe::{GaussianBeamSpec, GridSpec, GroundCondition, TopCondition};
use terrapulse::signal::{analytic_samples, PulseSpec};
use terrapulse::tdpe::{solve_tdpe, TdpeGrid, TdpeOutputs, TdpeProblem};
use terrapulse::terrain::TerrainProfile;

fn main() -> terrapulse::Result<()> {
    let (x_max, z_max, dx, dz, ds) = (7000.0, 1000.0, 8.0, 1.0, 0.125);
    let pulse = PulseSpec::damped_with_length(9.0, wavenumber(2e8))?;
    let beam = GaussianBeamSpec::new(100.0, 15.0, 200.0, -0.01)?;
    let ground = GroundCondition::Impedance(SoilModel::from_siemens(10.0, 0.01)?);

    let started = Instant::now();
    let tdpe = solve_tdpe(
        &TdpeProblem {
            grid: TdpeGrid::new(x_max, z_max, 60.0, dx, dz, ds)?,
            beam,
            pulse,
            ground,
            top: TopCondition::Transparent,
            terrain: TerrainProfile::flat(0.0),
            memory: true,
        },
        &TdpeOutputs {
            stations: vec![x_max],
            station_z_stride: 4,
            ..Default::default()
        },
    )?;
    let t_tdpe = started.elapsed().as_secs_f64();

    let s_grid: Vec<f64> = tdpe.s_values(ds).into_iter().step_by(4).collect();
    let started = Instant::now();
    let hybrid = run_hybrid(&HybridProblem {
        grid: GridSpec::new(x_max, z_max, dx, dz)?,
        beam,
        pulse,
        ground,
        top: TopCondition::Transparent,
        terrain: TerrainProfile::flat(0.0),
        delta: 1e-3,
        smoothing: 0.0,
        stations: vec![x_max],
        s_grid: s_grid.clone(),
        x_stride: 50,
        z_stride: 4,
    })?;
    let t_hybrid = started.elapsed().as_secs_f64();
    println!("tdpe {t_tdpe:.2} s, hybrid {t_hybrid:.2} s (δ = {})", hybrid.delta);

    let block = &tdpe.stations[0];
    let transient = &hybrid.stations[0].transient;
    for m in (0..block.nz.min(transient.nz)).step_by(10) {
        let column: Vec<f64> = (0..block.nx).map(|l| block.get(l, m).re).collect();
        let env = analytic_samples(&column);
        let peak_t = env.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let peak_h = (0..s_grid.len()).map(|j| transient.get(j, m).norm()).fold(0.0, f64::max);
        println!("z {:6.1}: envelope peak tdpe {peak_t:.4}, hybrid {peak_h:.4}", block.z(m));
    }
    Ok(())
}
