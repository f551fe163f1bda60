//! Ultrawideband pulse over conducting ground in the time domain: received
//! waveform near the ground for two conductivities.
//!
//! cargo run --release --example tdpe

use terrapulse::media::SoilModel;
use terrapulse::pe::{GaussianBeamSpec, GroundCondition, TopCondition};
use terrapulse::signal::PulseSpec;
use terrapulse::tdpe::{solve_tdpe, TdpeGrid, TdpeOutputs, TdpeProblem};
use terrapulse::terrain::TerrainProfile;

fn main() -> terrapulse::Result<()> {
    let pulse = PulseSpec::damped_with_length(30.0, 0.0)?;
    let beam = GaussianBeamSpec::new(300.0, 80.0, 300.0, -0.1)?;
    let base = TdpeGrid::defaults(&pulse, &beam, 3500.0, 500.0, 300.0)?;
    let grid = TdpeGrid::new(3500.0, 500.0, 300.0, base.space.dx / 4.0, base.space.dz / 4.0, base.ds / 4.0)?;
    println!("dx {:.2} dz {:.2} ds {:.3}", grid.space.dx, grid.space.dz, grid.ds);
    let mut waves = Vec::new();
    for sigma in [0.01, 0.001] {
        let problem = TdpeProblem {
            grid,
            beam,
            pulse,
            ground: GroundCondition::Impedance(SoilModel::from_siemens(10.0, sigma)?),
            top: TopCondition::Transparent,
            terrain: TerrainProfile::flat(0.0),
            memory: true,
        };
        let outputs = TdpeOutputs {
            probes: vec![(3500.0, 10.0)],
            ..Default::default()
        };
        waves.push(solve_tdpe(&problem, &outputs)?.probes.remove(0));
    }
    println!("{:>7} {:>10} {:>10}", "s", "σ=0.01", "σ=0.001");
    for l in (0..waves[0].s.len()).step_by(16) {
        println!("{:7.1} {:10.5} {:10.5}", waves[0].s[l], waves[0].values[l], waves[1].values[l]);
    }
    Ok(())
}
