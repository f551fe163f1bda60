//! Stationary field over rolling terrain: synthetic profile, impedance ground, field snapshot.

use terrapulse::constants::wavenumber;
use terrapulse::media::SoilModel;
use terrapulse::pe::{solve_pe, GaussianBeamSpec, GridSpec, GroundCondition, PeProblem, TopCondition};
use terrapulse::terrain::{SyntheticTerrain, TerrainProfile};

fn main() -> terrapulse::Result<()> {
    let terrain = TerrainProfile::synthetic(SyntheticTerrain {
        seed: 3,
        n_bumps: 6,
        amplitude: 20.0,
        corr_length: 300.0,
        extent: 3000.0,
    })?;
    let k = wavenumber(2e8);
    let grid = GridSpec::new(3000.0, 300.0, 1.0, 0.25)?;
    let beam = GaussianBeamSpec::new(100.0, 15.0, 200.0, -0.01)?;
    let soil = SoilModel::from_siemens(10.0, 0.01)?;
    let problem = PeProblem::with_beam(
        grid,
        k,
        &beam,
        GroundCondition::Impedance(soil),
        TopCondition::Transparent,
        terrain.clone(),
    )?;
    let sol = solve_pe(problem, 250, 40, &[])?;
    let field = &sol.field;
    for ix in 0..field.nx {
        let x = field.x(ix);
        let row: String = (0..field.nz)
            .rev()
            .map(|iz| match field.get(ix, iz).norm() {
                a if a > 0.5 => '#',
                a if a > 0.2 => '+',
                a if a > 0.05 => '.',
                _ => ' ',
            })
            .collect();
        println!("x {x:6.0} h {:5.1} |{row}|", terrain.height(x)?);
    }
    println!("energy {:.4} → {:.4}", sol.energy[0], sol.energy[sol.energy.len() - 1]);
    Ok(())
}
