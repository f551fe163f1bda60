use num_complex::Complex64;

use super::{
    energy_flux, gaussian_initial, ComplexField2D, DiscreteTransparentBoundary, GaussianBeamSpec, GridSpec,
    TransparentBoundary,
};
use crate::error::{Error, Result};
use crate::media::SoilModel;
use crate::numerics::TridiagonalLu;
use crate::terrain::TerrainProfile;

/// Lower boundary of the PE domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroundCondition {
    /// `∂u/∂z + ik(√(ε̃−1)/ε̃ − h′)u = 0`
    Impedance(SoilModel),
    /// perfectly conducting ground for horizontal magnetic field: `∂u/∂z − ikh′u = 0`
    Conducting,
    /// `u = 0`
    Dirichlet,
    /// open lower boundary, exact for the discrete scheme; flat terrain only
    Transparent,
}

/// Upper boundary of the PE domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopCondition {
    Transparent,
    Dirichlet,
}

#[derive(Debug, Clone)]
pub struct PeProblem {
    pub grid: GridSpec,
    pub k: f64,
    pub ground: GroundCondition,
    pub top: TopCondition,
    pub terrain: TerrainProfile,
    pub initial: Vec<Complex64>,
}

impl PeProblem {
    /// Problem whose source is the Gaussian beam column at `x = 0`.
    pub fn with_beam(
        grid: GridSpec,
        k: f64,
        beam: &GaussianBeamSpec,
        ground: GroundCondition,
        top: TopCondition,
        terrain: TerrainProfile,
    ) -> Result<Self> {
        beam.validate()?;
        let initial = gaussian_initial(beam, k, &grid.z_values());
        Self::new(grid, k, initial, ground, top, terrain)
    }

    pub fn new(
        grid: GridSpec,
        k: f64,
        initial: Vec<Complex64>,
        ground: GroundCondition,
        top: TopCondition,
        terrain: TerrainProfile,
    ) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("wavenumber must be positive, got {k}")));
        }
        if ground == GroundCondition::Transparent && !terrain.is_flat() {
            return Err(Error::invalid("a transparent lower boundary needs flat terrain"));
        }
        if initial.len() != grid.rows() {
            return Err(Error::invalid(format!(
                "initial column has {} rows, grid has {}",
                initial.len(),
                grid.rows()
            )));
        }
        Ok(Self {
            grid,
            k,
            ground,
            top,
            terrain,
            initial,
        })
    }
}

/// Ground row `round(h/dz)`, confined to the lower 90% of the domain.
pub(crate) fn ground_row_at(terrain: &TerrainProfile, grid: &GridSpec, x: f64) -> Result<(usize, f64)> {
    let (h, slope) = terrain.height_and_slope(x)?;
    let row = (h / grid.dz).round();
    let ceiling = (0.9 * grid.n_z as f64).floor();
    if row < 0.0 || row > ceiling {
        return Err(Error::invalid(format!(
            "terrain height {h:.2} m at x = {x:.1} m leaves the usable band [0, {:.1}] m",
            ceiling * grid.dz
        )));
    }
    Ok((row as usize, slope))
}

/// Resizes the live part of a column to a new ground row: rows that went
/// underground are zeroed, newly exposed rows are extrapolated linearly.
pub(crate) fn restage_column<T>(column: &mut [T], old_row: usize, new_row: usize)
where
    T: Copy + Default + std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    if new_row > old_row {
        column[old_row..new_row].fill(T::default());
    } else if new_row < old_row {
        let base = column[old_row];
        let step = column[old_row] - column[old_row + 1];
        for m in new_row..old_row {
            column[m] = base + step * (old_row - m) as f64;
        }
    }
}

/// `i·dx/(4k·dz²)`, the off-diagonal weight of the Crank–Nicolson stencil.
fn step_ratio(problem: &PeProblem) -> Complex64 {
    let grid = &problem.grid;
    Complex64::new(0.0, grid.dx / (4.0 * problem.k * grid.dz * grid.dz))
}

/// Stateful Crank–Nicolson marcher for one wavenumber.
#[derive(Debug, Clone)]
pub struct PeMarcher {
    problem: PeProblem,
    step: usize,
    column: Vec<Complex64>,
    ground_row: usize,
    slope: f64,
    surface: Complex64,
    tbc: Option<TransparentBoundary>,
    bottom: Option<DiscreteTransparentBoundary>,
    lu: Option<(BandKey, TridiagonalLu<Complex64>)>,
    scratch: Vec<Complex64>,
}

/// Boundary rows of the Crank–Nicolson matrix; the interior is fixed by the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BandKey {
    g: usize,
    d0: Complex64,
    u0: Complex64,
    dl: Complex64,
    ll: Complex64,
}

impl PeMarcher {
    pub fn new(problem: PeProblem) -> Result<Self> {
        let (ground_row, slope) = ground_row_at(&problem.terrain, &problem.grid, 0.0)?;
        let surface = match problem.ground {
            GroundCondition::Impedance(soil) => soil.surface_factor(problem.k)?,
            _ => Complex64::new(0.0, 0.0),
        };
        let mut column = problem.initial.clone();
        column[..ground_row].fill(Complex64::new(0.0, 0.0));
        if problem.ground == GroundCondition::Dirichlet {
            column[ground_row] = Complex64::new(0.0, 0.0);
        }
        let top_row = problem.grid.n_z;
        let tbc = match problem.top {
            TopCondition::Transparent => Some(TransparentBoundary::new(
                problem.k,
                problem.grid.dx,
                problem.grid.n_x,
                column[top_row],
            )),
            TopCondition::Dirichlet => {
                column[top_row] = Complex64::new(0.0, 0.0);
                None
            }
        };
        let bottom = (problem.ground == GroundCondition::Transparent).then(|| {
            DiscreteTransparentBoundary::new(step_ratio(&problem), problem.grid.n_x, column[ground_row])
        });
        Ok(Self {
            problem,
            step: 0,
            column,
            ground_row,
            slope,
            surface,
            tbc,
            bottom,
            lu: None,
            scratch: Vec::new(),
        })
    }

    pub fn problem(&self) -> &PeProblem {
        &self.problem
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn x(&self) -> f64 {
        self.problem.grid.x(self.step)
    }

    pub fn column(&self) -> &[Complex64] {
        &self.column
    }

    pub fn ground_row(&self) -> usize {
        self.ground_row
    }

    pub fn energy(&self) -> f64 {
        energy_flux(&self.column, self.ground_row, self.problem.grid.dz)
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.problem.grid.n_x
    }

    // ghost-point coefficient: D²u₀ = (2u₁ − 2u₀ + 2ikδ dz u₀)/dz²
    fn ground_term(&self, slope: f64) -> Option<Complex64> {
        let k = self.problem.k;
        let dz = self.problem.grid.dz;
        let delta = match self.problem.ground {
            GroundCondition::Impedance(_) => self.surface - slope,
            GroundCondition::Conducting => Complex64::new(-slope, 0.0),
            GroundCondition::Dirichlet | GroundCondition::Transparent => return None,
        };
        Some(Complex64::i() * k * delta * (2.0 * dz))
    }

    /// Advances the column by one range step.
    pub fn advance(&mut self) -> Result<()> {
        if self.is_finished() {
            return Err(Error::invalid("marching past x_max"));
        }
        let grid = self.problem.grid;
        let x_next = grid.x(self.step + 1);
        let (new_row, new_slope) = ground_row_at(&self.problem.terrain, &grid, x_next)?;
        let old_term = self.ground_term(self.slope);
        restage_column(&mut self.column, self.ground_row, new_row);
        let new_term = self.ground_term(new_slope);

        let g = new_row;
        let top = grid.n_z;
        let n = top - g + 1;
        let r = step_ratio(&self.problem);
        let one = Complex64::new(1.0, 0.0);
        let u = &self.column;

        let mut rhs = std::mem::take(&mut self.scratch);
        rhs.clear();
        rhs.push(Complex64::new(0.0, 0.0));
        rhs.extend((g + 1..top).map(|m| u[m] + r * (u[m + 1] - u[m] * 2.0 + u[m - 1])));
        rhs.push(Complex64::new(0.0, 0.0));

        let two_dz = 2.0 * grid.dz;
        let floor = self.bottom.as_ref().map(|t| (t.next_closure(), t.ghost()));
        let (d0, u0) = match (floor, old_term, new_term) {
            (Some(((a, b), old_ghost)), _, _) => {
                rhs[0] = u[g] + r * (u[g + 1] - u[g] * 2.0 + old_ghost) + r * b;
                (one + r * 2.0 - r * a, -r)
            }
            (None, Some(old), Some(new)) => {
                rhs[0] = u[g] + r * (u[g + 1] * 2.0 - u[g] * 2.0 + old * u[g]);
                (one + r * 2.0 - r * new, -r * 2.0)
            }
            _ => (one, Complex64::new(0.0, 0.0)),
        };

        let closure = self.tbc.as_ref().map(|t| (t.next_closure(), t.gradient()));
        let last = n - 1;
        let (dl, ll) = match closure {
            Some(((a, b), old_gradient)) => {
                rhs[last] = u[top] + r * (u[top - 1] * 2.0 - u[top] * 2.0 + old_gradient * two_dz) + r * (b * two_dz);
                (one + r * 2.0 - r * (a * two_dz), -r * 2.0)
            }
            None => (one, Complex64::new(0.0, 0.0)),
        };

        let key = BandKey { g, d0, u0, dl, ll };
        if self.lu.as_ref().map(|(k, _)| *k != key).unwrap_or(true) {
            let mut lower = vec![-r; n];
            let mut diag = vec![one + r * 2.0; n];
            let mut upper = vec![-r; n];
            (diag[0], upper[0]) = (d0, u0);
            (diag[last], lower[last]) = (dl, ll);
            self.lu = Some((key, TridiagonalLu::factor(&lower, &diag, &upper)?));
        }
        self.lu.as_ref().expect("factored above").1.solve_in_place(&mut rhs);
        self.column[g..=top].copy_from_slice(&rhs);
        self.scratch = rhs;
        if let (Some(tbc), Some((ab, _))) = (self.tbc.as_mut(), closure) {
            tbc.push(self.column[top], ab);
        }
        if let (Some(t), Some((ab, _))) = (self.bottom.as_mut(), floor) {
            t.push(self.column[g], ab);
        }
        self.ground_row = new_row;
        self.slope = new_slope;
        self.step += 1;
        Ok(())
    }
}

/// Full-resolution column recorded at a requested range.
#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub x: f64,
    pub ground_row: usize,
    pub column: Vec<Complex64>,
}

/// Result of [`solve_pe`].
#[derive(Debug, Clone)]
pub struct PeSolution {
    /// field decimated by the requested strides
    pub field: ComplexField2D,
    /// columns at the requested stations, in request order
    pub stations: Vec<Station>,
    /// energy flux after every step, starting at `x = 0`
    pub energy: Vec<f64>,
}

/// Marches the whole range, keeping every `x_stride`-th column and
/// `z_stride`-th row plus full columns at `stations` (nearest step).
pub fn solve_pe(problem: PeProblem, x_stride: usize, z_stride: usize, stations: &[f64]) -> Result<PeSolution> {
    let k = problem.k;
    let grid = problem.grid;
    let (xs, zs) = (x_stride.max(1), z_stride.max(1));
    let nx_out = grid.n_x / xs + 1;
    let nz_out = grid.n_z / zs + 1;
    let mut field = ComplexField2D::zeros(nx_out, nz_out, 0.0, 0.0, grid.dx * xs as f64, grid.dz * zs as f64, k);
    let station_steps: Vec<usize> = stations
        .iter()
        .map(|&x| {
            if !(0.0..=grid.x_max * (1.0 + 1e-9)).contains(&x) {
                return Err(Error::invalid(format!("station x = {x} outside [0, {}]", grid.x_max)));
            }
            Ok(((x / grid.dx).round() as usize).min(grid.n_x))
        })
        .collect::<Result<_>>()?;
    let mut recorded: Vec<Option<Station>> = vec![None; stations.len()];

    let mut marcher = PeMarcher::new(problem).map_err(|e| e.at_k(k))?;
    let mut energy = Vec::with_capacity(grid.n_x + 1);
    loop {
        let n = marcher.step_index();
        energy.push(marcher.energy());
        if n % xs == 0 {
            let ix = n / xs;
            let col = marcher.column();
            for (iz, v) in field.column_mut(ix).iter_mut().enumerate() {
                *v = col[iz * zs];
            }
            field.set_ground_row(ix, marcher.ground_row().div_ceil(zs));
        }
        for (slot, &step) in recorded.iter_mut().zip(&station_steps) {
            if step == n {
                *slot = Some(Station {
                    x: marcher.x(),
                    ground_row: marcher.ground_row(),
                    column: marcher.column().to_vec(),
                });
            }
        }
        if marcher.is_finished() {
            break;
        }
        marcher.advance().map_err(|e| e.at_k(k))?;
    }
    if !field.is_finite() {
        return Err(Error::invalid("non-finite values in PE field").at_k(k));
    }
    Ok(PeSolution {
        field,
        stations: recorded.into_iter().map(|s| s.expect("every station step is visited")).collect(),
        energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::wavenumber;
    use crate::pe::gaussian_exact;
    use proptest::prelude::*;

    fn free_space_error(dx: f64, dz: f64) -> f64 {
        let k = wavenumber(2e8);
        let grid = GridSpec::new(2000.0, 500.0, dx, dz).unwrap();
        let beam = GaussianBeamSpec::new(250.0, 20.0, f64::INFINITY, 0.0).unwrap();
        let problem = PeProblem::with_beam(
            grid,
            k,
            &beam,
            GroundCondition::Dirichlet,
            TopCondition::Dirichlet,
            TerrainProfile::flat(0.0),
        )
        .unwrap();
        let sol = solve_pe(problem, grid.n_x, 1, &[2000.0]).unwrap();
        let got = &sol.stations[0].column;
        let want = gaussian_exact(&beam, k, 2000.0, &grid.z_values());
        let num: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = want.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn free_space_beam_matches_exact_solution() {
        let coarse = free_space_error(4.0, 1.0);
        let fine = free_space_error(2.0, 0.5);
        assert!(fine < 1e-3, "error {fine}");
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_source_stays_zero() {
        let grid = GridSpec::new(100.0, 50.0, 1.0, 0.5).unwrap();
        let soil = SoilModel::from_siemens(10.0, 0.01).unwrap();
        let problem = PeProblem::new(
            grid,
            2.0,
            vec![Complex64::new(0.0, 0.0); grid.rows()],
            GroundCondition::Impedance(soil),
            TopCondition::Transparent,
            TerrainProfile::flat(0.0),
        )
        .unwrap();
        let sol = solve_pe(problem, 1, 1, &[]).unwrap();
        assert_eq!(sol.field.max_norm(), 0.0);
    }

    fn image_error(dx: f64, dz: f64) -> f64 {
        let k = 2.0;
        let grid = GridSpec::new(600.0, 400.0, dx, dz).unwrap();
        let beam = GaussianBeamSpec::new(60.0, 10.0, f64::INFINITY, -0.05).unwrap();
        let image = GaussianBeamSpec::new(-60.0, 10.0, f64::INFINITY, 0.05).unwrap();
        let problem = PeProblem::with_beam(
            grid,
            k,
            &beam,
            GroundCondition::Conducting,
            TopCondition::Dirichlet,
            TerrainProfile::flat(0.0),
        )
        .unwrap();
        let sol = solve_pe(problem, grid.n_x, 1, &[600.0]).unwrap();
        let z = grid.z_values();
        let direct = gaussian_exact(&beam, k, 600.0, &z);
        let mirrored = gaussian_exact(&image, k, 600.0, &z);
        let want: Vec<Complex64> = direct.iter().zip(&mirrored).map(|(a, b)| a + b).collect();
        let got = &sol.stations[0].column;
        let num: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = want.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn conducting_ground_matches_image_beams() {
        let coarse = image_error(1.0, 0.25);
        let fine = image_error(0.5, 0.125);
        assert!(coarse < 5e-3, "error {coarse}");
        assert!(coarse / fine > 3.5, "ratio {}", coarse / fine);
    }

    #[test]
    fn energy_decays_over_impedance_ground() {
        let k = wavenumber(2e8);
        let grid = GridSpec::new(1000.0, 200.0, 2.0, 0.5).unwrap();
        let beam = GaussianBeamSpec::new(60.0, 10.0, f64::INFINITY, -0.06).unwrap();
        for sigma in [0.0, 0.001, 0.01] {
            let soil = SoilModel::from_siemens(10.0, sigma).unwrap();
            let problem = PeProblem::with_beam(
                grid,
                k,
                &beam,
                GroundCondition::Impedance(soil),
                TopCondition::Dirichlet,
                TerrainProfile::flat(0.0),
            )
            .unwrap();
            let sol = solve_pe(problem, grid.n_x, 1, &[]).unwrap();
            let tol = 1e-6 * sol.energy[0];
            assert!(sol.energy.windows(2).all(|w| w[1] <= w[0] + tol));
            assert!(sol.energy.last().unwrap() < &(0.99 * sol.energy[0]));
        }
    }

    #[test]
    fn constant_terrain_equals_shifted_source() {
        let k = 3.0;
        let run = |terrain: TerrainProfile, z0: f64, z_max: f64| {
            let grid = GridSpec::new(300.0, z_max, 1.0, 0.5).unwrap();
            let beam = GaussianBeamSpec::new(z0, 8.0, 500.0, -0.04).unwrap();
            let soil = SoilModel::from_siemens(10.0, 0.01).unwrap();
            let problem = PeProblem::with_beam(
                grid,
                k,
                &beam,
                GroundCondition::Impedance(soil),
                TopCondition::Transparent,
                terrain,
            )
            .unwrap();
            solve_pe(problem, 1, 1, &[300.0]).unwrap()
        };
        let raised = run(TerrainProfile::flat(10.0), 50.0, 110.0);
        let base = run(TerrainProfile::flat(0.0), 40.0, 100.0);
        let shift = 20;
        let a = &raised.stations[0].column;
        let b = &base.stations[0].column;
        assert_eq!(raised.stations[0].ground_row, shift);
        for m in 0..b.len() {
            assert!((a[m + shift] - b[m]).norm() <= 1e-13 * (1.0 + b[m].norm()));
        }
    }

    #[test]
    fn marcher_handles_rising_and_falling_ground() {
        let k = 2.0;
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 * 50.0).collect();
        let hs = xs.iter().map(|x| 15.0 * (-((x - 500.0) / 150.0f64).powi(2)).exp()).collect();
        let terrain = TerrainProfile::from_samples(xs, hs).unwrap();
        let grid = GridSpec::new(1000.0, 150.0, 1.0, 0.5).unwrap();
        let beam = GaussianBeamSpec::new(50.0, 10.0, f64::INFINITY, -0.03).unwrap();
        let soil = SoilModel::from_siemens(10.0, 0.01).unwrap();
        let problem = PeProblem::with_beam(
            grid,
            k,
            &beam,
            GroundCondition::Impedance(soil),
            TopCondition::Transparent,
            terrain,
        )
        .unwrap();
        let sol = solve_pe(problem, 10, 1, &[500.0]).unwrap();
        assert!(sol.field.is_finite());
        assert_eq!(sol.stations[0].ground_row, 30);
        assert!(sol.stations[0].column[..30].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn transparent_top_passes_upgoing_beam() {
        let k = 2.0;
        let run = |z_max: f64, top: TopCondition| {
            let grid = GridSpec::new(1500.0, z_max, 1.0, 0.25).unwrap();
            let beam = GaussianBeamSpec::new(40.0, 6.0, f64::INFINITY, 0.05).unwrap();
            let problem =
                PeProblem::with_beam(grid, k, &beam, GroundCondition::Conducting, top, TerrainProfile::flat(0.0))
                    .unwrap();
            solve_pe(problem, 1, 1, &[]).unwrap()
        };
        let short = run(80.0, TopCondition::Transparent);
        let tall = run(400.0, TopCondition::Dirichlet);
        let peak = short.field.max_norm();
        let mut worst: f64 = 0.0;
        for ix in 0..short.field.nx {
            for iz in 0..short.field.nz {
                worst = worst.max((short.field.get(ix, iz) - tall.field.get(ix, iz)).norm());
            }
        }
        assert!(worst / peak < 1e-3, "residual {}", worst / peak);
    }

    #[test]
    fn open_floor_passes_downgoing_beam() {
        let k = 2.0;
        let depth = 1200.0;
        let run = |below: f64, ground: GroundCondition| {
            let grid = GridSpec::new(1500.0, 80.0 + below, 1.0, 0.25).unwrap();
            let beam = GaussianBeamSpec::new(40.0 + below, 6.0, f64::INFINITY, -0.05).unwrap();
            let problem =
                PeProblem::with_beam(grid, k, &beam, ground, TopCondition::Transparent, TerrainProfile::flat(0.0))
                    .unwrap();
            solve_pe(problem, 1, 1, &[]).unwrap()
        };
        let open = run(0.0, GroundCondition::Transparent);
        let deep = run(depth, GroundCondition::Dirichlet);
        let offset = (depth / 0.25) as usize;
        let peak = open.field.max_norm();
        let mut worst: f64 = 0.0;
        for ix in 0..open.field.nx {
            for iz in 0..open.field.nz {
                worst = worst.max((open.field.get(ix, iz) - deep.field.get(ix, iz + offset)).norm());
            }
        }
        assert!(worst / peak < 1e-9, "residual {}", worst / peak);
    }

    #[test]
    fn open_floor_rejects_terrain() {
        let grid = GridSpec::new(100.0, 50.0, 1.0, 0.5).unwrap();
        let terrain = TerrainProfile::from_samples(vec![0.0, 40.0, 70.0, 100.0], vec![0.0, 2.0, 4.0, 5.0]).unwrap();
        let beam = GaussianBeamSpec::new(25.0, 5.0, f64::INFINITY, 0.0).unwrap();
        let err = PeProblem::with_beam(grid, 2.0, &beam, GroundCondition::Transparent, TopCondition::Dirichlet, terrain);
        assert!(err.is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn larger_steps_never_grow_the_column(scale in 1.0f64..16.0) {
            let k = 2.0;
            let grid = GridSpec::new(64.0 * scale, 100.0, scale, 0.5).unwrap();
            let beam = GaussianBeamSpec::new(50.0, 3.0, f64::INFINITY, 0.0).unwrap();
            let problem = PeProblem::with_beam(
                grid, k, &beam, GroundCondition::Dirichlet, TopCondition::Dirichlet, TerrainProfile::flat(0.0),
            ).unwrap();
            let sol = solve_pe(problem, grid.n_x, 1, &[]).unwrap();
            prop_assert!(sol.energy.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
    }
}
