//! Time-domain parabolic equation `2Π_xs = Π_zz` marched with the six-point
//! box scheme, a nonlocal impedance ground and a nonlocal transparent top.

mod kernel;

pub use kernel::{kernel_primitive, ImpedanceKernel};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::media::SoilModel;
use crate::numerics::TridiagonalLu;
use crate::pe::{
    ground_row_at, restage_column, ComplexField2D, GaussianBeamSpec, GridSpec, GroundCondition,
    TopCondition,
};
use crate::signal::{PulseShape, PulseSpec};
use crate::terrain::TerrainProfile;

/// Marching grid in `(x, z, s)`; `s` is the physical delay `ct − x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdpeGrid {
    pub space: GridSpec,
    pub ds: f64,
    /// last physical delay kept (m)
    pub s_max: f64,
}

impl TdpeGrid {
    pub fn new(x_max: f64, z_max: f64, s_max: f64, dx: f64, dz: f64, ds: f64) -> Result<Self> {
        let space = GridSpec::new(x_max, z_max, dx, dz)?;
        if !(ds > 0.0 && s_max > 0.0) {
            return Err(Error::invalid(format!("need ds > 0 and s_max > 0, got {ds}, {s_max}")));
        }
        Ok(Self { space, ds, s_max })
    }

    /// Resolution rules: `ds = Λ/20` (and at most a twelfth of the carrier
    /// wavelength), `dz` an eighth of the smaller of the beam width and the
    /// Fresnel scale, `dx = 4dz²k_eff`.
    pub fn defaults(pulse: &PulseSpec, beam: &GaussianBeamSpec, x_max: f64, z_max: f64, s_max: f64) -> Result<Self> {
        let k_eff = effective_wavenumber(pulse);
        let mut ds = pulse.length() / 20.0;
        if pulse.k0 > 0.0 {
            ds = ds.min(2.0 * PI / (12.0 * pulse.k0));
        }
        let fresnel = (2.0 * PI / k_eff * x_max).sqrt();
        let dz_target = beam.w0.min(fresnel) / 8.0;
        let dz = snap_step(z_max, dz_target);
        let dx = snap_step(x_max, 4.0 * dz * dz * k_eff);
        Self::new(x_max, z_max, s_max, dx, dz, ds)
    }
}

/// `k₀` for carrier pulses, otherwise the envelope's dominant wavenumber `π/Λ`.
pub fn effective_wavenumber(pulse: &PulseSpec) -> f64 {
    if pulse.k0 > 0.0 {
        pulse.k0
    } else {
        PI / pulse.length()
    }
}

/// Largest step not above `target` that divides `extent` into whole cells.
fn snap_step(extent: f64, target: f64) -> f64 {
    extent / (extent / target).ceil()
}

#[derive(Debug, Clone)]
pub struct TdpeProblem {
    pub grid: TdpeGrid,
    pub beam: GaussianBeamSpec,
    pub pulse: PulseSpec,
    pub ground: GroundCondition,
    pub top: TopCondition,
    pub terrain: TerrainProfile,
    /// keep the convolution term of the impedance condition
    pub memory: bool,
}

/// What to record while marching.
#[derive(Debug, Clone, Default)]
pub struct TdpeOutputs {
    /// `(x, z)` receivers; waveforms cover the whole delay window
    pub probes: Vec<(f64, f64)>,
    /// ranges at which the full `(s, z)` block is kept
    pub stations: Vec<f64>,
    pub station_z_stride: usize,
    /// fixed-time snapshots, given as `ct` (m)
    pub snapshots: Vec<f64>,
    pub snapshot_x_stride: usize,
    pub snapshot_z_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeWaveform {
    pub x: f64,
    pub z: f64,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TdpeSolution {
    /// grid delay `s'` equals physical delay plus this offset
    pub s_offset: f64,
    pub n_s: usize,
    pub probes: Vec<ProbeWaveform>,
    /// `(s, z)` blocks with `s` as the first axis, real values
    pub stations: Vec<ComplexField2D>,
    /// `(ct, field)` pairs over `(x, z)`
    pub snapshots: Vec<(f64, ComplexField2D)>,
    /// `max |Π|` at every range step
    pub peak: Vec<f64>,
}

impl TdpeSolution {
    pub fn s_values(&self, ds: f64) -> Vec<f64> {
        (0..=self.n_s).map(|l| l as f64 * ds - self.s_offset).collect()
    }
}

/// Delay shift that makes the source vanish at the first grid delay.
fn causal_offset(beam: &GaussianBeamSpec, pulse: &PulseSpec, z_values: &[f64], ds: f64) -> f64 {
    let (start, _) = pulse.support();
    let needed = z_values
        .iter()
        .filter(|&&z| beam.amplitude(z) > 1e-10)
        .map(|&z| -beam.delay(z) - start)
        .fold(0.0, f64::max);
    (needed / ds).ceil() * ds
}

/// Coefficients of `√((1−ζ)/(1+ζ))`, the half-power of the trapezoidal difference symbol.
fn trapezoidal_half_weights(count: usize) -> Vec<f64> {
    let mut beta = vec![0.0; count.max(2)];
    beta[0] = 1.0;
    beta[1] = -1.0;
    for j in 1..beta.len() - 1 {
        beta[j + 1] = ((j as f64 - 1.0) * beta[j - 1] - beta[j]) / (j as f64 + 1.0);
    }
    beta.truncate(count);
    beta
}

/// Top-row history for the discrete transparent condition
/// `∂Π/∂z = −√2·∂x^{½}∂s^{½}Π`, with both half-derivatives taken as
/// convolutions matched to the box scheme.
struct TopHistory {
    beta: Vec<f64>,
    scale: f64,
    /// top-row values, one row per completed range level
    levels: Vec<Vec<f64>>,
    /// `∂Π/∂z` at top nodes of the current and next range level
    gradient: Vec<f64>,
    gradient_next: Vec<f64>,
}

impl TopHistory {
    fn new(n_x: usize, n_s: usize, dx: f64, ds: f64, first: Vec<f64>) -> Self {
        let beta = trapezoidal_half_weights(n_x.max(n_s) + 2);
        let scale = -2.0 * (2.0f64).sqrt() / (dx * ds).sqrt();
        let gradient = (0..=n_s)
            .map(|l| scale * (0..=l).map(|i| beta[i] * first[l - i]).sum::<f64>())
            .collect();
        Self {
            beta,
            scale,
            levels: vec![first],
            gradient,
            gradient_next: vec![0.0; n_s + 1],
        }
    }

    /// `Σ_{j≥1} β_j·Π_{n+1−j,i}` for every delay node of the level being marched.
    fn range_memory(&self) -> Vec<f64> {
        let n = self.levels.len();
        let mut memory = vec![0.0; self.gradient.len()];
        for (q, row) in self.levels.iter().enumerate() {
            let w = self.beta[n - q];
            for (acc, v) in memory.iter_mut().zip(row) {
                *acc += v * w;
            }
        }
        memory
    }

    fn coupling(&self) -> f64 {
        self.scale * self.beta[0] * self.beta[0]
    }
}

/// Marches the whole block and records the requested outputs.
pub fn solve_tdpe(problem: &TdpeProblem, outputs: &TdpeOutputs) -> Result<TdpeSolution> {
    problem.beam.validate()?;
    problem.pulse.validate()?;
    if matches!(problem.pulse.shape, PulseShape::Carrier) {
        return Err(Error::invalid("a monochromatic carrier has no time-domain solution"));
    }
    if problem.ground == GroundCondition::Transparent {
        return Err(Error::invalid("the time-domain solver has no transparent lower boundary"));
    }
    let grid = problem.grid;
    let space = grid.space;
    let (dx, dz, ds) = (space.dx, space.dz, grid.ds);
    let rows = space.rows();
    let top = space.n_z;
    let z_values = space.z_values();
    let s_offset = causal_offset(&problem.beam, &problem.pulse, &z_values, ds);
    let n_s = ((grid.s_max + s_offset) / ds).ceil() as usize;
    let cols = n_s + 1;

    let soil = match problem.ground {
        GroundCondition::Impedance(soil) => Some(soil),
        _ => None,
    };
    let kernel = match soil {
        Some(soil) if problem.memory => Some(ImpedanceKernel::new(&soil, ds, cols)?),
        _ => None,
    };
    let surface = soil.as_ref().map(SoilModel::static_factor).unwrap_or(0.0);
    let local_weight = kernel.as_ref().map(|k| 1.0 - k.cells[0]).unwrap_or(1.0);

    let mut prev = vec![0.0; cols * rows];
    let (mut ground, _) = ground_row_at(&problem.terrain, &space, 0.0)?;
    for l in 0..cols {
        let s = l as f64 * ds - s_offset;
        let column = &mut prev[l * rows..(l + 1) * rows];
        for (m, z) in z_values.iter().enumerate().skip(ground) {
            column[m] = problem.beam.amplitude(*z) * problem.pulse.waveform(s - problem.beam.delay(*z));
        }
        if problem.ground == GroundCondition::Dirichlet {
            column[ground] = 0.0;
        }
        if problem.top == TopCondition::Dirichlet {
            column[top] = 0.0;
        }
    }
    let mut next = vec![0.0; cols * rows];

    let mut recorder = Recorder::new(problem, outputs, s_offset, n_s)?;
    recorder.record(0, &prev, ground);
    let mut peak = vec![max_abs(&prev)];

    let mut history = (problem.top == TopCondition::Transparent).then(|| {
        let first = (0..cols).map(|l| prev[l * rows + top]).collect();
        TopHistory::new(space.n_x, n_s, dx, ds, first)
    });
    let c = 2.0 / (dx * ds);
    let e = 1.0 / (4.0 * dz * dz);
    let mut bottom_rate = vec![0.0; n_s];

    for n in 0..space.n_x {
        let x_mid = (n as f64 + 0.5) * dx;
        let (new_ground, _) = ground_row_at(&problem.terrain, &space, space.x(n + 1))?;
        let slope = problem.terrain.slope(x_mid)?;
        if new_ground != ground {
            for l in 0..cols {
                restage_column(&mut prev[l * rows..(l + 1) * rows], ground, new_ground);
            }
            ground = new_ground;
        }
        let g = ground;
        let size = top - g + 1;

        let mut lower = vec![-e; size];
        let mut diag = vec![c + 2.0 * e; size];
        let mut upper = vec![-e; size];
        let bottom_alpha = match problem.ground {
            GroundCondition::Impedance(_) => Some((surface * local_weight - slope) / (2.0 * ds)),
            GroundCondition::Conducting => Some(-slope / (2.0 * ds)),
            GroundCondition::Dirichlet | GroundCondition::Transparent => None,
        };
        match bottom_alpha {
            Some(alpha) => {
                diag[0] = c + 2.0 * e + 8.0 * dz * e * alpha;
                upper[0] = -2.0 * e;
            }
            None => {
                diag[0] = 1.0;
                upper[0] = 0.0;
            }
        }
        let coupling = history.as_ref().map(TopHistory::coupling);
        match coupling {
            Some(a) => {
                diag[size - 1] = c + 2.0 * e - 2.0 * dz * e * a;
                lower[size - 1] = -2.0 * e;
            }
            None => {
                diag[size - 1] = 1.0;
                lower[size - 1] = 0.0;
            }
        }
        let lu = TridiagonalLu::factor(&lower, &diag, &upper)?;

        let range_memory = history.as_ref().map(TopHistory::range_memory);
        // `∂x^{½}Π` along the top of the level being marched
        let mut half_x = vec![0.0; cols];
        let mut top_row = vec![0.0; cols];
        if let (Some(h), Some(memory)) = (history.as_mut(), range_memory.as_ref()) {
            half_x[0] = memory[0];
            h.gradient_next[0] = h.scale * h.beta[0] * half_x[0];
        }

        next[..rows].fill(0.0);
        let mut rhs = vec![0.0; size];
        for l in 0..n_s {
            let (p00, p01) = (&prev[l * rows..(l + 1) * rows], &prev[(l + 1) * rows..(l + 2) * rows]);
            let (done, rest) = next.split_at_mut((l + 1) * rows);
            let p10 = &done[l * rows..];
            let p11 = &mut rest[..rows];
            let known = |m: usize| p01[m] + p10[m] + p00[m];
            let mixed_known = |m: usize| p01[m] + p10[m] - p00[m];

            for m in g + 1..top {
                rhs[m - g] = c * mixed_known(m) + e * (known(m + 1) - 2.0 * known(m) + known(m - 1));
            }

            if let Some(alpha) = bottom_alpha {
                let memory: f64 = match &kernel {
                    Some(k) => (1..=l).map(|j| k.cells[j] * bottom_rate[l - j]).sum::<f64>() * surface,
                    None => 0.0,
                };
                let partial = p01[g] - p00[g] - p10[g];
                rhs[0] = c * mixed_known(g) + 2.0 * e * (known(g + 1) - known(g)) - 8.0 * dz * e * (alpha * partial - memory);
            } else {
                rhs[0] = 0.0;
            }

            let mut top_offset = 0.0;
            if let (Some(h), Some(memory)) = (history.as_ref(), range_memory.as_ref()) {
                let convolved: f64 = (1..=l + 1).map(|i| h.beta[i] * half_x[l + 1 - i]).sum();
                top_offset = h.scale * (convolved + h.beta[0] * memory[l + 1]);
                let corners = h.gradient[l] + h.gradient[l + 1] + h.gradient_next[l];
                rhs[size - 1] = c * mixed_known(top)
                    + 2.0 * e * (known(top - 1) - known(top))
                    + 2.0 * dz * e * (corners + top_offset);
            } else {
                rhs[size - 1] = 0.0;
            }

            lu.solve_in_place(&mut rhs);
            p11[..g].fill(0.0);
            p11[g..].copy_from_slice(&rhs);

            bottom_rate[l] = (p01[g] - p00[g] + p11[g] - p10[g]) / (2.0 * ds);
            if let (Some(h), Some(memory)) = (history.as_mut(), range_memory.as_ref()) {
                top_row[l + 1] = p11[top];
                half_x[l + 1] = h.beta[0] * p11[top] + memory[l + 1];
                h.gradient_next[l + 1] = coupling.unwrap_or(0.0) * p11[top] + top_offset;
            }
        }

        if let Some(h) = history.as_mut() {
            h.levels.push(top_row);
            std::mem::swap(&mut h.gradient, &mut h.gradient_next);
        }
        std::mem::swap(&mut prev, &mut next);
        let level_peak = max_abs(&prev);
        if !level_peak.is_finite() {
            return Err(Error::invalid(format!("non-finite TDPE field at x = {}", space.x(n + 1))));
        }
        peak.push(level_peak);
        recorder.record(n + 1, &prev, ground);
    }

    Ok(recorder.finish(s_offset, n_s, peak))
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Recorder<'a> {
    problem: &'a TdpeProblem,
    outputs: &'a TdpeOutputs,
    s_offset: f64,
    n_s: usize,
    probe_steps: Vec<(usize, usize)>,
    probes: Vec<Option<ProbeWaveform>>,
    station_steps: Vec<usize>,
    stations: Vec<Option<ComplexField2D>>,
    snapshots: Vec<ComplexField2D>,
}

impl<'a> Recorder<'a> {
    fn new(problem: &'a TdpeProblem, outputs: &'a TdpeOutputs, s_offset: f64, n_s: usize) -> Result<Self> {
        let space = problem.grid.space;
        let step_of = |x: f64| -> Result<usize> {
            if !(0.0..=space.x_max * (1.0 + 1e-9)).contains(&x) {
                return Err(Error::invalid(format!("x = {x} outside [0, {}]", space.x_max)));
            }
            Ok(((x / space.dx).round() as usize).min(space.n_x))
        };
        let probe_steps = outputs
            .probes
            .iter()
            .map(|&(x, z)| {
                if !(0.0..=space.z_max).contains(&z) {
                    return Err(Error::invalid(format!("probe height {z} outside [0, {}]", space.z_max)));
                }
                Ok((step_of(x)?, ((z / space.dz).round() as usize).min(space.n_z)))
            })
            .collect::<Result<Vec<_>>>()?;
        let station_steps = outputs.stations.iter().map(|&x| step_of(x)).collect::<Result<Vec<_>>>()?;
        let xs = outputs.snapshot_x_stride.max(1);
        let zs = outputs.snapshot_z_stride.max(1);
        let snapshots = outputs
            .snapshots
            .iter()
            .map(|_| {
                ComplexField2D::zeros(
                    space.n_x / xs + 1,
                    space.n_z / zs + 1,
                    0.0,
                    0.0,
                    space.dx * xs as f64,
                    space.dz * zs as f64,
                    0.0,
                )
            })
            .collect();
        Ok(Self {
            problem,
            outputs,
            s_offset,
            n_s,
            probes: vec![None; probe_steps.len()],
            probe_steps,
            stations: vec![None; station_steps.len()],
            station_steps,
            snapshots,
        })
    }

    fn record(&mut self, n: usize, level: &[f64], ground: usize) {
        let space = self.problem.grid.space;
        let ds = self.problem.grid.ds;
        let rows = space.rows();
        let cols = self.n_s + 1;
        let x = space.x(n);
        let s_values: Vec<f64> = (0..cols).map(|l| l as f64 * ds - self.s_offset).collect();
        for (slot, &(step, row)) in self.probes.iter_mut().zip(&self.probe_steps) {
            if step == n {
                *slot = Some(ProbeWaveform {
                    x,
                    z: space.z(row),
                    s: s_values.clone(),
                    values: (0..cols).map(|l| level[l * rows + row]).collect(),
                });
            }
        }
        let zs = self.outputs.station_z_stride.max(1);
        for (slot, &step) in self.stations.iter_mut().zip(&self.station_steps) {
            if step == n {
                let nz = space.n_z / zs + 1;
                let mut block = ComplexField2D::zeros(cols, nz, -self.s_offset, 0.0, ds, space.dz * zs as f64, 0.0);
                for l in 0..cols {
                    for iz in 0..nz {
                        block.set(l, iz, Complex64::new(level[l * rows + iz * zs], 0.0));
                    }
                    block.set_ground_row(l, ground.div_ceil(zs));
                }
                *slot = Some(block);
            }
        }
        let xs = self.outputs.snapshot_x_stride.max(1);
        let zs = self.outputs.snapshot_z_stride.max(1);
        if n.is_multiple_of(xs) {
            let ix = n / xs;
            for (snap, &ct) in self.snapshots.iter_mut().zip(&self.outputs.snapshots) {
                let position = (ct - x + self.s_offset) / ds;
                let column = snap.column_mut(ix);
                if position >= 0.0 && position <= self.n_s as f64 {
                    let l = (position.floor() as usize).min(self.n_s.saturating_sub(1));
                    let frac = position - l as f64;
                    for (iz, v) in column.iter_mut().enumerate() {
                        let m = iz * zs;
                        let value = level[l * rows + m] * (1.0 - frac) + level[(l + 1) * rows + m] * frac;
                        *v = Complex64::new(value, 0.0);
                    }
                }
                snap.set_ground_row(ix, ground.div_ceil(zs));
            }
        }
    }

    fn finish(self, s_offset: f64, n_s: usize, peak: Vec<f64>) -> TdpeSolution {
        TdpeSolution {
            s_offset,
            n_s,
            probes: self.probes.into_iter().map(|p| p.expect("every probe step is visited")).collect(),
            stations: self
                .stations
                .into_iter()
                .map(|s| s.expect("every station step is visited"))
                .collect(),
            snapshots: self.outputs.snapshots.iter().copied().zip(self.snapshots).collect(),
            peak,
        }
    }
}
