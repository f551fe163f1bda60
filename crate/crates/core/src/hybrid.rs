//! Complex-eikonal pulse solver: two close-frequency PE runs give amplitude
//! and complex delay of the incident and reflected waves, and the transient
//! follows by evaluating `F⁺` at complex delay.

use std::time::{Duration, Instant};

use log::{debug, warn};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pe::{
    gaussian_exact, solve_pe, ComplexField2D, GaussianBeamSpec, GridSpec, GroundCondition, PeProblem, PeSolution,
    TopCondition,
};
use crate::signal::{AnalyticSignal, PulseSpec};
use crate::terrain::TerrainProfile;

const NEWTON_TOLERANCE: f64 = 1e-12;
const NEWTON_ITERATIONS: usize = 50;
const CAUSTIC_LIMIT: f64 = 1e-6;
const DEAD_FIELD: f64 = 1e-8;
const PHASE_STEP_LIMIT: f64 = 0.5;
const MAX_HALVINGS: usize = 3;

/// Initial data `u(0, z) = A₀(z)e^{ik₀Φ₀(z)}`, continued to complex launch heights.
pub trait InitialFront {
    fn amplitude(&self, z: Complex64) -> Complex64;
    /// `Φ₀`
    fn eikonal(&self, z: Complex64) -> Complex64;
    /// `γ = Φ₀′`
    fn direction(&self, z: Complex64) -> Complex64;
    /// `γ′ = Φ₀″`
    fn direction_slope(&self, z: Complex64) -> Complex64;
    /// mean ray slope, used to seed the ray equation
    fn tilt(&self) -> f64;
}

/// `Φ₀ = c(z−z₀)²/2 + β(z−z₀)` with optional Gaussian amplitude `e^{−(z−z₀)²/w²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFront {
    pub z0: f64,
    pub curvature: Complex64,
    pub beta: f64,
    pub width: Option<f64>,
}

impl QuadraticFront {
    /// The Gaussian beam with its width folded into a complex curvature `1/x₀`.
    pub fn gaussian_beam(beam: &GaussianBeamSpec, k: f64) -> Self {
        Self {
            z0: beam.z0,
            curvature: beam.focal_offset(k).inv(),
            beta: beam.beta,
            width: None,
        }
    }

    /// Real wavefront of curvature `1/ρ₀` carrying the Gaussian amplitude.
    pub fn real_front(beam: &GaussianBeamSpec) -> Self {
        Self {
            z0: beam.z0,
            curvature: Complex64::new(1.0 / beam.rho0, 0.0),
            beta: beam.beta,
            width: Some(beam.w0),
        }
    }
}

impl InitialFront for QuadraticFront {
    fn amplitude(&self, z: Complex64) -> Complex64 {
        match self.width {
            Some(w) => {
                let t = (z - self.z0) / w;
                (-t * t).exp()
            }
            None => Complex64::new(1.0, 0.0),
        }
    }

    fn eikonal(&self, z: Complex64) -> Complex64 {
        let d = z - self.z0;
        self.curvature * d * d * 0.5 + self.beta * d
    }

    fn direction(&self, z: Complex64) -> Complex64 {
        self.curvature * (z - self.z0) + self.beta
    }

    fn direction_slope(&self, _z: Complex64) -> Complex64 {
        self.curvature
    }

    fn tilt(&self) -> f64 {
        self.beta
    }
}

/// Ray-theory solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPoint {
    /// launch height `z₀` of the (complex) ray through the point
    pub launch: Complex64,
    pub amplitude: Complex64,
    pub eikonal: Complex64,
}

impl RayPoint {
    /// `A·e^{ikΦ}`.
    pub fn field(&self, k: f64) -> Complex64 {
        self.amplitude * (Complex64::i() * k * self.eikonal).exp()
    }
}

/// Solves `z₀ + γ(z₀)x = z` by Newton's method and transports amplitude and eikonal along the ray.
pub fn analytic_ray_solution(front: &impl InitialFront, x: f64, z: f64) -> Result<RayPoint> {
    let target = Complex64::new(z, 0.0);
    let mut launch = Complex64::new(z - front.tilt() * x, 0.0);
    let mut converged = false;
    for _ in 0..NEWTON_ITERATIONS {
        let jacobian = 1.0 + front.direction_slope(launch) * x;
        if jacobian.norm() <= CAUSTIC_LIMIT {
            return Err(Error::Caustic { x, z });
        }
        let step = (launch + front.direction(launch) * x - target) / jacobian;
        launch -= step;
        if step.norm() <= NEWTON_TOLERANCE * launch.norm().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NewtonNonConvergence { x, z });
    }
    let jacobian = 1.0 + front.direction_slope(launch) * x;
    if jacobian.norm() <= CAUSTIC_LIMIT {
        return Err(Error::Caustic { x, z });
    }
    let gamma = front.direction(launch);
    Ok(RayPoint {
        launch,
        amplitude: front.amplitude(launch) / jacobian.sqrt(),
        eikonal: front.eikonal(launch) + gamma * gamma * x * 0.5,
    })
}

/// Complex eikonal `Φ = −i ∂ log u/∂k` recovered from fields at two close wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct EikonalField {
    pub k1: f64,
    pub k2: f64,
    pub nx: usize,
    pub nz: usize,
    pub x0: f64,
    pub z0: f64,
    pub dx: f64,
    pub dz: f64,
    /// log-difference form, `None` where the field is too weak
    values: Vec<Option<Complex64>>,
    /// ratio form `(u₁−u₂)/(i(k₁−k₂)u_mid)`
    ratio: Vec<Option<Complex64>>,
    /// number of `2π` corrections applied while unwrapping
    pub branch_shifts: usize,
    /// largest `|(k₁−k₂)Φ|` over valid points
    pub max_phase_step: f64,
}

impl EikonalField {
    fn index(&self, ix: usize, iz: usize) -> usize {
        ix * self.nz + iz
    }

    pub fn get(&self, ix: usize, iz: usize) -> Option<Complex64> {
        self.values[self.index(ix, iz)]
    }

    pub fn ratio(&self, ix: usize, iz: usize) -> Option<Complex64> {
        self.ratio[self.index(ix, iz)]
    }

    pub fn column(&self, ix: usize) -> &[Option<Complex64>] {
        &self.values[ix * self.nz..(ix + 1) * self.nz]
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x0 + ix as f64 * self.dx
    }

    pub fn z(&self, iz: usize) -> f64 {
        self.z0 + iz as f64 * self.dz
    }

    /// `|Φ_x + Φ_z²/2|` by centred differences at an interior point.
    pub fn eikonal_residual(&self, ix: usize, iz: usize) -> Option<f64> {
        if ix == 0 || iz == 0 || ix + 1 >= self.nx || iz + 1 >= self.nz {
            return None;
        }
        let phi_x = (self.get(ix + 1, iz)? - self.get(ix - 1, iz)?) / (2.0 * self.dx);
        let phi_z = (self.get(ix, iz + 1)? - self.get(ix, iz - 1)?) / (2.0 * self.dz);
        Some((phi_x + phi_z * phi_z * 0.5).norm())
    }

    /// Invalidates points with `|Im Φ| > limit` and returns how many were dropped.
    pub fn restrict_dispersion(&mut self, limit: f64) -> usize {
        let mut dropped = 0;
        for (v, r) in self.values.iter_mut().zip(self.ratio.iter_mut()) {
            if v.is_some_and(|phi| phi.im.abs() > limit) {
                *v = None;
                *r = None;
                dropped += 1;
            }
        }
        let dk = (self.k1 - self.k2).abs();
        self.max_phase_step = self.values.iter().flatten().map(|phi| phi.norm() * dk).fold(0.0, f64::max);
        dropped
    }

    /// Replaces each valid point by the component-wise median of the valid
    /// points within `±half` rows; points with fewer than `half + 1` valid
    /// neighbours are dropped.
    pub fn smooth_rows(&mut self, half: usize) {
        if half == 0 {
            return;
        }
        let median = |xs: &mut Vec<f64>| {
            xs.sort_by(f64::total_cmp);
            let n = xs.len();
            if n % 2 == 1 {
                xs[n / 2]
            } else {
                0.5 * (xs[n / 2 - 1] + xs[n / 2])
            }
        };
        let mut smoothed = vec![None; self.values.len()];
        let (mut re, mut im) = (Vec::new(), Vec::new());
        for ix in 0..self.nx {
            let column = self.column(ix);
            for iz in 0..self.nz {
                if column[iz].is_none() {
                    continue;
                }
                re.clear();
                im.clear();
                for phi in column[iz.saturating_sub(half)..(iz + half + 1).min(self.nz)].iter().flatten() {
                    re.push(phi.re);
                    im.push(phi.im);
                }
                if re.len() > half {
                    smoothed[ix * self.nz + iz] = Some(Complex64::new(median(&mut re), median(&mut im)));
                }
            }
        }
        self.values = smoothed;
    }

    /// Every `stride`-th row, keeping the first.
    pub fn every_nth_row(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let nz = (self.nz - 1) / stride + 1;
        let pick = |data: &[Option<Complex64>]| -> Vec<Option<Complex64>> {
            (0..self.nx)
                .flat_map(|ix| (0..nz).map(move |iz| data[ix * self.nz + iz * stride]))
                .collect()
        };
        Self {
            nz,
            dz: self.dz * stride as f64,
            values: pick(&self.values),
            ratio: pick(&self.ratio),
            ..self.clone()
        }
    }

    /// Field at wavenumber `k` moved from `u₁` along the eikonal, `u₁e^{i(k−k₁)Φ}`.
    pub fn continue_field(&self, u1: &ComplexField2D, k: f64) -> ComplexField2D {
        let mut out = u1.clone();
        out.k = k;
        for ix in 0..self.nx {
            for iz in 0..self.nz {
                let v = match self.get(ix, iz) {
                    Some(phi) => u1.get(ix, iz) * (Complex64::i() * (k - self.k1) * phi).exp(),
                    None => Complex64::new(0.0, 0.0),
                };
                out.set(ix, iz, v);
            }
        }
        out
    }
}

fn every_nth_row(field: &ComplexField2D, stride: usize) -> ComplexField2D {
    let stride = stride.max(1);
    let nz = (field.nz - 1) / stride + 1;
    let mut out = ComplexField2D::zeros(field.nx, nz, field.x0, field.z0, field.dx, field.dz * stride as f64, field.k);
    for ix in 0..field.nx {
        for iz in 0..nz {
            out.set(ix, iz, field.get(ix, iz * stride));
        }
        out.set_ground_row(ix, field.ground_row(ix).div_ceil(stride));
    }
    out
}

fn same_grid(a: &ComplexField2D, b: &ComplexField2D) -> bool {
    a.nx == b.nx && a.nz == b.nz && a.x0 == b.x0 && a.z0 == b.z0 && a.dx == b.dx && a.dz == b.dz
}

fn nearest_branch(value: f64, reference: f64) -> (f64, bool) {
    let turns = ((reference - value) / (2.0 * std::f64::consts::PI)).round();
    (value + turns * 2.0 * std::f64::consts::PI, turns != 0.0)
}

/// Log-difference eikonal with the phase difference unwrapped along `z`, then across `x`.
pub fn extract_eikonal(u1: &ComplexField2D, u2: &ComplexField2D) -> Result<EikonalField> {
    if !same_grid(u1, u2) {
        return Err(Error::invalid("eikonal extraction needs both fields on one grid"));
    }
    let (k1, k2) = (u1.k, u2.k);
    let dk = k1 - k2;
    if !(dk != 0.0 && dk.is_finite()) {
        return Err(Error::invalid(format!("eikonal extraction needs distinct wavenumbers, got {k1} and {k2}")));
    }
    let peak = u1.max_norm().max(u2.max_norm());
    let floor = DEAD_FIELD * peak;
    let (nx, nz) = (u1.nx, u1.nz);
    let mut phase: Vec<Option<f64>> = vec![None; nx * nz];
    let mut branch_shifts = 0;
    for ix in 0..nx {
        let mut previous: Option<f64> = None;
        for iz in u1.ground_row(ix).max(u2.ground_row(ix))..nz {
            let (a, b) = (u1.get(ix, iz), u2.get(ix, iz));
            if a.norm() < floor || b.norm() < floor {
                previous = None;
                continue;
            }
            let principal = (a * b.conj()).arg();
            let reference = previous.or_else(|| if ix > 0 { phase[(ix - 1) * nz + iz] } else { None });
            let value = match reference {
                Some(r) => {
                    let (v, shifted) = nearest_branch(principal, r);
                    branch_shifts += usize::from(shifted);
                    v
                }
                None => principal,
            };
            phase[ix * nz + iz] = Some(value);
            previous = Some(value);
        }
    }

    let k_mid = 0.5 * (k1 + k2);
    let mut values = vec![None; nx * nz];
    let mut ratio = vec![None; nx * nz];
    let mut max_phase_step: f64 = 0.0;
    for ix in 0..nx {
        for iz in 0..nz {
            let idx = ix * nz + iz;
            let Some(d) = phase[idx] else { continue };
            let (a, b) = (u1.get(ix, iz), u2.get(ix, iz));
            let phi = Complex64::new(d, -(a.norm().ln() - b.norm().ln())) / dk;
            let mid = a * (Complex64::i() * (k_mid - k1) * phi).exp();
            max_phase_step = max_phase_step.max((phi * dk).norm());
            values[idx] = Some(phi);
            ratio[idx] = Some((a - b) / (Complex64::i() * dk * mid));
        }
    }
    Ok(EikonalField {
        k1,
        k2,
        nx,
        nz,
        x0: u1.x0,
        z0: u1.z0,
        dx: u1.dx,
        dz: u1.dz,
        values,
        ratio,
        branch_shifts,
        max_phase_step,
    })
}

/// Incident beam from the closed form and the remainder `u − u_i` as the reflected wave.
pub fn split_field(u: &ComplexField2D, beam: &GaussianBeamSpec, k: f64) -> (ComplexField2D, ComplexField2D) {
    let mut incident = u.clone();
    let mut reflected = u.clone();
    incident.k = k;
    reflected.k = k;
    let z_values: Vec<f64> = (0..u.nz).map(|iz| u.z(iz)).collect();
    for ix in 0..u.nx {
        let ground = u.ground_row(ix);
        let exact = gaussian_exact(beam, k, u.x(ix), &z_values);
        for iz in 0..u.nz {
            let ui = if iz < ground { Complex64::new(0.0, 0.0) } else { exact[iz] };
            incident.set(ix, iz, ui);
            reflected.set(ix, iz, u.get(ix, iz) - ui);
        }
    }
    (incident, reflected)
}

/// One ray family: its field at the carrier and its complex eikonal.
#[derive(Debug, Clone, Copy)]
pub struct WaveTerm<'a> {
    pub field: &'a ComplexField2D,
    pub eikonal: &'a EikonalField,
}

impl WaveTerm<'_> {
    /// `u·e^{−ik₀Φ}` and `Φ` down one column.
    fn weights(&self, column: usize, k0: f64) -> Vec<Option<(Complex64, Complex64)>> {
        self.field
            .column(column)
            .iter()
            .zip(self.eikonal.column(column))
            .map(|(u, phi)| phi.map(|phi| (u * (-Complex64::i() * k0 * phi).exp(), phi)))
            .collect()
    }
}

/// `H(z, s) = Σ u·e^{−ik₀Φ}F⁺(s − Φ)` over the given terms at one column; `s` is the first axis of the result.
pub fn transient_field(
    terms: &[WaveTerm<'_>],
    signal: &AnalyticSignal,
    k0: f64,
    column: usize,
    s_grid: &[f64],
) -> Result<ComplexField2D> {
    let template = terms
        .first()
        .ok_or_else(|| Error::invalid("transient needs at least one wave term"))?
        .field;
    if terms.iter().any(|t| !same_grid(t.field, template) || t.eikonal.nz != template.nz) {
        return Err(Error::invalid("wave terms must share one grid"));
    }
    if s_grid.is_empty() {
        return Err(Error::invalid("empty delay grid"));
    }
    let weights: Vec<_> = terms.iter().map(|t| t.weights(column, k0)).collect();
    let ds = if s_grid.len() > 1 { s_grid[1] - s_grid[0] } else { 1.0 };
    let rows: Vec<Vec<Complex64>> = (0..template.nz)
        .into_par_iter()
        .map(|iz| {
            s_grid
                .iter()
                .map(|&s| {
                    weights.iter().try_fold(Complex64::new(0.0, 0.0), |acc, w| match w[iz] {
                        Some((amp, phi)) if amp != Complex64::new(0.0, 0.0) => {
                            Ok(acc + amp * signal.eval_complex(s - phi)?)
                        }
                        _ => Ok(acc),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut block = ComplexField2D::zeros(s_grid.len(), template.nz, s_grid[0], template.z0, ds, template.dz, k0);
    for (iz, row) in rows.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            block.set(l, iz, *v);
        }
    }
    let ground = template.ground_row(column);
    for l in 0..s_grid.len() {
        block.set_ground_row(l, ground);
    }
    Ok(block)
}

/// Normalised envelope `|H|/√2`.
pub fn normalized_envelope(block: &ComplexField2D) -> Vec<f64> {
    block.values().iter().map(|h| h.norm() / std::f64::consts::SQRT_2).collect()
}

#[derive(Debug, Clone)]
pub struct HybridProblem {
    pub grid: GridSpec,
    pub beam: GaussianBeamSpec,
    pub pulse: PulseSpec,
    pub ground: GroundCondition,
    pub top: TopCondition,
    pub terrain: TerrainProfile,
    /// relative split `δ` of the two wavenumbers `k₀(1 ∓ δ)`
    pub delta: f64,
    /// median window (m) applied to the reflected eikonal along `z`, 0 for none
    pub smoothing: f64,
    pub stations: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// strides of the stored monochromatic and eikonal maps
    pub x_stride: usize,
    pub z_stride: usize,
}

/// Transient and the ingredients behind it at one station.
#[derive(Debug, Clone)]
pub struct HybridStation {
    pub x: f64,
    /// `H(s, z)`, `s` first, rows thinned by the output stride
    pub transient: ComplexField2D,
    /// full-resolution eikonals
    pub incident: EikonalField,
    pub reflected: EikonalField,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HybridTiming {
    pub pe: Duration,
    pub transient: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct HybridSolution {
    pub delta: f64,
    pub k1: f64,
    pub k2: f64,
    pub stations: Vec<HybridStation>,
    /// carrier field over the stored grid
    pub carrier: ComplexField2D,
    /// reflected wave `u_r` at `k₀` over the stored grid
    pub reflected: ComplexField2D,
    /// eikonal of the reflected wave over the stored grid
    pub reflected_map: EikonalField,
    pub timing: HybridTiming,
    /// `(x, z, s)` cell updates a time-domain run on the same `(x, z)` grid would need at `ds = Λ/20`
    pub tdpe_cells_estimate: f64,
}

fn station_field(solution: &PeSolution, index: usize, grid: &GridSpec) -> ComplexField2D {
    let station = &solution.stations[index];
    let mut field = ComplexField2D::zeros(1, station.column.len(), station.x, 0.0, grid.dx, grid.dz, solution.field.k);
    field.column_mut(0).copy_from_slice(&station.column);
    field.set_ground_row(0, station.ground_row);
    field
}

struct Extraction {
    incident: EikonalField,
    reflected: EikonalField,
    reflected_field: ComplexField2D,
}

/// Remainder `u − u_free` of a run over ground and the same beam in free space.
fn remainder(u: &ComplexField2D, free: &ComplexField2D) -> ComplexField2D {
    let mut out = u.clone();
    for (idx, (a, b)) in out.values_mut().iter_mut().zip(free.values()).enumerate() {
        let (ix, iz) = (idx / u.nz, idx % u.nz);
        *a = if iz < u.ground_row(ix) { Complex64::new(0.0, 0.0) } else { *a - b };
    }
    out
}

/// Fields at `k₁`, `k₂` over ground and in free space, at one station or over the strided map.
struct FieldPair<'a> {
    ground: [&'a ComplexField2D; 2],
    free: [&'a ComplexField2D; 2],
}

/// Half-width in rows of a smoothing window given in meters.
fn half_window(smoothing: f64, dz: f64) -> usize {
    (0.5 * smoothing / dz).round() as usize
}

fn extract_pair(fields: FieldPair<'_>, beam: &GaussianBeamSpec, limit: f64, smoothing: f64) -> Result<Extraction> {
    let [u1, u2] = fields.ground;
    let [f1, f2] = fields.free;
    let (i1, _) = split_field(u1, beam, u1.k);
    let (i2, _) = split_field(u2, beam, u2.k);
    let (r1, r2) = (remainder(u1, f1), remainder(u2, f2));
    let mut incident = extract_eikonal(&i1, &i2)?;
    let mut reflected = extract_eikonal(&r1, &r2)?;
    reflected.smooth_rows(half_window(smoothing, reflected.dz));
    let dropped = incident.restrict_dispersion(limit) + reflected.restrict_dispersion(limit);
    if dropped > 0 {
        debug!("dropped {dropped} eikonal points with |Im Φ| > {limit:.3} m");
    }
    Ok(Extraction {
        incident,
        reflected,
        reflected_field: r1,
    })
}

/// The beam marched on the same grid with an open floor at `z = 0`.
fn free_space_run(problem: &HybridProblem, k: f64) -> Result<PeSolution> {
    let run = PeProblem::with_beam(
        problem.grid,
        k,
        &problem.beam,
        GroundCondition::Transparent,
        problem.top,
        TerrainProfile::flat(0.0),
    )?;
    solve_pe(run, problem.x_stride, problem.z_stride, &problem.stations)
}

/// Largest `|Im Φ|` for which `ln u` may be linearised in `k` across the
/// pulse band `|k − k₀| ≲ 2π/Λ`.
pub fn dispersion_limit(pulse: &PulseSpec) -> f64 {
    pulse.length() / (2.0 * std::f64::consts::PI)
}

/// Two PE runs, eikonal extraction and transient evaluation at every station.
pub fn run_hybrid(problem: &HybridProblem) -> Result<HybridSolution> {
    let started = Instant::now();
    problem.pulse.validate()?;
    problem.beam.validate()?;
    if !(problem.smoothing >= 0.0) {
        return Err(Error::invalid(format!("eikonal smoothing {} m must be ≥ 0", problem.smoothing)));
    }
    if !(problem.delta > 0.0 && problem.delta < 0.1) {
        return Err(Error::invalid(format!("frequency split δ = {} must lie in (0, 0.1)", problem.delta)));
    }
    let k0 = problem.pulse.k0;
    if !(k0 > 0.0) {
        return Err(Error::invalid("the hybrid solver needs a carrier wavenumber k₀ > 0"));
    }
    let build = |k: f64| {
        PeProblem::with_beam(problem.grid, k, &problem.beam, problem.ground, problem.top, problem.terrain.clone())
    };

    let limit = dispersion_limit(&problem.pulse);
    let mut delta = problem.delta;
    let mut attempt = 0;
    let (runs, extractions) = loop {
        let (k1, k2) = (k0 * (1.0 - delta), k0 * (1.0 + delta));
        let ((a, b), (fa, fb)) = rayon::join(
            || {
                rayon::join(
                    || solve_pe(build(k1)?, problem.x_stride, problem.z_stride, &problem.stations),
                    || solve_pe(build(k2)?, problem.x_stride, problem.z_stride, &problem.stations),
                )
            },
            || rayon::join(|| free_space_run(problem, k1), || free_space_run(problem, k2)),
        );
        let (a, b, fa, fb) = (a?, b?, fa?, fb?);
        let extractions: Vec<Extraction> = (0..problem.stations.len())
            .map(|i| {
                let column = |sol: &PeSolution| station_field(sol, i, &problem.grid);
                let (u1, u2, f1, f2) = (column(&a), column(&b), column(&fa), column(&fb));
                let fields = FieldPair {
                    ground: [&u1, &u2],
                    free: [&f1, &f2],
                };
                extract_pair(fields, &problem.beam, limit, problem.smoothing)
            })
            .collect::<Result<_>>()?;
        let worst = extractions
            .iter()
            .flat_map(|e| [e.incident.max_phase_step, e.reflected.max_phase_step])
            .fold(0.0, f64::max);
        if worst < PHASE_STEP_LIMIT || attempt == MAX_HALVINGS {
            if worst >= PHASE_STEP_LIMIT {
                warn!("|Δk·Φ| reaches {worst:.3} rad after {attempt} halvings of δ; eikonal may be aliased");
            }
            break ((a, b, fa, fb), extractions);
        }
        warn!("|Δk·Φ| reaches {worst:.3} rad at δ = {delta:e}; halving δ");
        delta *= 0.5;
        attempt += 1;
    };
    let pe_done = started.elapsed();

    let (k1, k2) = (k0 * (1.0 - delta), k0 * (1.0 + delta));
    let signal = AnalyticSignal::new(problem.pulse);
    let stations = problem
        .stations
        .iter()
        .zip(extractions)
        .enumerate()
        .map(|(i, (&x, ex))| {
            let u1 = station_field(&runs.0, i, &problem.grid);
            let (incident_field, _) = split_field(&u1, &problem.beam, k0);
            let reflected_field = ex.reflected.continue_field(&ex.reflected_field, k0);
            let stride = problem.z_stride;
            let (incident_field, reflected_field) =
                (every_nth_row(&incident_field, stride), every_nth_row(&reflected_field, stride));
            let (incident_phi, reflected_phi) = (ex.incident.every_nth_row(stride), ex.reflected.every_nth_row(stride));
            let terms = [
                WaveTerm {
                    field: &incident_field,
                    eikonal: &incident_phi,
                },
                WaveTerm {
                    field: &reflected_field,
                    eikonal: &reflected_phi,
                },
            ];
            let transient = transient_field(&terms, &signal, k0, 0, &problem.s_grid)?;
            Ok(HybridStation {
                x,
                transient,
                incident: ex.incident,
                reflected: ex.reflected,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let r1 = remainder(&runs.0.field, &runs.2.field);
    let r2 = remainder(&runs.1.field, &runs.3.field);
    let mut reflected_map = extract_eikonal(&r1, &r2)?;
    reflected_map.smooth_rows(half_window(problem.smoothing, reflected_map.dz));
    reflected_map.restrict_dispersion(limit);
    let reflected = reflected_map.continue_field(&r1, k0);
    let carrier = {
        let (mut u, _) = split_field(&runs.0.field, &problem.beam, k0);
        for (a, b) in u.values_mut().iter_mut().zip(reflected.values()) {
            *a += b;
        }
        u
    };

    let total = started.elapsed();
    let span = problem.s_grid.last().copied().unwrap_or(0.0) - problem.s_grid.first().copied().unwrap_or(0.0);
    let ds = (problem.pulse.length() / 20.0).min(2.0 * std::f64::consts::PI / (12.0 * k0));
    let tdpe_cells_estimate = problem.grid.n_x as f64 * problem.grid.rows() as f64 * (span / ds).ceil();
    Ok(HybridSolution {
        delta,
        k1,
        k2,
        stations,
        carrier,
        reflected,
        reflected_map,
        timing: HybridTiming {
            pe: pe_done,
            transient: total - pe_done,
            total,
        },
        tdpe_cells_estimate,
    })
}

#[cfg(test)]
mod tests;
