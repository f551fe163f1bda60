//! Monochromatic parabolic-equation solver: grids, Gaussian-beam sources,
//! complex field containers and Crank–Nicolson marching.

mod solver;
mod transparent;

pub use solver::{solve_pe, GroundCondition, PeMarcher, PeProblem, PeSolution, Station, TopCondition};
pub use transparent::{discrete_exterior_weights, half_power_weights, DiscreteTransparentBoundary, TransparentBoundary};
pub(crate) use solver::{ground_row_at, restage_column};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform marching grid: `x ∈ [0, x_max]`, `z ∈ [0, z_max]` with absolute
/// heights `z_m = m·dz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_max: f64,
    pub z_max: f64,
    pub dx: f64,
    pub dz: f64,
    /// number of x steps
    pub n_x: usize,
    /// number of z intervals; rows run `0..=n_z`
    pub n_z: usize,
}

impl GridSpec {
    pub fn new(x_max: f64, z_max: f64, dx: f64, dz: f64) -> Result<Self> {
        for (name, v) in [("x_max", x_max), ("z_max", z_max), ("dx", dx), ("dz", dz)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("grid {name} must be positive, got {v}")));
            }
        }
        let count = |len: f64, step: f64, name: &str| -> Result<usize> {
            let n = (len / step).round();
            if n < 1.0 || (n * step - len).abs() > 1e-6 * len {
                return Err(Error::invalid(format!(
                    "{name} = {len} is not an integer multiple of its step {step}"
                )));
            }
            Ok(n as usize)
        };
        let n_x = count(x_max, dx, "x_max")?;
        let n_z = count(z_max, dz, "z_max")?;
        if n_z < 4 {
            return Err(Error::invalid("grid needs at least 4 vertical intervals"));
        }
        Ok(Self {
            x_max,
            z_max,
            dx,
            dz,
            n_x,
            n_z,
        })
    }

    pub fn x(&self, n: usize) -> f64 {
        n as f64 * self.dx
    }

    pub fn z(&self, m: usize) -> f64 {
        m as f64 * self.dz
    }

    pub fn rows(&self) -> usize {
        self.n_z + 1
    }

    pub fn z_values(&self) -> Vec<f64> {
        (0..self.rows()).map(|m| self.z(m)).collect()
    }

    /// Paraxial ratio `z_max/x_max`.
    pub fn paraxial_ratio(&self) -> f64 {
        self.z_max / self.x_max
    }

    /// Validity diagnostics for a carrier wavenumber `k`.
    pub fn warnings(&self, k: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.paraxial_ratio() > 0.2 {
            out.push(format!(
                "paraxial ratio z_max/x_max = {:.3} exceeds 0.2",
                self.paraxial_ratio()
            ));
        }
        let lambda = 2.0 * std::f64::consts::PI / k;
        if self.dz > lambda {
            out.push(format!("dz = {} m exceeds the wavelength {lambda:.3} m", self.dz));
        }
        if k * self.z_max < 20.0 * std::f64::consts::PI {
            out.push(format!(
                "domain height {} m spans fewer than 10 wavelengths (k = {k:.4} 1/m)",
                self.z_max
            ));
        }
        out
    }
}

/// Tilted Gaussian beam launched at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeamSpec {
    /// axis height (m)
    pub z0: f64,
    /// initial width (m)
    pub w0: f64,
    /// wavefront radius (m); `f64::INFINITY` for a flat front
    pub rho0: f64,
    /// elevation angle (rad), positive upward
    pub beta: f64,
}

impl GaussianBeamSpec {
    pub fn new(z0: f64, w0: f64, rho0: f64, beta: f64) -> Result<Self> {
        let beam = Self { z0, w0, rho0, beta };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0) {
            return Err(Error::invalid(format!("beam width must be positive, got {}", self.w0)));
        }
        if !(self.beta.abs() <= 0.3) {
            return Err(Error::invalid(format!("beam elevation |β| = {} exceeds 0.3", self.beta)));
        }
        if !self.z0.is_finite() || self.rho0.is_nan() || self.rho0 == 0.0 {
            return Err(Error::invalid("beam height must be finite and ρ₀ nonzero"));
        }
        Ok(())
    }

    /// Complex focal offset `x₀ = (1/ρ₀ + 2i/(k w₀²))⁻¹`.
    pub fn focal_offset(&self, k: f64) -> Complex64 {
        Complex64::new(1.0 / self.rho0, 2.0 / (k * self.w0 * self.w0)).inv()
    }

    /// Initial amplitude `A₀(z) = exp(−(z−z₀)²/w₀²)`.
    pub fn amplitude(&self, z: f64) -> f64 {
        let t = (z - self.z0) / self.w0;
        (-t * t).exp()
    }

    /// Initial delay `Φ₀(z) = (z−z₀)²/(2ρ₀) + β(z−z₀)`.
    pub fn delay(&self, z: f64) -> f64 {
        let d = z - self.z0;
        d * d / (2.0 * self.rho0) + self.beta * d
    }

    /// Exact free-space solution at one point.
    pub fn field_at(&self, k: f64, x: f64, z: f64) -> Complex64 {
        let x0 = self.focal_offset(k);
        let shifted = x + x0;
        let d = z - self.z0 - self.beta * x;
        let phase = Complex64::new(d * d, 0.0) / (shifted * 2.0) + self.beta * (z - self.z0) - 0.5 * self.beta * self.beta * x;
        let amplitude = (Complex64::new(1.0, 0.0) + x / x0).sqrt().inv();
        amplitude * (Complex64::i() * k * phase).exp()
    }
}

/// Source column at `x = 0`.
pub fn gaussian_initial(beam: &GaussianBeamSpec, k: f64, z: &[f64]) -> Vec<Complex64> {
    gaussian_exact(beam, k, 0.0, z)
}

/// Exact free-space beam column at range `x`.
pub fn gaussian_exact(beam: &GaussianBeamSpec, k: f64, x: f64, z: &[f64]) -> Vec<Complex64> {
    z.iter().map(|&zz| beam.field_at(k, x, zz)).collect()
}

/// Trapezoid quadrature of `|u|²` over rows `ground_row..`.
pub fn energy_flux(column: &[Complex64], ground_row: usize, dz: f64) -> f64 {
    let live = &column[ground_row.min(column.len())..];
    match live.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = live[1..n - 1].iter().map(|u| u.norm_sqr()).sum();
            dz * (inner + 0.5 * (live[0].norm_sqr() + live[n - 1].norm_sqr()))
        }
    }
}

/// Complex samples on a rectangular `(x, z)` grid, stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub nx: usize,
    pub nz: usize,
    pub x0: f64,
    pub z0: f64,
    pub dx: f64,
    pub dz: f64,
    /// wavenumber tag (1/m); 0 for transient data
    pub k: f64,
    values: Vec<Complex64>,
    /// first live row of each column; rows below are underground
    ground_row: Vec<usize>,
}

impl ComplexField2D {
    pub fn zeros(nx: usize, nz: usize, x0: f64, z0: f64, dx: f64, dz: f64, k: f64) -> Self {
        Self {
            nx,
            nz,
            x0,
            z0,
            dx,
            dz,
            k,
            values: vec![Complex64::new(0.0, 0.0); nx * nz],
            ground_row: vec![0; nx],
        }
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x0 + ix as f64 * self.dx
    }

    pub fn z(&self, iz: usize) -> f64 {
        self.z0 + iz as f64 * self.dz
    }

    pub fn get(&self, ix: usize, iz: usize) -> Complex64 {
        self.values[ix * self.nz + iz]
    }

    pub fn set(&mut self, ix: usize, iz: usize, v: Complex64) {
        self.values[ix * self.nz + iz] = v;
    }

    pub fn column(&self, ix: usize) -> &[Complex64] {
        &self.values[ix * self.nz..(ix + 1) * self.nz]
    }

    pub fn column_mut(&mut self, ix: usize) -> &mut [Complex64] {
        &mut self.values[ix * self.nz..(ix + 1) * self.nz]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn ground_row(&self, ix: usize) -> usize {
        self.ground_row[ix]
    }

    pub fn ground_rows(&self) -> &[usize] {
        &self.ground_row
    }

    pub fn set_ground_row(&mut self, ix: usize, row: usize) {
        self.ground_row[ix] = row;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Relative L2 distance `‖self − other‖/‖other‖` over live cells.
    pub fn relative_l2(&self, other: &ComplexField2D) -> f64 {
        let (num, den) = self
            .values
            .iter()
            .zip(&other.values)
            .fold((0.0, 0.0), |(n, d), (a, b)| (n + (a - b).norm_sqr(), d + b.norm_sqr()));
        (num / den).sqrt()
    }
}
