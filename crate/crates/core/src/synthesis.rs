//! Pulse synthesis from a sweep of monochromatic PE solutions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pe::{solve_pe, ComplexField2D, PeProblem, PeSolution};
use crate::signal::PulseSpec;

/// Uniform wavenumber samples covering `[k_lo, k_hi]` with spacing at most `dk`.
pub fn sweep_wavenumbers(k_lo: f64, k_hi: f64, dk: f64) -> Result<Vec<f64>> {
    if !(k_lo > 0.0 && k_hi >= k_lo) {
        return Err(Error::invalid(format!("sweep band [{k_lo}, {k_hi}] must lie in k > 0")));
    }
    if k_hi == k_lo {
        return Ok(vec![k_lo]);
    }
    if !(dk > 0.0) {
        return Err(Error::invalid(format!("sweep spacing must be positive, got {dk}")));
    }
    let intervals = ((k_hi - k_lo) / dk - 1e-9).ceil().max(1.0) as usize;
    let step = (k_hi - k_lo) / intervals as f64;
    Ok((0..=intervals).map(|j| k_lo + j as f64 * step).collect())
}

/// Rejects spacings whose periodic images (period `2π/δk`) would fold into a delay window.
pub fn check_anti_phantom(dk: f64, s_window: f64) -> Result<()> {
    let limit = 2.0 * PI / (4.0 * s_window);
    if dk > limit * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "δk = {dk:.4e} 1/m exceeds 2π/(4·{s_window:.1} m) = {limit:.4e}; phantom pulses would enter the window"
        )));
    }
    Ok(())
}

/// Fraction of the positive-frequency spectral energy inside `[k_lo, k_hi]`.
pub fn band_coverage(pulse: &PulseSpec, k_lo: f64, k_hi: f64) -> f64 {
    let total = pulse.positive_spectral_energy();
    if total == 0.0 {
        return 1.0;
    }
    pulse.spectral_energy(k_lo, k_hi) / total
}

/// Per-wavenumber PE solutions on a common grid.
#[derive(Debug, Clone)]
pub struct SpectralSweep {
    pub wavenumbers: Vec<f64>,
    pub solutions: Vec<PeSolution>,
}

/// Solves one PE problem per wavenumber, in parallel; results keep the input order.
pub fn run_sweep<F>(
    wavenumbers: &[f64],
    build: F,
    x_stride: usize,
    z_stride: usize,
    stations: &[f64],
) -> Result<SpectralSweep>
where
    F: Fn(f64) -> Result<PeProblem> + Sync,
{
    if wavenumbers.is_empty() {
        return Err(Error::invalid("empty wavenumber sweep"));
    }
    let solutions = wavenumbers
        .par_iter()
        .map(|&k| {
            let problem = build(k).map_err(|e| e.at_k(k))?;
            solve_pe(problem, x_stride, z_stride, stations)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralSweep {
        wavenumbers: wavenumbers.to_vec(),
        solutions,
    })
}

impl SpectralSweep {
    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }

    /// A single-line sweep is treated as a monochromatic carrier.
    pub fn is_monochromatic(&self) -> bool {
        self.wavenumbers.len() == 1
    }

    /// Trapezoid weights times `F̃(k)/π`.
    fn weights(&self, pulse: &PulseSpec) -> Vec<Complex64> {
        if self.is_monochromatic() {
            return vec![Complex64::new(1.0, 0.0)];
        }
        let n = self.wavenumbers.len();
        self.wavenumbers
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let left = if j > 0 { k - self.wavenumbers[j - 1] } else { 0.0 };
                let right = if j + 1 < n { self.wavenumbers[j + 1] - k } else { 0.0 };
                pulse.spectrum(k) * (0.5 * (left + right) / PI)
            })
            .collect()
    }

    /// `H⁺(z, s)` at station `index` on the delay grid `s_grid`; the first axis of the result is `s`.
    pub fn station_block(&self, pulse: &PulseSpec, index: usize, s_grid: &[f64]) -> Result<ComplexField2D> {
        let columns: Vec<&[Complex64]> = self
            .solutions
            .iter()
            .map(|sol| {
                sol.stations
                    .get(index)
                    .map(|st| st.column.as_slice())
                    .ok_or_else(|| Error::invalid(format!("no station {index} in sweep")))
            })
            .collect::<Result<_>>()?;
        let station = &self.solutions[0].stations[index];
        let nz = station.column.len();
        let dz = self.solutions[0].field.dz * (self.solutions[0].field.nz - 1) as f64 / (nz - 1) as f64;
        let weights = self.weights(pulse);
        let (s0, ds) = grid_origin(s_grid);
        let mut block = ComplexField2D::zeros(s_grid.len(), nz, s0, 0.0, ds, dz, pulse.k0);
        let rows: Vec<Vec<Complex64>> = (0..nz)
            .into_par_iter()
            .map(|m| {
                let values: Vec<Complex64> = columns.iter().zip(&weights).map(|(c, w)| c[m] * w).collect();
                s_grid
                    .iter()
                    .map(|&s| {
                        values
                            .iter()
                            .zip(&self.wavenumbers)
                            .map(|(v, &k)| v * Complex64::from_polar(1.0, -k * s))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        for (m, row) in rows.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                block.set(l, m, *v);
            }
        }
        for l in 0..s_grid.len() {
            block.set_ground_row(l, station.ground_row);
        }
        Ok(block)
    }

    /// `H⁺(x, z, ct − x)` over the stored (strided) field at fixed `ct` (m).
    pub fn snapshot(&self, pulse: &PulseSpec, ct: f64) -> ComplexField2D {
        let template = &self.solutions[0].field;
        let weights = self.weights(pulse);
        let mut out = ComplexField2D::zeros(
            template.nx,
            template.nz,
            template.x0,
            template.z0,
            template.dx,
            template.dz,
            pulse.k0,
        );
        let columns: Vec<Vec<Complex64>> = (0..template.nx)
            .into_par_iter()
            .map(|ix| {
                let s = ct - template.x(ix);
                let phases: Vec<Complex64> = self
                    .wavenumbers
                    .iter()
                    .zip(&weights)
                    .map(|(&k, w)| w * Complex64::from_polar(1.0, -k * s))
                    .collect();
                (0..template.nz)
                    .map(|iz| {
                        self.solutions
                            .iter()
                            .zip(&phases)
                            .map(|(sol, p)| sol.field.get(ix, iz) * p)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        for (ix, col) in columns.into_iter().enumerate() {
            out.column_mut(ix).copy_from_slice(&col);
            out.set_ground_row(ix, template.ground_row(ix));
        }
        out
    }
}

fn grid_origin(s_grid: &[f64]) -> (f64, f64) {
    match s_grid {
        [] => (0.0, 0.0),
        [only] => (*only, 0.0),
        [first, second, ..] => (*first, second - first),
    }
}
