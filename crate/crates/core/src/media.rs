//! Soil electromagnetic properties, reflection coefficients and impedance
//! boundary coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{GAUSSIAN_PER_SIEMENS, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Electric conductivity, stored in Gaussian units (1/s).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Conductivity(f64);

impl Conductivity {
    pub const ZERO: Conductivity = Conductivity(0.0);

    pub fn from_siemens(sigma_si: f64) -> Self {
        Conductivity(sigma_si * GAUSSIAN_PER_SIEMENS)
    }

    pub fn from_gaussian(sigma_gauss: f64) -> Self {
        Conductivity(sigma_gauss)
    }

    pub fn gaussian(self) -> f64 {
        self.0
    }

    pub fn siemens(self) -> f64 {
        self.0 / GAUSSIAN_PER_SIEMENS
    }
}

/// Homogeneous ground: real relative permittivity and conductivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoilModel {
    epsilon: f64,
    sigma: Conductivity,
}

/// Coefficients `r = 4πσ/(cε)` and `q = 2πσ/(c(ε−1))` of the dispersive
/// impedance factor, both in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceKernelParams {
    pub r: f64,
    pub q: f64,
}

impl SoilModel {
    pub fn new(epsilon: f64, sigma: Conductivity) -> Result<Self> {
        if !(epsilon >= 1.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!("permittivity must be finite and ≥ 1, got {epsilon}")));
        }
        if !(sigma.gaussian() >= 0.0) || !sigma.gaussian().is_finite() {
            return Err(Error::invalid(format!(
                "conductivity must be finite and ≥ 0, got {} 1/s",
                sigma.gaussian()
            )));
        }
        Ok(Self { epsilon, sigma })
    }

    /// Soil from permittivity and conductivity in S/m.
    pub fn from_siemens(epsilon: f64, sigma_si: f64) -> Result<Self> {
        Self::new(epsilon, Conductivity::from_siemens(sigma_si))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn conductivity(&self) -> Conductivity {
        self.sigma
    }

    pub fn sigma_gauss(&self) -> f64 {
        self.sigma.gaussian()
    }

    pub fn sigma_si(&self) -> f64 {
        self.sigma.siemens()
    }

    /// `ε̃ = ε + 4πiσ/(kc)`.
    pub fn complex_permittivity(&self, k: f64) -> Result<Complex64> {
        check_wavenumber(k)?;
        Ok(Complex64::new(
            self.epsilon,
            4.0 * PI * self.sigma.gaussian() / (k * SPEED_OF_LIGHT),
        ))
    }

    pub fn kernel_params(&self) -> Result<ImpedanceKernelParams> {
        let sigma = self.sigma.gaussian();
        if sigma == 0.0 {
            return Ok(ImpedanceKernelParams { r: 0.0, q: 0.0 });
        }
        if self.epsilon <= 1.0 {
            return Err(Error::SingularMedium(
                "kernel coefficient q diverges for ε = 1 with σ > 0".into(),
            ));
        }
        Ok(ImpedanceKernelParams {
            r: 4.0 * PI * sigma / (SPEED_OF_LIGHT * self.epsilon),
            q: 2.0 * PI * sigma / (SPEED_OF_LIGHT * (self.epsilon - 1.0)),
        })
    }

    /// High-frequency limit `√(ε−1)/ε` of the impedance factor.
    pub fn static_factor(&self) -> f64 {
        (self.epsilon - 1.0).sqrt() / self.epsilon
    }

    /// `√(ε̃−1)/ε̃` from the complex permittivity, principal branch.
    pub fn surface_factor(&self, k: f64) -> Result<Complex64> {
        let eps_c = self.complex_permittivity(k)?;
        surface_factor_of(eps_c)
    }

    /// Impedance coefficient `δ = √(ε̃−1)/ε̃ − h′` of the ground condition
    /// `∂u/∂z + ikδu = 0`.
    pub fn impedance_coefficient(&self, k: f64, slope: f64) -> Result<Complex64> {
        Ok(self.surface_factor(k)? - slope)
    }

    /// The same factor in the form `[√(ε−1)/ε]·√(k(k+2iq))/(k+ir)` that makes
    /// the wavenumber dependence explicit.
    pub fn dispersive_bc_factor(&self, k: f64) -> Result<Complex64> {
        check_wavenumber(k)?;
        let ImpedanceKernelParams { r, q } = self.kernel_params()?;
        let k_c = Complex64::new(k, 0.0);
        let ratio = (k_c * Complex64::new(k, 2.0 * q)).sqrt() / Complex64::new(k, r);
        Ok(ratio * self.static_factor())
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("wavenumber must be positive, got {k}")))
    }
}

/// `√(ε̃−1)/ε̃` for a given complex permittivity; warns when `|ε̃−1|` is small.
pub fn surface_factor_of(eps_c: Complex64) -> Result<Complex64> {
    let excess = eps_c - 1.0;
    if excess.norm() < 0.5 {
        log::warn!(
            "|ε̃ − 1| = {:.3} is small; the local impedance condition loses accuracy",
            excess.norm()
        );
    }
    let factor = excess.sqrt() / eps_c;
    if factor.re < 0.0 {
        return Err(Error::BranchViolation(format!(
            "Re √(ε̃−1)/ε̃ = {} < 0 for ε̃ = {eps_c}",
            factor.re
        )));
    }
    Ok(factor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReflectionModel {
    /// Exact plane-interface coefficient.
    Fresnel,
    /// Classical surface-impedance approximation.
    Leontovich,
    /// Coefficient implied by the modified impedance condition.
    Modified,
}

impl ReflectionModel {
    pub const ALL: [ReflectionModel; 3] = [Self::Fresnel, Self::Leontovich, Self::Modified];
}

/// Plane-wave reflection coefficient at grazing angle `beta` (rad) for
/// horizontal-magnetic polarization.
pub fn reflection_coefficient(model: ReflectionModel, eps_c: Complex64, beta: f64) -> Result<Complex64> {
    if !(0.0..=PI / 2.0 + 1e-12).contains(&beta) {
        return Err(Error::invalid(format!("grazing angle {beta} outside [0, π/2]")));
    }
    let (sin_b, cos_b) = beta.sin_cos();
    let ratio = |num: Complex64, den: Complex64| num / den;
    Ok(match model {
        ReflectionModel::Fresnel => {
            let root = (eps_c - cos_b * cos_b).sqrt();
            ratio(eps_c * sin_b - root, eps_c * sin_b + root)
        }
        ReflectionModel::Leontovich => {
            let root = eps_c.sqrt() * sin_b;
            ratio(root - 1.0, root + 1.0)
        }
        ReflectionModel::Modified => {
            let excess = eps_c - 1.0;
            if excess.norm() == 0.0 {
                return Err(Error::SingularMedium("modified coefficient needs ε̃ ≠ 1".into()));
            }
            let term = (eps_c - cos_b) / excess.sqrt();
            ratio(eps_c * sin_b - term, eps_c * sin_b + term)
        }
    })
}

/// Brewster grazing angle `arcsin(1/√(ε+1))` of a lossless dielectric.
pub fn brewster_angle(epsilon: f64) -> f64 {
    (1.0 / (epsilon + 1.0).sqrt()).asin()
}
