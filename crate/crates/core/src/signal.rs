//! Pulse waveforms, spectra and the analytic signal.
//!
//! Conventions: `f̃(k) = ∫ f(s) e^{iks} ds`, `f(s) = (1/2π) ∫ f̃(k) e^{−iks} dk` and
//! `F⁺(s) = (1/π) ∫₀^∞ F̃(k) e^{−iks} dk`, so a carrier `cos k₀s` maps to `e^{−ik₀s}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::expint::scaled_e1;
use crate::numerics::quadrature::{integrate, integrate_to_infinity, Tolerance};

const SPECTRAL_FLOOR: f64 = 1e-6;

/// Envelope family of a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseShape {
    /// `f(s) = sin(as)·e^{−bs}` for `s > 0`
    DampedSinusoid { a: f64, b: f64 },
    /// `f(s) = exp(−((s − center)/width)²)`
    GaussianEnvelope { width: f64, center: f64 },
    /// `f ≡ 1`; the pulse degenerates to a monochromatic carrier
    Carrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// carrier wavenumber `k₀` (1/m), zero for carrier-free pulses
    pub k0: f64,
}

impl PulseSpec {
    pub fn damped_sinusoid(a: f64, b: f64, k0: f64) -> Result<Self> {
        Self::new(PulseShape::DampedSinusoid { a, b }, k0)
    }

    /// Damped sinusoid with `a = b = π/Λ`.
    pub fn damped_with_length(length: f64, k0: f64) -> Result<Self> {
        let a = PI / length;
        Self::damped_sinusoid(a, a, k0)
    }

    /// Gaussian envelope of length `Λ`: width `Λ/2`, centered at `2Λ`.
    pub fn gaussian(length: f64, k0: f64) -> Result<Self> {
        Self::new(
            PulseShape::GaussianEnvelope {
                width: length / 2.0,
                center: 2.0 * length,
            },
            k0,
        )
    }

    pub fn carrier(k0: f64) -> Result<Self> {
        if !(k0 > 0.0) {
            return Err(Error::invalid("a monochromatic carrier needs k0 > 0"));
        }
        Self::new(PulseShape::Carrier, k0)
    }

    pub fn new(shape: PulseShape, k0: f64) -> Result<Self> {
        let spec = Self { shape, k0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k0 >= 0.0 && self.k0.is_finite()) {
            return Err(Error::invalid(format!("carrier wavenumber must be ≥ 0, got {}", self.k0)));
        }
        match self.shape {
            PulseShape::DampedSinusoid { a, b } if !(a > 0.0 && b > 0.0) => {
                Err(Error::invalid(format!("damped sinusoid needs a, b > 0, got a = {a}, b = {b}")))
            }
            PulseShape::GaussianEnvelope { width, center } if !(width > 0.0 && center.is_finite()) => {
                Err(Error::invalid(format!("gaussian envelope needs width > 0, got {width}")))
            }
            PulseShape::Carrier if self.k0 <= 0.0 => Err(Error::invalid("a monochromatic carrier needs k0 > 0")),
            _ => Ok(()),
        }
    }

    /// Spatial pulse length `Λ` (m).
    pub fn length(&self) -> f64 {
        match self.shape {
            PulseShape::DampedSinusoid { a, .. } => PI / a,
            PulseShape::GaussianEnvelope { width, .. } => 2.0 * width,
            PulseShape::Carrier => f64::INFINITY,
        }
    }

    /// Interval of `s` outside which the envelope is negligible.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            PulseShape::DampedSinusoid { b, .. } => (0.0, 30.0 / b),
            PulseShape::GaussianEnvelope { width, center } => (center - 4.0 * width, center + 4.0 * width),
            PulseShape::Carrier => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Envelope `f(s)`.
    pub fn envelope(&self, s: f64) -> f64 {
        match self.shape {
            PulseShape::DampedSinusoid { a, b } => {
                if s > 0.0 {
                    (a * s).sin() * (-b * s).exp()
                } else {
                    0.0
                }
            }
            PulseShape::GaussianEnvelope { width, center } => (-((s - center) / width).powi(2)).exp(),
            PulseShape::Carrier => 1.0,
        }
    }

    /// Waveform `F(s) = f(s)·cos(k₀s)`.
    pub fn waveform(&self, s: f64) -> f64 {
        self.envelope(s) * (self.k0 * s).cos()
    }

    /// `f̃(k)` continued to complex `k`; `None` for the carrier, whose spectrum is a line.
    pub fn envelope_spectrum_at(&self, k: Complex64) -> Option<Complex64> {
        match self.shape {
            PulseShape::DampedSinusoid { a, b } => Some(a / (a * a + b * b - k * k - Complex64::i() * (2.0 * b) * k)),
            PulseShape::GaussianEnvelope { width, center } => {
                let i = Complex64::i();
                Some(width * PI.sqrt() * (-(k * k) * (width * width / 4.0) + i * k * center).exp())
            }
            PulseShape::Carrier => None,
        }
    }

    pub fn envelope_spectrum(&self, k: f64) -> Complex64 {
        self.envelope_spectrum_at(Complex64::new(k, 0.0)).unwrap_or_default()
    }

    /// `F̃(k) = [f̃(k − k₀) + f̃(k + k₀)]/2` at complex `k`.
    pub fn spectrum_at(&self, k: Complex64) -> Option<Complex64> {
        let lower = self.envelope_spectrum_at(k - self.k0)?;
        let upper = self.envelope_spectrum_at(k + self.k0)?;
        Some((lower + upper) * 0.5)
    }

    /// `F̃(k)`; zero for the carrier.
    pub fn spectrum(&self, k: f64) -> Complex64 {
        self.spectrum_at(Complex64::new(k, 0.0)).unwrap_or_default()
    }

    /// Spectrum of the analytic signal, `F̃⁺(k) = 2F̃(k)` for `k > 0`.
    pub fn analytic_spectrum(&self, k: f64) -> Complex64 {
        if k > 0.0 {
            self.spectrum(k) * 2.0
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Poles and residues of `F̃` for rational spectra.
    fn poles(&self) -> Option<Vec<(Complex64, f64)>> {
        let PulseShape::DampedSinusoid { a, b } = self.shape else {
            return None;
        };
        let k0 = self.k0;
        let at = |re: f64| Complex64::new(re, -b);
        if k0 == 0.0 {
            Some(vec![(at(a), -0.5), (at(-a), 0.5)])
        } else {
            Some(vec![
                (at(k0 + a), -0.25),
                (at(k0 - a), 0.25),
                (at(-k0 + a), -0.25),
                (at(-k0 - a), 0.25),
            ])
        }
    }

    /// Default spectral band `k₀ ± width·(2π/Λ)`, clipped to positive `k`.
    pub fn band(&self, width: f64) -> (f64, f64) {
        let half = width * 2.0 * PI / self.length();
        let low = (self.k0 - half).max(1e-3 * half.max(self.k0));
        (low, self.k0 + half)
    }

    /// `∫_{k_lo}^{k_hi} |F̃|² dk`.
    pub fn spectral_energy(&self, k_lo: f64, k_hi: f64) -> f64 {
        integrate(|k| Complex64::new(self.spectrum(k).norm_sqr(), 0.0), k_lo, k_hi, Tolerance::new(1e-15, 1e-10))
            .value
            .re
    }

    /// `∫₀^∞ |F̃|² dk`.
    pub fn positive_spectral_energy(&self) -> f64 {
        let scale = self.k0 + 2.0 * PI / self.length();
        integrate_to_infinity(
            |k| Complex64::new(self.spectrum(k).norm_sqr(), 0.0),
            0.0,
            scale,
            Tolerance::new(1e-15, 1e-10),
        )
        .value
        .re
    }
}

/// Evaluator of `F⁺` at real and complex delay.
#[derive(Debug, Clone)]
pub struct AnalyticSignal {
    pulse: PulseSpec,
    k_max: f64,
}

/// Builds the analytic signal of `pulse`.
pub fn analytic_signal(pulse: &PulseSpec) -> AnalyticSignal {
    AnalyticSignal::new(*pulse)
}

impl AnalyticSignal {
    pub fn new(pulse: PulseSpec) -> Self {
        let k_max = spectral_cutoff(&pulse);
        Self { pulse, k_max }
    }

    pub fn pulse(&self) -> &PulseSpec {
        &self.pulse
    }

    /// Wavenumber beyond which `|F̃| < 10⁻⁶·max|F̃|`.
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        self.eval_complex(Complex64::new(s, 0.0))
            .expect("real arguments are always evaluable")
    }

    /// `|F⁺(s)|`.
    pub fn envelope(&self, s: f64) -> f64 {
        self.eval(s).norm()
    }

    /// `F⁺` continued to complex `s`.
    pub fn eval_complex(&self, s: Complex64) -> Result<Complex64> {
        let k0 = self.pulse.k0;
        match self.pulse.shape {
            PulseShape::Carrier => Ok((-Complex64::i() * k0 * s).exp()),
            PulseShape::DampedSinusoid { .. } => Ok(self.rotated_contour(s)),
            PulseShape::GaussianEnvelope { width, center } => {
                let margin = (k0 * width / 2.0).powi(2) - k0 * s.im.abs();
                if margin >= 36.0 {
                    let shifted = (s - center) / width;
                    Ok((-Complex64::i() * k0 * s - shifted * shifted).exp())
                } else {
                    self.gaussian_quadrature(s, width)
                }
            }
        }
    }

    /// Direct truncated quadrature of the one-sided integral; only valid where it converges.
    pub fn eval_quadrature(&self, s: Complex64) -> Result<Complex64> {
        match self.pulse.shape {
            PulseShape::Carrier => self.eval_complex(s),
            PulseShape::GaussianEnvelope { width, .. } => self.gaussian_quadrature(s, width),
            PulseShape::DampedSinusoid { .. } => {
                if s.im > 0.0 {
                    return Err(Error::DivergentEvaluation {
                        re: s.re,
                        im: s.im,
                        reason: "one-sided integral diverges for Im s > 0".into(),
                    });
                }
                let tol = Tolerance {
                    abs: 1e-12,
                    rel: 1e-10,
                    max_panels: 40_000,
                };
                let value = integrate(
                    |k| self.pulse.spectrum(k) * (-Complex64::i() * k * s).exp(),
                    0.0,
                    self.k_max,
                    tol,
                )
                .value;
                Ok(value / PI)
            }
        }
    }

    fn gaussian_quadrature(&self, s: Complex64, width: f64) -> Result<Complex64> {
        let k0 = self.pulse.k0;
        let drift = 2.0 * s.im / (width * width);
        let reach = 14.0 / width;
        let k_hi = (k0 + drift.max(0.0) + reach).max(reach);
        let tol = Tolerance {
            abs: 1e-14,
            rel: 1e-11,
            max_panels: 20_000,
        };
        let integrand = |k: f64| {
            let kc = Complex64::new(k, 0.0);
            self.pulse.spectrum_at(kc).unwrap_or_default() * (-Complex64::i() * k * s).exp()
        };
        let split = (k0 + drift).clamp(0.0, k_hi);
        let value = integrate(integrand, 0.0, split, tol).value + integrate(integrand, split, k_hi, tol).value;
        if !value.is_finite() {
            return Err(Error::DivergentEvaluation {
                re: s.re,
                im: s.im,
                reason: "overflow in the spectral integral".into(),
            });
        }
        Ok(value / PI)
    }

    /// `F⁺` as the integral along the ray of fastest decay plus the residues
    /// of the poles swept while rotating the real axis onto it.
    fn rotated_contour(&self, s: Complex64) -> Complex64 {
        let poles = self.pulse.poles().expect("rational spectrum");
        let phi = self.ray_angle(s);
        let ray: Complex64 = if s.norm() * spread(&poles) < 1e-9 {
            self.ray_quadrature(s, phi)
        } else {
            let w = Complex64::i() * s;
            poles.iter().map(|&(p, res)| pole_ray(p, w, phi) * res).sum()
        };
        (ray + self.swept_residues(s, phi) * (2.0 * PI * Complex64::i())) / PI
    }

    /// Direction `arg k = φ` along which `e^{−iks}` decays fastest, nudged clear of the poles.
    fn ray_angle(&self, s: Complex64) -> f64 {
        let poles = self.pulse.poles().expect("rational spectrum");
        let ideal = if s.norm() == 0.0 {
            -PI / 2.0
        } else {
            let mut theta = s.arg();
            if theta > PI / 2.0 {
                theta -= 2.0 * PI;
            }
            -PI / 2.0 - theta
        };
        let clearance = |phi: f64| {
            poles
                .iter()
                .map(|(p, _)| angle_gap(p.arg(), phi))
                .fold(f64::INFINITY, f64::min)
        };
        (0..=12)
            .flat_map(|j| [j as f64 * 0.05, -(j as f64) * 0.05])
            .map(|d| ideal + d)
            .find(|&phi| clearance(phi) >= 0.05)
            .unwrap_or(ideal)
    }

    fn swept_residues(&self, s: Complex64, phi: f64) -> Complex64 {
        let poles = self.pulse.poles().expect("rational spectrum");
        poles
            .iter()
            .filter_map(|&(p, res)| {
                let arg = p.arg();
                let exp = (-Complex64::i() * p * s).exp() * res;
                if phi < 0.0 && arg > phi && arg < 0.0 {
                    Some(-exp)
                } else if phi > 0.0 && arg < phi && arg > 0.0 {
                    Some(exp)
                } else {
                    None
                }
            })
            .sum()
    }

    /// `∫₀^{∞e^{iφ}} F̃(k)e^{−iks} dk` by quadrature.
    fn ray_quadrature(&self, s: Complex64, phi: f64) -> Complex64 {
        let poles = self.pulse.poles().expect("rational spectrum");
        let direction = Complex64::from_polar(1.0, phi);
        let scale = 1.0 / s.norm().max(1.0 / spread(&poles));
        integrate_to_infinity(
            |rho| {
                let k = direction * rho;
                self.pulse.spectrum_at(k).unwrap_or_default() * (-Complex64::i() * k * s).exp()
            },
            0.0,
            scale,
            Tolerance::new(1e-14, 1e-12),
        )
        .value
            * direction
    }

    /// `(s, F, F⁺, |F⁺|)` rows on a grid of real delays.
    pub fn samples(&self, s_grid: &[f64]) -> Vec<WaveformSample> {
        s_grid
            .iter()
            .map(|&s| {
                let plus = self.eval(s);
                WaveformSample {
                    s,
                    value: self.pulse.waveform(s),
                    plus,
                    envelope: plus.norm(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSample {
    pub s: f64,
    pub value: f64,
    pub plus: Complex64,
    pub envelope: f64,
}

fn spread(poles: &[(Complex64, f64)]) -> f64 {
    poles.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max)
}

/// `∫₀^{∞e^{iφ}} e^{−wk}/(k−p) dk` for `Re(w e^{iφ}) > 0`, as `e^{z}E₁(z)` at
/// `z = −wp` plus the branch jump picked up where the path `u = w(k−p)`
/// crosses the negative real axis.
fn pole_ray(p: Complex64, w: Complex64, phi: f64) -> Complex64 {
    let start = -w * p;
    let heading = w * Complex64::from_polar(1.0, phi);
    let mut value = scaled_e1(start);
    if heading.im != 0.0 {
        let t = -start.im / heading.im;
        if t > 0.0 && start.re + t * heading.re < 0.0 {
            let jump = Complex64::new(0.0, 2.0 * PI) * start.exp();
            value += if start.im > 0.0 { jump } else { -jump };
        }
    }
    value
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn spectral_cutoff(pulse: &PulseSpec) -> f64 {
    let scale = match pulse.shape {
        PulseShape::Carrier => return pulse.k0,
        PulseShape::DampedSinusoid { a, b } => a + b,
        PulseShape::GaussianEnvelope { width, .. } => 1.0 / width,
    };
    let reach = pulse.k0 + 4.0 * scale;
    let peak = (0..=400)
        .map(|j| pulse.spectrum(reach * j as f64 / 400.0).norm())
        .fold(0.0, f64::max);
    let mut k = reach;
    while pulse.spectrum(k).norm() >= SPECTRAL_FLOOR * peak {
        k *= 1.25;
    }
    k
}

/// Imaginary part of the analytic signal of uniformly sampled real data,
/// by one-sided spectral truncation on a zero-padded FFT.
pub fn hilbert(samples: &[f64]) -> Vec<f64> {
    analytic_samples(samples).into_iter().map(|v| v.im).collect()
}

/// Analytic signal `F + i·Im F⁺` of uniformly sampled real data.
pub fn analytic_samples(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail = samples[0].abs().max(samples[n - 1].abs());
    if peak > 0.0 && tail > 1e-3 * peak {
        log::warn!(
            "signal has not decayed at the window edge ({:.1e} of peak); Hilbert transform will alias",
            tail / peak
        );
    }
    let len = (2 * n).next_power_of_two();
    let mut buffer: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buffer.resize(len, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buffer);
    let half = len / 2;
    // positive k pairs with negative DFT frequency under e^{+iks}
    for (j, bin) in buffer.iter_mut().enumerate() {
        if (1..half).contains(&j) {
            *bin = Complex64::new(0.0, 0.0);
        } else if j > half {
            *bin *= 2.0;
        }
    }
    planner.plan_fft_inverse(len).process(&mut buffer);
    buffer.truncate(n);
    buffer.iter().map(|v| v / len as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate_real;
    use proptest::prelude::*;

    fn damped() -> PulseSpec {
        PulseSpec::damped_with_length(9.0, 0.0).unwrap()
    }

    #[test]
    fn damped_envelope_is_causal() {
        let p = damped();
        assert_eq!(p.envelope(-1.0), 0.0);
        assert_eq!(p.envelope(0.0), 0.0);
        assert!(p.envelope(1.0) > 0.0);
    }

    #[test]
    fn spectrum_at_zero_and_by_quadrature() {
        let (a, b) = (0.4, 0.25);
        let p = PulseSpec::damped_sinusoid(a, b, 0.0).unwrap();
        assert!((p.envelope_spectrum(0.0).re - a / (a * a + b * b)).abs() < 1e-15);
        let k = a;
        let numeric = integrate(
            |s| Complex64::new(p.envelope(s), 0.0) * (Complex64::i() * k * s).exp(),
            0.0,
            200.0,
            Tolerance::new(1e-14, 1e-12),
        )
        .value;
        assert!((numeric - p.envelope_spectrum(k)).norm() < 1e-6);
    }

    #[test]
    fn gaussian_spectrum_by_quadrature() {
        let p = PulseSpec::gaussian(6.0, 0.0).unwrap();
        for k in [0.0, 0.3, 1.1] {
            let numeric = integrate(
                |s| Complex64::new(p.envelope(s), 0.0) * (Complex64::i() * k * s).exp(),
                -30.0,
                60.0,
                Tolerance::new(1e-14, 1e-12),
            )
            .value;
            assert!((numeric - p.envelope_spectrum(k)).norm() < 1e-9);
        }
    }

    #[test]
    fn parseval_for_damped_sinusoid() {
        let p = PulseSpec::damped_with_length(9.0, 2.0).unwrap();
        let time = integrate_real(|s| p.waveform(s).powi(2), 0.0, 400.0, Tolerance::new(1e-14, 1e-12));
        let freq = 2.0 * p.positive_spectral_energy() / (2.0 * PI);
        assert!((time - freq).abs() < 1e-4 * time, "{time} vs {freq}");
    }

    #[test]
    fn spectral_width_matches_pulse_length() {
        let p = damped();
        let peak = p.envelope_spectrum(0.0).norm();
        let half = (0..20_000)
            .map(|j| j as f64 * 1e-4)
            .find(|&k| p.envelope_spectrum(k).norm() < 0.5 * peak)
            .unwrap();
        let nominal = 2.0 * PI / p.length();
        assert!(half / nominal < 1.5 && nominal / half < 1.5);
    }

    #[test]
    fn carrier_is_exponential_everywhere() {
        let signal = analytic_signal(&PulseSpec::carrier(3.0).unwrap());
        for s in [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.7), Complex64::new(0.3, -1.5)] {
            let want = (-Complex64::i() * 3.0 * s).exp();
            assert!((signal.eval_complex(s).unwrap() - want).norm() < 1e-15);
        }
        assert!((signal.envelope(4.2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_part_recovers_waveform() {
        for pulse in [
            damped(),
            PulseSpec::damped_with_length(9.0, 2.0).unwrap(),
            PulseSpec::damped_sinusoid(0.2, 0.5, 1.0).unwrap(),
            PulseSpec::gaussian(9.0, 0.0).unwrap(),
            PulseSpec::gaussian(9.0, 0.4).unwrap(),
            PulseSpec::gaussian(9.0, 4.2).unwrap(),
        ] {
            let signal = analytic_signal(&pulse);
            for j in -20..=200 {
                let s = j as f64 * 0.25;
                let err = (signal.eval(s).re - pulse.waveform(s)).abs();
                assert!(err < 1e-8, "{pulse:?} at s = {s}: {err}");
            }
        }
    }

    #[test]
    fn contour_matches_truncated_quadrature() {
        for pulse in [damped(), PulseSpec::damped_with_length(9.0, 2.0).unwrap()] {
            let signal = analytic_signal(&pulse);
            for (re, im) in [(0.0, 0.0), (3.0, 0.0), (7.5, -0.5), (-4.0, -1.0), (20.0, 0.0)] {
                let s = Complex64::new(re, im);
                let a = signal.eval_complex(s).unwrap();
                let b = signal.eval_quadrature(s).unwrap();
                assert!((a - b).norm() < 1e-3, "{s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn closed_form_ray_matches_ray_quadrature() {
        for pulse in [damped(), PulseSpec::damped_with_length(9.0, 4.2).unwrap(), PulseSpec::damped_with_length(3.0, 0.0).unwrap()] {
            let signal = analytic_signal(&pulse);
            for (re, im) in [(3.0, 0.0), (-4.0, 0.0), (7.5, -0.5), (-4.0, -1.0), (20.0, 2.0), (-15.0, 3.0), (0.2, 8.0), (40.0, -6.0)] {
                let s = Complex64::new(re, im);
                let fast = signal.eval_complex(s).unwrap();
                let phi = signal.ray_angle(s);
                let swept = signal.swept_residues(s, phi);
                let slow = (signal.ray_quadrature(s, phi) + swept * (2.0 * PI * Complex64::i())) / PI;
                assert!((fast - slow).norm() < 1e-9 * (1.0 + slow.norm()), "{s}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn quadrature_rejects_upper_half_plane_for_rational_spectra() {
        let signal = analytic_signal(&damped());
        assert!(matches!(
            signal.eval_quadrature(Complex64::new(1.0, 0.5)),
            Err(Error::DivergentEvaluation { .. })
        ));
        assert!(signal.eval_complex(Complex64::new(1.0, 0.5)).unwrap().is_finite());
    }

    #[test]
    fn fast_gaussian_path_matches_quadrature() {
        let pulse = PulseSpec::gaussian(30.0, 2.0).unwrap();
        let signal = analytic_signal(&pulse);
        for (re, im) in [(60.0, 0.0), (45.0, -3.0), (70.0, 4.0), (10.0, 0.0)] {
            let s = Complex64::new(re, im);
            let a = signal.eval_complex(s).unwrap();
            let b = signal.eval_quadrature(s).unwrap();
            assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn complex_evaluation_is_smooth_across_real_axis() {
        let signal = analytic_signal(&PulseSpec::damped_with_length(9.0, 1.5).unwrap());
        for re in [2.0, 6.0, 15.0] {
            let h = 1e-4;
            let up = signal.eval_complex(Complex64::new(re, h)).unwrap().norm();
            let mid = signal.eval_complex(Complex64::new(re, 0.0)).unwrap().norm();
            let down = signal.eval_complex(Complex64::new(re, -h)).unwrap().norm();
            let slope = (up - down) / (2.0 * h);
            assert!(slope.is_finite() && slope.abs() < 10.0);
            let curvature = (up - 2.0 * mid + down) / (h * h);
            assert!(curvature.abs() < 100.0, "curvature {curvature}");
        }
    }

    #[test]
    fn envelope_tracks_modulation_away_from_switch_on() {
        let pulse = PulseSpec::damped_with_length(9.0, 6.0).unwrap();
        let signal = analytic_signal(&pulse);
        for j in 4..30 {
            let s = j as f64 * 0.5;
            let env = pulse.envelope(s).abs();
            assert!((signal.envelope(s) - env).abs() < 0.05, "s = {s}");
        }
    }

    #[test]
    fn hilbert_of_cosine_is_minus_sine() {
        let n = 4096;
        let ds = 0.05;
        let k0 = 2.0 * PI * 40.0 / (n as f64 * ds);
        let window = |j: usize| {
            let t = j as f64 / n as f64;
            (-((t - 0.5) / 0.15).powi(2)).exp()
        };
        let samples: Vec<f64> = (0..n).map(|j| window(j) * (k0 * j as f64 * ds).cos()).collect();
        let im = hilbert(&samples);
        for j in n / 4..3 * n / 4 {
            let want = -window(j) * (k0 * j as f64 * ds).sin();
            assert!((im[j] - want).abs() < 1e-6);
        }
        assert!(hilbert(&vec![0.0; 64]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn hilbert_matches_principal_value_integral() {
        let pulse = damped();
        let ds = 0.01;
        let samples: Vec<f64> = (0..20_000).map(|j| pulse.waveform(j as f64 * ds - 20.0)).collect();
        let im = hilbert(&samples);
        let (lo, hi) = (0.0, 120.0);
        let tol = Tolerance::new(1e-12, 1e-10);
        for s in [1.0, 4.5, 9.0, 17.0] {
            let fs = pulse.waveform(s);
            let smooth = |t: f64| (pulse.waveform(t) - fs) / (s - t);
            let regular = integrate_real(smooth, lo, s, tol) + integrate_real(smooth, s, hi, tol);
            let pv = regular + fs * ((s - lo) / (hi - s)).ln();
            let want = -pv / PI;
            let j = ((s + 20.0) / ds).round() as usize;
            assert!((im[j] - want).abs() < 1e-3, "s = {s}: {} vs {want}", im[j]);
        }
    }

    #[test]
    fn contour_imaginary_part_matches_hilbert() {
        let pulse = PulseSpec::damped_with_length(9.0, 2.0).unwrap();
        let signal = analytic_signal(&pulse);
        let ds = 0.01;
        let samples: Vec<f64> = (0..30_000).map(|j| pulse.waveform(j as f64 * ds - 50.0)).collect();
        let im = hilbert(&samples);
        for s in [0.5, 3.0, 8.0, 20.0] {
            let j = ((s + 50.0) / ds).round() as usize;
            assert!((im[j] - signal.eval(s).im).abs() < 2e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn contour_reproduces_damped_waveform(a in 0.05f64..2.0, b in 0.05f64..2.0, k0 in 0.0f64..5.0, s in -10.0f64..40.0) {
            let pulse = PulseSpec::damped_sinusoid(a, b, k0).unwrap();
            let signal = analytic_signal(&pulse);
            prop_assert!((signal.eval(s).re - pulse.waveform(s)).abs() < 1e-8);
        }
    }
}
