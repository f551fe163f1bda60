//! Nonlocal transparent condition at the top of the PE domain.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Piecewise-constant quadrature weights of the `1/√(x−ξ)` kernel:
/// `w_m = 2(√(m+1) − √m)·√step`.
pub fn half_power_weights(count: usize, step: f64) -> Vec<f64> {
    let root = step.sqrt();
    (0..count)
        .map(|m| {
            let (a, b) = ((m + 1) as f64, m as f64);
            // difference of roots without cancellation
            2.0 * root / (a.sqrt() + b.sqrt())
        })
        .collect()
}

/// Marching history of the top row and the closure
/// `∂u/∂z = −√(−2ik/π) ∫₀ˣ ∂u/∂ξ dξ/√(x−ξ)` for outgoing waves under `e^{ikx}`.
#[derive(Debug, Clone)]
pub struct TransparentBoundary {
    dx: f64,
    coefficient: Complex64,
    weights: Vec<f64>,
    /// top-row values at every level so far
    top: Vec<Complex64>,
    /// `∂u/∂z` at the top for the latest level
    last_gradient: Complex64,
}

impl TransparentBoundary {
    pub fn new(k: f64, dx: f64, n_steps: usize, initial_top: Complex64) -> Self {
        let coefficient = -(Complex64::new(0.0, -2.0 * k / PI)).sqrt();
        let mut top = Vec::with_capacity(n_steps + 1);
        top.push(initial_top);
        Self {
            dx,
            coefficient,
            weights: half_power_weights(n_steps + 1, dx),
            top,
            last_gradient: Complex64::new(0.0, 0.0),
        }
    }

    /// `∂u/∂z` at the latest stored level.
    pub fn gradient(&self) -> Complex64 {
        self.last_gradient
    }

    /// Splits the gradient at the next level as `a·u_top + b`.
    pub fn next_closure(&self) -> (Complex64, Complex64) {
        let n = self.top.len();
        let w = &self.weights;
        let a = self.coefficient * (w[0] / self.dx);
        // history increments j = 1..n-1 paired with weights w_{n-j}
        let past: Complex64 = (1..n)
            .map(|j| (self.top[j] - self.top[j - 1]) * w[n - j])
            .sum();
        let b = self.coefficient * ((past - self.top[n - 1] * w[0]) / self.dx);
        (a, b)
    }

    /// Records the solved top value and its gradient.
    pub fn push(&mut self, top_value: Complex64, closure: (Complex64, Complex64)) {
        self.last_gradient = closure.0 * top_value + closure.1;
        self.top.push(top_value);
    }
}

/// Convolution weights `ℓ_m` of the exterior Crank–Nicolson response: the
/// ghost value beyond a boundary row obeys `u_ghost^n = Σ ℓ_m u^{n−m}`.
///
/// `ℓ_m` are the Laurent coefficients of the decaying root `κ(ζ)` of
/// `κ + 1/κ = 2 + (ζ − 1)/(r(ζ + 1))`, sampled on `|ζ| = ρ > 1` and inverted by FFT.
pub fn discrete_exterior_weights(r: Complex64, count: usize) -> Vec<Complex64> {
    let n = (2 * count).max(16).next_power_of_two();
    // ρ^n = 1e8 keeps aliasing small while the ρ^m rescaling costs < 4 digits
    let rho = 10f64.powf(8.0 / n as f64);
    let one = Complex64::new(1.0, 0.0);
    let mut samples: Vec<Complex64> = (0..n)
        .map(|j| {
            let zeta = Complex64::from_polar(rho, 2.0 * PI * j as f64 / n as f64);
            let c = one + (zeta - one) / (r * (zeta + one) * 2.0);
            let root = (c * c - one).sqrt();
            let (a, b) = (c + root, c - root);
            if a.norm_sqr() < b.norm_sqr() {
                a
            } else {
                b
            }
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut samples);
    samples
        .into_iter()
        .take(count)
        .enumerate()
        .map(|(m, v)| v * rho.powi(m as i32) / n as f64)
        .collect()
}

/// Exact transparent closure for the discrete scheme; needs the initial column
/// to vanish at and beyond the boundary row.
#[derive(Debug, Clone)]
pub struct DiscreteTransparentBoundary {
    weights: Vec<Complex64>,
    history: Vec<Complex64>,
    ghost: Complex64,
}

impl DiscreteTransparentBoundary {
    pub fn new(r: Complex64, n_steps: usize, initial: Complex64) -> Self {
        let weights = discrete_exterior_weights(r, n_steps + 1);
        let mut history = Vec::with_capacity(n_steps + 1);
        history.push(initial);
        Self {
            ghost: weights[0] * initial,
            weights,
            history,
        }
    }

    /// Ghost value at the latest stored level.
    pub fn ghost(&self) -> Complex64 {
        self.ghost
    }

    /// Splits the next ghost value as `a·u + b`.
    pub fn next_closure(&self) -> (Complex64, Complex64) {
        let n = self.history.len();
        let b = (1..=n).map(|m| self.weights[m] * self.history[n - m]).sum();
        (self.weights[0], b)
    }

    pub fn push(&mut self, value: Complex64, closure: (Complex64, Complex64)) {
        self.ghost = closure.0 * value + closure.1;
        self.history.push(value);
    }
}
