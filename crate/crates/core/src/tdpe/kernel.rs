//! Memory kernel `N(s)` of the time-domain impedance condition.

use crate::error::Result;
use crate::media::{ImpedanceKernelParams, SoilModel};
use crate::numerics::bessel::i1e;
use crate::numerics::quadrature::{integrate_real, Tolerance};

/// `e^{−qt}I₁(qt)/t`, continued by `q/2` at `t = 0`.
fn bessel_weight(q: f64, t: f64) -> f64 {
    if t * q < 1e-8 {
        0.5 * q
    } else {
        i1e(q * t) / t
    }
}

/// Running state of the integrals behind `N` and its primitive.
#[derive(Debug, Clone, Copy)]
struct KernelIntegrals {
    s: f64,
    /// `∫₀ˢ g(t)e^{−r(s−t)} dt`
    damped: f64,
    /// `∫₀ˢ g(t) dt`
    plain: f64,
}

impl KernelIntegrals {
    fn advance(&mut self, params: ImpedanceKernelParams, to: f64) {
        let ImpedanceKernelParams { r, q } = params;
        let from = self.s;
        if to <= from {
            return;
        }
        let tol = Tolerance {
            abs: 1e-16,
            rel: 1e-13,
            max_panels: 4000,
        };
        let fresh = integrate_real(|t| bessel_weight(q, t) * (-r * (to - t)).exp(), from, to, tol);
        self.damped = self.damped * (-r * (to - from)).exp() + fresh;
        self.plain += integrate_real(|t| bessel_weight(q, t), from, to, tol);
        self.s = to;
    }

    fn kernel(&self, params: ImpedanceKernelParams) -> f64 {
        let ImpedanceKernelParams { r, q } = params;
        (r - q) * (-r * self.s).exp() + q * self.damped
    }

    fn primitive(&self, params: ImpedanceKernelParams) -> f64 {
        let ImpedanceKernelParams { r, q } = params;
        (r - q) * (-(r * self.s)).exp_m1() / -r + q / r * (self.plain - self.damped)
    }
}

/// `N` sampled on `s_ℓ = ℓ·ds` together with its cell integrals.
#[derive(Debug, Clone)]
pub struct ImpedanceKernel {
    pub params: ImpedanceKernelParams,
    pub epsilon: f64,
    pub ds: f64,
    /// `N(ℓ·ds)`
    pub samples: Vec<f64>,
    /// `∫₀^{ds/2} N` for index 0, `∫_{(m−½)ds}^{(m+½)ds} N` for `m ≥ 1`
    pub cells: Vec<f64>,
}

impl ImpedanceKernel {
    pub fn new(soil: &SoilModel, ds: f64, count: usize) -> Result<Self> {
        let params = soil.kernel_params()?;
        let mut samples = vec![0.0; count];
        let mut cells = vec![0.0; count];
        if params.r > 0.0 {
            let mut state = KernelIntegrals {
                s: 0.0,
                damped: 0.0,
                plain: 0.0,
            };
            let mut previous = 0.0;
            for m in 0..count {
                state.advance(params, m as f64 * ds);
                samples[m] = state.kernel(params);
                state.advance(params, (m as f64 + 0.5) * ds);
                let primitive = state.primitive(params);
                cells[m] = primitive - previous;
                previous = primitive;
            }
        }
        Ok(Self {
            params,
            epsilon: soil.epsilon(),
            ds,
            samples,
            cells,
        })
    }

    pub fn is_local(&self) -> bool {
        self.params.r == 0.0
    }

    /// `∫₀^{(count−½)ds} N`.
    pub fn total_weight(&self) -> f64 {
        self.cells.iter().sum()
    }
}

/// `∫₀^S N(s) ds`, tending to one as `S → ∞` for conducting soil.
pub fn kernel_primitive(params: ImpedanceKernelParams, s: f64) -> f64 {
    if params.r == 0.0 {
        return 0.0;
    }
    let mut state = KernelIntegrals {
        s: 0.0,
        damped: 0.0,
        plain: 0.0,
    };
    // geometric breakpoints keep each panel well resolved
    let mut point = (1.0 / params.r).min(s);
    while point < s {
        state.advance(params, point);
        point *= 2.0;
    }
    state.advance(params, s);
    state.primitive(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn soil(sigma: f64) -> SoilModel {
        SoilModel::from_siemens(10.0, sigma).unwrap()
    }

    /// Fixed-Talbot inversion of a Laplace transform.
    fn talbot(transform: impl Fn(Complex64) -> Complex64, t: f64) -> f64 {
        let nodes = 32;
        let radius = 2.0 * nodes as f64 / (5.0 * t);
        let mut sum = 0.5 * (transform(Complex64::new(radius, 0.0)) * (radius * t).exp()).re;
        for j in 1..nodes {
            let theta = j as f64 * PI / nodes as f64;
            let cot = 1.0 / theta.tan();
            let p = Complex64::new(radius * theta * cot, radius * theta);
            let sigma = theta + (theta * cot - 1.0) * cot;
            sum += ((p * t).exp() * transform(p) * Complex64::new(1.0, sigma)).re;
        }
        radius / nodes as f64 * sum
    }

    fn laplace_kernel(params: ImpedanceKernelParams) -> impl Fn(Complex64) -> Complex64 {
        move |p| 1.0 - p.sqrt() * (p + 2.0 * params.q).sqrt() / (p + params.r)
    }

    #[test]
    fn zero_conductivity_gives_zero_kernel() {
        let k = ImpedanceKernel::new(&soil(0.0), 0.5, 50).unwrap();
        assert!(k.is_local());
        assert!(k.samples.iter().chain(&k.cells).all(|v| *v == 0.0));
    }

    #[test]
    fn origin_value_is_r_minus_q() {
        let k = ImpedanceKernel::new(&soil(0.01), 0.25, 4).unwrap();
        let want = k.params.r - k.params.q;
        assert!((k.samples[0] - want).abs() < 1e-6 * want);
        assert!((want - 0.1676).abs() < 5e-4);
    }

    #[test]
    fn samples_match_inverse_laplace() {
        for sigma in [0.001, 0.01, 0.1] {
            let k = ImpedanceKernel::new(&soil(sigma), 0.5, 200).unwrap();
            let transform = laplace_kernel(k.params);
            for m in [1, 3, 10, 40, 199] {
                let want = talbot(&transform, m as f64 * 0.5);
                assert!((k.samples[m] - want).abs() < 1e-7 * k.samples[0], "σ={sigma} m={m}");
            }
        }
    }

    #[test]
    fn primitive_matches_inverse_laplace() {
        let params = soil(0.01).kernel_params().unwrap();
        let transform = laplace_kernel(params);
        for s in [0.5, 7.0, 60.0] {
            let want = talbot(|p| transform(p) / p, s);
            assert!((kernel_primitive(params, s) - want).abs() < 1e-8);
        }
    }

    #[test]
    fn cells_sum_to_primitive() {
        let k = ImpedanceKernel::new(&soil(0.01), 0.5, 400).unwrap();
        let want = kernel_primitive(k.params, 399.5 * 0.5);
        assert!((k.total_weight() - want).abs() < 1e-10);
    }

    #[test]
    fn weight_tends_to_one_with_inverse_root_tail() {
        let params = soil(0.01).kernel_params().unwrap();
        let far = 1e6;
        let tail = (2.0 * params.q).sqrt() / (params.r * (PI * far).sqrt());
        let total = kernel_primitive(params, far);
        assert!((1.0 - total - tail).abs() < 0.05 * tail);
        assert!((total - 1.0).abs() < 1e-3);
    }

    #[test]
    fn kernel_decreases_monotonically_above_critical_permittivity() {
        for sigma in [0.001, 0.01, 0.1] {
            let k = ImpedanceKernel::new(&soil(sigma), 0.1, 2000).unwrap();
            assert!(k.samples.windows(2).all(|w| w[1] < w[0]), "σ = {sigma}");
            assert!(k.samples.iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn large_conductivity_concentrates_weight() {
        let k = ImpedanceKernel::new(&soil(1e3), 0.1, 100).unwrap();
        assert!(k.cells[0] > 0.98);
        assert!(k.samples[0] > 1e4);
    }
}
