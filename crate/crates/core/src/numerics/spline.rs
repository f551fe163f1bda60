//! Natural cubic spline interpolation.

use crate::error::{Error, Result};
use crate::numerics::solve_tridiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots
    curvature: Vec<f64>,
}

impl CubicSpline {
    /// Builds a natural spline (zero curvature at both ends).
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::invalid("spline abscissae and ordinates differ in length"));
        }
        if n < 2 {
            return Err(Error::invalid("spline needs at least two knots"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::invalid("spline knots must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spline abscissae must be strictly increasing"));
        }
        let mut curvature = vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut lower = vec![0.0; m];
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                lower[i - 1] = h0;
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
            curvature[1..n - 1].copy_from_slice(&rhs);
        }
        Ok(Self { xs, ys, curvature })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn interval(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    /// Value and first derivative at `x` (cubic extrapolation outside the knots).
    pub fn eval_with_slope(&self, x: f64) -> (f64, f64) {
        let i = self.interval(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (c0, c1) = (self.curvature[i], self.curvature[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let value = a * y0 + b * y1 + ((a * a * a - a) * c0 + (b * b * b - b) * c1) * h * h / 6.0;
        let slope = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * c0 + (3.0 * b * b - 1.0) * c1) * h / 6.0;
        (value, slope)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_slope(x).0
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.eval_with_slope(x).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dx: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dx).collect()
    }

    #[test]
    fn linear_data_is_reproduced() {
        let xs = grid(11, 100.0);
        let ys: Vec<f64> = xs.iter().map(|x| 1e-3 * x + 2.0).collect();
        let s = CubicSpline::natural(xs, ys).unwrap();
        for x in [0.0, 37.0, 512.5, 999.0, 1000.0] {
            assert!((s.eval(x) - (1e-3 * x + 2.0)).abs() < 1e-12);
            assert!((s.slope(x) - 1e-3).abs() < 1e-14);
        }
    }

    #[test]
    fn knots_are_interpolated() {
        let xs = vec![0.0, 1.0, 2.5, 4.0, 7.0];
        let ys = vec![1.0, -2.0, 0.5, 3.0, 3.0];
        let s = CubicSpline::natural(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((s.eval(*x) - y).abs() < 1e-13);
        }
    }

    #[test]
    fn interior_error_is_fourth_order() {
        let f = |x: f64| (x / 300.0).sin() * 40.0;
        let err = |n: usize| {
            let dx = 3000.0 / n as f64;
            let xs = grid(n + 1, dx);
            let ys = xs.iter().map(|&x| f(x)).collect();
            let s = CubicSpline::natural(xs, ys).unwrap();
            // stay clear of the natural end conditions
            (0..200)
                .map(|j| 1000.0 + j as f64 * 5.0)
                .map(|x| (s.eval(x) - f(x)).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_non_monotone_abscissae() {
        assert!(CubicSpline::natural(vec![0.0, 2.0, 1.0], vec![0.0; 3]).is_err());
    }
}
