//! Tridiagonal systems via Thomas elimination without pivoting.

use std::ops::{Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field scalar usable in the tridiagonal solver.
pub trait Scalar:
    Copy + Default + Mul<Output = Self> + Sub<Output = Self> + Div<Output = Self>
{
    fn one() -> Self;
    fn magnitude_sq(self) -> f64;
}

impl Scalar for f64 {
    fn one() -> Self {
        1.0
    }
    fn magnitude_sq(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn magnitude_sq(self) -> f64 {
        self.norm_sqr()
    }
}

const PIVOT_FLOOR: f64 = 1e-12;

/// LU factors of a tridiagonal matrix `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`.
///
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct TridiagonalLu<T> {
    lower: Vec<T>,
    upper_scaled: Vec<T>,
    inv_pivot: Vec<T>,
}

impl<T: Scalar> TridiagonalLu<T> {
    pub fn factor(lower: &[T], diag: &[T], upper: &[T]) -> Result<Self> {
        let n = diag.len();
        if lower.len() != n || upper.len() != n || n == 0 {
            return Err(Error::invalid("tridiagonal bands must have equal nonzero length"));
        }
        let mut upper_scaled = vec![T::default(); n];
        let mut inv_pivot = vec![T::default(); n];
        let mut prev_upper = T::default();
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i] * prev_upper
            };
            let mut row_scale = diag[i].magnitude_sq();
            if i > 0 {
                row_scale = row_scale.max(lower[i].magnitude_sq());
            }
            if i + 1 < n {
                row_scale = row_scale.max(upper[i].magnitude_sq());
            }
            if !(pivot.magnitude_sq() > PIVOT_FLOOR * PIVOT_FLOOR * row_scale) {
                return Err(Error::TridiagonalBreakdown {
                    row: i,
                    pivot: pivot.magnitude_sq().sqrt(),
                });
            }
            let inv = T::one() / pivot;
            inv_pivot[i] = inv;
            prev_upper = if i + 1 < n { upper[i] * inv } else { T::default() };
            upper_scaled[i] = prev_upper;
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper_scaled,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [T]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        rhs[0] = rhs[0] * self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] = rhs[i] - self.upper_scaled[i] * rhs[i + 1];
        }
    }
}

/// One-shot solve.
pub fn solve_tridiagonal<T: Scalar>(lower: &[T], diag: &[T], upper: &[T], rhs: &mut [T]) -> Result<()> {
    TridiagonalLu::factor(lower, diag, upper)?.solve_in_place(rhs);
    Ok(())
}
