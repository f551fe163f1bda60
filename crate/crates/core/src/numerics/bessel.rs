//! Exponentially scaled modified Bessel function of the first kind, order one.

use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 20.0;

/// `e^{-x} I₁(x)` for `x ≥ 0`; odd extension for negative arguments.
pub fn i1e(x: f64) -> f64 {
    if x < 0.0 {
        -i1e(-x)
    } else if x <= SERIES_LIMIT {
        power_series(x)
    } else {
        asymptotic(x)
    }
}

fn power_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half;
    let mut sum = term;
    let mut k = 0.0;
    while term > sum * 1e-17 {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        sum += term;
    }
    sum * (-x).exp()
}

// Hankel expansion, truncated at its smallest term
fn asymptotic(x: f64) -> f64 {
    let mu = 4.0;
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `I₁(x)`; overflows for `x ≳ 700`.
pub fn i1(x: f64) -> f64 {
    i1e(x) * x.abs().exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // reference values from tabulated I₁
        let cases = [
            (0.5, 0.257_894_305_390_896_4),
            (1.0, 0.565_159_103_992_485_1),
            (5.0, 24.335_642_142_450_52),
            (10.0, 2_670.988_303_701_255),
        ];
        for (x, want) in cases {
            let got = i1(x);
            assert!(((got - want) / want).abs() < 1e-14, "I1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn series_and_asymptotic_branches_join() {
        for x in [SERIES_LIMIT, 25.0] {
            let (a, b) = (power_series(x), asymptotic(x));
            assert!(((a - b) / a).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn large_argument_limit() {
        let x = 1e6;
        let lead = 1.0 / (2.0 * PI * x).sqrt();
        assert!(((i1e(x) - lead * (1.0 - 3.0 / (8.0 * x))) / lead).abs() < 1e-12);
    }

    #[test]
    fn small_argument_slope() {
        assert!((i1e(1e-8) / 1e-8 - 0.5).abs() < 1e-7);
        assert_eq!(i1e(0.0), 0.0);
    }
}
