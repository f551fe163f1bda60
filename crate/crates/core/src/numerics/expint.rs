//! Exponential integral `E₁` at complex argument.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^{z}E₁(z)` on the principal branch (cut along the negative real axis).
pub fn scaled_e1(z: Complex64) -> Complex64 {
    let r = z.norm();
    let near_cut = z.re < 0.0 && z.im.abs() < 0.5 * r;
    if r <= 2.0 || (near_cut && r < 40.0) {
        z.exp() * series(z)
    } else {
        continued_fraction(z)
    }
}

/// `E₁(z)` on the principal branch.
pub fn e1(z: Complex64) -> Complex64 {
    scaled_e1(z) * (-z).exp()
}

fn series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..400 {
        let n = n as f64;
        term *= -z / n;
        let add = term / n;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// `1/(z+1− 1/(z+3− 4/(z+5− …)))` by the modified Lentz method.
fn continued_fraction(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..5000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (a * d + b).inv();
        c = b + a / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_to_infinity, Tolerance};

    /// `∫₀^∞ e^{−(z+t)}/(z+t) dt`, a path that never meets the cut off the real axis.
    fn quadrature(z: Complex64) -> Complex64 {
        integrate_to_infinity(|t| (-(z + t)).exp() / (z + t), 0.0, 1.0, Tolerance::new(1e-300, 1e-13)).value
    }

    #[test]
    fn real_values() {
        // E₁(1) and E₁(0.1) from tables
        assert!((e1(Complex64::new(1.0, 0.0)).re - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((e1(Complex64::new(0.1, 0.0)).re - 1.822_923_958_419_390_7).abs() < 1e-13);
    }

    #[test]
    fn matches_quadrature_off_axis() {
        for (re, im) in [(0.3, 0.4), (3.0, -2.0), (-1.5, 0.7), (-20.0, 5.0), (-7.0, -30.0), (15.0, 80.0), (-35.0, 3.0), (0.5, -9.0)] {
            let z = Complex64::new(re, im);
            let want = quadrature(z);
            let got = e1(z);
            assert!((got - want).norm() < 1e-10 * want.norm(), "z = {z}: {got} vs {want}");
        }
    }

    #[test]
    fn jump_across_cut() {
        let above = e1(Complex64::new(-3.0, 1e-12));
        let below = e1(Complex64::new(-3.0, -1e-12));
        assert!((above - below - Complex64::new(0.0, -2.0 * std::f64::consts::PI)).norm() < 1e-9);
    }
}
