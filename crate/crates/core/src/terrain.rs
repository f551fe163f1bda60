//! Terrain height profiles `h(x)` with analytic slopes and the earth-bulge
//! correction.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;

/// Slope magnitude above which a warning is logged.
pub const SLOPE_WARN: f64 = 0.3;
/// Slope magnitude above which a profile is rejected.
pub const SLOPE_LIMIT: f64 = 2.0 * SLOPE_WARN;

/// Parabolic hump `x(X−x)/(2R*)` that mimics earth curvature on a flat grid.
pub fn earth_bulge(x: f64, range: f64, radius: f64) -> f64 {
    x * (range - x) / (2.0 * radius)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthBulge {
    pub range: f64,
    pub radius: f64,
}

impl EarthBulge {
    pub fn height(&self, x: f64) -> f64 {
        earth_bulge(x, self.range, self.radius)
    }

    pub fn slope(&self, x: f64) -> f64 {
        (self.range - 2.0 * x) / (2.0 * self.radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub amplitude: f64,
    pub width: f64,
}

impl Bump {
    fn height_and_slope(&self, x: f64) -> (f64, f64) {
        let t = (x - self.center) / self.width;
        let h = self.amplitude * (-t * t).exp();
        (h, -2.0 * t / self.width * h)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Flat(f64),
    Sampled(CubicSpline),
    Bumps(Vec<Bump>),
}

/// Parameters of a seeded sum-of-Gaussian-hills profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticTerrain {
    pub seed: u64,
    pub n_bumps: usize,
    pub amplitude: f64,
    pub corr_length: f64,
    pub extent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerrainProfile {
    shape: Shape,
    bulge: Option<EarthBulge>,
    /// Upper bound on |h′| of the shape, excluding the bulge.
    slope_bound: f64,
}

impl TerrainProfile {
    pub fn flat(height: f64) -> Self {
        Self {
            shape: Shape::Flat(height),
            bulge: None,
            slope_bound: 0.0,
        }
    }

    /// Natural cubic spline through `(x, h)` samples.
    pub fn from_samples(xs: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        if xs.len() < 4 {
            return Err(Error::invalid(format!(
                "terrain needs at least 4 samples, got {}",
                xs.len()
            )));
        }
        let spline = CubicSpline::natural(xs, hs)?;
        let slope_bound = sampled_max_slope(&spline);
        let profile = Self {
            shape: Shape::Sampled(spline),
            bulge: None,
            slope_bound,
        };
        profile.check_slope()?;
        Ok(profile)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let fail = |line: usize, message: String| Error::TerrainFile {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut xs = Vec::new();
        let mut hs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(fail(line_no, format!("expected 2 columns, found {}", fields.len())));
            }
            let parse = |f: &str| {
                f.parse::<f64>()
                    .map_err(|e| fail(line_no, format!("bad number {f:?}: {e}")))
            };
            let (x, h) = (parse(fields[0])?, parse(fields[1])?);
            if !x.is_finite() || !h.is_finite() {
                return Err(fail(line_no, "non-finite entry".into()));
            }
            if let Some(&last) = xs.last() {
                if x <= last {
                    return Err(fail(line_no, format!("x = {x} does not increase (previous {last})")));
                }
            }
            xs.push(x);
            hs.push(h);
        }
        if xs.len() < 4 {
            return Err(fail(0, format!("need at least 4 samples, found {}", xs.len())));
        }
        Self::from_samples(xs, hs)
    }

    pub fn synthetic(params: SyntheticTerrain) -> Result<Self> {
        let SyntheticTerrain {
            seed,
            n_bumps,
            amplitude,
            corr_length,
            extent,
        } = params;
        if !(amplitude >= 0.0) || !(corr_length > 0.0) || !(extent > 0.0) {
            return Err(Error::invalid("synthetic terrain needs amp ≥ 0, corr_length > 0, extent > 0"));
        }
        if amplitude / corr_length > SLOPE_WARN {
            return Err(Error::SlopeCap {
                x: f64::NAN,
                slope: amplitude / corr_length,
                limit: SLOPE_WARN,
            });
        }
        if amplitude == 0.0 || n_bumps == 0 {
            return Ok(Self::flat(0.0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bumps: Vec<Bump> = (0..n_bumps)
            .map(|_| Bump {
                center: rng.gen_range(0.0..extent),
                amplitude: rng.gen_range(0.0..amplitude),
                width: corr_length,
            })
            .collect();
        let single = (2.0 / std::f64::consts::E).sqrt() / corr_length;
        let slope_bound = bumps.iter().map(|b| b.amplitude * single).sum();
        let profile = Self {
            shape: Shape::Bumps(bumps),
            bulge: None,
            slope_bound,
        };
        profile.check_slope()?;
        Ok(profile)
    }

    pub fn with_bulge(mut self, range: f64, radius: f64) -> Self {
        self.bulge = Some(EarthBulge { range, radius });
        self
    }

    pub fn bulge(&self) -> Option<EarthBulge> {
        self.bulge
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.shape, Shape::Flat(_)) && self.bulge.is_none()
    }

    /// Closed interval on which the profile is defined, if bounded.
    pub fn domain(&self) -> Option<(f64, f64)> {
        let own = match &self.shape {
            Shape::Sampled(s) => Some((s.x_min(), s.x_max())),
            _ => None,
        };
        let bulge = self.bulge.map(|b| (0.0, b.range));
        match (own, bulge) {
            (Some(a), Some(b)) => Some((a.0.max(b.0), a.1.min(b.1))),
            (a, b) => a.or(b),
        }
    }

    /// Upper bound on |h′| of the shape without the bulge.
    pub fn slope_bound(&self) -> f64 {
        self.slope_bound
    }

    pub fn height_and_slope(&self, x: f64) -> Result<(f64, f64)> {
        if let Some((min, max)) = self.domain() {
            let pad = 1e-9 * (max - min).abs().max(1.0);
            if x < min - pad || x > max + pad {
                return Err(Error::OutOfDomain { x, min, max });
            }
        }
        let (mut h, mut dh) = match &self.shape {
            Shape::Flat(h) => (*h, 0.0),
            Shape::Sampled(s) => s.eval_with_slope(x),
            Shape::Bumps(bumps) => bumps.iter().fold((0.0, 0.0), |(h, d), b| {
                let (bh, bd) = b.height_and_slope(x);
                (h + bh, d + bd)
            }),
        };
        if let Some(b) = self.bulge {
            h += b.height(x);
            dh += b.slope(x);
        }
        Ok((h, dh))
    }

    pub fn height(&self, x: f64) -> Result<f64> {
        Ok(self.height_and_slope(x)?.0)
    }

    /// Analytic derivative `h′(x)`.
    pub fn slope(&self, x: f64) -> Result<f64> {
        Ok(self.height_and_slope(x)?.1)
    }

    fn check_slope(&self) -> Result<()> {
        if self.slope_bound > SLOPE_LIMIT {
            return Err(Error::SlopeCap {
                x: f64::NAN,
                slope: self.slope_bound,
                limit: SLOPE_LIMIT,
            });
        }
        if self.slope_bound > SLOPE_WARN {
            log::warn!(
                "terrain slope up to {:.3} exceeds the paraxial guideline {SLOPE_WARN}",
                self.slope_bound
            );
        }
        Ok(())
    }
}

fn sampled_max_slope(spline: &CubicSpline) -> f64 {
    let knots: Vec<f64> = spline.knots().map(|(x, _)| x).collect();
    knots
        .windows(2)
        .flat_map(|w| (0..=8).map(move |j| w[0] + (w[1] - w[0]) * j as f64 / 8.0))
        .map(|x| spline.slope(x).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::EQUIVALENT_EARTH_RADIUS;
    use std::io::Write;

    fn write_file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flat_file_gives_zero_profile() {
        let f = write_file("# flat\n0,0\n1000,0\n2000 0\n3000,\t0\n");
        let t = TerrainProfile::load(f.path()).unwrap();
        for x in [0.0, 500.0, 2999.0] {
            assert_eq!(t.height_and_slope(x).unwrap(), (0.0, 0.0));
        }
        assert!(t.slope(3500.0).is_err());
    }

    #[test]
    fn loaded_profile_interpolates_samples() {
        let f = write_file("0 0\n500 3\n1000 12\n1500 5\n2000 1\n2500 0\n");
        let t = TerrainProfile::load(f.path()).unwrap();
        for (x, h) in [(0.0, 0.0), (500.0, 3.0), (1000.0, 12.0), (1500.0, 5.0), (2500.0, 0.0)] {
            assert!((t.height(x).unwrap() - h).abs() < 1e-12);
        }
    }

    #[test]
    fn single_hump_slope_changes_sign_once() {
        let xs: Vec<f64> = (0..=40).map(|i| i as f64 * 100.0).collect();
        let hs = xs.iter().map(|x| 30.0 * (-((x - 2000.0) / 600.0).powi(2)).exp()).collect();
        let t = TerrainProfile::from_samples(xs, hs).unwrap();
        let signs: Vec<bool> = (0..=3990)
            .map(|i| t.slope(i as f64 + 5.0).unwrap())
            .filter(|s| s.abs() > 1e-4)
            .map(|s| s > 0.0)
            .collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let cases = [
            "0 0\n10 1\n5 2\n20 3\n30 4\n",
            "0 0\n10 1\n20 2\n",
            "0 0\n10 NaN\n20 2\n30 3\n",
            "0 0 1\n10 1\n20 2\n30 3\n",
            "0 0\n10 abc\n20 2\n30 3\n",
        ];
        for text in cases {
            let f = write_file(text);
            assert!(TerrainProfile::load(f.path()).is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn bulge_values() {
        let r = EQUIVALENT_EARTH_RADIUS;
        assert_eq!(earth_bulge(0.0, 1e5, r), 0.0);
        assert_eq!(earth_bulge(1e5, 1e5, r), 0.0);
        let mid = earth_bulge(5e4, 1e5, r);
        assert!((mid - 1e10 / (8.0 * r)).abs() < 1e-9);
        assert!((mid - 147.2).abs() < 0.1);
        for x in [1.0, 1234.5, 4e4] {
            assert!((earth_bulge(x, 1e5, r) - earth_bulge(1e5 - x, 1e5, r)).abs() < 1e-9);
        }
    }

    #[test]
    fn bulge_second_difference_is_constant() {
        let (range, r, d) = (1e5, EQUIVALENT_EARTH_RADIUS, 250.0);
        for i in 1..399 {
            let x = i as f64 * d;
            let second = earth_bulge(x + d, range, r) - 2.0 * earth_bulge(x, range, r) + earth_bulge(x - d, range, r);
            assert!((second + d * d / r).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_bulge_slope() {
        let t = TerrainProfile::flat(0.0).with_bulge(1e5, EQUIVALENT_EARTH_RADIUS);
        let s = t.slope(0.0).unwrap();
        assert!((s - 1e5 / (2.0 * EQUIVALENT_EARTH_RADIUS)).abs() < 1e-15);
        assert!((s - 5.89e-3).abs() < 1e-5);
        assert!(t.slope(-1.0).is_err());
    }

    #[test]
    fn linear_samples_have_exact_slope() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 50.0).collect();
        let hs = xs.iter().map(|x| 1e-3 * x).collect();
        let t = TerrainProfile::from_samples(xs, hs).unwrap();
        for x in [0.0, 12.3, 501.0, 949.0] {
            assert!((t.slope(x).unwrap() - 1e-3).abs() < 1e-6);
        }
    }

    #[test]
    fn synthetic_profiles() {
        let params = SyntheticTerrain {
            seed: 1,
            n_bumps: 5,
            amplitude: 40.0,
            corr_length: 2000.0,
            extent: 10_000.0,
        };
        let a = TerrainProfile::synthetic(params).unwrap();
        let b = TerrainProfile::synthetic(params).unwrap();
        assert_eq!(a, b);
        let mut max_h = 0.0_f64;
        let mut max_s = 0.0_f64;
        for i in 0..=1000 {
            let (h, s) = a.height_and_slope(i as f64 * 10.0).unwrap();
            max_h = max_h.max(h.abs());
            max_s = max_s.max(s.abs());
        }
        assert!(max_h > 0.0 && max_h <= 5.0 * 40.0);
        assert!(max_s <= a.slope_bound() + 1e-12);

        let flat = TerrainProfile::synthetic(SyntheticTerrain { amplitude: 0.0, ..params }).unwrap();
        assert!(flat.is_flat());
        let steep = SyntheticTerrain {
            amplitude: 1000.0,
            ..params
        };
        assert!(matches!(TerrainProfile::synthetic(steep), Err(Error::SlopeCap { .. })));
    }
}
