use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::{frequency, wavenumber, EQUIVALENT_EARTH_RADIUS};
use crate::error::{Error, Result};
use crate::media::SoilModel;
use crate::pe::{GaussianBeamSpec, GridSpec, GroundCondition, TopCondition};
use crate::signal::{PulseShape, PulseSpec};
use crate::synthesis::{band_coverage, check_anti_phantom};
use crate::tdpe::TdpeGrid;
use crate::terrain::{SyntheticTerrain, TerrainProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Pe,
    Synth,
    Tdpe,
    Hybrid,
    Reflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopKind {
    #[default]
    Transparent,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundKind {
    #[default]
    Impedance,
    Conducting,
    Dirichlet,
    /// open lower boundary, flat terrain only
    Transparent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerrainKind {
    #[default]
    Flat,
    File,
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseKind {
    Damped,
    Gaussian,
    Carrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFormat {
    #[default]
    Text,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_max: f64,
    pub z_max: f64,
    pub dx: Option<f64>,
    pub dz: Option<f64>,
    /// delay step of the time-domain solver
    pub ds: Option<f64>,
    /// last delay kept by the time-domain solver
    pub s_max: Option<f64>,
    #[serde(default)]
    pub top: TopKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub z0: f64,
    pub w0: f64,
    #[serde(default = "infinite")]
    pub rho0: f64,
    #[serde(default)]
    pub beta: f64,
    pub frequency_hz: Option<f64>,
    pub k0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoilSection {
    #[serde(default)]
    pub ground: GroundKind,
    pub epsilon: Option<f64>,
    /// S/m
    pub sigma: Option<f64>,
    /// Gaussian units, 1/s
    pub sigma_gauss: Option<f64>,
    /// keep the convolution term of the time-domain impedance condition
    pub memory: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrainSection {
    #[serde(default)]
    pub kind: TerrainKind,
    pub height: Option<f64>,
    /// profile file, relative paths resolve against the config directory
    pub path: Option<PathBuf>,
    pub n_bumps: Option<usize>,
    pub amplitude: Option<f64>,
    pub corr_length: Option<f64>,
    #[serde(default)]
    pub bulge: bool,
    pub radius: Option<f64>,
    /// path length the bulge is referred to, defaults to `x_max`
    pub bulge_range: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub kind: PulseKind,
    /// spatial length `Λ` (m)
    pub length: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// modulate by the source carrier; `false` gives a video pulse
    pub carrier: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// band is `k₀ ± half_band`
    pub half_band: Option<f64>,
    pub dk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridSection {
    pub delta: Option<f64>,
    /// median window (m) for the reflected eikonal
    pub smoothing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionSection {
    pub frequency_hz: Option<f64>,
    pub n_angles: Option<usize>,
    /// largest grazing angle (rad)
    pub beta_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// ranges at which full `(s, z)` blocks are written
    #[serde(default)]
    pub stations: Vec<f64>,
    /// `[x, z]` receivers
    #[serde(default)]
    pub probes: Vec<[f64; 2]>,
    /// snapshot times given as `ct` (m)
    #[serde(default)]
    pub snapshots: Vec<f64>,
    pub x_stride: Option<usize>,
    pub z_stride: Option<usize>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub ds: Option<f64>,
    #[serde(default)]
    pub format: GridFormat,
    /// write the full `(x, z)` field map
    pub field: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub solver: SolverKind,
    pub seed: Option<u64>,
    pub grid: Option<GridSection>,
    pub source: Option<SourceSection>,
    #[serde(default)]
    pub soil: SoilSection,
    #[serde(default)]
    pub terrain: TerrainSection,
    pub pulse: Option<PulseSection>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub hybrid: HybridSection,
    #[serde(default)]
    pub reflection: ReflectionSection,
    #[serde(default)]
    pub outputs: OutputSection,
}

fn infinite() -> f64 {
    f64::INFINITY
}

const DEFAULT_SEED: u64 = 1;
const DEFAULT_DELTA: f64 = 1e-3;

impl SimulationConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config sections always serialize")
    }

    fn grid(&self) -> Result<&GridSection> {
        self.grid.as_ref().ok_or_else(|| missing("grid"))
    }

    fn source(&self) -> Result<&SourceSection> {
        self.source.as_ref().ok_or_else(|| missing("source"))
    }

    /// Fills every default and validates; `base` anchors relative file paths.
    pub fn resolve(mut self, base: &Path) -> Result<Scenario> {
        let mut warnings = Vec::new();
        self.seed.get_or_insert(DEFAULT_SEED);
        if self.solver == SolverKind::Reflection {
            return self.resolve_reflection(warnings);
        }
        let carrier_k = self.carrier_wavenumber()?;
        if let Some(src) = self.source.as_mut() {
            if let Some(k) = carrier_k {
                src.k0 = Some(k);
                src.frequency_hz = Some(frequency(k));
            }
        }
        let beam = {
            let s = self.source()?;
            GaussianBeamSpec::new(s.z0, s.w0, s.rho0, s.beta)?
        };
        let needs_pulse = matches!(self.solver, SolverKind::Synth | SolverKind::Tdpe | SolverKind::Hybrid);
        let pulse = if needs_pulse { Some(self.resolve_pulse(carrier_k)?) } else { None };
        if matches!(self.solver, SolverKind::Pe | SolverKind::Synth | SolverKind::Hybrid) && carrier_k.is_none() {
            return Err(Error::Config(format!(
                "solver {:?} needs source.frequency_hz or source.k0",
                self.solver
            )));
        }

        let ground = self.resolve_ground()?;
        let terrain = self.resolve_terrain(base)?;
        let top = match self.grid()?.top {
            TopKind::Transparent => TopCondition::Transparent,
            TopKind::Dirichlet => TopCondition::Dirichlet,
        };
        if self.soil.memory.is_none() {
            self.soil.memory = Some(true);
        }

        let (grid, tdpe_grid) = self.resolve_grid(&beam, pulse.as_ref(), carrier_k)?;
        if let Some(k) = carrier_k {
            warnings.extend(grid.warnings(k));
        }
        if let Some(p) = &pulse {
            let k_eff = crate::tdpe::effective_wavenumber(p);
            if matches!(self.solver, SolverKind::Tdpe) && k_eff * grid.z_max < 2.0 * PI {
                warnings.push(format!("domain height {} m is below one dominant wavelength", grid.z_max));
            }
        }
        self.resolve_outputs(&grid, pulse.as_ref(), carrier_k)?;

        let sweep = if self.solver == SolverKind::Synth {
            let pulse = pulse.as_ref().expect("synthesis resolves a pulse");
            Some(self.resolve_sweep(pulse, &mut warnings)?)
        } else {
            None
        };
        if self.solver == SolverKind::Hybrid {
            let delta = *self.hybrid.delta.get_or_insert(DEFAULT_DELTA);
            if !(delta > 0.0 && delta < 0.1) {
                return Err(Error::Config(format!("hybrid.delta = {delta} must lie in (0, 0.1)")));
            }
            let smoothing = *self.hybrid.smoothing.get_or_insert(0.0);
            if !(smoothing >= 0.0) {
                return Err(Error::Config(format!("hybrid.smoothing = {smoothing} must be ≥ 0")));
            }
            if self.outputs.stations.is_empty() && self.outputs.probes.is_empty() {
                warnings.push("hybrid run without stations or probes only writes the carrier and reflected maps".into());
            }
        }
        for st in self.outputs.stations.iter().chain(self.outputs.probes.iter().map(|p| &p[0])) {
            if !(0.0..=grid.x_max).contains(st) {
                return Err(Error::Config(format!("output range {st} m outside [0, {}]", grid.x_max)));
            }
        }
        for p in &self.outputs.probes {
            if !(0.0..=grid.z_max).contains(&p[1]) {
                return Err(Error::Config(format!("probe height {} m outside [0, {}]", p[1], grid.z_max)));
            }
        }

        Ok(Scenario {
            solver: self.solver,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            grid,
            tdpe_grid,
            beam,
            k0: carrier_k,
            pulse,
            ground,
            top,
            terrain,
            sweep,
            reflection: None,
            warnings,
            config: self,
        })
    }

    fn carrier_wavenumber(&self) -> Result<Option<f64>> {
        let Some(src) = &self.source else {
            return Ok(None);
        };
        let k = match (src.frequency_hz, src.k0) {
            (Some(f), None) => wavenumber(f),
            (None, Some(k)) => k,
            (None, None) => return Ok(None),
            (Some(f), Some(k)) => {
                if ((wavenumber(f) - k) / k).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "source.frequency_hz = {f} and source.k0 = {k} disagree"
                    )));
                }
                k
            }
        };
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("carrier wavenumber must be positive, got {k}")));
        }
        Ok(Some(k))
    }

    fn resolve_pulse(&mut self, carrier_k: Option<f64>) -> Result<PulseSpec> {
        let section = self.pulse.as_mut().ok_or_else(|| missing("pulse"))?;
        let use_carrier = *section.carrier.get_or_insert(section.kind == PulseKind::Carrier || carrier_k.is_some());
        let k0 = if use_carrier {
            carrier_k.ok_or_else(|| Error::Config("a modulated pulse needs source.frequency_hz or source.k0".into()))?
        } else {
            0.0
        };
        let pulse = match section.kind {
            PulseKind::Carrier => PulseSpec::carrier(k0)?,
            PulseKind::Damped => match (section.length, section.a, section.b) {
                (_, Some(a), Some(b)) => {
                    section.length = Some(PI / a);
                    PulseSpec::damped_sinusoid(a, b, k0)?
                }
                (Some(length), None, None) => {
                    section.a = Some(PI / length);
                    section.b = Some(PI / length);
                    PulseSpec::damped_with_length(length, k0)?
                }
                _ => {
                    return Err(Error::Config(
                        "damped pulse needs either pulse.length or both pulse.a and pulse.b".into(),
                    ))
                }
            },
            PulseKind::Gaussian => {
                let length = section.length.ok_or_else(|| missing("pulse.length"))?;
                if section.a.is_some() || section.b.is_some() {
                    return Err(Error::Config("pulse.a and pulse.b only apply to damped pulses".into()));
                }
                PulseSpec::gaussian(length, k0)?
            }
        };
        Ok(pulse)
    }

    fn resolve_ground(&mut self) -> Result<GroundCondition> {
        let soil = &mut self.soil;
        Ok(match soil.ground {
            GroundKind::Conducting => GroundCondition::Conducting,
            GroundKind::Dirichlet => GroundCondition::Dirichlet,
            GroundKind::Transparent => GroundCondition::Transparent,
            GroundKind::Impedance => GroundCondition::Impedance(resolve_soil(soil)?),
        })
    }

    fn resolve_terrain(&mut self, base: &Path) -> Result<TerrainProfile> {
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let x_max = self.grid()?.x_max;
        let t = &mut self.terrain;
        let mut profile = match t.kind {
            TerrainKind::Flat => TerrainProfile::flat(*t.height.get_or_insert(0.0)),
            TerrainKind::File => {
                let path = t.path.as_ref().ok_or_else(|| missing("terrain.path"))?;
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                TerrainProfile::load(full)?
            }
            TerrainKind::Synthetic => TerrainProfile::synthetic(SyntheticTerrain {
                seed,
                n_bumps: *t.n_bumps.get_or_insert(6),
                amplitude: *t.amplitude.get_or_insert(10.0),
                corr_length: *t.corr_length.get_or_insert(x_max / 10.0),
                extent: x_max,
            })?,
        };
        if t.bulge {
            let radius = *t.radius.get_or_insert(EQUIVALENT_EARTH_RADIUS);
            let range = *t.bulge_range.get_or_insert(x_max);
            if !(radius > 0.0 && range > 0.0) {
                return Err(Error::Config("bulge radius and range must be positive".into()));
            }
            profile = profile.with_bulge(range, radius);
        }
        Ok(profile)
    }

    fn resolve_grid(
        &mut self,
        beam: &GaussianBeamSpec,
        pulse: Option<&PulseSpec>,
        carrier_k: Option<f64>,
    ) -> Result<(GridSpec, Option<TdpeGrid>)> {
        let solver = self.solver;
        let g = self.grid.as_mut().ok_or_else(|| missing("grid"))?;
        if solver == SolverKind::Tdpe {
            let pulse = pulse.expect("time-domain runs resolve a pulse");
            let s_max = *g.s_max.get_or_insert_with(|| default_tdpe_window(pulse, beam, g.z_max, g.x_max));
            let rules = TdpeGrid::defaults(pulse, beam, g.x_max, g.z_max, s_max)?;
            let dx = *g.dx.get_or_insert(rules.space.dx);
            let dz = *g.dz.get_or_insert(rules.space.dz);
            let ds = *g.ds.get_or_insert(rules.ds);
            let grid = TdpeGrid::new(g.x_max, g.z_max, s_max, dx, dz, ds)?;
            return Ok((grid.space, Some(grid)));
        }
        let k = carrier_k.expect("frequency-domain solvers need a carrier");
        let dz = *g.dz.get_or_insert_with(|| {
            let lambda = 2.0 * PI / k;
            snap_step(g.z_max, (beam.w0 / 10.0).min(lambda))
        });
        let dx = *g.dx.get_or_insert_with(|| snap_step(g.x_max, 2.0 * k * dz * dz));
        Ok((GridSpec::new(g.x_max, g.z_max, dx, dz)?, None))
    }

    fn resolve_outputs(&mut self, grid: &GridSpec, pulse: Option<&PulseSpec>, carrier_k: Option<f64>) -> Result<()> {
        let out = &mut self.outputs;
        out.field.get_or_insert(true);
        let x_stride = *out.x_stride.get_or_insert(((grid.n_x / 400).max(1)).max(1));
        let z_stride = *out.z_stride.get_or_insert((grid.rows() / 400).max(1));
        if x_stride == 0 || z_stride == 0 {
            return Err(Error::Config("output strides must be at least 1".into()));
        }
        if let Some(p) = pulse {
            let (start, _) = p.support();
            let length = p.length();
            let span = if length.is_finite() { 10.0 * length } else { 20.0 * PI / p.k0 };
            let s_min = *out.s_min.get_or_insert(if start.is_finite() { start - length } else { 0.0 });
            let s_max = *out.s_max.get_or_insert(s_min + span);
            if !(s_max > s_min) {
                return Err(Error::Config(format!("outputs.s_max = {s_max} must exceed s_min = {s_min}")));
            }
            let ds = *out.ds.get_or_insert(match carrier_k.filter(|_| p.k0 > 0.0) {
                Some(k) => (length / 20.0).min(2.0 * PI / (12.0 * k)),
                None => length / 20.0,
            });
            if !(ds > 0.0 && ds.is_finite()) {
                return Err(Error::Config(format!("outputs.ds = {ds} must be positive")));
            }
        }
        Ok(())
    }

    fn resolve_sweep(&mut self, pulse: &PulseSpec, warnings: &mut Vec<String>) -> Result<SweepPlan> {
        let length = pulse.length();
        let window = self.outputs.s_max.unwrap_or(0.0) - self.outputs.s_min.unwrap_or(0.0);
        let sweep = &mut self.sweep;
        let half_band = *sweep.half_band.get_or_insert(if length.is_finite() { 3.0 * 2.0 * PI / length } else { 0.0 });
        let dk = *sweep.dk.get_or_insert(2.0 * PI / (5.0 * window.max(1e-9)));
        if pulse.k0 <= half_band {
            return Err(Error::Config(format!(
                "sweep band k₀ ± {half_band:.4} reaches k ≤ 0 (k₀ = {:.4}); use the tdpe solver for video pulses",
                pulse.k0
            )));
        }
        if half_band > 0.0 {
            check_anti_phantom(dk, window).map_err(|e| Error::Config(e.to_string()))?;
        }
        let (k_lo, k_hi) = (pulse.k0 - half_band, pulse.k0 + half_band);
        let coverage = band_coverage(pulse, k_lo, k_hi);
        if coverage < 0.99 {
            warnings.push(format!("sweep band holds only {:.2}% of the pulse spectral energy", 100.0 * coverage));
        }
        Ok(SweepPlan { k_lo, k_hi, dk })
    }

    fn resolve_reflection(mut self, warnings: Vec<String>) -> Result<Scenario> {
        let soil = resolve_soil(&mut self.soil)?;
        let r = &mut self.reflection;
        let f = r
            .frequency_hz
            .or(self.source.as_ref().and_then(|s| s.frequency_hz))
            .ok_or_else(|| missing("reflection.frequency_hz"))?;
        r.frequency_hz = Some(f);
        let n_angles = *r.n_angles.get_or_insert(181);
        let beta_max = *r.beta_max.get_or_insert(PI / 2.0);
        if n_angles < 2 || !(beta_max > 0.0 && beta_max <= PI / 2.0) {
            return Err(Error::Config("reflection needs n_angles ≥ 2 and beta_max in (0, π/2]".into()));
        }
        Ok(Scenario {
            solver: SolverKind::Reflection,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            // grid and beam are unused in reflection mode
            grid: GridSpec::new(4.0, 4.0, 1.0, 1.0)?,
            tdpe_grid: None,
            beam: GaussianBeamSpec::new(0.5, 1.0, f64::INFINITY, 0.0)?,
            k0: Some(wavenumber(f)),
            pulse: None,
            ground: GroundCondition::Impedance(soil),
            top: TopCondition::Transparent,
            terrain: TerrainProfile::flat(0.0),
            sweep: None,
            reflection: Some(ReflectionPlan {
                soil,
                k: wavenumber(f),
                n_angles,
                beta_max,
            }),
            warnings,
            config: self,
        })
    }
}

fn resolve_soil(soil: &mut SoilSection) -> Result<SoilModel> {
    let epsilon = soil.epsilon.ok_or_else(|| missing("soil.epsilon"))?;
    let model = match (soil.sigma, soil.sigma_gauss) {
        (Some(si), None) => SoilModel::from_siemens(epsilon, si)?,
        (None, Some(g)) => SoilModel::new(epsilon, crate::media::Conductivity::from_gaussian(g))?,
        (None, None) => SoilModel::from_siemens(epsilon, 0.0)?,
        (Some(_), Some(_)) => {
            return Err(Error::Config("give soil.sigma or soil.sigma_gauss, not both".into()));
        }
    };
    soil.sigma = Some(model.sigma_si());
    soil.sigma_gauss = None;
    Ok(model)
}

fn missing(key: &str) -> Error {
    Error::Config(format!("missing required key or section `{key}`"))
}

fn snap_step(extent: f64, target: f64) -> f64 {
    extent / (extent / target).ceil()
}

/// Delay window that holds the launched pulse across the beam plus one ground echo.
fn default_tdpe_window(pulse: &PulseSpec, beam: &GaussianBeamSpec, z_max: f64, x_max: f64) -> f64 {
    let (_, end) = pulse.support();
    let end = if end.is_finite() { end } else { 10.0 * pulse.length() };
    let spread = 3.0 * beam.w0;
    let launch = spread * spread / (2.0 * beam.rho0.abs()) + beam.beta.abs() * spread;
    let echo = 2.0 * beam.z0.min(z_max) * beam.z0.min(z_max) / x_max.max(1.0);
    end + launch + echo
}

/// Wavenumber band of a synthesis run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPlan {
    pub k_lo: f64,
    pub k_hi: f64,
    pub dk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPlan {
    pub soil: SoilModel,
    pub k: f64,
    pub n_angles: usize,
    pub beta_max: f64,
}

/// A validated configuration turned into solver inputs; `config` holds every resolved default.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub solver: SolverKind,
    pub seed: u64,
    pub grid: GridSpec,
    pub tdpe_grid: Option<TdpeGrid>,
    pub beam: GaussianBeamSpec,
    pub k0: Option<f64>,
    pub pulse: Option<PulseSpec>,
    pub ground: GroundCondition,
    pub top: TopCondition,
    pub terrain: TerrainProfile,
    pub sweep: Option<SweepPlan>,
    pub reflection: Option<ReflectionPlan>,
    pub warnings: Vec<String>,
    pub config: SimulationConfig,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_with_seed(path, None)
    }

    /// Loads and resolves, with `seed` overriding the file's value.
    pub fn load_with_seed(path: impl AsRef<Path>, seed: Option<u64>) -> Result<Self> {
        let path = path.as_ref();
        let mut config = SimulationConfig::load(path)?;
        if seed.is_some() {
            config.seed = seed;
        }
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve(base)
    }

    pub fn output_s_grid(&self) -> Vec<f64> {
        let out = &self.config.outputs;
        match (out.s_min, out.s_max, out.ds) {
            (Some(a), Some(b), Some(ds)) => {
                let n = ((b - a) / ds).round() as usize;
                (0..=n).map(|l| a + l as f64 * ds).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn memory(&self) -> bool {
        self.config.soil.memory.unwrap_or(true)
    }

    pub fn pulse_shape(&self) -> Option<PulseShape> {
        self.pulse.map(|p| p.shape)
    }
}
