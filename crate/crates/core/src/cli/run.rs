use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::config::{GridFormat, Scenario, SolverKind};
use super::io::{encode_grid, probe_text, snapshot_stem, table_text, waveform_text};
use crate::error::{Error, Result};
use crate::hybrid::{run_hybrid, EikonalField, HybridProblem};
use crate::media::{reflection_coefficient, ReflectionModel};
use crate::pe::{solve_pe, ComplexField2D, GroundCondition, PeProblem};
use crate::signal::{analytic_samples, AnalyticSignal, PulseSpec};
use crate::synthesis::{run_sweep, sweep_wavenumbers};
use crate::tdpe::{solve_tdpe, ImpedanceKernel, TdpeOutputs, TdpeProblem};

pub const MANIFEST: &str = "manifest.txt";
pub const TIMING: &str = "timing.txt";
pub const RESOLVED: &str = "resolved.toml";

/// Files written into a staging directory and published together.
struct Emitter {
    staging: PathBuf,
    format: GridFormat,
    files: Vec<(String, Option<String>)>,
}

impl Emitter {
    fn new(staging: PathBuf, format: GridFormat) -> Result<Self> {
        std::fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        Ok(Self {
            staging,
            format,
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8], hashed: bool) -> Result<()> {
        let path = self.staging.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        let digest = hashed.then(|| format!("{:x}", Sha256::digest(bytes)));
        self.files.push((name.to_string(), digest));
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        self.put(name, text.as_bytes(), true)
    }

    fn grid(&mut self, stem: &str, field: &ComplexField2D) -> Result<()> {
        for (suffix, bytes) in encode_grid(field, self.format) {
            self.put(&format!("{stem}{suffix}"), &bytes, true)?;
        }
        Ok(())
    }

    fn manifest(&self) -> String {
        let mut out = String::new();
        for (name, digest) in &self.files {
            let _ = writeln!(out, "{}  {name}", digest.as_deref().unwrap_or("-"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out: PathBuf,
    /// every published file, manifest last
    pub files: Vec<String>,
    pub elapsed: Duration,
}

/// Runs the scenario and publishes its outputs to `out` in one rename.
///
/// An existing `out` is replaced only if it holds an earlier manifest.
pub fn run(scenario: &Scenario, out: &Path) -> Result<RunReport> {
    let started = Instant::now();
    if out.exists() && !out.join(MANIFEST).exists() {
        let occupied = std::fs::read_dir(out)
            .map_err(|e| Error::io(out, e))?
            .next()
            .is_some();
        if occupied {
            return Err(Error::Config(format!(
                "output directory {} exists and is not a previous run",
                out.display()
            )));
        }
    }
    let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let leaf = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let staging = parent.join(format!(".{leaf}.staging-{}", std::process::id()));
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }

    let result = emit(scenario, staging.clone(), started);
    let emitter = match result {
        Ok(e) => e,
        Err(err) => {
            let _ = std::fs::remove_dir_all(&staging);
            return Err(err);
        }
    };
    if let Err(err) = std::fs::write(staging.join(MANIFEST), emitter.manifest()) {
        let _ = std::fs::remove_dir_all(&staging);
        return Err(Error::io(staging.join(MANIFEST), err));
    }
    publish(&staging, out)?;
    let mut files: Vec<String> = emitter.files.into_iter().map(|(n, _)| n).collect();
    files.push(MANIFEST.into());
    Ok(RunReport {
        out: out.to_path_buf(),
        files,
        elapsed: started.elapsed(),
    })
}

fn publish(staging: &Path, out: &Path) -> Result<()> {
    if out.exists() {
        let retired = staging.with_extension("retired");
        std::fs::rename(out, &retired).map_err(|e| Error::io(out, e))?;
        std::fs::rename(staging, out).map_err(|e| Error::io(out, e))?;
        std::fs::remove_dir_all(&retired).map_err(|e| Error::io(&retired, e))?;
    } else {
        std::fs::rename(staging, out).map_err(|e| Error::io(out, e))?;
    }
    Ok(())
}

fn emit(scenario: &Scenario, staging: PathBuf, started: Instant) -> Result<Emitter> {
    let mut em = Emitter::new(staging, scenario.config.outputs.format)?;
    em.text(RESOLVED, &scenario.config.to_toml())?;
    let mut timing = Timing::default();
    match scenario.solver {
        SolverKind::Reflection => emit_reflection(scenario, &mut em)?,
        SolverKind::Pe => emit_pe(scenario, &mut em, &mut timing)?,
        SolverKind::Synth => emit_synth(scenario, &mut em, &mut timing)?,
        SolverKind::Tdpe => emit_tdpe(scenario, &mut em, &mut timing)?,
        SolverKind::Hybrid => emit_hybrid(scenario, &mut em, &mut timing)?,
    }
    timing.entries.push(("total_s".into(), started.elapsed().as_secs_f64().to_string()));
    em.put(TIMING, timing.render().as_bytes(), false)?;
    Ok(em)
}

#[derive(Default)]
struct Timing {
    entries: Vec<(String, String)>,
}

impl Timing {
    fn seconds(&mut self, key: &str, d: Duration) {
        self.entries.push((format!("{key}_s"), d.as_secs_f64().to_string()));
    }

    fn value(&mut self, key: &str, v: impl ToString) {
        self.entries.push((key.into(), v.to_string()));
    }

    fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn pulse_of(scenario: &Scenario) -> Result<PulseSpec> {
    scenario.pulse.ok_or_else(|| Error::Config("solver needs a [pulse] section".into()))
}

fn carrier_of(scenario: &Scenario) -> Result<f64> {
    scenario.k0.ok_or_else(|| Error::Config("solver needs a carrier frequency".into()))
}

/// Ranges that need full columns: stations first, then probe ranges.
fn column_ranges(scenario: &Scenario) -> Vec<f64> {
    let out = &scenario.config.outputs;
    out.stations.iter().copied().chain(out.probes.iter().map(|p| p[0])).collect()
}

fn x_stride(scenario: &Scenario) -> usize {
    scenario.config.outputs.x_stride.unwrap_or(1)
}

fn z_stride(scenario: &Scenario) -> usize {
    scenario.config.outputs.z_stride.unwrap_or(1)
}

fn write_field(scenario: &Scenario) -> bool {
    scenario.config.outputs.field.unwrap_or(true)
}

fn station_stem(index: usize, x: f64) -> String {
    format!("station_{index:03}_x{x:.0}")
}

fn emit_waveform(scenario: &Scenario, pulse: &PulseSpec, em: &mut Emitter) -> Result<()> {
    let signal = AnalyticSignal::new(*pulse);
    em.text("waveform.csv", &waveform_text(&signal.samples(&scenario.output_s_grid())))
}

fn emit_reflection(scenario: &Scenario, em: &mut Emitter) -> Result<()> {
    let plan = scenario.reflection.expect("reflection scenarios carry a plan");
    em.text("reflection.csv", &reflection_table(&plan.soil, plan.k, plan.n_angles, plan.beta_max)?)
}

/// `β, R_F, R_L, R_M` as magnitude and phase columns.
pub fn reflection_table(soil: &crate::media::SoilModel, k: f64, n_angles: usize, beta_max: f64) -> Result<String> {
    let eps_c = soil.complex_permittivity(k)?;
    let rows = (0..n_angles)
        .map(|j| {
            let beta = beta_max * j as f64 / (n_angles - 1) as f64;
            let mut row = vec![beta];
            for model in ReflectionModel::ALL {
                let r = reflection_coefficient(model, eps_c, beta)?;
                row.extend([r.norm(), r.arg()]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(table_text(
        &["beta_rad", "abs_RF", "arg_RF", "abs_RL", "arg_RL", "abs_RM", "arg_RM"],
        rows,
    ))
}

fn pe_problem(scenario: &Scenario, k: f64) -> Result<PeProblem> {
    PeProblem::with_beam(
        scenario.grid,
        k,
        &scenario.beam,
        scenario.ground,
        scenario.top,
        scenario.terrain.clone(),
    )
}

fn row_at(z: f64, dz: f64, len: usize) -> usize {
    ((z / dz).round() as usize).min(len - 1)
}

fn emit_pe(scenario: &Scenario, em: &mut Emitter, timing: &mut Timing) -> Result<()> {
    let k = carrier_of(scenario)?;
    let ranges = column_ranges(scenario);
    let clock = Instant::now();
    let sol = solve_pe(pe_problem(scenario, k)?, x_stride(scenario), z_stride(scenario), &ranges)?;
    timing.seconds("pe", clock.elapsed());
    timing.value("cells", scenario.grid.n_x * scenario.grid.rows());
    if write_field(scenario) {
        em.grid("field", &sol.field)?;
    }
    let dx = scenario.grid.dx;
    em.text(
        "energy.csv",
        &table_text(
            &["x_m", "energy"],
            sol.energy.iter().enumerate().map(|(n, e)| vec![n as f64 * dx, *e]),
        ),
    )?;
    let n_stations = scenario.config.outputs.stations.len();
    for (i, st) in sol.stations.iter().take(n_stations).enumerate() {
        let mut col = ComplexField2D::zeros(1, st.column.len(), st.x, 0.0, dx, scenario.grid.dz, k);
        col.column_mut(0).copy_from_slice(&st.column);
        col.set_ground_row(0, st.ground_row);
        em.grid(&station_stem(i, st.x), &col)?;
    }
    let rows = scenario.config.outputs.probes.iter().zip(&sol.stations[n_stations..]).map(|(p, st)| {
        let u = st.column[row_at(p[1], scenario.grid.dz, st.column.len())];
        vec![p[0], p[1], u.re, u.im, u.norm()]
    });
    em.text("probes.csv", &table_text(&["x_m", "z_m", "re", "im", "abs"], rows))
}

fn emit_synth(scenario: &Scenario, em: &mut Emitter, timing: &mut Timing) -> Result<()> {
    let pulse = pulse_of(scenario)?;
    let plan = scenario.sweep.expect("synthesis scenarios carry a sweep plan");
    let ks = sweep_wavenumbers(plan.k_lo, plan.k_hi, plan.dk)?;
    let ranges = column_ranges(scenario);
    let clock = Instant::now();
    let sweep = run_sweep(&ks, |k| pe_problem(scenario, k), x_stride(scenario), z_stride(scenario), &ranges)?;
    timing.seconds("sweep", clock.elapsed());
    timing.value("wavenumbers", ks.len());
    timing.value("cells", ks.len() * scenario.grid.n_x * scenario.grid.rows());
    emit_waveform(scenario, &pulse, em)?;

    let clock = Instant::now();
    let s_grid = scenario.output_s_grid();
    let n_stations = scenario.config.outputs.stations.len();
    for (i, &x) in ranges.iter().enumerate().take(n_stations) {
        em.grid(&station_stem(i, x), &sweep.station_block(&pulse, i, &s_grid)?)?;
    }
    for (j, p) in scenario.config.outputs.probes.iter().enumerate() {
        let block = sweep.station_block(&pulse, n_stations + j, &s_grid)?;
        let m = row_at(p[1], block.dz, block.nz);
        let values: Vec<Complex64> = (0..block.nx).map(|l| block.get(l, m)).collect();
        em.text(&format!("probe_{j:03}.csv"), &probe_text(p[0], p[1], &s_grid, &values))?;
    }
    for (i, &ct) in scenario.config.outputs.snapshots.iter().enumerate() {
        em.grid(&snapshot_stem(i, ct), &sweep.snapshot(&pulse, ct))?;
    }
    timing.seconds("synthesis", clock.elapsed());
    Ok(())
}

fn emit_tdpe(scenario: &Scenario, em: &mut Emitter, timing: &mut Timing) -> Result<()> {
    let pulse = pulse_of(scenario)?;
    let grid = scenario.tdpe_grid.expect("time-domain scenarios carry a delay grid");
    let problem = TdpeProblem {
        grid,
        beam: scenario.beam,
        pulse,
        ground: scenario.ground,
        top: scenario.top,
        terrain: scenario.terrain.clone(),
        memory: scenario.memory(),
    };
    let out = &scenario.config.outputs;
    let outputs = TdpeOutputs {
        probes: out.probes.iter().map(|p| (p[0], p[1])).collect(),
        stations: out.stations.clone(),
        station_z_stride: z_stride(scenario),
        snapshots: out.snapshots.clone(),
        snapshot_x_stride: x_stride(scenario),
        snapshot_z_stride: z_stride(scenario),
    };
    let clock = Instant::now();
    let sol = solve_tdpe(&problem, &outputs)?;
    timing.seconds("tdpe", clock.elapsed());
    let n_s = sol.n_s + 1;
    timing.value("cells", grid.space.n_x * grid.space.rows() * n_s);
    emit_waveform(scenario, &pulse, em)?;

    if let GroundCondition::Impedance(soil) = scenario.ground {
        let kernel = ImpedanceKernel::new(&soil, grid.ds, n_s)?;
        let rows = kernel.samples.iter().enumerate().map(|(l, v)| vec![l as f64 * grid.ds, *v]);
        em.text("kernel.csv", &table_text(&["s_m", "N"], rows))?;
    }
    for (i, (&x, block)) in out.stations.iter().zip(&sol.stations).enumerate() {
        em.grid(&station_stem(i, x), block)?;
    }
    for (j, probe) in sol.probes.iter().enumerate() {
        let values = analytic_samples(&probe.values);
        em.text(&format!("probe_{j:03}.csv"), &probe_text(probe.x, probe.z, &probe.s, &values))?;
    }
    for (i, (ct, snap)) in sol.snapshots.iter().enumerate() {
        em.grid(&snapshot_stem(i, *ct), snap)?;
    }
    let rows = sol.peak.iter().enumerate().map(|(n, p)| vec![n as f64 * grid.space.dx, *p]);
    em.text("peak.csv", &table_text(&["x_m", "max_abs"], rows))
}

/// Eikonal map as a grid, NaN where it is undefined.
fn eikonal_grid(map: &EikonalField, k: f64) -> ComplexField2D {
    let mut grid = ComplexField2D::zeros(map.nx, map.nz, map.x0, map.z0, map.dx, map.dz, k);
    for ix in 0..map.nx {
        for iz in 0..map.nz {
            grid.set(ix, iz, map.get(ix, iz).unwrap_or(Complex64::new(f64::NAN, f64::NAN)));
        }
    }
    grid
}

fn emit_hybrid(scenario: &Scenario, em: &mut Emitter, timing: &mut Timing) -> Result<()> {
    let pulse = pulse_of(scenario)?;
    let ranges = column_ranges(scenario);
    let s_grid = scenario.output_s_grid();
    let problem = HybridProblem {
        grid: scenario.grid,
        beam: scenario.beam,
        pulse,
        ground: scenario.ground,
        top: scenario.top,
        terrain: scenario.terrain.clone(),
        delta: scenario.config.hybrid.delta.unwrap_or(1e-3),
        smoothing: scenario.config.hybrid.smoothing.unwrap_or(0.0),
        stations: ranges.clone(),
        s_grid: s_grid.clone(),
        x_stride: x_stride(scenario),
        z_stride: z_stride(scenario),
    };
    let sol = run_hybrid(&problem)?;
    timing.seconds("pe", sol.timing.pe);
    timing.seconds("transient", sol.timing.transient);
    timing.value("delta", sol.delta);
    timing.value("cells", 4 * scenario.grid.n_x * scenario.grid.rows());
    timing.value("tdpe_cells_estimate", sol.tdpe_cells_estimate);
    emit_waveform(scenario, &pulse, em)?;
    if write_field(scenario) {
        em.grid("carrier", &sol.carrier)?;
        em.grid("reflected", &sol.reflected)?;
        em.grid("reflected_eikonal", &eikonal_grid(&sol.reflected_map, sol.carrier.k))?;
    }
    let n_stations = scenario.config.outputs.stations.len();
    for (i, st) in sol.stations.iter().take(n_stations).enumerate() {
        let stem = station_stem(i, st.x);
        em.grid(&stem, &st.transient)?;
        let mut envelope = st.transient.clone();
        for v in envelope.values_mut() {
            *v = Complex64::new(v.norm() / std::f64::consts::SQRT_2, 0.0);
        }
        em.grid(&format!("{stem}_envelope"), &envelope)?;
    }
    for (j, (p, st)) in scenario.config.outputs.probes.iter().zip(&sol.stations[n_stations..]).enumerate() {
        let block = &st.transient;
        let m = row_at(p[1], block.dz, block.nz);
        let values: Vec<Complex64> = (0..block.nx).map(|l| block.get(l, m)).collect();
        em.text(&format!("probe_{j:03}.csv"), &probe_text(p[0], p[1], &s_grid, &values))?;
    }
    Ok(())
}
