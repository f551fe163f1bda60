use super::*;
use crate::pe::GridSpec;
use crate::signal::PulseShape;
use crate::synthesis::{run_sweep, sweep_wavenumbers};
use std::f64::consts::PI;

fn exact_grid(beam: &GaussianBeamSpec, k: f64, nx: usize, nz: usize, dx: f64, dz: f64) -> ComplexField2D {
    let mut field = ComplexField2D::zeros(nx, nz, 0.0, 0.0, dx, dz, k);
    let z: Vec<f64> = (0..nz).map(|iz| iz as f64 * dz).collect();
    for ix in 0..nx {
        field.column_mut(ix).copy_from_slice(&gaussian_exact(beam, k, ix as f64 * dx, &z));
    }
    field
}

#[test]
fn collimated_front_translates_rigidly() {
    let beam = GaussianBeamSpec::new(50.0, 10.0, f64::INFINITY, 0.05).unwrap();
    let front = QuadraticFront::real_front(&beam);
    for (x, z) in [(100.0, 55.0), (400.0, 70.0), (0.0, 41.0)] {
        let p = analytic_ray_solution(&front, x, z).unwrap();
        let launch = z - beam.beta * x;
        assert!((p.launch.re - launch).abs() < 1e-9 && p.launch.im.abs() < 1e-12);
        assert!((p.amplitude.re - beam.amplitude(launch)).abs() < 1e-12);
        let want = beam.delay(launch) + beam.beta * beam.beta * x / 2.0;
        assert!((p.eikonal.re - want).abs() < 1e-10);
    }
}

#[test]
fn spreading_front_amplitude_follows_point_source() {
    let rho = 200.0;
    let front = QuadraticFront {
        z0: 30.0,
        curvature: Complex64::new(1.0 / rho, 0.0),
        beta: 0.0,
        width: None,
    };
    for x in [50.0, 200.0, 1000.0] {
        let p = analytic_ray_solution(&front, x, 42.0).unwrap();
        let want = (rho / (x + rho)).sqrt();
        assert!((p.amplitude.re - want).abs() < 1e-12 && p.amplitude.im.abs() < 1e-12);
        let phi = (42.0f64 - 30.0).powi(2) / (2.0 * (x + rho));
        assert!((p.eikonal.re - phi).abs() < 1e-10);
    }
}

#[test]
fn complex_front_reproduces_gaussian_beam() {
    let beam = GaussianBeamSpec::new(60.0, 8.0, 300.0, -0.04).unwrap();
    let k = 4.0;
    let front = QuadraticFront::gaussian_beam(&beam, k);
    let x0 = beam.focal_offset(k);
    for (x, z) in [(10.0, 58.0), (250.0, 52.0), (900.0, 40.0), (900.0, 90.0)] {
        let p = analytic_ray_solution(&front, x, z).unwrap();
        let amplitude = (x0 / (x0 + x)).sqrt();
        let d = z - beam.z0 - beam.beta * x;
        let phi = d * d / ((x0 + x) * 2.0) + beam.beta * (z - beam.z0) - beam.beta * beam.beta * x / 2.0;
        assert!((p.amplitude - amplitude).norm() < 1e-10);
        assert!((p.eikonal - phi).norm() < 1e-10);
        let field = beam.field_at(k, x, z);
        assert!((p.field(k) - field).norm() < 1e-10 * (1.0 + field.norm()));
    }
}

#[test]
fn focusing_front_hits_caustic() {
    let front = QuadraticFront {
        z0: 0.0,
        curvature: Complex64::new(-1.0 / 100.0, 0.0),
        beta: 0.0,
        width: None,
    };
    assert!(matches!(analytic_ray_solution(&front, 100.0, 3.0), Err(Error::Caustic { .. })));
}

#[test]
fn plane_wave_eikonal_is_exact() {
    let phi_c = 17.25;
    let make = |k: f64| {
        let mut f = ComplexField2D::zeros(3, 4, 0.0, 0.0, 1.0, 1.0, k);
        f.values_mut()
            .iter_mut()
            .for_each(|v| *v = (Complex64::i() * k * phi_c).exp() * 2.5);
        f
    };
    let eik = extract_eikonal(&make(2.0), &make(2.004)).unwrap();
    for ix in 0..3 {
        for iz in 0..4 {
            assert!((eik.get(ix, iz).unwrap() - phi_c).norm() < 1e-9);
        }
    }
}

#[test]
fn real_front_beam_eikonal_matches_closed_form() {
    let beam = GaussianBeamSpec::new(80.0, f64::INFINITY, 150.0, 0.02).unwrap();
    let k0 = 3.0;
    let (k1, k2) = (k0 * (1.0 - 1e-3), k0 * (1.0 + 1e-3));
    let (nx, nz, dx, dz) = (11, 41, 50.0, 4.0);
    let eik = extract_eikonal(&exact_grid(&beam, k1, nx, nz, dx, dz), &exact_grid(&beam, k2, nx, nz, dx, dz)).unwrap();
    for ix in 0..nx {
        for iz in 0..nz {
            let (x, z) = (ix as f64 * dx, iz as f64 * dz);
            let d = z - beam.z0 - beam.beta * x;
            let want = d * d / (2.0 * (x + beam.rho0)) + beam.beta * (z - beam.z0) - beam.beta * beam.beta * x / 2.0;
            assert!((eik.get(ix, iz).unwrap() - want).norm() < 1e-4, "({x}, {z})");
        }
    }
}

#[test]
fn log_and_ratio_forms_agree_to_second_order() {
    let beam = GaussianBeamSpec::new(40.0, 10.0, 200.0, 0.05).unwrap();
    let k0 = 3.0;
    let gap = |delta: f64| {
        let u1 = exact_grid(&beam, k0 * (1.0 - delta), 5, 30, 100.0, 3.0);
        let u2 = exact_grid(&beam, k0 * (1.0 + delta), 5, 30, 100.0, 3.0);
        let eik = extract_eikonal(&u1, &u2).unwrap();
        let mut worst: f64 = 0.0;
        for ix in 0..5 {
            for iz in 0..30 {
                if let (Some(a), Some(b)) = (eik.get(ix, iz), eik.ratio(ix, iz)) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
        worst
    };
    let (coarse, fine) = (gap(4e-3), gap(2e-3));
    assert!(coarse > 0.0);
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn halving_split_barely_moves_eikonal() {
    let beam = GaussianBeamSpec::new(40.0, 10.0, 200.0, 0.05).unwrap();
    let k0 = 3.0;
    let eik = |delta: f64| {
        extract_eikonal(
            &exact_grid(&beam, k0 * (1.0 - delta), 5, 30, 100.0, 3.0),
            &exact_grid(&beam, k0 * (1.0 + delta), 5, 30, 100.0, 3.0),
        )
        .unwrap()
    };
    let (a, b) = (eik(1e-3), eik(5e-4));
    for ix in 0..5 {
        for iz in 0..30 {
            if let (Some(p), Some(q)) = (a.get(ix, iz), b.get(ix, iz)) {
                assert!((p - q).norm() <= 1e-3 * q.norm().max(1e-3));
            }
        }
    }
}

#[test]
fn weak_points_are_marked_invalid() {
    let beam = GaussianBeamSpec::new(40.0, 3.0, f64::INFINITY, 0.0).unwrap();
    let eik = extract_eikonal(&exact_grid(&beam, 2.0, 1, 60, 1.0, 1.0), &exact_grid(&beam, 2.002, 1, 60, 1.0, 1.0)).unwrap();
    assert!(eik.get(0, 40).is_some());
    assert!(eik.get(0, 0).is_none());
    assert!(eik.valid_count() < 60);
}

#[test]
fn incident_eikonal_satisfies_parabolic_eikonal_equation() {
    // the dispersion of the beam amplitude adds a range-only term of order 1/(k₀w₀)²
    let beam = GaussianBeamSpec::new(100.0, 12.0, 400.0, -0.03).unwrap();
    let k0 = 20.0;
    let (nx, nz, dx, dz) = (21, 101, 10.0, 1.0);
    let eik = extract_eikonal(
        &exact_grid(&beam, k0 * (1.0 - 1e-3), nx, nz, dx, dz),
        &exact_grid(&beam, k0 * (1.0 + 1e-3), nx, nz, dx, dz),
    )
    .unwrap();
    let mut scale: f64 = beam.beta * beam.beta / 2.0;
    for ix in 1..nx - 1 {
        for iz in 1..nz - 1 {
            if let (Some(a), Some(b)) = (eik.get(ix + 1, iz), eik.get(ix - 1, iz)) {
                scale = scale.max(((a - b) / (2.0 * dx)).norm());
            }
        }
    }
    for ix in 1..nx - 1 {
        // within two widths of the beam axis
        let axis = beam.z0 + beam.beta * eik.x(ix);
        for iz in 1..nz - 1 {
            if (eik.z(iz) - axis).abs() > 24.0 {
                continue;
            }
            let r = eik.eikonal_residual(ix, iz).unwrap();
            assert!(r < 1e-2 * scale, "residual {r} at ({}, {})", eik.x(ix), eik.z(iz));
        }
    }
}

#[test]
fn carrier_amplitude_matches_ray_amplitude() {
    let beam = GaussianBeamSpec::new(100.0, 60.0, 300.0, 0.02).unwrap();
    let k0 = 4.0;
    let (nx, nz, dx, dz) = (5, 201, 150.0, 1.0);
    let u0 = exact_grid(&beam, k0, nx, nz, dx, dz);
    let eik = extract_eikonal(
        &exact_grid(&beam, k0 * (1.0 - 1e-3), nx, nz, dx, dz),
        &exact_grid(&beam, k0 * (1.0 + 1e-3), nx, nz, dx, dz),
    )
    .unwrap();
    let front = QuadraticFront::real_front(&beam);
    for ix in 0..nx {
        let x = eik.x(ix);
        for z in [90.0, 100.0, 120.0] {
            let iz = z as usize;
            let ray = analytic_ray_solution(&front, x, z).unwrap();
            let a = u0.get(ix, iz) * (-Complex64::i() * k0 * eik.get(ix, iz).unwrap()).exp();
            assert!((a.norm() - ray.amplitude.norm()).abs() < 1e-3 * ray.amplitude.norm(), "x = {x}, z = {z}");
        }
    }
}

#[test]
fn split_is_exact_and_free_space_remainder_is_small() {
    let grid = GridSpec::new(400.0, 200.0, 1.0, 0.25).unwrap();
    let beam = GaussianBeamSpec::new(100.0, 10.0, f64::INFINITY, 0.02).unwrap();
    let k = 2.0;
    let problem = PeProblem::with_beam(grid, k, &beam, GroundCondition::Dirichlet, TopCondition::Transparent, TerrainProfile::flat(0.0)).unwrap();
    let sol = solve_pe(problem, 40, 4, &[]).unwrap();
    let (ui, ur) = split_field(&sol.field, &beam, k);
    let peak = sol.field.max_norm();
    for (i, (a, b)) in ui.values().iter().zip(ur.values()).enumerate() {
        let u = sol.field.values()[i];
        assert!((a + b - u).norm() <= 4.0 * f64::EPSILON * (a.norm() + u.norm()));
    }
    assert!(ur.max_norm() <= 1e-3 * peak, "remainder {}", ur.max_norm() / peak);
}

#[test]
fn conducting_ground_remainder_is_image_beam() {
    let grid = GridSpec::new(600.0, 160.0, 1.0, 0.125).unwrap();
    let beam = GaussianBeamSpec::new(30.0, 6.0, f64::INFINITY, -0.04).unwrap();
    let image = GaussianBeamSpec::new(-30.0, 6.0, f64::INFINITY, 0.04).unwrap();
    let k = 2.0;
    let problem = PeProblem::with_beam(grid, k, &beam, GroundCondition::Conducting, TopCondition::Transparent, TerrainProfile::flat(0.0)).unwrap();
    let sol = solve_pe(problem, 100, 1, &[]).unwrap();
    let (_, ur) = split_field(&sol.field, &beam, k);
    let want = exact_grid(&image, k, ur.nx, ur.nz, ur.dx, ur.dz);
    let ix = ur.nx - 1;
    let peak = want.column(ix).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let worst = ur
        .column(ix)
        .iter()
        .zip(want.column(ix))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst <= 0.02 * peak, "image mismatch {}", worst / peak);
}

#[test]
fn carrier_signal_reduces_to_monochromatic_envelope() {
    let beam = GaussianBeamSpec::new(40.0, 8.0, 200.0, -0.02).unwrap();
    let k0 = 3.0;
    let (nx, nz) = (2, 80);
    let u1 = exact_grid(&beam, k0 * (1.0 - 1e-3), nx, nz, 200.0, 1.0);
    let u2 = exact_grid(&beam, k0 * (1.0 + 1e-3), nx, nz, 200.0, 1.0);
    let eik = extract_eikonal(&u1, &u2).unwrap();
    let u0 = exact_grid(&beam, k0, nx, nz, 200.0, 1.0);
    let zero = ComplexField2D::zeros(nx, nz, 0.0, 0.0, 200.0, 1.0, k0);
    let signal = AnalyticSignal::new(PulseSpec::carrier(k0).unwrap());
    let terms = [
        WaveTerm { field: &u0, eikonal: &eik },
        WaveTerm { field: &zero, eikonal: &eik },
    ];
    let s_grid: Vec<f64> = (0..7).map(|l| l as f64 * 0.7).collect();
    let block = transient_field(&terms, &signal, k0, 1, &s_grid).unwrap();
    let env = normalized_envelope(&block);
    for (l, &s) in s_grid.iter().enumerate() {
        for iz in 0..nz {
            let u = u0.get(1, iz);
            if eik.get(1, iz).is_none() {
                continue;
            }
            let want = u * (-Complex64::i() * k0 * s).exp();
            assert!((block.get(l, iz) - want).norm() < 1e-10 * (1.0 + u.norm()));
            assert!((env[l * nz + iz] - u.norm() / 2f64.sqrt()).abs() < 1e-10);
        }
    }
}

#[test]
fn single_term_matches_fourier_synthesis_for_narrowband_pulse() {
    let pulse = PulseSpec::new(
        PulseShape::GaussianEnvelope {
            width: 15.0,
            center: 60.0,
        },
        2.0,
    )
    .unwrap();
    let beam = GaussianBeamSpec::new(60.0, 10.0, f64::INFINITY, 0.02).unwrap();
    let grid = GridSpec::new(200.0, 160.0, 2.0, 0.25).unwrap();
    let x = 200.0;
    let (lo, hi) = (pulse.k0 - 4.0 / 15.0 * 3.0, pulse.k0 + 4.0 / 15.0 * 3.0);
    let ks = sweep_wavenumbers(lo, hi, 0.02).unwrap();
    let sweep = run_sweep(
        &ks,
        |k| PeProblem::with_beam(grid, k, &beam, GroundCondition::Dirichlet, TopCondition::Transparent, TerrainProfile::flat(0.0)),
        100,
        8,
        &[x],
    )
    .unwrap();
    let s_grid: Vec<f64> = (0..60).map(|l| 30.0 + l as f64).collect();
    let reference = sweep.station_block(&pulse, 0, &s_grid).unwrap();

    let k0 = pulse.k0;
    let column = |k: f64| {
        let mut f = ComplexField2D::zeros(1, grid.rows(), x, 0.0, grid.dx, grid.dz, k);
        f.column_mut(0).copy_from_slice(&gaussian_exact(&beam, k, x, &grid.z_values()));
        f
    };
    let eik = extract_eikonal(&column(k0 * (1.0 - 1e-3)), &column(k0 * (1.0 + 1e-3))).unwrap();
    let u0 = column(k0);
    let signal = AnalyticSignal::new(pulse);
    let block = transient_field(&[WaveTerm { field: &u0, eikonal: &eik }], &signal, k0, 0, &s_grid).unwrap();

    let peak = reference.max_norm();
    let mut worst: f64 = 0.0;
    for l in 0..s_grid.len() {
        for iz in 0..grid.rows() {
            worst = worst.max((block.get(l, iz).norm() - reference.get(l, iz).norm()).abs());
        }
    }
    assert!(worst < 0.03 * peak, "envelope mismatch {}", worst / peak);
}

#[test]
fn hybrid_run_splits_direct_and_ground_pulses() {
    let pulse = PulseSpec::damped_with_length(6.0, 2.0 * PI / 1.5).unwrap();
    let beam = GaussianBeamSpec::new(20.0, 8.0, 100.0, 0.0).unwrap();
    let problem = HybridProblem {
        grid: GridSpec::new(1000.0, 250.0, 1.0, 0.25).unwrap(),
        beam,
        pulse,
        ground: GroundCondition::Impedance(crate::media::SoilModel::from_siemens(10.0, 0.01).unwrap()),
        top: TopCondition::Transparent,
        terrain: TerrainProfile::flat(0.0),
        delta: 1e-3,
        smoothing: 0.0,
        stations: vec![1000.0],
        s_grid: (0..200).map(|l| -10.0 + 0.25 * l as f64).collect(),
        x_stride: 50,
        z_stride: 4,
    };
    let sol = run_hybrid(&problem).unwrap();
    let station = &sol.stations[0];
    assert!(station.transient.is_finite());
    assert!(station.incident.max_phase_step < 0.5 && station.reflected.max_phase_step < 0.5);
    // high above the ground the reflected pulse trails the direct one by about 2·z·z₀/(x+ρ₀)
    let iz = (120.0 / 0.25) as usize;
    let env: Vec<f64> = (0..problem.s_grid.len()).map(|l| station.transient.get(l, iz / 4).norm()).collect();
    let direct = station.incident.get(0, iz).unwrap().re;
    let echo = station.reflected.get(0, iz).unwrap().re;
    assert!((echo - direct - 2.0 * 120.0 * 20.0 / 1100.0).abs() < 0.3, "delays {direct} {echo}");
    assert!(env.iter().all(|v| v.is_finite()));
}
