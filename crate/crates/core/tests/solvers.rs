use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use raildyn_core::linalg::relative_linf;
use raildyn_core::loading::{load_vector, LoadCase, PulseKind, PulseLoad, TONNE_FORCE};
use raildyn_core::postprocess::{substructure_forces, PeakWindow};
use raildyn_core::response::{
    newmark_integrate, solve, Method, ModalSolver, NewmarkParams, ResponseHistory, SolveOptions,
    StateSolver, TimeGrid,
};
use raildyn_core::track::{assemble_track, AssembledSystem, DofKind, Structure, TrackProperties};
use raildyn_core::Error;

const P0: f64 = 10.0 * TONNE_FORCE;
const TD: f64 = 0.01;

fn track(n: usize, damped: bool) -> AssembledSystem {
    let props = TrackProperties::reference();
    let props = if damped { props } else { props.undamped() };
    assemble_track(&props, n).unwrap()
}

fn one_dof(omega: f64, mass: f64, damping: f64) -> Structure {
    Structure::new(
        DMatrix::from_element(1, 1, mass),
        DMatrix::from_element(1, 1, damping),
        DMatrix::from_element(1, 1, mass * omega * omega),
    )
}

fn history(
    system: &AssembledSystem,
    pulse: PulseLoad,
    method: Method,
    grid: &TimeGrid,
) -> ResponseHistory {
    let load = load_vector(system, pulse).unwrap();
    let options = SolveOptions {
        newmark: NewmarkParams::unchecked(),
        ..SolveOptions::default()
    };
    solve(&system.structure, &load, grid, method, &options).unwrap()
}

#[test]
fn newmark_one_dof_rectangular_half_period() {
    let omega = 2.0 * std::f64::consts::PI * 10.0;
    let period = 0.1;
    let s = one_dof(omega, 2.0, 0.0);
    let grid = TimeGrid::new(period / 2.0, 100, period / 2.0).unwrap();
    let load = LoadCase::point(1, 1, PulseLoad::rectangular(5.0, period / 2.0)).unwrap();
    let nm = newmark_integrate(&s, &load, &grid, &NewmarkParams::default()).unwrap();
    let exact = ModalSolver::new(&s).unwrap().respond(&load, &grid).unwrap();
    let err = relative_linf(&nm.displacements, &exact.displacements);
    assert!(err < 1e-4, "{err:e}");
}

#[test]
fn newmark_converges_at_second_order() {
    let omega = 2.0 * std::f64::consts::PI * 10.0;
    let s = one_dof(omega, 2.0, 0.0);
    let errors: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&steps| {
            let grid = TimeGrid::new(0.05, steps, 0.3).unwrap();
            let load = LoadCase::point(1, 1, PulseLoad::rectangular(5.0, 0.05)).unwrap();
            let nm = newmark_integrate(&s, &load, &grid, &NewmarkParams::default()).unwrap();
            let exact = ModalSolver::new(&s).unwrap().respond(&load, &grid).unwrap();
            relative_linf(&nm.displacements, &exact.displacements)
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.6..4.4).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn newmark_zero_load_is_zero() {
    let system = track(2, true);
    let grid = TimeGrid::new(TD, 20, 0.05).unwrap();
    let load = LoadCase {
        pattern: DVector::zeros(system.n_dof()),
        pulse: PulseLoad::half_sine(P0, TD),
        dof: None,
    };
    let h =
        newmark_integrate(&system.structure, &load, &grid, &NewmarkParams::unchecked()).unwrap();
    assert_eq!(h.displacements.amax(), 0.0);
}

#[test]
fn newmark_resolution_guard() {
    let system = track(1, true);
    let grid = TimeGrid::new(TD, 100, 0.02).unwrap();
    let load = LoadCase::point(system.n_dof(), 3, PulseLoad::rectangular(P0, TD)).unwrap();
    let err = newmark_integrate(&system.structure, &load, &grid, &NewmarkParams::default());
    assert!(matches!(err, Err(Error::UnresolvedTimeStep { .. })));
}

/// Discrete work, dissipation and stored energy with the load values the
/// integrator saw (the right limit after a rectangular pulse ends).
fn energy_residual(structure: &Structure, load: &LoadCase, h: &ResponseHistory) -> f64 {
    let v = h.velocities.as_ref().unwrap();
    let grid = &h.grid;
    let dt = grid.dt;
    let seen = |k: usize, right: bool| {
        if right && k == grid.pulse_steps && load.pulse.kind == PulseKind::Rectangular {
            0.0
        } else {
            grid.pulse_at(&load.pulse, k)
        }
    };
    let (mut work, mut dissipated, mut scale) = (0.0, 0.0f64, 0.0f64);
    for k in 0..h.n_samples() - 1 {
        let vbar: DVector<f64> = (v.column(k) + v.column(k + 1)) * 0.5;
        let f = &load.pattern * (0.5 * (seen(k, true) + seen(k + 1, false)));
        work += vbar.dot(&f) * dt;
        dissipated += vbar.dot(&(&structure.damping * &vbar)) * dt;
        scale = scale.max(work.abs());
    }
    let last = h.n_samples() - 1;
    let stored = structure.mechanical_energy(
        &h.displacements.column(last).clone_owned(),
        &v.column(last).clone_owned(),
    );
    (work - dissipated - stored).abs() / scale
}

#[test]
fn newmark_energy_balance() {
    for kind in [PulseKind::HalfSine, PulseKind::Rectangular] {
        let system = track(4, true);
        let pulse = PulseLoad::new(kind, P0, TD);
        let load = load_vector(&system, pulse).unwrap();
        let grid = TimeGrid::new(TD, 1000, 0.03).unwrap();
        let h = newmark_integrate(&system.structure, &load, &grid, &NewmarkParams::unchecked())
            .unwrap();
        let r = energy_residual(&system.structure, &load, &h);
        assert!(r < 1e-3, "{kind:?}: {r:e}");
    }
}

#[test]
fn undamped_energy_conserved_after_pulse() {
    for kind in [PulseKind::HalfSine, PulseKind::Rectangular] {
        let system = track(4, false);
        let grid = TimeGrid::new(TD, 200, 0.1).unwrap();
        let h = history(
            &system,
            PulseLoad::new(kind, P0, TD),
            Method::ModalUndamped,
            &grid,
        );
        let v = h.velocities.as_ref().unwrap();
        let energies: Vec<f64> = (grid.pulse_steps..h.n_samples())
            .map(|k| {
                system.structure.mechanical_energy(
                    &h.displacements.column(k).clone_owned(),
                    &v.column(k).clone_owned(),
                )
            })
            .collect();
        let max = energies.iter().cloned().fold(f64::MIN, f64::max);
        let min = energies.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min) / max < 1e-4, "{kind:?}: {}", (max - min) / max);
    }
}

#[test]
fn modal_and_state_agree_without_damping() {
    for n in [1, 2, 4] {
        let system = track(n, false);
        let grid = TimeGrid::new(TD, 100, 0.05).unwrap();
        for kind in [PulseKind::HalfSine, PulseKind::Rectangular] {
            let dof = if n == 1 {
                3
            } else {
                raildyn_core::load_dof_index(n).unwrap()
            };
            let load = LoadCase::point(system.n_dof(), dof, PulseLoad::new(kind, P0, TD)).unwrap();
            let a = ModalSolver::new(&system.structure)
                .unwrap()
                .respond(&load, &grid)
                .unwrap();
            let b = StateSolver::new(&system.structure)
                .unwrap()
                .respond(&load, &grid)
                .unwrap();
            let err = relative_linf(&b.displacements, &a.displacements);
            assert!(err < 1e-6, "N={n} {kind:?}: {err:e}");
        }
    }
}

#[test]
fn state_and_newmark_agree_for_half_sine() {
    for n in [2, 4] {
        let system = track(n, true);
        let grid = TimeGrid::new(TD, 1000, 0.03).unwrap();
        let pulse = PulseLoad::half_sine(P0, TD);
        let a = history(&system, pulse, Method::StateSpace, &grid);
        let b = history(&system, pulse, Method::Newmark, &grid);
        let err = relative_linf(&b.displacements, &a.displacements);
        assert!(err < 1e-3, "N={n}: {err:e}");
    }
}

#[test]
fn modal_rejects_damped_structure() {
    let system = track(2, true);
    let grid = TimeGrid::new(TD, 10, 0.02).unwrap();
    let load = load_vector(&system, PulseLoad::rectangular(P0, TD)).unwrap();
    let r = solve(
        &system.structure,
        &load,
        &grid,
        Method::ModalUndamped,
        &SolveOptions::default(),
    );
    assert!(matches!(r, Err(Error::IncompatibleMethod { .. })));
    let forced = SolveOptions {
        force_undamped: true,
        ..SolveOptions::default()
    };
    assert!(solve(
        &system.structure,
        &load,
        &grid,
        Method::ModalUndamped,
        &forced
    )
    .is_ok());
}

#[test]
fn responses_are_causal_and_linear() {
    let system = track(4, true);
    let grid = TimeGrid::new(TD, 200, 0.03).unwrap();
    for method in [Method::StateSpace, Method::Newmark] {
        for kind in [PulseKind::HalfSine, PulseKind::Rectangular] {
            let one = history(&system, PulseLoad::new(kind, P0, TD), method, &grid);
            let two = history(&system, PulseLoad::new(kind, 2.0 * P0, TD), method, &grid);
            assert_eq!(one.displacements.column(0).amax(), 0.0);
            let err = relative_linf(&two.displacements, &(&one.displacements * 2.0));
            let tol = if method == Method::Newmark {
                1e-12
            } else {
                1e-14
            };
            assert!(err < tol, "{method:?} {kind:?}: {err:e}");
        }
    }
}

#[test]
fn mirror_symmetry_about_loaded_sleeper() {
    let n = 6;
    let system = track(n, true);
    let grid = TimeGrid::new(TD, 100, 0.05).unwrap();
    let h = history(
        &system,
        PulseLoad::half_sine(P0, TD),
        Method::StateSpace,
        &grid,
    );
    let map = &system.dof_map;
    let scale = h.displacements.amax();
    for (d, kind) in map.kinds().iter().enumerate() {
        let (mirror, sign) = match *kind {
            DofKind::RailVertical { node } => (map.rail_vertical_dof(2 * n - node), 1.0),
            DofKind::RailRotation { node } => (map.rail_rotation_dof(2 * n - node), -1.0),
            DofKind::Sleeper { index } => (map.sleeper_dof(n - index), 1.0),
        };
        for k in 0..h.n_samples() {
            let diff = h.displacements[(d, k)] - sign * h.displacements[(mirror, k)];
            assert!(diff.abs() < 1e-10 * scale, "{kind} at sample {k}: {diff:e}");
        }
    }
}

#[test]
fn long_rectangular_pulse_settles_to_static() {
    let props = TrackProperties::reference();
    let system = assemble_track(&props, 4).unwrap();
    let t_d = 0.2;
    let grid = TimeGrid::new(t_d, 200, t_d).unwrap();
    let h = history(
        &system,
        PulseLoad::rectangular(P0, t_d),
        Method::StateSpace,
        &grid,
    );
    let load = load_vector(&system, PulseLoad::rectangular(P0, t_d)).unwrap();
    let f = &load.pattern * P0;
    let u_static = system.structure.stiffness.clone().lu().solve(&f).unwrap();
    let u_end = h.displacements.column(grid.pulse_steps).clone_owned();
    assert!((&u_end - &u_static).amax() < 1e-6 * u_static.amax());

    let loads = substructure_forces(&h, &props, &system.dof_map, PeakWindow::ForcedPhase).unwrap();
    assert_relative_eq!(
        loads.total_reaction(grid.pulse_steps),
        P0,
        max_relative = 1e-6
    );
}

#[test]
fn damped_free_phase_envelope_decreases() {
    let system = track(4, true);
    let grid = TimeGrid::new(TD, 100, 0.2).unwrap();
    let h = history(
        &system,
        PulseLoad::rectangular(P0, TD),
        Method::StateSpace,
        &grid,
    );
    let sleeper = system.dof_map.sleeper_dof(2);
    let f1 = ModalSolver::new(&system.structure)
        .unwrap()
        .basis()
        .frequencies_hz()[0];
    let per_period = ((1.0 / f1) / grid.dt).ceil() as usize;
    let row = h.displacement_of(sleeper);
    let peaks: Vec<f64> = row[grid.pulse_steps..]
        .chunks(per_period)
        .map(|c| c.iter().fold(0.0f64, |a, x| a.max(x.abs())))
        .collect();
    assert!(peaks.len() >= 5);
    for w in peaks.windows(2) {
        assert!(w[1] <= w[0], "{peaks:?}");
    }
}

#[test]
fn rectangular_moves_rail_more_than_half_sine() {
    let system = track(4, true);
    let grid = TimeGrid::new(TD, 200, 0.1).unwrap();
    let rail = system.dof_map.rail_vertical_dofs();
    let peak = |kind| {
        let h = history(
            &system,
            PulseLoad::new(kind, P0, TD),
            Method::StateSpace,
            &grid,
        );
        rail.iter()
            .map(|&d| {
                h.displacement_of(d)
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.abs()))
            })
            .fold(0.0f64, f64::max)
    };
    assert!(peak(PulseKind::Rectangular) > peak(PulseKind::HalfSine));
}
