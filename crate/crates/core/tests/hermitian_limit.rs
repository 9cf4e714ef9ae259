mod support;

use ptthermo::{InitialState, Scenario};
use support::jc_oracle::Oracle;

fn populations(kind: InitialState) -> [[f64; 2]; 2] {
    let q = 3f64.sqrt() / 4.0;
    match kind {
        InitialState::Ground => [[1.0, 0.0], [0.0, 0.0]],
        InitialState::Excited => [[0.0, 0.0], [0.0, 1.0]],
        InitialState::Intermediate => [[0.75, q], [q, 0.25]],
    }
}

fn compare(kind: InitialState, d_bath: usize, n_steps: usize) -> f64 {
    let scenario = Scenario {
        initial_state: kind,
        d_bath,
        n_steps,
        ..Scenario::default()
    };
    let system = scenario.build().unwrap();
    let traj = system.evolve().unwrap();
    let dt = scenario.t_max / (n_steps - 1) as f64;
    let oracle = Oracle::new(
        populations(kind),
        scenario.g,
        scenario.omega_c,
        d_bath,
        scenario.temperature,
    );
    let reference = oracle.system_states(dt, n_steps);
    let mut worst: f64 = 0.0;
    for (ours, theirs) in traj.rho_g.iter().zip(&reference) {
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((ours[(i, j)] - theirs[(i, j)]).norm());
            }
        }
    }
    worst
}

#[test]
fn excited_trajectory_matches_plain_jaynes_cummings() {
    let gap = compare(InitialState::Excited, 15, 400);
    assert!(gap < 1e-9, "max entry deviation {gap:.3e}");
}

#[test]
fn intermediate_and_ground_match_on_coarser_grid() {
    for kind in [InitialState::Intermediate, InitialState::Ground] {
        let gap = compare(kind, 10, 101);
        assert!(gap < 1e-9, "{kind:?}: max entry deviation {gap:.3e}");
    }
}

#[test]
fn propagator_is_unitary_in_the_hermitian_limit() {
    let system = Scenario::default().build().unwrap();
    for t in [0.5, 5.0, 20.0] {
        let u = system.composite.propagator.u(t).unwrap();
        let u_dd = system.composite.propagator.u_dagger_eta(t).unwrap();
        assert!(u_dd.max_abs_diff(&u.adjoint()) < 1e-12);
    }
}
