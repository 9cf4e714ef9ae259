use proptest::prelude::*;

use ptthermo::{
    build_pt_hamiltonian, build_rho_g, energy_eigensystem, ergotropy_closed_form,
    ergotropy_numeric, kron, lambda_eigenvalues, partial_trace_bath, partial_trace_system,
    relative_entropy, rho_g_closed_form, BathSpec, CMatrix, CoefficientMatrix, Frame, InitialState,
    Scenario, C64,
};

fn coefficients() -> impl Strategy<Value = CoefficientMatrix> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(p, u, theta)| {
        let modulus = u * (p * (1.0 - p)).sqrt();
        let c12 = C64::from_polar(modulus, theta);
        CoefficientMatrix::new(C64::new(p, 0.0), c12, c12.conj(), C64::new(1.0 - p, 0.0)).unwrap()
    })
}

fn hermitian_state(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |entries| {
        let a = CMatrix::from_fn(n, n, |i, j| {
            let (re, im) = entries[i * n + j];
            C64::new(re, im)
        });
        // A A† + small ridge, normalized
        let m = &(&a * &a.adjoint()) + &CMatrix::identity(n).scale_re(1e-3);
        let tr = m.trace().re;
        m.scale_re(1.0 / tr)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_state_matches_projector_sum(coeffs in coefficients(), ratio in 0.0..0.95f64) {
        let h = build_pt_hamiltonian(ptthermo::PTParams::anticommutator_class(ratio, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        let g = build_rho_g(coeffs, &e).unwrap();
        prop_assert!(g.matrix.max_abs_diff(&rho_g_closed_form(&coeffs, &h.params)) < 1e-12);
        prop_assert!((g.matrix.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn ergotropy_nonnegative_and_consistent(coeffs in coefficients(), ratio in 0.0..0.95f64) {
        let h = build_pt_hamiltonian(ptthermo::PTParams::anticommutator_class(ratio, 1.0).unwrap()).unwrap();
        let e = energy_eigensystem(&h).unwrap();
        let g = build_rho_g(coeffs, &e).unwrap();
        let numeric = ergotropy_numeric(&g, &h).unwrap();
        let closed = ergotropy_closed_form(&coeffs, &h.params).unwrap();
        prop_assert!(numeric.work >= -1e-10);
        prop_assert!((numeric.work - closed).abs() < 1e-10);
        let (plus, minus) = lambda_eigenvalues(&g).unwrap();
        prop_assert!(plus >= minus);
        prop_assert!(minus >= -1e-12 && plus <= 1.0 + 1e-12);
    }

    #[test]
    fn klein_inequality(rho in hermitian_state(3), sigma in hermitian_state(3)) {
        let value = relative_entropy(&rho, &sigma, &Frame::identity(3)).unwrap();
        prop_assert!(value >= -1e-10);
        prop_assert!(relative_entropy(&rho, &rho, &Frame::identity(3)).unwrap().abs() < 1e-10);
    }

    #[test]
    fn partial_traces_invert_products(a in hermitian_state(2), b in hermitian_state(4)) {
        let product = kron(&a, &b);
        prop_assert!(partial_trace_bath(&product, 2, 4).unwrap().max_abs_diff(&a) < 1e-14);
        prop_assert!(partial_trace_system(&product, 2, 4).unwrap().max_abs_diff(&b) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generalized_trace_preserved(ratio in 0.0..0.95f64, kind in 0usize..3, g in 0.0..1.0f64) {
        let initial_state = [InitialState::Ground, InitialState::Excited, InitialState::Intermediate][kind];
        let scenario = Scenario {
            r: ratio,
            g,
            d_bath: 8,
            t_max: 50.0,
            n_steps: 26,
            initial_state,
            ..Scenario::default()
        };
        let system = scenario.build().unwrap();
        let traj = system.evolve().unwrap();
        for k in 0..traj.len() {
            prop_assert!((traj.rho_gb[k].trace() - C64::new(1.0, 0.0)).norm() < 1e-9);
            let spectrum = ptthermo::thermo::frame_spectrum(&traj.rho_g[k], &system.composite.system_frame).unwrap();
            prop_assert!(spectrum[0] >= -1e-8 && spectrum[1] <= 1.0 + 1e-8);
        }
    }
}

#[test]
fn excited_ergotropy_decreases_with_non_hermiticity() {
    let mut last = f64::INFINITY;
    for k in 0..20 {
        let r = 0.05 * k as f64;
        let coeffs = CoefficientMatrix::diagonal(0.0, 1.0).unwrap();
        let w = ergotropy_closed_form(
            &coeffs,
            &ptthermo::PTParams::anticommutator_class(r, 1.0).unwrap(),
        )
        .unwrap();
        assert!(w < last);
        last = w;
    }
}

#[test]
fn bath_tail_mass_reported() {
    let bath = BathSpec::new(2.0, 15, 10.0).unwrap();
    assert!((bath.tail_mass - (-3f64).exp()).abs() < 1e-15);
}
