mod common;

use common::CMat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seca_core::gatecut::cz_cut_ensemble;
use seca_core::metrics::{haar_bin_probability, haar_fidelity_pdf, meyer_wallach};
use seca_core::problems::{dense_matrix, exact_ground, heisenberg, Boundary, HeisenbergSpec};
use seca_core::statevec::{sample_haar_state, PauliString};
use seca_core::{AnsatzSpec, ConnectionScheme, IntraEntangler, Pauli, PauliObservable, StateVector};

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn random_observable(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliObservable {
    let mut obs = PauliObservable::new(n);
    for _ in 0..terms {
        let letters = (0..n).map(|_| LETTERS[rng.random_range(0..4)]).collect();
        obs.push(PauliString::new(rng.random_range(-2.0..2.0), letters)).unwrap();
    }
    obs
}

fn random_angles(count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

#[test]
fn circuits_match_dense_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let specs = [
        AnsatzSpec::new(2, 3, ConnectionScheme::Feca),
        AnsatzSpec::new(4, 3, ConnectionScheme::Seca),
        AnsatzSpec::new(6, 2, ConnectionScheme::Feca),
        AnsatzSpec::new(6, 4, ConnectionScheme::NoCz),
        AnsatzSpec::new(4, 5, ConnectionScheme::single(4)).with_intra(IntraEntangler::None),
    ];
    for spec in specs {
        let circuit = spec.build().unwrap();
        for _ in 0..3 {
            let th = random_angles(spec.param_count(), &mut rng);
            let got = common::to_vec(&circuit.prepare(&th).unwrap());
            let want = common::run_circuit(&circuit, &th);
            assert!((got - want).norm() < 1e-12, "{spec:?}");
        }
    }
}

#[test]
fn expectation_and_variance_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=5 {
        for _ in 0..5 {
            let obs = random_observable(n, 6, &mut rng);
            let state: StateVector = sample_haar_state(n, &mut rng).unwrap();
            let h = common::observable(&obs);
            let v = common::to_vec(&state);
            let mean = common::expectation(&h, &v);
            let second = common::expectation(&(&h * &h), &v);
            assert!((state.expectation(&obs).unwrap() - mean).abs() < 1e-12);
            assert!((state.observable_variance(&obs).unwrap() - (second - mean * mean)).abs() < 1e-10);
            let applied = common::to_vec(&StateVector::from_amplitudes(state.apply_observable(&obs).unwrap()).unwrap());
            assert!((applied - &h * &v).norm() < 1e-12);
        }
    }
}

#[test]
fn purity_matches_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=5 {
        let state: StateVector = sample_haar_state(n, &mut rng).unwrap();
        let v = common::to_vec(&state);
        for q in 0..n {
            assert!((state.reduced_purity(q).unwrap() - common::purity(&v, n, q)).abs() < 1e-12);
        }
        if n < 2 {
            assert!(meyer_wallach(&state).is_err());
            continue;
        }
        let (got, want) = (meyer_wallach(&state).unwrap(), common::meyer_wallach(&v, n));
        assert!((got - want).abs() < 1e-12, "n={n}: {got} vs {want}");
    }
}

#[test]
fn heisenberg_matrix_and_ground_energies() {
    let ring = |n| -> PauliObservable {
        heisenberg(&HeisenbergSpec { n_sites: n, coupling: 1.0, boundary: Boundary::Periodic }).unwrap()
    };
    // Two sites: singlet at -3/4. Four-site ring: -2. Six-site ring from a separate dense diagonalisation.
    assert!((exact_ground::<f64>(&ring(2)).unwrap() + 0.75).abs() < 1e-10);
    assert!((exact_ground::<f64>(&ring(4)).unwrap() + 2.0).abs() < 1e-10);
    assert!((exact_ground::<f64>(&ring(6)).unwrap() + 2.802_775_637_731_993).abs() < 1e-9);

    let obs = ring(4);
    let dense = dense_matrix(&obs).unwrap();
    let want = common::observable(&obs);
    assert!((dense - want).norm() < 1e-12);
}

fn pauli_eigenstate(k: usize) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        0 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        1 => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        2 => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        _ => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
    }
}

#[test]
fn cut_channel_reproduces_cz_on_complete_input_set() {
    let ens = cz_cut_ensemble();
    let czm = common::cz(2, 0, 1);
    for a in 0..4 {
        for b in 0..4 {
            let (u, w) = (pauli_eigenstate(a), pauli_eigenstate(b));
            let amps: Vec<Complex64> = (0..4).map(|i| u[i & 1] * w[i >> 1]).collect();
            let state = StateVector::from_amplitudes(amps).unwrap();
            let v = &czm * common::to_vec(&state);
            for p in 0..16 {
                let letters = vec![LETTERS[p % 4], LETTERS[p / 4]];
                let obs = PauliObservable::from_terms(2, vec![PauliString::new(1.0, letters.clone())]).unwrap();
                let got = ens.channel_expectation(&state, 0, 1, &obs).unwrap();
                let want = common::expectation(&common::pauli_string(&letters), &v);
                assert!((got - want).abs() < 1e-12, "input ({a},{b}) pauli {p}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn cut_channel_acts_locally_inside_entangled_register() {
    let ens = cz_cut_ensemble();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let czm: CMat = common::cz(4, 1, 2);
    for _ in 0..5 {
        let state: StateVector = sample_haar_state(4, &mut rng).unwrap();
        let obs = random_observable(4, 8, &mut rng);
        let v = &czm * common::to_vec(&state);
        let got = ens.channel_expectation(&state, 1, 2, &obs).unwrap();
        assert!((got - common::expectation(&common::observable(&obs), &v)).abs() < 1e-12);
    }
}

#[test]
fn haar_density_integrates_to_bin_masses() {
    for dim in [2usize, 4, 8, 16, 64] {
        let steps = 20_000;
        let h = 1.0 / steps as f64;
        // Simpson's rule on [0, 1].
        let mut total = 0.0;
        for k in 0..=steps {
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            total += w * haar_fidelity_pdf(k as f64 * h, dim).unwrap();
        }
        assert!((total * h / 3.0 - 1.0).abs() < 1e-8, "dim {dim}");
        let masses: f64 =
            (0..50).map(|b| haar_bin_probability(b as f64 / 50.0, (b + 1) as f64 / 50.0, dim).unwrap()).sum();
        assert!((masses - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_precision_tracks_double() {
    let spec = AnsatzSpec::new(6, 3, ConnectionScheme::Seca);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let th = random_angles(spec.param_count(), &mut rng);
    let th32: Vec<f32> = th.iter().map(|&x| x as f32).collect();
    let obs = heisenberg(&HeisenbergSpec { n_sites: 6, coupling: 1.0, boundary: Boundary::Periodic }).unwrap();
    let obs32 = heisenberg(&HeisenbergSpec { n_sites: 6, coupling: 1.0f32, boundary: Boundary::Periodic }).unwrap();
    let e64 = spec.prepare(&th).unwrap().expectation(&obs).unwrap();
    let s32: seca_core::StateVector32 = spec.prepare(&th32).unwrap();
    let e32 = s32.expectation(&obs32).unwrap();
    assert!((f64::from(e32) - e64).abs() < 1e-4);
    assert!((f64::from(s32.norm_sqr()) - 1.0).abs() < 1e-5);
}
