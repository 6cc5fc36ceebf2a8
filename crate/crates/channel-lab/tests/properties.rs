//! Property tests for the structural invariants that hold for every channel.

use channel_lab::channel::{build_named_channel, random_channel, NamedChannel};
use channel_lab::hamiltonian::{purity_hamiltonian, purity_hamiltonian_dual};
use channel_lab::optimizer::{minimize_product_expectation, OptimizerConfig};
use channel_lab::purity::{output_purity, purity_bounds};
use channel_lab::tensor::{
    haar_random_state, haar_random_unitary, max_abs, pauli_matrices, tensor_product, PureState,
    SubspaceBasis,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// Four positive weights, normalized into a probability vector.
fn probability_vector() -> impl Strategy<Value = [f64; 4]> {
    [0.01..1.0f64, 0.01..1.0, 0.01..1.0, 0.01..1.0].prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        [raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pauli_hamiltonian_structure(p in probability_vector()) {
        let t = build_named_channel(&NamedChannel::Pauli { p }).unwrap();
        let omega = purity_hamiltonian(&t);
        // Ω = Σ αᵢ σᵢ⊗σᵢ with the closed-form coefficients, and Σαᵢ = 1
        let alphas = [
            p.iter().map(|x| x * x).sum::<f64>(),
            2.0 * (p[0] * p[1] + p[2] * p[3]),
            2.0 * (p[0] * p[2] + p[1] * p[3]),
            2.0 * (p[0] * p[3] + p[1] * p[2]),
        ];
        prop_assert!((alphas.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let sigmas = pauli_matrices();
        let mut expected = tensor_product(&sigmas[0], &sigmas[0]).scale(alphas[0]);
        for i in 1..4 {
            expected += tensor_product(&sigmas[i], &sigmas[i]).scale(alphas[i]);
        }
        prop_assert!(max_abs(&(omega.matrix() - expected)) <= 1e-12);
        prop_assert!(omega.operator_norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn random_channels_are_valid_and_self_dual_consistent(
        seed in 0u64..1_000_000,
        d in 2usize..=4,
        k in 1usize..=4,
    ) {
        let t = random_channel(d, k, seed);
        prop_assert!(t.validate(1e-10).passes);
        // duality pairing Tr[T(ρ)X] = Tr[ρT*(X)]
        let rho = haar_random_state(d, seed ^ 0x5bd1e995).density_matrix();
        let x = haar_random_state(d, seed ^ 0x9e3779b9).density_matrix();
        let lhs = (t.apply(&rho).unwrap() * &x).trace();
        let rhs = (&rho * t.apply_dual(&x).unwrap()).trace();
        prop_assert!((lhs - rhs).norm() <= 1e-10);
        // the two constructions of Ω agree
        let gap = max_abs(&(purity_hamiltonian(&t).matrix()
            - purity_hamiltonian_dual(&t).matrix()));
        prop_assert!(gap <= 1e-10);
    }

    #[test]
    fn representation_mixing_preserves_the_hamiltonian(
        seed in 0u64..1_000_000,
        p in probability_vector(),
    ) {
        let t = build_named_channel(&NamedChannel::Pauli { p }).unwrap();
        let u = haar_random_unitary(t.kraus().len(), seed);
        let mixed = t.mix_kraus(&u).unwrap();
        let gap = max_abs(&(purity_hamiltonian(&t).matrix()
            - purity_hamiltonian(&mixed).matrix()));
        prop_assert!(gap <= 1e-10);
    }

    #[test]
    fn purity_and_phase_invariance(seed in 0u64..1_000_000, d in 2usize..=4) {
        let t = random_channel(d, 3, seed);
        let psi = haar_random_state(d, seed ^ 0xdeadbeef);
        let p = output_purity(&t, &psi).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
        // a global phase cannot change the purity
        let rotated = PureState::normalized(
            psi.amplitudes() * Complex64::from_polar(1.0, 1.234),
        )
        .unwrap();
        let q = output_purity(&t, &rotated).unwrap();
        prop_assert!((p - q).abs() <= 1e-12);
    }

    #[test]
    fn optimizer_minimum_lower_bounds_every_state(seed in 0u64..100_000) {
        let d = 2 + (seed % 2) as usize;
        let t = random_channel(d, 2, seed);
        let omega = purity_hamiltonian(&t);
        let c = SubspaceBasis::full_space(d);
        let cfg = OptimizerConfig {
            restarts: 8,
            seed,
            ..OptimizerConfig::default()
        };
        let result = minimize_product_expectation(&omega, &c, &cfg).unwrap();
        let bounds = purity_bounds(&t, &c).unwrap();
        prop_assert!(result.value >= bounds.lower_subspace - 1e-9);
        prop_assert!(result.value <= bounds.upper + 1e-9);
        for i in 0..5 {
            let psi = haar_random_state(d, seed.wrapping_mul(31).wrapping_add(i));
            let p = output_purity(&t, &psi).unwrap();
            prop_assert!(result.value <= p + 1e-8);
        }
    }
}
