use bellbidir::numerics::{
    hermitian_eig, kron, matrix_sqrt_psd, partial_trace, partial_transpose, ComplexMatrix, C64,
};
use bellbidir::qsim::{measure_qubit, Gate, GateKind, StateVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state_strategy(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("non-zero", |pairs| {
        let amps: Vec<C64> = pairs.into_iter().map(|(re, im)| C64::new(re, im)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).ok()
    })
}

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    (0..GateKind::ALL.len(), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|(k, mut perm)| {
            let kind = GateKind::ALL[k];
            perm.truncate(kind.arity());
            Gate::new(kind, perm).unwrap()
        })
}

fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()
}

fn projector(bit: usize) -> ComplexMatrix {
    let mut d = [0.0; 2];
    d[bit] = 1.0;
    ComplexMatrix::diag_real(&d)
}

fn on_qubits(n: usize, ops: &[(usize, ComplexMatrix)]) -> ComplexMatrix {
    (0..n).fold(ComplexMatrix::identity(1), |acc, q| {
        let op = ops.iter().find(|(i, _)| *i == q).map(|(_, m)| m.clone()).unwrap_or_else(|| ComplexMatrix::identity(2));
        kron(&acc, &op)
    })
}

/// The gate as a dense matrix built from Kronecker products of 2×2 blocks.
fn dense_gate(n: usize, gate: &Gate) -> ComplexMatrix {
    let t = gate.targets();
    let x = bellbidir::numerics::pauli_x();
    let z = bellbidir::numerics::pauli_z();
    match gate.kind() {
        GateKind::H => on_qubits(n, &[(t[0], hadamard())]),
        GateKind::X => on_qubits(n, &[(t[0], x)]),
        GateKind::Z => on_qubits(n, &[(t[0], z)]),
        GateKind::Cnot | GateKind::Cz => {
            let u = if gate.kind() == GateKind::Cnot { x } else { z };
            &on_qubits(n, &[(t[0], projector(0))]) + &on_qubits(n, &[(t[0], projector(1)), (t[1], u)])
        }
        GateKind::Ccnot => {
            let fire = on_qubits(n, &[(t[0], projector(1)), (t[1], projector(1))]);
            let id = ComplexMatrix::identity(1 << n);
            let flip = on_qubits(n, &[(t[0], projector(1)), (t[1], projector(1)), (t[2], x)]);
            &(&id - &fire) + &flip
        }
    }
}

fn random_psd(pairs: &[(f64, f64)]) -> ComplexMatrix {
    let a = ComplexMatrix::from_vec(3, 3, pairs.iter().map(|&(r, i)| C64::new(r, i)).collect()).unwrap();
    a.matmul(&a.adjoint()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gates_preserve_norm_and_are_involutions(
        psi in state_strategy(4),
        gates in prop::collection::vec(gate_strategy(4), 1..30),
    ) {
        let mut s = psi.clone();
        for g in &gates {
            s.apply_gate(g).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        }
        for g in gates.iter().rev() {
            s.apply_gate(g).unwrap();
        }
        for (a, b) in s.amplitudes().iter().zip(psi.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bit_mask_gates_match_dense_matrices(psi in state_strategy(3), gate in gate_strategy(3)) {
        let mut s = psi.clone();
        s.apply_gate(&gate).unwrap();
        let dense = dense_gate(3, &gate).mul_vec(psi.amplitudes()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&dense) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn schmidt_spectra_agree(psi in state_strategy(5), cut in 1usize..5) {
        let rho = psi.density_matrix();
        let a: Vec<usize> = (0..cut).collect();
        let b: Vec<usize> = (cut..5).collect();
        let ea = hermitian_eig(&partial_trace(&rho, 5, &a).unwrap(), false).unwrap().eigenvalues;
        let eb = hermitian_eig(&partial_trace(&rho, 5, &b).unwrap(), false).unwrap().eigenvalues;
        for i in 0..ea.len().max(eb.len()) {
            let x = ea.get(i).copied().unwrap_or(0.0);
            let y = eb.get(i).copied().unwrap_or(0.0);
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_operations_keep_trace(psi in state_strategy(4), keep in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..4)) {
        let rho = psi.density_matrix();
        let reduced = partial_trace(&rho, 4, &keep).unwrap();
        prop_assert!((reduced.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(reduced.is_hermitian(1e-12));
        let pt = partial_transpose(&rho, 4, &keep).unwrap();
        prop_assert!((pt.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn psd_square_root(pairs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9)) {
        let a = random_psd(&pairs);
        let root = matrix_sqrt_psd(&a).unwrap();
        let back = root.matmul(&root).unwrap();
        prop_assert!(back.max_abs_diff(&a).unwrap() < 1e-9);
        let ea = hermitian_eig(&a, false).unwrap().eigenvalues;
        let er = hermitian_eig(&root, false).unwrap().eigenvalues;
        for (x, y) in ea.iter().zip(&er) {
            prop_assert!((x.max(0.0).sqrt() - y).abs() < 1e-7);
            prop_assert!(*y >= -1e-12);
        }
    }
}

#[test]
fn measurement_frequencies_follow_born_rule() {
    let theta: f64 = 1.3;
    let psi = bellbidir::qsim::bloch_state(theta, 0.4);
    let p_one = (theta / 2.0).sin().powi(2);
    let trials = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ones = 0usize;
    for _ in 0..trials {
        let m = measure_qubit(&psi, 0, &mut rng).unwrap();
        if m.outcome == 1 {
            ones += 1;
            assert!((m.collapsed.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        }
    }
    let freq = ones as f64 / trials as f64;
    let se = (p_one * (1.0 - p_one) / trials as f64).sqrt();
    assert!((freq - p_one).abs() < 3.0 * se, "frequency {freq} vs {p_one} (se {se})");
}
