//! Trigger-controlled bidirectional teleportation circuits.
//!
//! Each party runs an indirect Bell measurement on its input qubit `Q` and
//! its half `C` of the shared Bell pair. The measurement only fires when the
//! party's trigger qubit is |1⟩. The classical feed-forward of the measured
//! bits is replaced by quantum-controlled corrections (CNOT for X, CZ for Z)
//! acting on the opposite party's `C` qubit, so one deterministic run yields
//! the exact channel.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::{
    check_density_matrix, kron, partial_trace, pauli_x, pauli_z, trace_distance, ComplexMatrix,
    C64,
};
use crate::qsim::{bloch_state, measure_qubit, run_gates, Circuit, Gate, StateVector};

pub const Q_A: &str = "Q_A";
pub const C_A: &str = "C_A";
pub const C_B: &str = "C_B";
pub const Q_B: &str = "Q_B";
pub const M_A1: &str = "M_A1";
pub const M_A2: &str = "M_A2";
pub const M_B1: &str = "M_B1";
pub const M_B2: &str = "M_B2";
pub const T_A: &str = "T_A";
pub const T_B: &str = "T_B";
pub const T: &str = "T";
pub const R: &str = "R";

/// Tolerance for the Choi-state validity checks.
pub const CHOI_TOL: f64 = 1e-10;

/// Trigger angles and the mixing weight. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta: f64,
    pub t: f64,
}

impl SchemeParams {
    /// p₁ = p₂ = p = 1/2 with mixing weight `t`.
    pub fn symmetric(t: f64) -> Self {
        SchemeParams {
            theta1: FRAC_PI_2,
            theta2: FRAC_PI_2,
            theta: FRAC_PI_2,
            t,
        }
    }

    pub fn independent(theta1: f64, theta2: f64) -> Self {
        SchemeParams {
            theta1,
            theta2,
            ..Self::symmetric(1.0)
        }
    }

    pub fn common(theta: f64) -> Self {
        SchemeParams {
            theta,
            ..Self::symmetric(0.0)
        }
    }

    /// Alice's firing probability sin²(θ₁/2).
    pub fn p1(&self) -> f64 {
        firing_probability(self.theta1)
    }

    pub fn p2(&self) -> f64 {
        firing_probability(self.theta2)
    }

    pub fn p(&self) -> f64 {
        firing_probability(self.theta)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("theta1", self.theta1), ("theta2", self.theta2), ("theta", self.theta)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY,
                });
            }
        }
        check_unit_interval("t", self.t)?;
        Ok(())
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self::symmetric(0.0)
    }
}

pub fn firing_probability(theta: f64) -> f64 {
    (theta / 2.0).sin().powi(2)
}

/// Inverse of [`firing_probability`] on [0, π].
pub fn trigger_angle(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    Ok(2.0 * p.sqrt().asin())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    AtoB,
    BtoA,
}

impl Direction {
    /// Qubit holding the state to send.
    pub fn input_label(self) -> &'static str {
        match self {
            Direction::AtoB => Q_A,
            Direction::BtoA => Q_B,
        }
    }

    /// Qubit on which the teleported state arrives.
    pub fn output_label(self) -> &'static str {
        match self {
            Direction::AtoB => C_B,
            Direction::BtoA => C_A,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::AtoB => Direction::BtoA,
            Direction::BtoA => Direction::AtoB,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::AtoB => "ab",
            Direction::BtoA => "ba",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ab" | "atob" => Ok(Direction::AtoB),
            "ba" | "btoa" => Ok(Direction::BtoA),
            other => Err(format!("unknown direction `{other}` (expected ab or ba)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Independent,
    Common,
    Mixed,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Independent => "independent",
            SchemeKind::Common => "common",
            SchemeKind::Mixed => "mixed",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "independent" | "ind" => Ok(SchemeKind::Independent),
            "common" | "com" => Ok(SchemeKind::Common),
            "mixed" | "mix" => Ok(SchemeKind::Mixed),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// Which measurement copy drives which Pauli correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectionAssignment {
    /// M¹ (copy of C) controls X, M² (copy of Q) controls Z.
    #[default]
    Standard,
    /// M¹ controls Z, M² controls X. Wrong on purpose; used as a negative control.
    Swapped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliCorrection {
    X,
    Z,
}

/// A Pauli on `target` conditioned on the measured value of `control`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Correction {
    pub control: usize,
    pub target: usize,
    pub pauli: PauliCorrection,
}

impl Correction {
    fn as_gate(&self) -> Result<Gate> {
        match self.pauli {
            PauliCorrection::X => Gate::cnot(self.control, self.target),
            PauliCorrection::Z => Gate::cz(self.control, self.target),
        }
    }
}

/// A scheme circuit together with what is needed to prepare its input.
#[derive(Clone, Debug)]
pub struct ProtocolCircuit {
    kind: SchemeKind,
    circuit: Circuit,
    blocks_len: usize,
    corrections: Vec<Correction>,
    triggers: Vec<(usize, f64)>,
    resource: (usize, usize),
}

impl ProtocolCircuit {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// Indirect Bell blocks followed by the deferred corrections.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.corrections
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// Triggers in their Bloch states (φ = 0), the Bell pair on (C_A, C_B),
    /// `inputs` on the named qubits, |0⟩ everywhere else. `extra` qubits are
    /// appended in |0⟩ after the protocol register.
    fn initial_state(&self, inputs: &[(usize, StateVector)], extra: usize) -> Result<StateVector> {
        let n = self.num_qubits();
        let mut factors = vec![StateVector::zero(1); n + extra];
        for &(q, theta) in &self.triggers {
            factors[q] = bloch_state(theta, 0.0);
        }
        for (q, s) in inputs {
            if s.num_qubits() != 1 {
                return Err(Error::DimensionMismatch("inputs must be single-qubit states".into()));
            }
            factors[*q] = s.clone();
        }
        let mut state = StateVector::product(&factors);
        let (ca, cb) = self.resource;
        state.apply_gate(&Gate::h(ca))?;
        state.apply_gate(&Gate::cnot(ca, cb)?)?;
        Ok(state)
    }

    fn resolve_inputs(&self, inputs: &[(&str, StateVector)]) -> Result<Vec<(usize, StateVector)>> {
        inputs
            .iter()
            .map(|(l, s)| Ok((self.circuit.qubit(l)?, s.clone())))
            .collect()
    }

    /// Final pure state of the deferred-measurement circuit.
    pub fn run(&self, inputs: &[(&str, StateVector)]) -> Result<StateVector> {
        let inputs = self.resolve_inputs(inputs)?;
        let state = self.initial_state(&inputs, 0)?;
        run_gates(self.circuit.gates(), state, self.num_qubits())
    }
}

/// Change to the Bell basis, trigger-controlled copies, change back.
pub fn build_indirect_bell_block(q: usize, c: usize, trig: usize, m1: usize, m2: usize) -> Result<Vec<Gate>> {
    let all = [q, c, trig, m1, m2];
    for (k, i) in all.iter().enumerate() {
        if all[..k].contains(i) {
            return Err(Error::BadIndex {
                index: *i,
                num_qubits: all.len(),
            });
        }
    }
    Ok(vec![
        Gate::cnot(q, c)?,
        Gate::h(q),
        Gate::ccnot(trig, c, m1)?,
        Gate::ccnot(trig, q, m2)?,
        Gate::h(q),
        Gate::cnot(q, c)?,
    ])
}

fn corrections_for(
    circuit: &Circuit,
    assignment: CorrectionAssignment,
) -> Result<Vec<Correction>> {
    let (x_a, z_a, x_b, z_b) = match assignment {
        CorrectionAssignment::Standard => (M_A1, M_A2, M_B1, M_B2),
        CorrectionAssignment::Swapped => (M_A2, M_A1, M_B2, M_B1),
    };
    let cb = circuit.qubit(C_B)?;
    let ca = circuit.qubit(C_A)?;
    Ok(vec![
        Correction { control: circuit.qubit(x_a)?, target: cb, pauli: PauliCorrection::X },
        Correction { control: circuit.qubit(z_a)?, target: cb, pauli: PauliCorrection::Z },
        Correction { control: circuit.qubit(x_b)?, target: ca, pauli: PauliCorrection::X },
        Correction { control: circuit.qubit(z_b)?, target: ca, pauli: PauliCorrection::Z },
    ])
}

fn finish(
    kind: SchemeKind,
    mut circuit: Circuit,
    triggers: Vec<(usize, f64)>,
    assignment: CorrectionAssignment,
) -> Result<ProtocolCircuit> {
    let blocks_len = circuit.gates().len();
    let corrections = corrections_for(&circuit, assignment)?;
    for c in &corrections {
        circuit.push(c.as_gate()?)?;
    }
    let resource = (circuit.qubit(C_A)?, circuit.qubit(C_B)?);
    Ok(ProtocolCircuit {
        kind,
        circuit,
        blocks_len,
        corrections,
        triggers,
        resource,
    })
}

/// Two independent triggers. 10 qubits.
pub fn build_scheme_independent(params: &SchemeParams) -> Result<ProtocolCircuit> {
    build_scheme_independent_with(params, CorrectionAssignment::Standard)
}

pub fn build_scheme_independent_with(
    params: &SchemeParams,
    assignment: CorrectionAssignment,
) -> Result<ProtocolCircuit> {
    params.validate()?;
    let mut c = Circuit::new([Q_A, C_A, C_B, Q_B, M_A1, M_A2, M_B1, M_B2, T_A, T_B])?;
    let q = |c: &Circuit, l| c.qubit(l);
    let alice = build_indirect_bell_block(q(&c, Q_A)?, q(&c, C_A)?, q(&c, T_A)?, q(&c, M_A1)?, q(&c, M_A2)?)?;
    let bob = build_indirect_bell_block(q(&c, Q_B)?, q(&c, C_B)?, q(&c, T_B)?, q(&c, M_B1)?, q(&c, M_B2)?)?;
    c.extend(alice)?;
    c.extend(bob)?;
    let triggers = vec![(q(&c, T_A)?, params.theta1), (q(&c, T_B)?, params.theta2)];
    finish(SchemeKind::Independent, c, triggers, assignment)
}

/// One common trigger; Bob's block sees it inverted. 9 qubits.
pub fn build_scheme_common(params: &SchemeParams) -> Result<ProtocolCircuit> {
    build_scheme_common_with(params, CorrectionAssignment::Standard)
}

pub fn build_scheme_common_with(
    params: &SchemeParams,
    assignment: CorrectionAssignment,
) -> Result<ProtocolCircuit> {
    params.validate()?;
    let mut c = Circuit::new([Q_A, C_A, C_B, Q_B, M_A1, M_A2, M_B1, M_B2, T])?;
    let q = |c: &Circuit, l| c.qubit(l);
    let trig = q(&c, T)?;
    let alice = build_indirect_bell_block(q(&c, Q_A)?, q(&c, C_A)?, trig, q(&c, M_A1)?, q(&c, M_A2)?)?;
    let bob = build_indirect_bell_block(q(&c, Q_B)?, q(&c, C_B)?, trig, q(&c, M_B1)?, q(&c, M_B2)?)?;
    c.extend(alice)?;
    c.push(Gate::x(trig))?;
    c.extend(bob)?;
    finish(SchemeKind::Common, c, vec![(trig, params.theta)], assignment)
}

/// Choi–Jamiolkowski state of a qubit channel, R ⊗ Q_out.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiState {
    matrix: ComplexMatrix,
}

impl ChoiState {
    /// Checks Hermiticity, unit trace, positivity and a maximally mixed reference marginal.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::DimensionMismatch("Choi state must be 4x4".into()));
        }
        check_density_matrix(&matrix, CHOI_TOL)?;
        let rho_r = partial_trace(&matrix, 2, &[0])?;
        let dev = rho_r.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))?;
        if dev > CHOI_TOL {
            return Err(Error::DimensionMismatch(format!(
                "reference marginal deviates from I/2 by {dev:e}"
            )));
        }
        Ok(ChoiState { matrix })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        ChoiState { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn reduced_reference(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, 2, &[0]).expect("4x4 matrix")
    }

    pub fn reduced_output(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, 2, &[1]).expect("4x4 matrix")
    }

    /// Weight `q` of the Bell projector when the state is q|β⟩⟨β| + (1−q)I/4.
    pub fn werner_weight(&self) -> f64 {
        let overlap = bell_overlap(&self.matrix);
        (4.0 * overlap - 1.0) / 3.0
    }

    pub fn trace_distance(&self, other: &ChoiState) -> Result<f64> {
        trace_distance(&self.matrix, &other.matrix)
    }
}

/// ⟨β|ρ|β⟩
fn bell_overlap(rho: &ComplexMatrix) -> f64 {
    0.5 * (rho[(0, 0)] + rho[(0, 3)] + rho[(3, 0)] + rho[(3, 3)]).re
}

/// Sends half of a Bell pair through the circuit: a reference qubit R is
/// entangled with the input qubit and the final state is reduced to (R, output).
pub fn extract_choi(protocol: &ProtocolCircuit, input_label: &str, output_label: &str) -> Result<ChoiState> {
    let input = protocol.circuit.qubit(input_label)?;
    let output = protocol.circuit.qubit(output_label)?;
    let n = protocol.num_qubits();
    let r = n;
    let mut state = protocol.initial_state(&[], 1)?;
    state.apply_gate(&Gate::h(r))?;
    state.apply_gate(&Gate::cnot(r, input)?)?;
    for g in protocol.circuit.gates() {
        state.apply_gate(g)?;
    }
    ChoiState::new(state.reduced_density_matrix(&[r, output])?)
}

/// Choi state of `kind` in direction `dir`, obtained by simulation. The mixed
/// scheme is the convex combination of the two simulated schemes.
pub fn simulated_choi(kind: SchemeKind, params: &SchemeParams, dir: Direction) -> Result<ChoiState> {
    let (i, o) = (dir.input_label(), dir.output_label());
    match kind {
        SchemeKind::Independent => extract_choi(&build_scheme_independent(params)?, i, o),
        SchemeKind::Common => extract_choi(&build_scheme_common(params)?, i, o),
        SchemeKind::Mixed => {
            let ind = extract_choi(&build_scheme_independent(params)?, i, o)?;
            let com = extract_choi(&build_scheme_common(params)?, i, o)?;
            choi_mixed(params.t, &ind, &com)
        }
    }
}

/// t·ind + (1 − t)·com
pub fn choi_mixed(t: f64, choi_ind: &ChoiState, choi_com: &ChoiState) -> Result<ChoiState> {
    check_unit_interval("t", t)?;
    let m = choi_ind
        .matrix
        .scale_real(t)
        .try_add(&choi_com.matrix.scale_real(1.0 - t))?;
    Ok(ChoiState::new_unchecked(m))
}

/// E[ρ] = 2 · Tr_R[(ρᵀ ⊗ I) · choi]
pub fn apply_channel_from_choi(choi: &ChoiState, rho_in: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho_in.rows() != 2 || rho_in.cols() != 2 {
        return Err(Error::DimensionMismatch("channel input must be 2x2".into()));
    }
    let lifted = kron(&rho_in.transpose(), &ComplexMatrix::identity(2));
    let product = lifted.matmul(&choi.matrix)?;
    Ok(partial_trace(&product, 2, &[1])?.scale_real(2.0))
}

/// Monte-Carlo estimate of a channel output, entry by entry.
#[derive(Clone, Debug)]
pub struct SampledOutput {
    pub mean: ComplexMatrix,
    /// Standard error of each entry's mean, real and imaginary parts.
    pub std_err: Vec<(f64, f64)>,
    pub trajectories: usize,
}

impl SampledOutput {
    /// Largest |deviation| / σ over all entries; entries with zero spread must match within `floor`.
    pub fn max_sigma_deviation(&self, expected: &ComplexMatrix, floor: f64) -> Result<f64> {
        let diff = self.mean.try_sub(expected)?;
        let mut worst: f64 = 0.0;
        for (d, &(sr, si)) in diff.as_slice().iter().zip(&self.std_err) {
            for (dev, se) in [(d.re.abs(), sr), (d.im.abs(), si)] {
                let ratio = if se > 0.0 {
                    (dev - floor).max(0.0) / se
                } else if dev <= floor {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(ratio);
            }
        }
        Ok(worst)
    }
}

/// Runs the measurement-and-feed-forward version of the protocol: the M
/// qubits are measured, the Pauli corrections are applied classically, and
/// the reduced output state is averaged over `trajectories` seeded runs.
/// For a mixture, each trajectory first picks a scheme with the given weights.
pub fn sample_channel_output(
    mixture: &[(f64, &ProtocolCircuit)],
    inputs: &[(&str, StateVector)],
    output_label: &str,
    trajectories: usize,
    seed: u64,
) -> Result<SampledOutput> {
    if mixture.is_empty() || trajectories < 2 {
        return Err(Error::DimensionMismatch(
            "sampling needs at least one scheme and two trajectories".into(),
        ));
    }
    // state right before any measurement, one per scheme
    let prepared = mixture
        .iter()
        .map(|&(w, p)| {
            check_unit_interval("mixture weight", w)?;
            let inputs = p.resolve_inputs(inputs)?;
            let state = p.initial_state(&inputs, 0)?;
            let state = run_gates(&p.circuit.gates()[..p.blocks_len], state, p.num_qubits())?;
            Ok((w, p, state, p.circuit.qubit(output_label)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let total_weight: f64 = prepared.iter().map(|x| x.0).sum();

    let x = pauli_x();
    let z = pauli_z();
    let mut sum = [C64::new(0.0, 0.0); 4];
    let mut sum_sq = vec![(0.0, 0.0); 4];
    for k in 0..trajectories {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut u = rng.gen::<f64>() * total_weight;
        let chosen = prepared
            .iter()
            .find(|e| {
                u -= e.0;
                u < 0.0
            })
            .unwrap_or_else(|| prepared.last().unwrap());
        let (_, protocol, start, out) = chosen;
        let mut state = start.clone();
        for c in &protocol.corrections {
            let m = measure_qubit(&state, c.control, &mut rng)?;
            state = m.collapsed;
            if m.outcome == 1 {
                let pauli = match c.pauli {
                    PauliCorrection::X => &x,
                    PauliCorrection::Z => &z,
                };
                state.apply_single_qubit(c.target, pauli)?;
            }
        }
        let rho = state.reduced_density_matrix(&[*out])?;
        for (idx, v) in rho.as_slice().iter().enumerate() {
            sum[idx] += v;
            sum_sq[idx].0 += v.re * v.re;
            sum_sq[idx].1 += v.im * v.im;
        }
    }
    let n = trajectories as f64;
    let mean: Vec<C64> = sum.iter().map(|s| s / n).collect();
    let std_err = mean
        .iter()
        .zip(&sum_sq)
        .map(|(m, &(sr, si))| {
            let var_r = ((sr / n - m.re * m.re) * n / (n - 1.0)).max(0.0);
            let var_i = ((si / n - m.im * m.im) * n / (n - 1.0)).max(0.0);
            ((var_r / n).sqrt(), (var_i / n).sqrt())
        })
        .collect();
    Ok(SampledOutput {
        mean: ComplexMatrix::from_vec(2, 2, mean)?,
        std_err,
        trajectories,
    })
}

/// |β⟩⟨β| as a matrix.
pub fn bell_projector() -> ComplexMatrix {
    crate::qsim::bell_state().density_matrix()
}

/// ρ₀ ⊗ ρ₀ = I/4
pub fn maximally_mixed_pair() -> ComplexMatrix {
    ComplexMatrix::identity(4).scale_real(0.25)
}

pub(crate) fn werner(q: f64) -> ComplexMatrix {
    bell_projector()
        .scale_real(q)
        .try_add(&maximally_mixed_pair().scale_real(1.0 - q))
        .expect("4x4")
}
