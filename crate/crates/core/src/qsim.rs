//! Pure-state circuit simulation over a labeled qubit register.
//!
//! Qubit 0 is the most significant bit of an amplitude index. Gates are
//! applied in place by iterating over bit masks; the full register unitary
//! is never built.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{check_qubit_list, scatter_bits, ComplexMatrix, C64, ONE, ZERO};

/// Gates wider than this are not supported.
pub const MAX_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// |0…0⟩
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS, "register too large");
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    /// Wraps amplitudes; the length must be a power of two and the norm 1 within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(Error::DimensionMismatch(format!(
                "{len} amplitudes is not a qubit register"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::DimensionMismatch(format!("state norm {norm} is not 1")));
        }
        Ok(StateVector {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Tensor product of the factors, first factor on qubit 0.
    pub fn product(factors: &[StateVector]) -> Self {
        let num_qubits: usize = factors.iter().map(|f| f.num_qubits).sum();
        assert!(num_qubits <= MAX_QUBITS, "register too large");
        let mut amplitudes = vec![ONE];
        for f in factors {
            amplitudes = amplitudes
                .iter()
                .flat_map(|a| f.amplitudes.iter().map(move |b| a * b))
                .collect();
        }
        StateVector {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    /// Reduced density matrix on `keep` (in the listed order), computed
    /// straight from the amplitudes.
    pub fn reduced_density_matrix(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let n = self.num_qubits;
        check_qubit_list(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let kept_offsets: Vec<usize> = (0..dk).map(|i| scatter_bits(i, keep, n)).collect();
        let mut out = ComplexMatrix::zeros(dk, dk);
        let mut column = vec![ZERO; dk];
        for e in 0..(1usize << traced.len()) {
            let env = scatter_bits(e, &traced, n);
            for (slot, off) in column.iter_mut().zip(&kept_offsets) {
                *slot = self.amplitudes[env | off];
            }
            for i in 0..dk {
                if column[i] == ZERO {
                    continue;
                }
                for j in 0..dk {
                    out[(i, j)] += column[i] * column[j].conj();
                }
            }
        }
        Ok(out)
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        if let Some(&bad) = gate.targets.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::BadIndex {
                index: bad,
                num_qubits: self.num_qubits,
            });
        }
        let n = self.num_qubits;
        let bit = |q: usize| 1usize << (n - 1 - q);
        let amps = &mut self.amplitudes;
        match gate.kind {
            GateKind::H => {
                let t = bit(gate.targets[0]);
                for i in (0..amps.len()).filter(|i| i & t == 0) {
                    let a = amps[i];
                    let b = amps[i | t];
                    amps[i] = (a + b) * FRAC_1_SQRT_2;
                    amps[i | t] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            GateKind::X | GateKind::Cnot | GateKind::Ccnot => {
                let (controls, target) = gate.targets.split_at(gate.targets.len() - 1);
                let cmask = controls.iter().fold(0, |m, &q| m | bit(q));
                let t = bit(target[0]);
                for i in (0..amps.len()).filter(|i| i & t == 0 && i & cmask == cmask) {
                    amps.swap(i, i | t);
                }
            }
            GateKind::Z | GateKind::Cz => {
                let mask = gate.targets.iter().fold(0, |m, &q| m | bit(q));
                for i in (0..amps.len()).filter(|i| i & mask == mask) {
                    amps[i] = -amps[i];
                }
            }
        }
        Ok(())
    }

    /// Applies a 2×2 unitary to one qubit. Used for classically-conditioned
    /// corrections in sampling mode and for test cross-checks.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &ComplexMatrix) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::BadIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::DimensionMismatch("expected a 2x2 unitary".into()));
        }
        let t = self.bit(qubit);
        for i in (0..self.amplitudes.len()).filter(|i| i & t == 0) {
            let a = self.amplitudes[i];
            let b = self.amplitudes[i | t];
            self.amplitudes[i] = u[(0, 0)] * a + u[(0, 1)] * b;
            self.amplitudes[i | t] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
        Ok(())
    }

    /// Born probability of reading 1 on `qubit`.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::BadIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let t = self.bit(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & t != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.4}{:+.4}i)|{:0w$b}⟩", a.re, a.im, i, w = self.num_qubits)?;
        }
        Ok(())
    }
}

/// Bell state (|00⟩ + |11⟩)/√2.
pub fn bell_state() -> StateVector {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    StateVector {
        num_qubits: 2,
        amplitudes: vec![s, ZERO, ZERO, s],
    }
}

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩
pub fn bloch_state(theta: f64, phi: f64) -> StateVector {
    let (s, c) = (theta / 2.0).sin_cos();
    StateVector {
        num_qubits: 1,
        amplitudes: vec![C64::new(c, 0.0), C64::from_polar(s, phi)],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Z,
    Cz,
    Cnot,
    Ccnot,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z => 1,
            GateKind::Cz | GateKind::Cnot => 2,
            GateKind::Ccnot => 3,
        }
    }

    pub const ALL: [GateKind; 6] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::Cz,
        GateKind::Cnot,
        GateKind::Ccnot,
    ];
}

/// A gate on specific qubits; controls come before the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind:?} takes {} qubits, got {}",
                kind.arity(),
                targets.len()
            )));
        }
        for (k, q) in targets.iter().enumerate() {
            if targets[..k].contains(q) {
                return Err(Error::InvalidGate(format!("{kind:?} repeats qubit {q}")));
            }
        }
        Ok(Gate { kind, targets })
    }

    pub fn h(q: usize) -> Self {
        Gate { kind: GateKind::H, targets: vec![q] }
    }

    pub fn x(q: usize) -> Self {
        Gate { kind: GateKind::X, targets: vec![q] }
    }

    pub fn z(q: usize) -> Self {
        Gate { kind: GateKind::Z, targets: vec![q] }
    }

    pub fn cz(control: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Cz, vec![control, target])
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Cnot, vec![control, target])
    }

    pub fn ccnot(c1: usize, c2: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Ccnot, vec![c1, c2, target])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    labels: Vec<String>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::InvalidGate(format!("duplicate qubit label `{l}`")));
            }
        }
        if labels.len() > MAX_QUBITS {
            return Err(Error::DimensionMismatch(format!(
                "{} qubits exceeds the {MAX_QUBITS}-qubit limit",
                labels.len()
            )));
        }
        Ok(Circuit {
            labels,
            gates: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn qubit(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::BadLabel(label.to_string()))
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&bad) = gate.targets.iter().find(|&&q| q >= self.num_qubits()) {
            return Err(Error::BadIndex {
                index: bad,
                num_qubits: self.num_qubits(),
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Adds a fresh qubit at the end of the register.
    pub fn add_qubit(&mut self, label: &str) -> Result<usize> {
        if self.labels.iter().any(|l| l == label) {
            return Err(Error::InvalidGate(format!("duplicate qubit label `{label}`")));
        }
        if self.labels.len() == MAX_QUBITS {
            return Err(Error::DimensionMismatch("register is full".into()));
        }
        self.labels.push(label.to_string());
        Ok(self.labels.len() - 1)
    }
}

pub fn run_circuit(circuit: &Circuit, input: StateVector) -> Result<StateVector> {
    run_gates(circuit.gates(), input, circuit.num_qubits())
}

pub(crate) fn run_gates(gates: &[Gate], mut state: StateVector, num_qubits: usize) -> Result<StateVector> {
    if state.num_qubits != num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit state for a {}-qubit circuit",
            state.num_qubits, num_qubits
        )));
    }
    for g in gates {
        state.apply_gate(g)?;
    }
    Ok(state)
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: u8,
    pub collapsed: StateVector,
    pub probability: f64,
}

/// Computational-basis measurement of one qubit.
pub fn measure_qubit<R: Rng + ?Sized>(state: &StateVector, index: usize, rng: &mut R) -> Result<Measurement> {
    let p1 = state.probability_one(index)?;
    let total = state.norm().powi(2);
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let p1 = (p1 / total).clamp(0.0, 1.0);
    let outcome: u8 = if rng.gen::<f64>() < p1 { 1 } else { 0 };
    let probability = if outcome == 1 { p1 } else { 1.0 - p1 };
    if probability <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let t = state.bit(index);
    let keep_set = if outcome == 1 { t } else { 0 };
    let scale = 1.0 / (probability * total).sqrt();
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| if i & t == keep_set { a * scale } else { ZERO })
        .collect();
    Ok(Measurement {
        outcome,
        collapsed: StateVector {
            num_qubits: state.num_qubits,
            amplitudes,
        },
        probability,
    })
}
