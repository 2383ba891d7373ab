//! Simulation and analysis of bidirectional imperfect teleportation over a
//! single shared Bell pair.
//!
//! Two parties each hold an input qubit and one half of a Bell pair. A
//! trigger qubit decides whether each party performs an indirect Bell
//! measurement; the resulting channels in both directions are depolarizing.
//!
//! * [`numerics`]: dense complex matrices, Hermitian eigensolver, partial trace.
//! * [`qsim`]: statevector simulator with the gate set {H, X, Z, CZ, CNOT, CCNOT}.
//! * [`protocols`]: scheme circuits, Choi-state extraction, sampling mode.
//! * [`channels`]: analytic channel model and teleportation fidelity.
//! * [`infotheory`]: entropies, capacities, discord, concurrence, PPT test.
//! * [`cli`]: the `bellbidir` command-line front end.

pub mod channels;
pub mod cli;
pub mod error;
pub mod infotheory;
pub mod numerics;
pub mod protocols;
pub mod qsim;

pub use error::{Error, Result};
