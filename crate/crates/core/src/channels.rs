//! Depolarizing-family channel models and teleportation fidelity.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::protocols::{werner, ChoiState, Direction, SchemeKind, SchemeParams};
use crate::qsim::bloch_state;

/// Best average fidelity reachable with classical communication alone.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

pub const DEFAULT_QUADRATURE_NODES: usize = 32;

/// E[ρ] = q·ρ + (1 − q)·I/2
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitChannel {
    q: f64,
}

impl QubitChannel {
    pub fn new(q: f64) -> Result<Self> {
        check_unit_interval("q", q)?;
        Ok(QubitChannel { q })
    }

    pub fn identity() -> Self {
        QubitChannel { q: 1.0 }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::DimensionMismatch("channel input must be 2x2".into()));
        }
        let mixed = ComplexMatrix::identity(2).scale_real((1.0 - self.q) / 2.0);
        rho.scale_real(self.q).try_add(&mixed)
    }

    /// q·|β⟩⟨β| + (1 − q)·ρ₀⊗ρ₀
    pub fn choi(&self) -> ChoiState {
        ChoiState::new_unchecked(werner(self.q))
    }

    /// (1 + q)/2
    pub fn fidelity(&self) -> f64 {
        (1.0 + self.q) / 2.0
    }
}

/// Input-preserving weight of each scheme.
///
/// independent: A→B p₁(1−p₂), B→A p₂(1−p₁); common: A→B p, B→A 1−p;
/// mixed: t·independent + (1−t)·common.
pub fn analytic_channel(scheme: SchemeKind, params: &SchemeParams, dir: Direction) -> Result<QubitChannel> {
    params.validate()?;
    analytic_channel_from_probabilities(scheme, params.p1(), params.p2(), params.p(), params.t, dir)
}

/// Same as [`analytic_channel`] with the firing probabilities given directly.
pub fn analytic_channel_from_probabilities(
    scheme: SchemeKind,
    p1: f64,
    p2: f64,
    p: f64,
    t: f64,
    dir: Direction,
) -> Result<QubitChannel> {
    for (name, v) in [("p1", p1), ("p2", p2), ("p", p), ("t", t)] {
        check_unit_interval(name, v)?;
    }
    let independent = match dir {
        Direction::AtoB => p1 * (1.0 - p2),
        Direction::BtoA => p2 * (1.0 - p1),
    };
    let common = match dir {
        Direction::AtoB => p,
        Direction::BtoA => 1.0 - p,
    };
    let q = match scheme {
        SchemeKind::Independent => independent,
        SchemeKind::Common => common,
        SchemeKind::Mixed => t * independent + (1.0 - t) * common,
    };
    QubitChannel::new(q.clamp(0.0, 1.0))
}

pub fn apply(channel: &QubitChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    channel.apply(rho)
}

pub fn choi_of_channel(channel: &QubitChannel) -> ChoiState {
    channel.choi()
}

pub fn fidelity_closed(channel: &QubitChannel) -> f64 {
    channel.fidelity()
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (x, w);
        out[n - 1 - i] = (-x, w);
    }
    out
}

/// Bloch-sphere average of ⟨ψ|E[|ψ⟩⟨ψ|]|ψ⟩.
///
/// Gauss–Legendre in cos θ, uniform (periodic trapezoid) in φ, `nodes` points each.
pub fn fidelity_quadrature<F>(channel_apply: F, nodes: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<ComplexMatrix>,
{
    if nodes < 4 {
        return Err(Error::DomainError {
            function: "fidelity_quadrature",
            value: nodes as f64,
        });
    }
    let dphi = 2.0 * PI / nodes as f64;
    let mut total = 0.0;
    for (x, w) in gauss_legendre(nodes) {
        let theta = x.clamp(-1.0, 1.0).acos();
        let mut ring = 0.0;
        for k in 0..nodes {
            let phi = k as f64 * dphi;
            let psi = bloch_state(theta, phi);
            let out = channel_apply(theta, phi)?;
            let a = psi.amplitudes();
            let overlap: C64 = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| a[i].conj() * out[(i, j)] * a[j])
                .sum();
            ring += overlap.re;
        }
        total += w * ring * dphi;
    }
    Ok(total / (4.0 * PI))
}

/// Fidelity of a depolarizing channel by quadrature over its action.
pub fn channel_fidelity_quadrature(channel: &QubitChannel, nodes: usize) -> Result<f64> {
    fidelity_quadrature(|th, ph| channel.apply(&bloch_state(th, ph).density_matrix()), nodes)
}

/// Solves F = 2/3 for the mixing weight, given the input-preserving weights
/// of the independent and common schemes.
pub fn critical_t_for(q_independent: f64, q_common: f64) -> Result<f64> {
    // (1 + q_com + t (q_ind - q_com)) / 2 = 2/3
    let slope = q_independent - q_common;
    if slope == 0.0 {
        return Err(Error::DomainError {
            function: "critical_t_for",
            value: slope,
        });
    }
    Ok((2.0 * CLASSICAL_FIDELITY - 1.0 - q_common) / slope)
}

/// Mixing weight at which the symmetric mixed scheme reaches the classical
/// fidelity: 3/4 − t/8 = 2/3 gives t = 2/3.
pub fn critical_t() -> f64 {
    2.0 / 3.0
}

/// 3/4 − t/8
pub fn symmetric_mixed_fidelity(t: f64) -> Result<f64> {
    check_unit_interval("t", t)?;
    Ok(0.75 - t / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexMatrix;
    use crate::protocols::bell_projector;

    #[test]
    fn analytic_examples() {
        let pi = std::f64::consts::PI;
        let ch = analytic_channel(SchemeKind::Independent, &SchemeParams::independent(pi, 0.0), Direction::AtoB).unwrap();
        assert!((ch.q() - 1.0).abs() < 1e-15);
        for d in [Direction::AtoB, Direction::BtoA] {
            let ch = analytic_channel(SchemeKind::Common, &SchemeParams::common(pi / 2.0), d).unwrap();
            assert!((ch.q() - 0.5).abs() < 1e-15);
            for t in [0.0, 0.25, 0.9, 1.0] {
                let ch = analytic_channel(SchemeKind::Mixed, &SchemeParams::symmetric(t), d).unwrap();
                assert!((ch.q() - (0.5 - t / 4.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn apply_examples() {
        let rho = bloch_state(0.9, 0.3).density_matrix();
        assert_eq!(QubitChannel::new(1.0).unwrap().apply(&rho).unwrap(), rho);
        let rho0 = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(QubitChannel::new(0.0).unwrap().apply(&rho).unwrap().max_abs_diff(&rho0).unwrap() < 1e-16);
        let zero = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let got = QubitChannel::new(0.5).unwrap().apply(&zero).unwrap();
        assert_eq!(got, ComplexMatrix::diag_real(&[0.75, 0.25]));
        assert!(QubitChannel::new(1.2).is_err());
    }

    #[test]
    fn choi_examples() {
        assert!(QubitChannel::new(1.0).unwrap().choi().matrix().max_abs_diff(&bell_projector()).unwrap() < 1e-16);
        assert!(QubitChannel::new(0.0).unwrap().choi().matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap() < 1e-16);
        let q = 0.5 - (2.0 / 3.0) / 4.0;
        let want = bell_projector()
            .scale_real(1.0 / 3.0)
            .try_add(&ComplexMatrix::identity(4).scale_real(2.0 / 3.0 / 4.0))
            .unwrap();
        assert!(QubitChannel::new(q).unwrap().choi().matrix().max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn closed_fidelity_values() {
        assert_eq!(fidelity_closed(&QubitChannel::new(0.25).unwrap()), 0.625);
        assert_eq!(fidelity_closed(&QubitChannel::new(0.5).unwrap()), 0.75);
        assert_eq!(fidelity_closed(&QubitChannel::identity()), 1.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [4, 7, 32] {
            let nodes = gauss_legendre(n);
            let w: f64 = nodes.iter().map(|x| x.1).sum();
            assert!((w - 2.0).abs() < 1e-13);
            // ∫ x^(2n-2) dx = 2/(2n-1)
            let deg = 2 * n as i32 - 2;
            let integral: f64 = nodes.iter().map(|(x, w)| w * x.powi(deg)).sum();
            assert!((integral - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn quadrature_examples() {
        let id = fidelity_quadrature(|th, ph| Ok(bloch_state(th, ph).density_matrix()), 8).unwrap();
        assert!((id - 1.0).abs() < 1e-13);
        for nodes in [4, 5, 16, 32] {
            let f = channel_fidelity_quadrature(&QubitChannel::new(0.5).unwrap(), nodes).unwrap();
            assert!((f - 0.75).abs() < 1e-13, "{nodes} nodes: {f}");
        }
        assert!(fidelity_quadrature(|_, _| Ok(ComplexMatrix::identity(2)), 3).is_err());
    }

    #[test]
    fn quadrature_on_non_depolarizing_maps() {
        // sphere averages: ∫(cos⁴(θ/2) + sin⁴(θ/2)) = 2/3, ∫cos⁴(θ/2) = 1/3,
        // ∫ sin²θ cos²φ = 1/3
        let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let measure = |th: f64, ph: f64| {
            let rho = bloch_state(th, ph).density_matrix();
            let a = &(&p0 * &rho) * &p0;
            let b = &(&p1 * &rho) * &p1;
            Ok(&a + &b)
        };
        let project = |th: f64, ph: f64| {
            let rho = bloch_state(th, ph).density_matrix();
            Ok(&(&p0 * &rho) * &p0)
        };
        let x = crate::numerics::pauli_x();
        let flip = |th: f64, ph: f64| {
            let rho = bloch_state(th, ph).density_matrix();
            Ok(&(&x * &rho) * &x)
        };
        assert!((fidelity_quadrature(measure, 64).unwrap() - 2.0 / 3.0).abs() < 1e-6);
        assert!((fidelity_quadrature(project, 64).unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!((fidelity_quadrature(flip, 64).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn critical_point() {
        assert_eq!(critical_t(), 2.0 / 3.0);
        let q = 0.5 - critical_t() / 4.0;
        assert!((fidelity_closed(&QubitChannel::new(q).unwrap()) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(symmetric_mixed_fidelity(0.0).unwrap(), 0.75);
        assert!((critical_t_for(0.25, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(critical_t_for(0.5, 0.5).is_err());
    }

    #[test]
    fn exchange_symmetry_is_exact() {
        let grid: Vec<f64> = (0..9).map(|i| std::f64::consts::PI * i as f64 / 8.0).collect();
        for &a in &grid {
            for &b in &grid {
                let ab = analytic_channel(SchemeKind::Independent, &SchemeParams::independent(a, b), Direction::AtoB).unwrap();
                let ba = analytic_channel(SchemeKind::Independent, &SchemeParams::independent(b, a), Direction::BtoA).unwrap();
                assert_eq!(fidelity_closed(&ab), fidelity_closed(&ba));
            }
        }
    }
}
