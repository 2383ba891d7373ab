//! Information measures for the trigger correlations and the Choi state.
//!
//! All quantities are in bits. Terms `x·log₂x` with `x` below
//! [`PROBABILITY_FLOOR`] are taken as zero.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::{
    clamp_psd_eigenvalue, check_density_matrix, hermitian_eig, kron, matrix_sqrt_psd,
    partial_trace, partial_transpose, pauli_x, pauli_y, pauli_z, ComplexMatrix,
};
use crate::protocols::{ChoiState, SchemeKind, SchemeParams};

pub const PROBABILITY_FLOOR: f64 = 1e-15;
/// A Choi state counts as separable when its partial transpose has no eigenvalue below this.
pub const SEPARABILITY_TOL: f64 = -1e-10;
pub const DEFAULT_AXIS_GRID: usize = 32;

fn xlog2x(x: f64) -> f64 {
    if x < PROBABILITY_FLOOR {
        0.0
    } else {
        x * x.log2()
    }
}

/// Joint probabilities of the two parties' fire / don't-fire decisions.
/// Row 0 is "Alice fires", column 0 is "Bob fires".
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointTriggerDistribution {
    m: [[f64; 2]; 2],
}

impl JointTriggerDistribution {
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let sum: f64 = m.iter().flatten().sum();
        if m.iter().flatten().any(|&x| x < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                name: "joint distribution total",
                value: sum,
                lo: 1.0,
                hi: 1.0,
            });
        }
        Ok(JointTriggerDistribution { m })
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn alice_marginal(&self) -> [f64; 2] {
        [self.m[0][0] + self.m[0][1], self.m[1][0] + self.m[1][1]]
    }

    pub fn bob_marginal(&self) -> [f64; 2] {
        [self.m[0][0] + self.m[1][0], self.m[0][1] + self.m[1][1]]
    }
}

/// (t/4)·ones + ((1−t)/2)·antidiagonal, the symmetric mixed scheme.
pub fn trigger_joint_distribution(t: f64) -> Result<JointTriggerDistribution> {
    check_unit_interval("t", t)?;
    let d = t / 4.0;
    let o = t / 4.0 + (1.0 - t) / 2.0;
    JointTriggerDistribution::new([[d, o], [o, d]])
}

/// Decision distribution for arbitrary trigger angles. Agrees with
/// [`trigger_joint_distribution`] at p₁ = p₂ = p = 1/2.
pub fn trigger_distribution_for(scheme: SchemeKind, params: &SchemeParams) -> Result<JointTriggerDistribution> {
    params.validate()?;
    let (p1, p2, p) = (params.p1(), params.p2(), params.p());
    let ind = [[p1 * p2, p1 * (1.0 - p2)], [(1.0 - p1) * p2, (1.0 - p1) * (1.0 - p2)]];
    let com = [[0.0, p], [1.0 - p, 0.0]];
    let t = match scheme {
        SchemeKind::Independent => 1.0,
        SchemeKind::Common => 0.0,
        SchemeKind::Mixed => params.t,
    };
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = t * ind[i][j] + (1.0 - t) * com[i][j];
        }
    }
    JointTriggerDistribution::new(m)
}

pub fn shannon_mutual_information(dist: &JointTriggerDistribution) -> f64 {
    let a = dist.alice_marginal();
    let b = dist.bob_marginal();
    let mut total = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mij = dist.m[i][j];
            if mij < PROBABILITY_FLOOR {
                continue;
            }
            total += mij * (mij / (a[i] * b[j])).log2();
        }
    }
    total
}

fn check_domain(function: &'static str, x: f64, hi: f64) -> Result<()> {
    if (0.0..=hi).contains(&x) {
        Ok(())
    } else {
        Err(Error::DomainError { function, value: x })
    }
}

/// Binary entropy, x ∈ [0, 1].
pub fn h2(x: f64) -> Result<f64> {
    check_domain("h2", x, 1.0)?;
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

/// −2x log₂x − (1−2x) log₂(1/2 − x), x ∈ [0, 1/2].
pub fn h4_22(x: f64) -> Result<f64> {
    check_domain("h4_22", x, 0.5)?;
    let rest = 1.0 - 2.0 * x;
    let tail = if rest < PROBABILITY_FLOOR { 0.0 } else { rest * (0.5 - x).log2() };
    Ok(-2.0 * xlog2x(x) - tail)
}

/// −3x log₂x − (1−3x) log₂(1 − 3x), x ∈ [0, 1/3].
pub fn h4_31(x: f64) -> Result<f64> {
    check_domain("h4_31", x, 1.0 / 3.0)?;
    Ok(-3.0 * xlog2x(x) - xlog2x(1.0 - 3.0 * x))
}

/// 2 − h4_22(t/4)
pub fn aux_info_closed(t: f64) -> Result<f64> {
    check_unit_interval("t", t)?;
    Ok(2.0 - h4_22(t / 4.0)?)
}

pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let spectrum = hermitian_eig(rho, false)?;
    let mut s = 0.0;
    for l in spectrum.eigenvalues {
        s -= xlog2x(clamp_psd_eigenvalue(l)?);
    }
    Ok(s)
}

/// S[ρ_R] + S[ρ_Q] − S[ρ_RQ]
pub fn quantum_mutual_information(rho_rq: &ChoiState) -> Result<f64> {
    let m = rho_rq.matrix();
    let s_r = von_neumann_entropy(&partial_trace(m, 2, &[0])?)?;
    let s_q = von_neumann_entropy(&partial_trace(m, 2, &[1])?)?;
    Ok(s_r + s_q - von_neumann_entropy(m)?)
}

/// 2 − h4_31(1/8 + t/16)
pub fn total_info_closed(t: f64) -> Result<f64> {
    check_unit_interval("t", t)?;
    Ok(2.0 - h4_31(0.125 + t / 16.0)?)
}

/// Result of optimizing a projective measurement on the reference qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccessibleInfo {
    pub bits: f64,
    /// max − min of the objective over the axis grid.
    pub flatness: f64,
    /// Best measurement axis as a unit Bloch vector.
    pub axis: [f64; 3],
    pub axes_evaluated: usize,
}

fn bloch_axis(polar: f64, azimuth: f64) -> [f64; 3] {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

/// S[ρ_Q] − Σ_j p_j S[ρ_{Q|j}] for the measurement {(I ± n̂·σ)/2} on R.
pub fn measurement_objective(rho_rq: &ComplexMatrix, axis: [f64; 3]) -> Result<f64> {
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let n_sigma = pauli_x()
        .scale_real(axis[0])
        .try_add(&pauli_y().scale_real(axis[1]))?
        .try_add(&pauli_z().scale_real(axis[2]))?
        .scale_real(0.5);
    let id2 = ComplexMatrix::identity(2);
    let s_q = von_neumann_entropy(&partial_trace(rho_rq, 2, &[1])?)?;
    let mut conditional = 0.0;
    for sign in [1.0, -1.0] {
        let proj = half.try_add(&n_sigma.scale_real(sign))?;
        let lifted = kron(&proj, &id2);
        let post = lifted.matmul(rho_rq)?.matmul(&lifted)?;
        let unnorm = partial_trace(&post, 2, &[1])?;
        let p = unnorm.trace().re;
        if p < PROBABILITY_FLOOR {
            continue;
        }
        conditional += p * von_neumann_entropy(&unnorm.scale_real(1.0 / p))?;
    }
    Ok(s_q - conditional)
}

fn golden_section_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..60 {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b)?;
        }
    }
    Ok(if fa >= fb { (a, fa) } else { (b, fb) })
}

/// Maximizes the measurement objective over projective measurements on R.
///
/// Axes come from a Fibonacci lattice of `grid`² points; the best one is then
/// refined by golden-section search along the polar and azimuthal angles.
pub fn classical_accessible_info(rho_rq: &ChoiState, grid: usize) -> Result<AccessibleInfo> {
    if grid < 8 {
        return Err(Error::DomainError {
            function: "classical_accessible_info",
            value: grid as f64,
        });
    }
    let m = rho_rq.matrix();
    let n = grid * grid;
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut worst = f64::INFINITY;
    for k in 0..n {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
        let polar = z.acos();
        let azimuth = (k as f64 * golden_angle).rem_euclid(2.0 * PI);
        let v = measurement_objective(m, bloch_axis(polar, azimuth))?;
        if v > best.0 {
            best = (v, polar, azimuth);
        }
        worst = worst.min(v);
    }
    let flatness = best.0 - worst;

    let step = (4.0 * PI / n as f64).sqrt();
    let (mut value, mut polar, mut azimuth) = best;
    let (p, fp) = golden_section_max(|a| measurement_objective(m, bloch_axis(a, azimuth)), polar - step, polar + step)?;
    if fp > value {
        value = fp;
        polar = p;
    }
    let (a, fa) = golden_section_max(|b| measurement_objective(m, bloch_axis(polar, b)), azimuth - step, azimuth + step)?;
    if fa > value {
        value = fa;
        azimuth = a;
    }
    Ok(AccessibleInfo {
        bits: value,
        flatness,
        axis: bloch_axis(polar, azimuth),
        axes_evaluated: n,
    })
}

/// 1 − h2(3/4 − t/8)
pub fn classical_capacity_closed(t: f64) -> Result<f64> {
    check_unit_interval("t", t)?;
    Ok(1.0 - h2(0.75 - t / 8.0)?)
}

/// Total minus classically-accessible information.
pub fn quantum_discord(rho_rq: &ChoiState) -> Result<f64> {
    let total = quantum_mutual_information(rho_rq)?;
    let classical = classical_accessible_info(rho_rq, DEFAULT_AXIS_GRID)?;
    Ok(total - classical.bits)
}

/// max(0, λ₁ − λ₂ − λ₃ − λ₄), λ the square roots of the eigenvalues of
/// √ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y) √ρ in descending order.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch("concurrence needs a 4x4 state".into()));
    }
    let root = matrix_sqrt_psd(rho)?;
    let yy = kron(&pauli_y(), &pauli_y());
    let flipped = yy.matmul(&rho.conj())?.matmul(&yy)?;
    let r = root.matmul(&flipped)?.matmul(&root)?;
    let spectrum = hermitian_eig(&r, false)?;
    let lambdas = spectrum
        .eigenvalues
        .iter()
        .map(|&l| clamp_psd_eigenvalue(l).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// max(0, 1/4 − 3t/8)
pub fn concurrence_closed(t: f64) -> Result<f64> {
    check_unit_interval("t", t)?;
    Ok((0.25 - 3.0 * t / 8.0).max(0.0))
}

/// Smallest eigenvalue of the partial transpose over the second factor.
pub fn min_partial_transpose_eigenvalue(rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch("expected a two-qubit state".into()));
    }
    check_density_matrix(rho, 1e-10)?;
    let pt = partial_transpose(rho, 2, &[1])?;
    let spectrum = hermitian_eig(&pt, false)?;
    Ok(*spectrum.eigenvalues.last().expect("4 eigenvalues"))
}

/// S[ρ_Q] − S[ρ_RQ]
pub fn coherent_information(rho_rq: &ChoiState) -> Result<f64> {
    let m = rho_rq.matrix();
    Ok(von_neumann_entropy(&partial_trace(m, 2, &[1])?)? - von_neumann_entropy(m)?)
}

/// Every information measure at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoReport {
    pub t: f64,
    pub i_aux: f64,
    pub i_tot: f64,
    pub i_class: f64,
    pub discord: f64,
    pub concurrence: f64,
    pub i_coh: f64,
    pub min_pt_eigenvalue: f64,
    pub entanglement_breaking: bool,
}

/// Evaluates the measures on a given Choi state and trigger distribution.
pub fn info_report_for(t: f64, choi: &ChoiState, triggers: &JointTriggerDistribution) -> Result<InfoReport> {
    let i_aux = shannon_mutual_information(triggers);
    let i_tot = quantum_mutual_information(choi)?;
    let i_class = classical_accessible_info(choi, DEFAULT_AXIS_GRID)?.bits;
    let min_pt = min_partial_transpose_eigenvalue(choi.matrix())?;
    Ok(InfoReport {
        t,
        i_aux,
        i_tot,
        i_class,
        discord: i_tot - i_class,
        concurrence: concurrence(choi.matrix())?,
        i_coh: coherent_information(choi)?,
        min_pt_eigenvalue: min_pt,
        entanglement_breaking: min_pt >= SEPARABILITY_TOL,
    })
}

/// Measures for the symmetric mixed scheme at weight `t`.
pub fn info_report(t: f64) -> Result<InfoReport> {
    check_unit_interval("t", t)?;
    let channel = crate::channels::analytic_channel(
        SchemeKind::Mixed,
        &SchemeParams::symmetric(t),
        crate::protocols::Direction::AtoB,
    )?;
    info_report_for(t, &channel.choi(), &trigger_joint_distribution(t)?)
}
