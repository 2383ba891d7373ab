//! Dense complex linear algebra for the small matrices used by the analysis.
//!
//! Storage is row-major. Qubit registers follow the convention that qubit 0
//! is the most significant bit of a basis index, so `kron(a, b)` places `a`
//! on the lower-numbered qubits.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance for the Hermiticity check on construction helpers.
pub const HERMITIAN_BUILD_TOL: f64 = 1e-12;
/// Tolerance for the Hermiticity precondition of the eigensolver.
pub const HERMITIAN_EIG_TOL: f64 = 1e-10;
/// Eigenvalues below this are an error when a PSD matrix is expected.
pub const PSD_ERROR_TOL: f64 = -1e-8;
/// Eigenvalues with magnitude below this are rounding noise and are clamped to zero
/// before square roots or logarithms are taken.
pub const EIGEN_NOISE_FLOOR: f64 = 1e-14;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix that is asserted to be Hermitian; the assertion is checked.
    pub fn hermitian(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        let m = Self::from_vec(rows, cols, data)?;
        let deviation = m.hermitian_deviation()?;
        if deviation > HERMITIAN_BUILD_TOL {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(m)
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// |v⟩⟨w|
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                m[(i, j)] = vi * wj.conj();
            }
        }
        m
    }

    /// |v⟩⟨v|
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    fn zip_with(&self, other: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖A − A†‖_max
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot be Hermitian",
                self.rows, self.cols
            )));
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Ok(dev)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        matches!(self.hermitian_deviation(), Ok(d) if d <= tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch, like the std numeric types do on
// overflow in debug builds. Fallible variants are `try_add`, `try_sub`, `matmul`.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix shapes differ")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix shapes differ")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shapes incompatible")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tensor (Kronecker) product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a[(ai, aj)];
            if x == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    m[(ai * b.rows + bi, aj * b.cols + bj)] = x * b[(bi, bj)];
                }
            }
        }
    }
    m
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO])
        .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Descending; ties keep the order in which the solver produced them.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Option<ComplexMatrix>,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(a: &ComplexMatrix, with_vectors: bool) -> Result<Spectrum> {
    let deviation = a.hermitian_deviation()?;
    if deviation > HERMITIAN_EIG_TOL {
        return Err(Error::NonHermitianInput { deviation });
    }
    let n = a.rows;
    // symmetrize so the rotations see an exactly Hermitian matrix
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = if with_vectors {
        Some(ComplexMatrix::identity(n))
    } else {
        None
    };

    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // real rotation for [[app, r], [r, aqq]] after removing the phase of apq
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // V = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = phase.conj() * (-s);
                let vqq = phase.conj() * c;

                // A <- A V
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * vpp + akq * vqp;
                    m[(k, q)] = akp * vpq + akq * vqq;
                }
                // A <- V† A
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                    m[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let xkp = vm[(k, p)];
                        let xkq = vm[(k, q)];
                        vm[(k, p)] = xkp * vpp + xkq * vqp;
                        vm[(k, q)] = xkp * vpq + xkq * vqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in solver order
    order.sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap());
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = v.map(|vm| {
        let mut sorted = ComplexMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, col)] = vm[(k, src)];
            }
        }
        sorted
    });
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Clamps noise-level eigenvalues to zero; errors on clearly negative ones.
pub(crate) fn clamp_psd_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda < PSD_ERROR_TOL {
        Err(Error::NotPsd { eigenvalue: lambda })
    } else if lambda < EIGEN_NOISE_FLOOR {
        Ok(0.0)
    } else {
        Ok(lambda)
    }
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eig(a, true)?;
    let v = spectrum.eigenvectors.expect("eigenvectors requested");
    let roots = spectrum
        .eigenvalues
        .iter()
        .map(|&l| clamp_psd_eigenvalue(l).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    let d = ComplexMatrix::diag_real(&roots);
    Ok(&(&v * &d) * &v.adjoint())
}

fn check_register(dim: usize, num_qubits: usize) -> Result<()> {
    if num_qubits >= usize::BITS as usize || dim != 1usize << num_qubits {
        return Err(Error::DimensionMismatch(format!(
            "dimension {dim} does not match {num_qubits} qubits"
        )));
    }
    Ok(())
}

pub(crate) fn check_qubit_list(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (k, &q) in qubits.iter().enumerate() {
        if q >= num_qubits || qubits[..k].contains(&q) {
            return Err(Error::BadIndex {
                index: q,
                num_qubits,
            });
        }
    }
    Ok(())
}

/// Scatters the bits of `local` (MSB-first, one bit per entry of `qubits`)
/// into a full register index.
#[inline]
pub(crate) fn scatter_bits(local: usize, qubits: &[usize], num_qubits: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (m, &q)| {
        let bit = (local >> (k - 1 - m)) & 1;
        acc | (bit << (num_qubits - 1 - q))
    })
}

/// Reduced density matrix on `keep`, in the order listed.
pub fn partial_trace(rho: &ComplexMatrix, num_qubits: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch("density matrix must be square".into()));
    }
    check_register(rho.rows, num_qubits)?;
    check_qubit_list(keep, num_qubits)?;
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << keep.len();
    let de = 1usize << traced.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for e in 0..de {
        let env = scatter_bits(e, &traced, num_qubits);
        for i in 0..dk {
            let fi = env | scatter_bits(i, keep, num_qubits);
            for j in 0..dk {
                let fj = env | scatter_bits(j, keep, num_qubits);
                out[(i, j)] += rho[(fi, fj)];
            }
        }
    }
    Ok(out)
}

/// Transposes the listed qubits' indices, leaving the rest untouched.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    num_qubits: usize,
    qubits: &[usize],
) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch("density matrix must be square".into()));
    }
    check_register(rho.rows, num_qubits)?;
    check_qubit_list(qubits, num_qubits)?;
    let mask = qubits
        .iter()
        .fold(0usize, |acc, &q| acc | (1 << (num_qubits - 1 - q)));
    let n = rho.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let swap = (i ^ j) & mask;
            out[(i ^ swap, j ^ swap)] = rho[(i, j)];
        }
    }
    Ok(out)
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a.try_sub(b)?;
    let spectrum = hermitian_eig(&diff, false)?;
    Ok(0.5 * spectrum.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// Hermitian, unit-trace, PSD check with a common tolerance.
pub fn check_density_matrix(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    let deviation = rho.hermitian_deviation()?;
    if deviation > tol {
        return Err(Error::NonHermitianInput { deviation });
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > tol {
        return Err(Error::DimensionMismatch(format!("trace {tr} differs from 1")));
    }
    let spectrum = hermitian_eig(rho, false)?;
    let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPsd { eigenvalue: min });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bell_projector() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::projector(&[c(s, 0.0), ZERO, ZERO, c(s, 0.0)])
    }

    fn rho0() -> ComplexMatrix {
        ComplexMatrix::identity(2).scale_real(0.5)
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sigma_y_sigma_y_is_antidiagonal() {
        let yy = kron(&pauli_y(), &pauli_y());
        let expected = [-1.0, 1.0, 1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { c(expected[i], 0.0) } else { ZERO };
                assert_eq!(yy[(i, j)], want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn kron_of_basis_projectors() {
        let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert_eq!(kron(&p0, &p1), ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn eig_of_maximally_mixed_qubit() {
        let spectrum = hermitian_eig(&rho0(), false).unwrap();
        assert_eq!(spectrum.eigenvalues, vec![0.5, 0.5]);
    }

    #[test]
    fn eig_of_bell_projector() {
        let spectrum = hermitian_eig(&bell_projector(), true).unwrap();
        let want = [1.0, 0.0, 0.0, 0.0];
        for (l, w) in spectrum.eigenvalues.iter().zip(want) {
            assert!((l - w).abs() < 1e-15);
        }
    }

    #[test]
    fn eig_of_werner_state_with_quarter_weight() {
        // q = 1/4: Bell eigenvalue q + (1-q)/4 = 7/16, the rest (1-q)/4 = 3/16
        let q = 0.25;
        let rho = bell_projector()
            .scale_real(q)
            .try_add(&ComplexMatrix::identity(4).scale_real((1.0 - q) / 4.0))
            .unwrap();
        let spectrum = hermitian_eig(&rho, false).unwrap();
        let want = [7.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0];
        for (l, w) in spectrum.eigenvalues.iter().zip(want) {
            assert!((l - w).abs() < 1e-14, "{l} vs {w}");
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&m, false), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn hermitian_constructor_checks_flag() {
        let bad = vec![ONE, c(0.0, 1.0), c(0.0, 1.0), ONE];
        assert!(ComplexMatrix::hermitian(2, 2, bad).is_err());
        let good = vec![ONE, c(0.0, 1.0), c(0.0, -1.0), ONE];
        assert!(ComplexMatrix::hermitian(2, 2, good).is_ok());
        assert!(ComplexMatrix::from_vec(2, 3, vec![ONE; 5]).is_err());
    }

    #[test]
    fn eig_reconstruction_complex_entries() {
        let data = vec![
            c(2.0, 0.0), c(0.5, -0.3), c(0.0, 0.7),
            c(0.5, 0.3), c(1.0, 0.0), c(-0.2, 0.1),
            c(0.0, -0.7), c(-0.2, -0.1), c(-1.5, 0.0),
        ];
        let a = ComplexMatrix::hermitian(3, 3, data).unwrap();
        let spectrum = hermitian_eig(&a, true).unwrap();
        let v = spectrum.eigenvectors.unwrap();
        let rebuilt = &(&v * &ComplexMatrix::diag_real(&spectrum.eigenvalues)) * &v.adjoint();
        assert!(rebuilt.max_abs_diff(&a).unwrap() < 1e-12);
        assert!((&v.adjoint() * &v).max_abs_diff(&ComplexMatrix::identity(3)).unwrap() < 1e-12);
        assert!(spectrum.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn sqrt_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert!(matrix_sqrt_psd(&i4).unwrap().max_abs_diff(&i4).unwrap() < 1e-15);

        let d = ComplexMatrix::diag_real(&[4.0, 1.0, 0.0, 0.0]);
        let want = ComplexMatrix::diag_real(&[2.0, 1.0, 0.0, 0.0]);
        assert!(matrix_sqrt_psd(&d).unwrap().max_abs_diff(&want).unwrap() < 1e-15);

        let b = bell_projector();
        let root = matrix_sqrt_psd(&b).unwrap();
        assert!(root.max_abs_diff(&b).unwrap() < 1e-12);
        assert!((&root * &root).max_abs_diff(&b).unwrap() < 1e-9);
    }

    #[test]
    fn sqrt_rejects_negative_matrix() {
        let m = ComplexMatrix::diag_real(&[1.0, -0.1]);
        assert!(matches!(matrix_sqrt_psd(&m), Err(Error::NotPsd { .. })));
        // noise-level negatives are clamped
        let m = ComplexMatrix::diag_real(&[1.0, -1e-12]);
        assert!(matrix_sqrt_psd(&m).is_ok());
    }

    #[test]
    fn partial_trace_examples() {
        let got = partial_trace(&bell_projector(), 2, &[0]).unwrap();
        assert!(got.max_abs_diff(&rho0()).unwrap() < 1e-15);

        let prod = kron(&rho0(), &rho0());
        assert!(partial_trace(&prod, 2, &[1]).unwrap().max_abs_diff(&rho0()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let ab = kron(&a, &b);
        assert_eq!(partial_trace(&ab, 2, &[0, 1]).unwrap(), ab);
        assert_eq!(partial_trace(&ab, 2, &[1, 0]).unwrap(), kron(&b, &a));
    }

    #[test]
    fn partial_trace_bad_index() {
        assert!(matches!(
            partial_trace(&bell_projector(), 2, &[2]),
            Err(Error::BadIndex { index: 2, .. })
        ));
        assert!(partial_trace(&bell_projector(), 2, &[0, 0]).is_err());
        assert!(partial_trace(&bell_projector(), 3, &[0]).is_err());
    }

    #[test]
    fn partial_transpose_of_bell_projector() {
        let pt = partial_transpose(&bell_projector(), 2, &[1]).unwrap();
        let spectrum = hermitian_eig(&pt, false).unwrap();
        assert!((spectrum.eigenvalues[3] + 0.5).abs() < 1e-15);
        // transposing either factor gives the same spectrum for this state
        let pt0 = partial_transpose(&bell_projector(), 2, &[0]).unwrap();
        assert_eq!(pt0, pt);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
    }
}
