//! Dense complex linear algebra: Hermitian operators, density matrices,
//! Kronecker products, partial traces, spectral functions and the real
//! symmetric embedding used by the SDP solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix, row/column dimensions carried by nalgebra.
pub type ComplexMatrix = DMatrix<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Tensor product of single-qubit Paulis, e.g. `"XZ"` or `"IYY"`.
pub fn pauli_string(s: &str) -> Result<ComplexMatrix> {
    if s.is_empty() {
        return Err(Error::Parse("empty Pauli string".into()));
    }
    let mut out = ComplexMatrix::identity(1, 1);
    for ch in s.chars() {
        let p = match ch.to_ascii_uppercase() {
            'I' => identity(2),
            'X' => sigma_x(),
            'Y' => sigma_y(),
            'Z' => sigma_z(),
            other => return Err(Error::Parse(format!("unknown Pauli '{other}'"))),
        };
        out = kron(&out, &p);
    }
    Ok(out)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `a ⊗ a ⊗ … ⊗ a` with `k` factors; `k = 0` gives the 1×1 identity.
pub fn tensor_power(a: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1, 1);
    for _ in 0..k {
        out = kron(&out, a);
    }
    out
}

/// Hilbert-Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// Largest entrywise modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Partial trace of `m` over the tensor factors not listed in `keep`.
///
/// `dims` lists the factor dimensions in order; `keep` is the set of factor
/// indices that survive, in any order (output keeps the original order).
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    if m.nrows() != total {
        return Err(Error::DimensionMismatch { expected: total, got: m.nrows() });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!("factor index {bad} out of range")));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|i| keep.contains(&i)).collect();
    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let traced_dims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // strides of each factor in the full index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_pos: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).collect();
    let traced_pos: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).collect();

    let offset = |idx: usize, pos: &[usize], fdims: &[usize]| -> usize {
        let mut rem = idx;
        let mut off = 0;
        for (p, &fd) in pos.iter().zip(fdims.iter()).rev() {
            off += (rem % fd) * strides[*p];
            rem /= fd;
        }
        off
    };
    let kept_off: Vec<usize> = (0..dk).map(|i| offset(i, &kept_pos, &kept_dims)).collect();
    let traced_off: Vec<usize> = (0..dt).map(|t| offset(t, &traced_pos, &traced_dims)).collect();

    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m[(kept_off[i] + t, kept_off[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Hermitian operator; entries symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Symmetrizes `(M + M†)/2`, rejecting inputs whose correction exceeds the
    /// configured threshold.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().symmetrize)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = hermitian_deviation(&m);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without a deviation check. Used on values that are
    /// Hermitian by construction up to rounding.
    pub(crate) fn symmetrized(m: ComplexMatrix) -> Self {
        let mut h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        for i in 0..h.nrows() {
            h[(i, i)].im = 0.0;
        }
        Self { matrix: h }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: identity(d) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { matrix: &self.matrix * C64::new(s, 0.0) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix + &other.matrix }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix - &other.matrix }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::symmetrized(kron(&self.matrix, &other.matrix))
    }

    /// Complex conjugate, which equals the transpose for Hermitian matrices.
    pub fn transpose(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> f64 {
        hs_inner(&self.matrix, &other.matrix).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian(self).0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Unit-trace positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let tol = Tolerances::default();
        let op = HermitianOperator::new(m)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = op.min_eigenvalue();
        if min < -tol.psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { op })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { op: psi.projector() }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { op: HermitianOperator::identity(d).scale(1.0 / d as f64) }
    }

    /// Qubit state `(𝟙 + x σx + y σy + z σz) / 2`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !norm.is_finite() || norm > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!("Bloch vector norm {norm} > 1")));
        }
        let m = (identity(2)
            + sigma_x() * c(r[0], 0.)
            + sigma_y() * c(r[1], 0.)
            + sigma_z() * c(r[2], 0.))
            * c(0.5, 0.);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    /// `ρ^{⊗k}`.
    pub fn tensor_power(&self, k: usize) -> Self {
        Self { op: HermitianOperator::symmetrized(tensor_power(self.matrix(), k)) }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { op: self.op.kron(&other.op) }
    }

    pub fn purity(&self) -> f64 {
        self.op.inner(&self.op)
    }

    /// The state vector when `Tr ρ² ≥ 1 − tol`, up to a global phase.
    pub fn pure_state(&self, tol: f64) -> Option<PureState> {
        if self.purity() < 1.0 - tol {
            return None;
        }
        let (_, vecs) = eig_hermitian(&self.op);
        PureState::normalized(vecs.column(0).into_owned()).ok()
    }
}

impl From<DensityMatrix> for HermitianOperator {
    fn from(d: DensityMatrix) -> Self {
        d.op
    }
}

impl AsRef<HermitianOperator> for DensityMatrix {
    fn as_ref(&self) -> &HermitianOperator {
        &self.op
    }
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<C64>,
}

impl PureState {
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if (n - 1.0).abs() > Tolerances::default().norm {
            return Err(Error::InvalidState(format!("state norm {n} != 1")));
        }
        Ok(Self { amps })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(Self { amps: amps / C64::new(n, 0.0) })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::normalized(DVector::from_column_slice(amps))
    }

    /// Computational basis state `|i⟩` in `C^d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = DVector::zeros(d);
        v[i] = C64::new(1.0, 0.0);
        Self { amps: v }
    }

    pub fn zero() -> Self {
        Self::basis(2, 0)
    }

    pub fn one() -> Self {
        Self::basis(2, 1)
    }

    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amps: DVector::from_column_slice(&[c(s, 0.), c(s, 0.)]) }
    }

    pub fn minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amps: DVector::from_column_slice(&[c(s, 0.), c(-s, 0.)]) }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(&self.amps * self.amps.adjoint())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { amps: self.amps.kronecker(&other.amps) }
    }

    pub fn tensor_power(&self, k: usize) -> Self {
        let mut v = DVector::from_element(1, C64::new(1.0, 0.0));
        for _ in 0..k {
            v = v.kronecker(&self.amps);
        }
        Self { amps: v }
    }

    pub fn with_phase(&self, phase: C64) -> Self {
        Self { amps: &self.amps * phase }
    }
}

/// Eigenvalues in descending order and the matching unitary of eigenvectors
/// (columns).
pub fn eig_hermitian(h: &HermitianOperator) -> (DVector<f64>, ComplexMatrix) {
    let eig = h.matrix().clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `‖H‖₁ = Σ|λᵢ|`.
pub fn trace_norm(h: &HermitianOperator) -> f64 {
    eig_hermitian(h).0.iter().map(|l| l.abs()).sum()
}

/// Projector onto the span of eigenvectors whose eigenvalue satisfies `pred`.
pub fn spectral_projector(h: &HermitianOperator, pred: impl Fn(f64) -> bool) -> HermitianOperator {
    let (vals, vecs) = eig_hermitian(h);
    let d = h.dim();
    let mut p = ComplexMatrix::zeros(d, d);
    for (i, &l) in vals.iter().enumerate() {
        if pred(l) {
            let v = vecs.column(i);
            p += v * v.adjoint();
        }
    }
    HermitianOperator::symmetrized(p)
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn real_embedding(h: &HermitianOperator) -> DMatrix<f64> {
    let d = h.dim();
    let m = h.matrix();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + d, j + d)] = z.re;
            out[(i, j + d)] = -z.im;
            out[(i + d, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`real_embedding`], projecting a general real symmetric matrix
/// onto the embedded subspace first.
pub fn real_unembedding(x: &DMatrix<f64>) -> HermitianOperator {
    let d = x.nrows() / 2;
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let re = 0.5 * (x[(i, j)] + x[(i + d, j + d)]);
            let im = 0.5 * (x[(i + d, j)] - x[(i, j + d)]);
            m[(i, j)] = c(re, im);
        }
    }
    HermitianOperator::symmetrized(m)
}

/// Orthonormal basis (Hilbert-Schmidt) of the `d²`-dimensional real space of
/// `d×d` Hermitian matrices: diagonal units, then symmetric and antisymmetric
/// off-diagonal pairs scaled by `1/√2`.
pub fn hermitian_basis(d: usize) -> Vec<HermitianOperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = c(1., 0.);
        out.push(HermitianOperator { matrix: m });
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(i, j)] = c(s, 0.);
            m[(j, i)] = c(s, 0.);
            out.push(HermitianOperator { matrix: m });
            let mut m = ComplexMatrix::zeros(d, d);
            m[(i, j)] = c(0., -s);
            m[(j, i)] = c(0., s);
            out.push(HermitianOperator { matrix: m });
        }
    }
    out
}

/// Traceless part of [`hermitian_basis`]: `d² − 1` orthonormal elements
/// spanning the complement of the identity.
pub fn traceless_hermitian_basis(d: usize) -> Vec<HermitianOperator> {
    let mut out = Vec::with_capacity(d * d - 1);
    // Diagonal part: orthonormal vectors orthogonal to (1,…,1).
    for k in 1..d {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..k {
            m[(i, i)] = c(1.0 / norm, 0.);
        }
        m[(k, k)] = c(-(k as f64) / norm, 0.);
        out.push(HermitianOperator { matrix: m });
    }
    out.extend(hermitian_basis(d).into_iter().skip(d));
    out
}

/// Coordinates of `h` in [`hermitian_basis`]: `Tr(Bₐ h)`.
pub fn hermitian_coordinates(h: &HermitianOperator) -> Vec<f64> {
    hermitian_basis(h.dim()).iter().map(|b| b.inner(h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && max_abs(&(a - b)) <= tol
    }

    #[test]
    fn kron_identities_and_paulis() {
        assert!(close(&kron(&identity(2), &identity(2)), &identity(4), 0.0));
        let k = kron(&sigma_x(), &sigma_z());
        let z = sigma_z();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(k[(i, 2 + j)], z[(i, j)]);
                assert_eq!(k[(2 + i, j)], z[(i, j)]);
                assert_eq!(k[(i, j)], c(0., 0.));
            }
        }
    }

    #[test]
    fn kron_of_projectors_is_projector_of_kron() {
        let zero = PureState::zero();
        let plus = PureState::plus();
        let lhs = kron(zero.projector().matrix(), plus.projector().matrix());
        let rhs = zero.kron(&plus).projector();
        assert!(close(&lhs, rhs.matrix(), 1e-15));
    }

    #[test]
    fn partial_trace_examples() {
        let rho = PureState::plus().projector();
        let sigma = DensityMatrix::from_bloch([0.1, -0.2, 0.3]).unwrap();
        let joint = kron(rho.matrix(), sigma.matrix());
        let r = partial_trace(&joint, &[2, 2], &[0]).unwrap();
        assert!(close(&r, rho.matrix(), 1e-14));
        let s = partial_trace(&joint, &[2, 2], &[1]).unwrap();
        assert!(close(&s, sigma.matrix(), 1e-14));

        // unnormalized maximally entangled vector
        let mut omega = DVector::zeros(4);
        omega[0] = c(1., 0.);
        omega[3] = c(1., 0.);
        let proj = &omega * omega.adjoint();
        assert!(close(&partial_trace(&proj, &[2, 2], &[0]).unwrap(), &identity(2), 1e-15));

        let full = partial_trace(&joint, &[2, 2], &[]).unwrap();
        assert_eq!(full.shape(), (1, 1));
        assert!((full[(0, 0)] - c(1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_three_factors_middle() {
        let a = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        let cst = DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap();
        let m = kron(&kron(a.matrix(), b.matrix()), cst.matrix());
        let ac = partial_trace(&m, &[2, 3, 2], &[0, 2]).unwrap();
        assert!(close(&ac, &kron(a.matrix(), cst.matrix()), 1e-14));
        let only_b = partial_trace(&m, &[2, 3, 2], &[1]).unwrap();
        assert!(close(&only_b, b.matrix(), 1e-14));
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch { expected: 6, got: 4 })
        ));
    }

    #[test]
    fn eig_examples() {
        let (vals, vecs) = eig_hermitian(&HermitianOperator::new(sigma_z()).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[1] + 1.0).abs() < 1e-15);
        assert!((vecs[(0, 0)].norm() - 1.0).abs() < 1e-14);

        let (vals, vecs) = eig_hermitian(&PureState::plus().projector());
        assert!((vals[0] - 1.0).abs() < 1e-14 && vals[1].abs() < 1e-14);
        let top = PureState::new(vecs.column(0).into_owned()).unwrap();
        assert!((top.fidelity(&PureState::plus()) - 1.0).abs() < 1e-14);

        let diff = PureState::zero().projector().sub(&PureState::plus().projector());
        let (vals, _) = eig_hermitian(&diff);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vals[0] - r).abs() < 1e-14 && (vals[1] + r).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&HermitianOperator::new(sigma_z()).unwrap()) - 2.0).abs() < 1e-14);
        let rho = DensityMatrix::from_bloch([0.3, 0.4, -0.5]).unwrap();
        assert!((trace_norm(rho.as_operator()) - 1.0).abs() < 1e-14);
        let diff = PureState::zero().projector().sub(&PureState::plus().projector());
        assert!((trace_norm(&diff) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn embedding_examples() {
        let real = HermitianOperator::new(sigma_x()).unwrap();
        let e = real_embedding(&real);
        assert_eq!(e.view((0, 2), (2, 2)).iter().filter(|x| **x != 0.0).count(), 0);
        let sy = HermitianOperator::new(sigma_y()).unwrap();
        let e = real_embedding(&sy);
        let mut ev: Vec<f64> = e.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let plus = PureState::plus().projector();
        let min = real_embedding(&plus).symmetric_eigen().eigenvalues.min();
        assert!(min > -1e-14);
        assert!((real_embedding(&plus).trace() - 2.0).abs() < 1e-14);
        assert_eq!(real_unembedding(&real_embedding(&sy)), sy);
    }

    #[test]
    fn hermitian_rejects_far_from_hermitian() {
        let mut m = sigma_x();
        m[(0, 1)] = c(1.0 + 1e-6, 0.0);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
        let mut m = sigma_x();
        m[(0, 1)] = c(1.0 + 1e-10, 0.0);
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
    }

    #[test]
    fn bases_are_orthonormal() {
        for d in 1..5 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            let t = traceless_hermitian_basis(d);
            assert_eq!(t.len(), d * d - 1);
            for (i, x) in b.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x.inner(y) - want).abs() < 1e-14);
                }
            }
            for (i, x) in t.iter().enumerate() {
                assert!(x.trace().abs() < 1e-14);
                for (j, y) in t.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x.inner(y) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(identity(2)).is_err());
        assert!(DensityMatrix::from_bloch([1.0, 1.0, 0.0]).is_err());
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.5, 0.);
        m[(1, 1)] = c(-0.5, 0.);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn pauli_strings() {
        let xx = pauli_string("XX").unwrap();
        assert!(close(&xx, &kron(&sigma_x(), &sigma_x()), 0.0));
        assert!(pauli_string("XQ").is_err());
    }
}
