//! Choi representation of linear maps between operator spaces, HPTP/CPTP
//! predicates and quasiprobability decompositions.
//!
//! Convention: for a map `Λ` from `d_in × d_in` to `d_out × d_out` operators
//! the Choi matrix is `J = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` on `R ⊗ Out` (input
//! reference factor first), and `Λ(ρ) = Tr_R[(ρᵀ ⊗ 𝟙) J]`. The transpose is
//! taken in the computational basis everywhere.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    c, eig_hermitian, hermitian_basis, max_abs, partial_trace, traceless_hermitian_basis, ComplexMatrix,
    HermitianOperator, C64,
};
use crate::sdp::{self, hermitian_block, hermitian_term, Constraint, SdpProblem, SdpStatus, SolverOptions, SparseSym};

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    j: HermitianOperator,
}

impl ChoiMatrix {
    pub fn new(dim_in: usize, dim_out: usize, j: HermitianOperator) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidArgument("zero dimension".into()));
        }
        if j.dim() != dim_in * dim_out {
            return Err(Error::DimensionMismatch { expected: dim_in * dim_out, got: j.dim() });
        }
        Ok(Self { dim_in, dim_out, j })
    }

    /// Choi matrix `|Ω⟩⟨Ω|` of the identity channel, `|Ω⟩ = Σ|ii⟩` unnormalized.
    pub fn identity(d: usize) -> Self {
        Self::from_unit_images(d, d, |i, j| {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(i, j)] = c(1., 0.);
            m
        })
        .expect("identity is Hermitian")
    }

    /// Builds `Σ_ij |i⟩⟨j| ⊗ image(i, j)` where `image(i, j) = Λ(|i⟩⟨j|)`.
    pub fn from_unit_images(
        dim_in: usize,
        dim_out: usize,
        image: impl Fn(usize, usize) -> ComplexMatrix,
    ) -> Result<Self> {
        let n = dim_in * dim_out;
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let blk = image(i, j);
                if blk.shape() != (dim_out, dim_out) {
                    return Err(Error::DimensionMismatch { expected: dim_out, got: blk.nrows() });
                }
                m.view_mut((i * dim_out, j * dim_out), (dim_out, dim_out)).copy_from(&blk);
            }
        }
        Self::new(dim_in, dim_out, HermitianOperator::new(m)?)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.j
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.j.matrix()
    }

    /// `Λ(|i⟩⟨j|)`.
    pub fn unit_image(&self, i: usize, j: usize) -> ComplexMatrix {
        let d = self.dim_out;
        self.j.matrix().view((i * d, j * d), (d, d)).into_owned()
    }

    /// `Λ(X)` for an arbitrary (not necessarily Hermitian) input.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch { expected: self.dim_in, got: x.nrows() });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let w = x[(i, j)];
                if w != C64::new(0.0, 0.0) {
                    out += self.unit_image(i, j) * w;
                }
            }
        }
        Ok(out)
    }

    /// `Tr_out(J)`, the `d_in × d_in` marginal on the reference factor.
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace(self.j.matrix(), &[self.dim_in, self.dim_out], &[0]).expect("dims are consistent")
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim_in: self.dim_in, dim_out: self.dim_out, j: self.j.scale(s) }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { dim_in: self.dim_in, dim_out: self.dim_out, j: self.j.sub(&other.j) })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { dim_in: self.dim_in, dim_out: self.dim_out, j: self.j.add(&other.j) })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::DimensionMismatch { expected: self.j.dim(), got: other.j.dim() });
        }
        Ok(())
    }
}

/// `Λ(ρ) = Tr_R[(ρᵀ ⊗ 𝟙) J]`.
pub fn apply_choi(j: &ChoiMatrix, rho: impl AsRef<HermitianOperator>) -> Result<HermitianOperator> {
    let rho = rho.as_ref();
    if rho.dim() != j.dim_in {
        return Err(Error::DimensionMismatch { expected: j.dim_in, got: rho.dim() });
    }
    Ok(HermitianOperator::symmetrized(j.apply_matrix(rho.matrix())?))
}

/// `J = Σ_k (𝟙 ⊗ K_k)|Ω⟩⟨Ω|(𝟙 ⊗ K_k)†`, each `K_k` of shape `dim_out × dim_in`.
pub fn choi_from_kraus(kraus: &[ComplexMatrix], dim_in: usize, dim_out: usize) -> Result<ChoiMatrix> {
    for k in kraus {
        if k.shape() != (dim_out, dim_in) {
            return Err(Error::InvalidArgument(format!(
                "Kraus operator of shape {:?}, expected ({dim_out}, {dim_in})",
                k.shape()
            )));
        }
    }
    ChoiMatrix::from_unit_images(dim_in, dim_out, |i, j| {
        let mut acc = ComplexMatrix::zeros(dim_out, dim_out);
        for k in kraus {
            acc += k.column(i) * k.column(j).adjoint();
        }
        acc
    })
}

/// Diagnostics from [`is_hptp`] / [`is_cptp`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelCheck {
    pub hermitian_deviation: f64,
    /// `‖Tr_out(J) − 𝟙‖_max`.
    pub trace_deviation: f64,
    /// Smallest eigenvalue of `J`; only computed for the CP check.
    pub min_eigenvalue: Option<f64>,
    pub ok: bool,
}

fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_hptp(j: &ChoiMatrix, tol: f64) -> ChannelCheck {
    let herm = hermitian_deviation(j.matrix());
    let marginal = j.input_marginal();
    let tp = max_abs(&(marginal - ComplexMatrix::identity(j.dim_in, j.dim_in)));
    ChannelCheck { hermitian_deviation: herm, trace_deviation: tp, min_eigenvalue: None, ok: herm < tol && tp < tol }
}

pub fn is_cptp(j: &ChoiMatrix, tol: f64) -> ChannelCheck {
    let mut check = is_hptp(j, tol);
    let min = j.operator().min_eigenvalue();
    check.min_eigenvalue = Some(min);
    check.ok = check.ok && min >= -tol;
    check
}

/// `second ∘ first`.
pub fn compose(first: &ChoiMatrix, second: &ChoiMatrix) -> Result<ChoiMatrix> {
    if first.dim_out != second.dim_in {
        return Err(Error::DimensionMismatch { expected: second.dim_in, got: first.dim_out });
    }
    let mut images = Vec::with_capacity(first.dim_in * first.dim_in);
    for i in 0..first.dim_in {
        for j in 0..first.dim_in {
            images.push(second.apply_matrix(&first.unit_image(i, j))?);
        }
    }
    let d = first.dim_in;
    ChoiMatrix::from_unit_images(d, second.dim_out, |i, j| images[i * d + j].clone())
}

/// Linear map fixed by `inputs[i] ↦ images[i]`; the inputs must span the full
/// Hermitian operator space of their dimension.
pub fn map_from_basis_images(inputs: &[HermitianOperator], images: &[HermitianOperator]) -> Result<ChoiMatrix> {
    map_from_basis_images_with(inputs, images, &Tolerances::default())
}

pub fn map_from_basis_images_with(
    inputs: &[HermitianOperator],
    images: &[HermitianOperator],
    tol: &Tolerances,
) -> Result<ChoiMatrix> {
    if inputs.is_empty() || inputs.len() != images.len() {
        return Err(Error::InvalidArgument(format!("{} inputs vs {} images", inputs.len(), images.len())));
    }
    let d = inputs[0].dim();
    let dout = images[0].dim();
    if let Some(x) = inputs.iter().find(|x| x.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
    }
    if let Some(y) = images.iter().find(|y| y.dim() != dout) {
        return Err(Error::DimensionMismatch { expected: dout, got: y.dim() });
    }
    let n = inputs.len();
    let gram = DMatrix::from_fn(n, n, |a, b| inputs[a].inner(&inputs[b]));
    let eig = gram.clone().symmetric_eigen();
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let cutoff = tol.rank * smax;
    let rank = eig.eigenvalues.iter().filter(|&&v| v > cutoff).count();
    if rank < d * d {
        return Err(Error::RankDeficient { rank, needed: d * d });
    }
    // pseudo-inverse of the Gram matrix on its numerical range
    let mut pinv = DMatrix::<f64>::zeros(n, n);
    for (k, &v) in eig.eigenvalues.iter().enumerate() {
        if v > cutoff {
            let col = eig.eigenvectors.column(k);
            pinv += col * col.transpose() / v;
        }
    }
    let pinv_c = pinv.map(|x| C64::new(x, 0.0));
    let j = ChoiMatrix::from_unit_images(d, dout, |i, jj| {
        // |i⟩⟨j| = Σ_a c_a X_a with c = G⁺ t, t_a = Tr(X_a |i⟩⟨j|) = (X_a)_{ji}
        let t = nalgebra::DVector::from_iterator(n, inputs.iter().map(|x| x.matrix()[(jj, i)]));
        let coef = &pinv_c * t;
        let mut acc = ComplexMatrix::zeros(dout, dout);
        for (a, y) in images.iter().enumerate() {
            acc += y.matrix() * coef[a];
        }
        acc
    })?;
    for (x, y) in inputs.iter().zip(images) {
        let got = apply_choi(&j, x)?;
        let err = max_abs(&(got.matrix() - y.matrix()));
        if err > 1e-9 * (1.0 + max_abs(y.matrix())) {
            return Err(Error::InvalidArgument(format!("images are not consistent with a linear map ({err:.2e})")));
        }
    }
    Ok(j)
}

/// `Λ̃ = λ₊Λ₊ − λ₋Λ₋` with CPTP branches.
#[derive(Debug, Clone, PartialEq)]
pub struct QpDecomposition {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub choi_plus: ChoiMatrix,
    pub choi_minus: ChoiMatrix,
}

/// Tolerance for branch CPTP checks on solver-produced decompositions.
pub const BRANCH_TOL: f64 = 1e-6;

impl QpDecomposition {
    pub fn new(lambda_plus: f64, lambda_minus: f64, choi_plus: ChoiMatrix, choi_minus: ChoiMatrix) -> Result<Self> {
        Self::with_tolerance(lambda_plus, lambda_minus, choi_plus, choi_minus, BRANCH_TOL)
    }

    pub fn with_tolerance(
        lambda_plus: f64,
        lambda_minus: f64,
        choi_plus: ChoiMatrix,
        choi_minus: ChoiMatrix,
        tol: f64,
    ) -> Result<Self> {
        if lambda_plus < 0.0 || lambda_minus < 0.0 {
            return Err(Error::InvalidArgument("negative quasiprobability weight".into()));
        }
        if (lambda_plus - lambda_minus - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "λ₊ − λ₋ = {} (expected 1)",
                lambda_plus - lambda_minus
            )));
        }
        choi_plus.check_same_shape(&choi_minus)?;
        for (name, b) in [("plus", &choi_plus), ("minus", &choi_minus)] {
            let chk = is_cptp(b, tol);
            if !chk.ok {
                return Err(Error::InvalidArgument(format!("{name} branch is not CPTP: {chk:?}")));
            }
        }
        Ok(Self { lambda_plus, lambda_minus, choi_plus, choi_minus })
    }

    /// A CPTP map as a trivial decomposition `(1, 0)`.
    pub fn from_cptp(j: ChoiMatrix) -> Result<Self> {
        Self::new(1.0, 0.0, j.clone(), j)
    }

    pub fn cost(&self) -> f64 {
        self.lambda_plus + self.lambda_minus
    }

    pub fn dim_in(&self) -> usize {
        self.choi_plus.dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.choi_plus.dim_out()
    }

    /// Choi matrix of the virtual map `λ₊J₊ − λ₋J₋`.
    pub fn combined(&self) -> ChoiMatrix {
        self.choi_plus
            .scale(self.lambda_plus)
            .sub(&self.choi_minus.scale(self.lambda_minus))
            .expect("branches share a shape")
    }

    pub fn apply(&self, rho: impl AsRef<HermitianOperator>) -> Result<HermitianOperator> {
        let rho = rho.as_ref();
        let p = apply_choi(&self.choi_plus, rho)?;
        let m = apply_choi(&self.choi_minus, rho)?;
        Ok(p.scale(self.lambda_plus).sub(&m.scale(self.lambda_minus)))
    }

    /// `(post ∘ Λ₊, post ∘ Λ₋)` with the same weights; `post` must be CPTP.
    pub fn then(&self, post: &ChoiMatrix) -> Result<Self> {
        Self::new(
            self.lambda_plus,
            self.lambda_minus,
            compose(&self.choi_plus, post)?,
            compose(&self.choi_minus, post)?,
        )
    }

    /// `(Λ₊ ∘ pre, Λ₋ ∘ pre)`; `pre` must be CPTP.
    pub fn after(&self, pre: &ChoiMatrix) -> Result<Self> {
        Self::new(
            self.lambda_plus,
            self.lambda_minus,
            compose(pre, &self.choi_plus)?,
            compose(pre, &self.choi_minus)?,
        )
    }
}

pub fn qpd_cost(q: &QpDecomposition) -> f64 {
    q.cost()
}

/// Result of [`optimal_qpd`].
#[derive(Debug, Clone)]
pub struct OptimalQpd {
    pub qpd: QpDecomposition,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Cheapest decomposition of an HPTP map: minimizes `λ₊ + λ₋` over
/// `J = J₊ − J₋`, `J± ⪰ 0`, `Tr_out J± = λ±𝟙`.
pub fn optimal_qpd(j: &ChoiMatrix, opts: &SolverOptions) -> Result<OptimalQpd> {
    let check = is_hptp(j, 1e-8);
    if !check.ok {
        return Err(Error::InvalidArgument(format!("map is not HPTP: {check:?}")));
    }
    let din = j.dim_in();
    let n = j.operator().dim();
    let blk = 2 * n;
    let mut p = SdpProblem::new(vec![blk, blk], 0);
    p.objective = vec![SparseSym::identity(blk, 1.0 / (2.0 * din as f64)); 2];
    for e in hermitian_basis(n) {
        let term = hermitian_term(&e);
        let mut neg = term.clone();
        neg.entries.iter_mut().for_each(|x| x.2 = -x.2);
        p.add_constraint(Constraint { blocks: vec![(0, term), (1, neg)], free: vec![], rhs: e.inner(j.operator()) });
    }
    let id_out = HermitianOperator::identity(j.dim_out());
    for g in traceless_hermitian_basis(din) {
        let term = hermitian_term(&g.kron(&id_out));
        p.add_constraint(Constraint { blocks: vec![(0, term)], free: vec![], rhs: 0.0 });
    }
    let sol = sdp::solve(&p, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(Error::Solver(format!("{:?} after {} iterations", sol.status, sol.iterations)));
    }
    let jp = hermitian_block(&sol.x[0]);
    let jm = hermitian_block(&sol.x[1]);
    let target = is_cptp(j, BRANCH_TOL).ok.then_some(j);
    let qpd = qpd_from_branches(j.dim_in(), j.dim_out(), jp, jm, target)?;
    Ok(OptimalQpd { qpd, primal: sol.primal_obj, dual: sol.dual_obj, gap: sol.gap, iterations: sol.iterations })
}

/// Negative weights below this are treated as an exactly CPTP map.
const CPTP_WEIGHT: f64 = 1e-7;

/// Rescales an unnormalized CP block to an exactly trace-preserving map.
/// Returns the weight `Tr J / d_in` and `(A ⊗ 𝟙) J (A ⊗ 𝟙) / λ` with
/// `A = (Tr_out J / λ)^{-1/2}`, or `None` for a vanishing block.
pub(crate) fn tp_normalize(j: &HermitianOperator, dim_in: usize, dim_out: usize) -> Result<Option<(f64, ChoiMatrix)>> {
    let lambda = j.trace() / dim_in as f64;
    if lambda <= 0.0 {
        return Ok(None);
    }
    let raw = ChoiMatrix::new(dim_in, dim_out, j.scale(1.0 / lambda))?;
    let marginal = HermitianOperator::symmetrized(raw.input_marginal());
    let (vals, vecs) = eig_hermitian(&marginal);
    if vals.iter().any(|&v| v < 1e-12) {
        return Ok(Some((lambda, raw)));
    }
    let inv_sqrt = DMatrix::from_diagonal(&vals.map(|v| C64::new(1.0 / v.sqrt(), 0.0)));
    let a = &vecs * inv_sqrt * vecs.adjoint();
    let big = a.kronecker(&ComplexMatrix::identity(dim_out, dim_out));
    let fixed = HermitianOperator::symmetrized(&big * raw.matrix() * &big);
    Ok(Some((lambda, ChoiMatrix::new(dim_in, dim_out, fixed)?)))
}

/// Decomposition from unnormalized solver blocks `J₊, J₋`. Each branch is
/// normalized to a channel, `λ₋` is read from the trace of `J₋` and
/// `λ₊ = 1 + λ₋`. A negligible `λ₋` collapses to `(1, 0)` with the `J₊`
/// branch, or with `cptp_target` itself when one is supplied.
pub(crate) fn qpd_from_branches(
    dim_in: usize,
    dim_out: usize,
    jp: HermitianOperator,
    jm: HermitianOperator,
    cptp_target: Option<&ChoiMatrix>,
) -> Result<QpDecomposition> {
    let plus = tp_normalize(&jp, dim_in, dim_out)?
        .ok_or_else(|| Error::Solver("positive branch vanished".into()))?
        .1;
    let minus = tp_normalize(&jm, dim_in, dim_out)?;
    match minus {
        Some((lambda_minus, minus)) if lambda_minus >= CPTP_WEIGHT => {
            QpDecomposition::new(1.0 + lambda_minus, lambda_minus, plus, minus)
        }
        _ => match cptp_target {
            Some(t) => QpDecomposition::from_cptp(t.clone()),
            None => QpDecomposition::from_cptp(plus),
        },
    }
}

/// Eigenvalues of a Choi matrix, descending.
pub fn choi_spectrum(j: &ChoiMatrix) -> Vec<f64> {
    eig_hermitian(j.operator()).0.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, kron, sigma_x, sigma_y, sigma_z, DensityMatrix, PureState};

    /// Virtual cloner fixed by `𝟙 ↦ 𝟙⊗𝟙/2`, `σᵢ ↦ (σᵢ⊗𝟙 + 𝟙⊗σᵢ + σᵢ⊗σᵢ)/2`.
    fn zero_plus_cloner() -> ChoiMatrix {
        let i2 = identity(2);
        let mut inputs = vec![HermitianOperator::identity(2)];
        let mut images = vec![HermitianOperator::new(kron(&i2, &i2) * c(0.5, 0.)).unwrap()];
        for s in [sigma_x(), sigma_y(), sigma_z()] {
            inputs.push(HermitianOperator::new(s.clone()).unwrap());
            let img = (kron(&s, &i2) + kron(&i2, &s) + kron(&s, &s)) * c(0.5, 0.);
            images.push(HermitianOperator::new(img).unwrap());
        }
        map_from_basis_images(&inputs, &images).unwrap()
    }

    fn close(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> bool {
        max_abs(&(a.matrix() - b.matrix())) < tol
    }

    #[test]
    fn identity_channel_applies_as_identity() {
        let id = ChoiMatrix::identity(2);
        let rho = DensityMatrix::from_bloch([0.2, -0.3, 0.4]).unwrap();
        assert!(close(&apply_choi(&id, &rho).unwrap(), rho.as_operator(), 1e-15));
        assert!(is_cptp(&id, 1e-12).ok);
    }

    #[test]
    fn apply_matches_partial_trace_formula() {
        let j = zero_plus_cloner();
        let rho = DensityMatrix::from_bloch([0.1, 0.5, -0.2]).unwrap();
        let lhs = apply_choi(&j, &rho).unwrap();
        let big = kron(&rho.matrix().transpose(), &identity(4)) * j.matrix();
        let rhs = partial_trace(&big, &[2, 4], &[1]).unwrap();
        assert!(max_abs(&(lhs.matrix() - rhs)) < 1e-14);
    }

    #[test]
    fn zero_plus_cloner_clones() {
        let j = zero_plus_cloner();
        for psi in [PureState::zero(), PureState::plus()] {
            let rho = psi.projector();
            let out = apply_choi(&j, &rho).unwrap();
            assert!(close(&out, &rho.kron(&rho), 1e-14));
        }
        assert!(is_hptp(&j, 1e-12).ok);
        let cp = is_cptp(&j, 1e-9);
        assert!(!cp.ok);
        assert!(cp.min_eigenvalue.unwrap() < -0.1);
    }

    #[test]
    fn zero_choi_is_not_tp() {
        let j = ChoiMatrix::new(2, 2, HermitianOperator::zeros(4)).unwrap();
        assert!(!is_hptp(&j, 1e-9).ok);
    }

    #[test]
    fn kraus_examples() {
        let id = choi_from_kraus(&[identity(2)], 2, 2).unwrap();
        assert_eq!(id, ChoiMatrix::identity(2));

        let x = choi_from_kraus(&[sigma_x()], 2, 2).unwrap();
        let out = apply_choi(&x, PureState::zero().projector()).unwrap();
        assert!(close(&out, &PureState::one().projector(), 1e-15));

        let mut k0 = ComplexMatrix::zeros(2, 2);
        k0[(0, 0)] = c(1., 0.);
        let mut k1 = ComplexMatrix::zeros(2, 2);
        k1[(0, 1)] = c(1., 0.);
        let reset = choi_from_kraus(&[k0, k1], 2, 2).unwrap();
        assert!(is_cptp(&reset, 1e-12).ok);
        for r in [[0.0, 0.0, 1.0], [0.3, 0.3, -0.6], [0.0, 0.0, 0.0]] {
            let out = apply_choi(&reset, DensityMatrix::from_bloch(r).unwrap()).unwrap();
            assert!(close(&out, &PureState::zero().projector(), 1e-15));
        }
        assert!(choi_from_kraus(&[identity(3)], 2, 2).is_err());
    }

    #[test]
    fn basis_images_identity_and_depolarizing() {
        let paulis: Vec<HermitianOperator> = [identity(2), sigma_x(), sigma_y(), sigma_z()]
            .into_iter()
            .map(|m| HermitianOperator::new(m).unwrap())
            .collect();
        let id = map_from_basis_images(&paulis, &paulis).unwrap();
        assert!(max_abs(&(id.matrix() - ChoiMatrix::identity(2).matrix())) < 1e-14);

        let images: Vec<HermitianOperator> =
            paulis.iter().map(|p| HermitianOperator::identity(4).scale(p.trace() / 4.0)).collect();
        let dep = map_from_basis_images(&paulis, &images).unwrap();
        let want = HermitianOperator::identity(8).scale(0.25);
        assert!(close(dep.operator(), &want, 1e-14));
        assert!(is_cptp(&dep, 1e-12).ok);
    }

    #[test]
    fn basis_images_rank_deficient() {
        let inputs = vec![PureState::zero().projector(), PureState::plus().projector()];
        let images = inputs.clone();
        assert!(matches!(map_from_basis_images(&inputs, &images), Err(Error::RankDeficient { rank: 2, needed: 4 })));
    }

    #[test]
    fn qpd_cost_examples() {
        let id = ChoiMatrix::identity(2);
        assert_eq!(qpd_cost(&QpDecomposition::from_cptp(id.clone()).unwrap()), 1.0);
        let q = QpDecomposition::new(1.5, 0.5, id.clone(), id).unwrap();
        assert_eq!(qpd_cost(&q), 2.0);
        let xi = 3f64.sqrt();
        let q = QpDecomposition::new((xi + 1.0) / 2.0, (xi - 1.0) / 2.0, q.choi_plus.clone(), q.choi_minus.clone())
            .unwrap();
        assert!((q.cost() - xi).abs() < 1e-15);
    }

    #[test]
    fn qpd_rejects_bad_weights() {
        let id = ChoiMatrix::identity(2);
        assert!(QpDecomposition::new(1.5, 0.4, id.clone(), id.clone()).is_err());
        let j = zero_plus_cloner();
        assert!(QpDecomposition::new(1.0, 0.0, j.clone(), j).is_err());
    }

    #[test]
    fn optimal_qpd_of_cptp_map_costs_one() {
        let id = ChoiMatrix::identity(2);
        let r = optimal_qpd(&id, &SolverOptions::default()).unwrap();
        assert_eq!(r.qpd.lambda_minus, 0.0);
        assert!((r.qpd.cost() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn optimal_qpd_of_canonical_pure_map() {
        // ξ = √((1−F′)/(1−F)), μ = √(F′/F); F = 1/2, F′ = 1/4
        let (f, fp) = (0.5f64, 0.25f64);
        let xi = ((1.0 - fp) / (1.0 - f)).sqrt();
        let mu = (fp / f).sqrt();
        let kp = [identity(2) * c(((xi + mu) / (xi + 1.0)).sqrt(), 0.), sigma_x() * c(((1.0 - mu) / (xi + 1.0)).sqrt(), 0.)];
        let jp = choi_from_kraus(&kp, 2, 2).unwrap();
        let jm = choi_from_kraus(&[sigma_z()], 2, 2).unwrap();
        let q = QpDecomposition::new((xi + 1.0) / 2.0, (xi - 1.0) / 2.0, jp, jm).unwrap();
        let r = optimal_qpd(&q.combined(), &SolverOptions::default()).unwrap();
        assert!((r.qpd.cost() - 1.5f64.sqrt()).abs() < 1e-6, "{}", r.qpd.cost());
        assert!(max_abs(&(r.qpd.combined().matrix() - q.combined().matrix())) < 1e-7);
        assert!(r.gap < 1e-6);
    }

    #[test]
    fn optimal_qpd_of_zero_plus_cloner() {
        let j = zero_plus_cloner();
        let r = optimal_qpd(&j, &SolverOptions::default()).unwrap();
        assert!(r.qpd.cost() >= 1.5f64.sqrt() - 1e-6);
        assert!(max_abs(&(r.qpd.combined().matrix() - j.matrix())) < 1e-7);
    }

    #[test]
    fn compose_matches_kraus_product() {
        let h = (sigma_x() + sigma_z()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.);
        let a = choi_from_kraus(std::slice::from_ref(&h), 2, 2).unwrap();
        let b = choi_from_kraus(&[sigma_y()], 2, 2).unwrap();
        let ab = compose(&a, &b).unwrap();
        let direct = choi_from_kraus(&[sigma_y() * h], 2, 2).unwrap();
        assert!(max_abs(&(ab.matrix() - direct.matrix())) < 1e-14);
    }
}
