use serde::Serialize;

use super::CloneProblem;
use crate::channels::{qpd_from_branches, QpDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, traceless_hermitian_basis, ComplexMatrix, HermitianOperator};
use crate::sdp::{
    self, hermitian_block, hermitian_term, verify_solution, Constraint, SdpProblem, SdpStatus, SolverOptions,
    SparseSym, VerificationReport,
};

fn negated(mut s: SparseSym) -> SparseSym {
    s.entries.iter_mut().for_each(|e| e.2 = -e.2);
    s
}

/// Primal cost SDP over `emb(J₊), emb(J₋)`.
///
/// Objective `(Tr J₊ + Tr J₋)/d_in = λ₊ + λ₋`. Rows: for each state and
/// each output Hermitian basis element `E`,
/// `Tr[(ρ_iᵀ ⊗ E)(J₊ − J₋)] = Tr(E ρ_i^{⊗n})`; for each traceless input
/// basis element `G` and each block, `Tr[(G ⊗ 𝟙) J±] = 0`. The scalars
/// `λ±` are eliminated through `Tr_out J± = λ±𝟙`.
pub fn primal_sdp(problem: &CloneProblem) -> Result<SdpProblem> {
    let din = problem.dim_in();
    let dout = problem.dim_out();
    let blk = 2 * din * dout;
    let mut p = SdpProblem::new(vec![blk, blk], 0);
    p.objective = vec![SparseSym::identity(blk, 1.0 / (2.0 * din as f64)); 2];
    let out_basis = hermitian_basis(dout);
    for (x, y) in problem.inputs().iter().zip(problem.targets()) {
        let xt = x.as_operator().transpose();
        for e in &out_basis {
            let term = hermitian_term(&xt.kron(e));
            let rhs = e.inner(y.as_operator());
            p.add_constraint(Constraint { blocks: vec![(0, term.clone()), (1, negated(term))], free: vec![], rhs });
        }
    }
    let id_out = HermitianOperator::identity(dout);
    for b in 0..2 {
        for g in traceless_hermitian_basis(din) {
            p.add_constraint(Constraint { blocks: vec![(b, hermitian_term(&g.kron(&id_out)))], free: vec![], rhs: 0.0 });
        }
    }
    Ok(p)
}

/// Dual cost SDP in standard form with free coordinates for `Y_i`, `M±`.
///
/// Variables are the coordinates of every `Y_i` in the output Hermitian
/// basis followed by those of `M₊` and `M₋` in the input basis. The two PSD
/// blocks hold `M₊ ⊗ 𝟙 − Σ ρ_iᵀ ⊗ Y_i` and `Σ ρ_iᵀ ⊗ Y_i − M₋ ⊗ 𝟙`, tied to
/// the free variables entry by entry. The objective is `−Σ Tr(ρ_i^{⊗n} Y_i)`
/// so the optimum is `−η`.
pub fn dual_sdp(problem: &CloneProblem) -> Result<SdpProblem> {
    let din = problem.dim_in();
    let dout = problem.dim_out();
    let d = din * dout;
    let m = problem.states.len();
    let out_basis = hermitian_basis(dout);
    let in_basis = hermitian_basis(din);
    let ny = dout * dout;
    let nm = din * din;
    let nfree = m * ny + 2 * nm;
    let id_out = HermitianOperator::identity(dout);
    let id_in = HermitianOperator::identity(din);

    // contribution of each free coordinate to S₁ = M₊⊗𝟙 − Σρᵀ⊗Y
    let mut contrib: Vec<HermitianOperator> = Vec::with_capacity(nfree);
    for x in problem.inputs() {
        let xt = x.as_operator().transpose();
        for e in &out_basis {
            contrib.push(xt.kron(e).scale(-1.0));
        }
    }
    for g in &in_basis {
        contrib.push(g.kron(&id_out));
    }
    for g in &in_basis {
        contrib.push(g.kron(&id_out));
    }
    let plus_start = m * ny;
    let minus_start = plus_start + nm;

    let mut p = SdpProblem::new(vec![2 * d, 2 * d], nfree);
    for (i, y) in problem.targets().iter().enumerate() {
        for (b, e) in out_basis.iter().enumerate() {
            p.free_objective[i * ny + b] = -e.inner(y.as_operator());
        }
    }
    let full_basis = hermitian_basis(d);
    for (blk, sign) in [(0usize, 1.0f64), (1, -1.0)] {
        for e in &full_basis {
            let mut free = Vec::new();
            for (c, t) in contrib.iter().enumerate() {
                let in_plus = (plus_start..minus_start).contains(&c);
                let in_minus = c >= minus_start;
                // S₁ uses M₊, S₂ = −(M₋⊗𝟙 − Σρᵀ⊗Y) uses M₋
                if (blk == 0 && in_minus) || (blk == 1 && in_plus) {
                    continue;
                }
                let v = e.inner(t);
                if v.abs() > 1e-15 {
                    free.push((c, sign * v));
                }
            }
            let mut con = Constraint { blocks: vec![(blk, hermitian_term(e))], free, rhs: 0.0 };
            con.free.iter_mut().for_each(|f| f.1 = -f.1);
            p.add_constraint(con);
        }
    }
    let tr_plus: Vec<(usize, f64)> =
        in_basis.iter().enumerate().map(|(a, g)| (plus_start + a, g.inner(&id_in))).filter(|x| x.1 != 0.0).collect();
    let tr_minus: Vec<(usize, f64)> =
        in_basis.iter().enumerate().map(|(a, g)| (minus_start + a, g.inner(&id_in))).filter(|x| x.1 != 0.0).collect();
    p.add_constraint(Constraint { blocks: vec![], free: tr_plus, rhs: 1.0 });
    p.add_constraint(Constraint { blocks: vec![], free: tr_minus, rhs: -1.0 });
    Ok(p)
}

/// Feasible point `(Y_i, M₊, M₋)` of the dual cost SDP.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub y: Vec<HermitianOperator>,
    pub m_plus: HermitianOperator,
    pub m_minus: HermitianOperator,
    /// `Σ Tr(ρ_i^{⊗n} Y_i)`, a lower bound on the cost.
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CertificateCheck {
    /// Smallest eigenvalue of `M₊ ⊗ 𝟙 − Σ ρ_iᵀ ⊗ Y_i`.
    pub upper_min_eig: f64,
    /// Smallest eigenvalue of `Σ ρ_iᵀ ⊗ Y_i − M₋ ⊗ 𝟙`.
    pub lower_min_eig: f64,
    pub trace_plus_error: f64,
    pub trace_minus_error: f64,
    /// Objective recomputed from the certificate.
    pub objective: f64,
    pub feasible: bool,
}

/// Recomputes every dual constraint for `cert`.
pub fn verify_certificate(problem: &CloneProblem, cert: &DualCertificate, tol: f64) -> Result<CertificateCheck> {
    let din = problem.dim_in();
    let dout = problem.dim_out();
    if cert.y.len() != problem.states.len() {
        return Err(Error::DimensionMismatch { expected: problem.states.len(), got: cert.y.len() });
    }
    for y in &cert.y {
        if y.dim() != dout {
            return Err(Error::DimensionMismatch { expected: dout, got: y.dim() });
        }
    }
    for mm in [&cert.m_plus, &cert.m_minus] {
        if mm.dim() != din {
            return Err(Error::DimensionMismatch { expected: din, got: mm.dim() });
        }
    }
    let id_out = HermitianOperator::identity(dout);
    let mut mid = HermitianOperator::zeros(din * dout);
    for (x, y) in problem.inputs().iter().zip(&cert.y) {
        mid = mid.add(&x.as_operator().transpose().kron(y));
    }
    let upper = cert.m_plus.kron(&id_out).sub(&mid).min_eigenvalue();
    let lower = mid.sub(&cert.m_minus.kron(&id_out)).min_eigenvalue();
    let tp = (cert.m_plus.trace() - 1.0).abs();
    let tm = (cert.m_minus.trace() + 1.0).abs();
    let objective = problem.targets().iter().zip(&cert.y).map(|(t, y)| t.as_operator().inner(y)).sum();
    Ok(CertificateCheck {
        upper_min_eig: upper,
        lower_min_eig: lower,
        trace_plus_error: tp,
        trace_minus_error: tm,
        objective,
        feasible: upper >= -tol && lower >= -tol && tp <= tol && tm <= tol,
    })
}

/// Output of [`optimal_cost`].
#[derive(Debug, Clone)]
pub struct CloneCostResult {
    pub eta: f64,
    pub qpd: QpDecomposition,
    pub dual_certificate: DualCertificate,
    pub certificate_check: CertificateCheck,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// `|primal − dual|`.
    pub gap: f64,
    pub iterations: usize,
    pub verification: VerificationReport,
    /// Largest entrywise error of the decomposition on the cloning targets.
    pub clone_residual: f64,
}

fn solver_error(status: SdpStatus, iterations: usize) -> Error {
    match status {
        SdpStatus::Infeasible => Error::NotClonable,
        s => Error::Solver(format!("{s:?} after {iterations} iterations")),
    }
}

/// Optimal `k → n` cloning cost, the optimal decomposition and a dual
/// certificate read from the solver's multipliers.
pub fn optimal_cost(problem: &CloneProblem, opts: &SolverOptions) -> Result<CloneCostResult> {
    let p = primal_sdp(problem)?;
    let sol = sdp::solve(&p, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(solver_error(sol.status, sol.iterations));
    }
    let din = problem.dim_in();
    let dout = problem.dim_out();
    let jp = hermitian_block(&sol.x[0]);
    let jm = hermitian_block(&sol.x[1]);
    let qpd = qpd_from_branches(din, dout, jp, jm, None)?;

    // multipliers: clone rows first, then Tr_out rows for each block
    let out_basis = hermitian_basis(dout);
    let m = problem.states.len();
    let nb = out_basis.len();
    let mut y = Vec::with_capacity(m);
    for i in 0..m {
        let mut acc = ComplexMatrix::zeros(dout, dout);
        for (b, e) in out_basis.iter().enumerate() {
            acc += e.matrix() * crate::linalg::c(sol.y[i * nb + b], 0.0);
        }
        y.push(HermitianOperator::symmetrized(acc));
    }
    let tl = traceless_hermitian_basis(din);
    let z = |offset: usize| {
        let mut acc = ComplexMatrix::zeros(din, din);
        for (a, g) in tl.iter().enumerate() {
            acc += g.matrix() * crate::linalg::c(sol.y[offset + a], 0.0);
        }
        HermitianOperator::symmetrized(acc)
    };
    let id = HermitianOperator::identity(din).scale(1.0 / din as f64);
    let m_plus = id.sub(&z(m * nb));
    let m_minus = z(m * nb + tl.len()).sub(&id);
    let objective = problem.targets().iter().zip(&y).map(|(t, yi)| t.as_operator().inner(yi)).sum();
    let cert = DualCertificate { y, m_plus, m_minus, objective };
    let certificate_check = verify_certificate(problem, &cert, opts.tol.sqrt())?;
    let verification = verify_solution(&p, &sol, opts.tol.sqrt());
    let clone_residual = problem.clone_residual(|x| qpd.apply(x))?;
    Ok(CloneCostResult {
        eta: sol.primal_obj,
        qpd,
        dual_certificate: cert,
        certificate_check,
        primal_obj: sol.primal_obj,
        dual_obj: sol.dual_obj,
        gap: (sol.primal_obj - sol.dual_obj).abs(),
        iterations: sol.iterations,
        verification,
        clone_residual,
    })
}

/// Output of [`optimal_cost_from_dual`].
#[derive(Debug, Clone)]
pub struct DualSolve {
    pub eta: f64,
    pub certificate: DualCertificate,
    pub gap: f64,
    pub iterations: usize,
}

/// Solves [`dual_sdp`] directly; used to cross-check [`optimal_cost`].
pub fn optimal_cost_from_dual(problem: &CloneProblem, opts: &SolverOptions) -> Result<DualSolve> {
    let p = dual_sdp(problem)?;
    let sol = sdp::solve(&p, opts)?;
    if sol.status != SdpStatus::Optimal {
        return Err(match sol.status {
            SdpStatus::Unbounded => Error::NotClonable,
            s => Error::Solver(format!("{s:?} after {} iterations", sol.iterations)),
        });
    }
    let din = problem.dim_in();
    let dout = problem.dim_out();
    let out_basis = hermitian_basis(dout);
    let in_basis = hermitian_basis(din);
    let combine = |basis: &[HermitianOperator], coords: &[f64]| {
        let d = basis[0].dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (b, &v) in basis.iter().zip(coords) {
            acc += b.matrix() * crate::linalg::c(v, 0.0);
        }
        HermitianOperator::symmetrized(acc)
    };
    let ny = out_basis.len();
    let m = problem.states.len();
    let y: Vec<HermitianOperator> = (0..m).map(|i| combine(&out_basis, &sol.free[i * ny..(i + 1) * ny])).collect();
    let nm = in_basis.len();
    let m_plus = combine(&in_basis, &sol.free[m * ny..m * ny + nm]);
    let m_minus = combine(&in_basis, &sol.free[m * ny + nm..]);
    let objective = problem.targets().iter().zip(&y).map(|(t, yi)| t.as_operator().inner(yi)).sum();
    Ok(DualSolve {
        eta: -sol.primal_obj,
        certificate: DualCertificate { y, m_plus, m_minus, objective },
        gap: (sol.primal_obj - sol.dual_obj).abs(),
        iterations: sol.iterations,
    })
}
