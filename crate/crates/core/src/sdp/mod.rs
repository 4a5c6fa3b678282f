//! Small dense semidefinite programming over block-diagonal real symmetric
//! PSD cones.
//!
//! Standard form (primal):
//!
//! ```text
//! minimize    Σ_b ⟨C_b, X_b⟩ + cᵤᵀ u
//! subject to  Σ_b ⟨A_kb, X_b⟩ + f_kᵀ u = b_k      k = 1..m
//!             X_b ⪰ 0,  u free
//! ```
//!
//! and its dual
//!
//! ```text
//! maximize    bᵀ y
//! subject to  C_b − Σ_k y_k A_kb = S_b ⪰ 0,   Fᵀ y = cᵤ
//! ```
//!
//! Hermitian problems are compiled through [`crate::linalg::real_embedding`]
//! before they reach the solver.

mod hermitian;
mod presolve;
mod sdpa;
mod solver;
mod verify;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use hermitian::{hermitian_block, hermitian_term};
pub use sdpa::{read_sdpa, write_sdpa};
pub use solver::solve;
pub use verify::{verify_solution, VerificationReport};

/// Sparse symmetric matrix stored as its upper triangle (`i ≤ j`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseSym {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// Adds `v` at `(i, j)` and, implicitly, `(j, i)`.
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((i, j, v));
    }

    /// Upper-triangle nonzeros of a dense symmetric matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut s = Self::new(m.nrows());
        for j in 0..m.ncols() {
            for i in 0..=j {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                if v != 0.0 {
                    s.entries.push((i, j, v));
                }
            }
        }
        s
    }

    pub fn identity(dim: usize, scale: f64) -> Self {
        Self { dim, entries: (0..dim).map(|i| (i, i, scale)).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        self.add_scaled_to(&mut m, 1.0);
        m
    }

    /// `m += s · self`.
    pub fn add_scaled_to(&self, m: &mut DMatrix<f64>, s: f64) {
        for &(i, j, v) in &self.entries {
            m[(i, j)] += s * v;
            if i != j {
                m[(j, i)] += s * v;
            }
        }
    }

    /// Frobenius inner product `⟨self, m⟩` with a dense matrix.
    pub fn dot(&self, m: &DMatrix<f64>) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * m[(i, j)] } else { v * (m[(i, j)] + m[(j, i)]) })
            .sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        // duplicates are allowed, so go through the dense form
        let d = self.to_dense();
        d.iter().map(|x| x * x).sum()
    }
}

/// One affine equality constraint.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Constraint {
    /// `(block index, A_kb)`; blocks not listed contribute zero.
    pub blocks: Vec<(usize, SparseSym)>,
    /// `(free variable index, coefficient)`.
    pub free: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    /// One cost matrix per block.
    pub objective: Vec<SparseSym>,
    pub free_objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>, free_count: usize) -> Self {
        let objective = block_dims.iter().map(|&d| SparseSym::new(d)).collect();
        Self { block_dims, objective, free_objective: vec![0.0; free_count], constraints: Vec::new() }
    }

    pub fn free_count(&self) -> usize {
        self.free_objective.len()
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// Checks block dimensions and index ranges.
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if self.objective.len() != self.block_dims.len() {
            return Err(Error::InvalidArgument("objective/block count mismatch".into()));
        }
        for (b, (c, &d)) in self.objective.iter().zip(&self.block_dims).enumerate() {
            if c.dim != d || c.entries.iter().any(|&(i, j, _)| i >= d || j >= d) {
                return Err(Error::InvalidArgument(format!("objective block {b} malformed")));
            }
        }
        for (k, con) in self.constraints.iter().enumerate() {
            for (b, a) in &con.blocks {
                let d = *self.block_dims.get(*b).ok_or_else(|| {
                    Error::InvalidArgument(format!("constraint {k} references block {b}"))
                })?;
                if a.dim != d || a.entries.iter().any(|&(i, j, _)| i >= d || j >= d) {
                    return Err(Error::InvalidArgument(format!("constraint {k} block {b} malformed")));
                }
            }
            if con.free.iter().any(|&(j, _)| j >= self.free_count()) {
                return Err(Error::InvalidArgument(format!("constraint {k} free index out of range")));
            }
            if !con.rhs.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(())
    }

    /// `Σ_b ⟨A_kb, X_b⟩ + f_kᵀ u` for every constraint.
    pub fn apply_constraints(&self, x: &[DMatrix<f64>], u: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| {
                c.blocks.iter().map(|(b, a)| a.dot(&x[*b])).sum::<f64>()
                    + c.free.iter().map(|&(j, f)| f * u[j]).sum::<f64>()
            })
            .collect()
    }

    pub fn primal_objective(&self, x: &[DMatrix<f64>], u: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xb)| c.dot(xb)).sum::<f64>()
            + self.free_objective.iter().zip(u).map(|(c, v)| c * v).sum::<f64>()
    }

    pub fn dual_objective(&self, y: &[f64]) -> f64 {
        self.constraints.iter().zip(y).map(|(c, yk)| c.rhs * yk).sum()
    }

    /// Dual slack `C_b − Σ_k y_k A_kb` per block.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut s: Vec<DMatrix<f64>> = self.objective.iter().map(|c| c.to_dense()).collect();
        for (con, &yk) in self.constraints.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for (b, a) in &con.blocks {
                a.add_scaled_to(&mut s[*b], -yk);
            }
        }
        s
    }

    /// `cᵤ − Fᵀ y`.
    pub fn free_dual_residual(&self, y: &[f64]) -> Vec<f64> {
        let mut r = self.free_objective.clone();
        for (con, &yk) in self.constraints.iter().zip(y) {
            for &(j, f) in &con.free {
                r[j] -= f * yk;
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let t = crate::config::Tolerances::default();
        Self { tol: t.sdp, max_iter: t.sdp_max_iter }
    }
}

impl From<&crate::config::Tolerances> for SolverOptions {
    fn from(t: &crate::config::Tolerances) -> Self {
        Self { tol: t.sdp, max_iter: t.sdp_max_iter }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<DMatrix<f64>>,
    pub free: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// Relative duality gap `|p − d| / (1 + |p| + |d|)`.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// Constraints removed as linearly redundant before the solve.
    pub dropped_constraints: Vec<usize>,
    /// Free variables fixed to zero because they do not affect the problem.
    pub dropped_free: Vec<usize>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}
