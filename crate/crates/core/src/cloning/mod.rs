//! Virtual cloning of finite state sets: the linear-independence criterion,
//! explicit cloning maps, the optimal-cost SDP with dual certificates,
//! closed forms for pure pairs and discrimination-based bounds.

mod discrimination;
mod pure;
mod sdp;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channels::{map_from_basis_images_with, ChoiMatrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, max_abs, DensityMatrix, HermitianOperator};

pub use discrimination::{
    cost_bounds, cost_lower_bound, cost_upper_bound, default_prior_grid, discrimination_cloner,
    dual_certificate_from_discrimination, helstrom_measurement, CloneBounds, Helstrom,
};
pub use pure::{
    canonical_form, canonical_qubit_map, feasible_y_interval, optimal_pure_map, pure_conversion_cost,
    pure_pair_cost, pure_pair_cost_limit, CanonicalPair, PureMapParameters,
};
pub use sdp::{
    dual_sdp, optimal_cost, optimal_cost_from_dual, primal_sdp, verify_certificate, CertificateCheck,
    CloneCostResult, DualCertificate, DualSolve,
};

/// Largest Choi dimension `d^k · d^n` accepted by the SDP builders.
pub const MAX_CHOI_DIM: usize = 4096;

/// States whose entries differ by less than this are treated as identical.
const IDENTICAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct Clonability {
    pub clonable: bool,
    pub rank: usize,
    /// Descending.
    pub gram_singular_values: Vec<f64>,
}

/// `G_ij = Tr(ρ_i^{⊗k} ρ_j^{⊗k}) = Tr(ρ_i ρ_j)^k`.
pub fn gram_matrix(states: &[DensityMatrix], k: usize) -> DMatrix<f64> {
    let m = states.len();
    DMatrix::from_fn(m, m, |i, j| states[i].as_operator().inner(states[j].as_operator()).powi(k as i32))
}

fn common_dim(states: &[DensityMatrix]) -> Result<usize> {
    let d = states.first().ok_or_else(|| Error::InvalidArgument("empty state set".into()))?.dim();
    if let Some(s) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
    }
    Ok(d)
}

fn singular_values(g: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = g.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn numerical_rank(sv: &[f64], tol: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Clonable iff the states are linearly independent, decided on the Gram
/// matrix: independent iff `σ_min > tol · σ_max`.
pub fn check_virtually_clonable(states: &[DensityMatrix], tol: f64) -> Result<Clonability> {
    common_dim(states)?;
    let sv = singular_values(&gram_matrix(states, 1));
    let rank = numerical_rank(&sv, tol);
    Ok(Clonability { clonable: rank == states.len(), rank, gram_singular_values: sv })
}

fn check_distinct(states: &[DensityMatrix]) -> Result<()> {
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            if max_abs(&(states[i].matrix() - states[j].matrix())) < IDENTICAL_TOL {
                return Err(Error::IdenticalStates(i, j));
            }
        }
    }
    Ok(())
}

/// Smallest `k ≤ max_k` with `{ρ_i^{⊗k}}` linearly independent.
pub fn min_copies_for_independence(states: &[DensityMatrix], max_k: usize) -> Result<usize> {
    common_dim(states)?;
    check_distinct(states)?;
    let tol = Tolerances::default().rank;
    for k in 1..=max_k {
        let sv = singular_values(&gram_matrix(states, k));
        if numerical_rank(&sv, tol) == states.len() {
            return Ok(k);
        }
    }
    Err(Error::InvalidArgument(format!("states are still dependent at k = {max_k}")))
}

/// Greedily appends states `(𝟙/d + εB_j)/Tr(·)`, `ε = 1/(2d)`, over the
/// orthonormal Hermitian basis until the set spans all `d×d` Hermitian
/// operators. Returns only the appended states.
pub(crate) fn extend_to_basis(states: &[HermitianOperator], tol: f64) -> Result<Vec<HermitianOperator>> {
    let d = states.first().ok_or_else(|| Error::InvalidArgument("empty state set".into()))?.dim();
    let eps = 1.0 / (2.0 * d as f64);
    let mut set: Vec<HermitianOperator> = states.to_vec();
    let rank_of = |set: &[HermitianOperator]| {
        let g = DMatrix::from_fn(set.len(), set.len(), |a, b| set[a].inner(&set[b]));
        numerical_rank(&singular_values(&g), tol)
    };
    let mut rank = rank_of(&set);
    if rank < set.len() {
        return Err(Error::NotClonable);
    }
    let mut added = Vec::new();
    for b in hermitian_basis(d) {
        if rank == d * d {
            break;
        }
        let cand = HermitianOperator::identity(d).scale(1.0 / d as f64).add(&b.scale(eps));
        let cand = cand.scale(1.0 / cand.trace());
        set.push(cand.clone());
        let r = rank_of(&set);
        if r > rank {
            rank = r;
            added.push(cand);
        } else {
            set.pop();
        }
    }
    if rank < d * d {
        return Err(Error::RankDeficient { rank, needed: d * d });
    }
    Ok(added)
}

/// An HPTP map with `ρ_i ↦ ρ_i^{⊗n}` for every state, built by completing
/// the set to a basis and sending each completion state to its own clones.
pub fn build_cloning_map(states: &[DensityMatrix], n: usize) -> Result<ChoiMatrix> {
    common_dim(states)?;
    let tol = Tolerances::default();
    if !check_virtually_clonable(states, tol.rank)?.clonable {
        return Err(Error::NotClonable);
    }
    let ops: Vec<HermitianOperator> = states.iter().map(|s| s.as_operator().clone()).collect();
    let ext = extend_to_basis(&ops, tol.rank)?;
    let inputs: Vec<HermitianOperator> = ops.iter().chain(&ext).cloned().collect();
    let images: Vec<HermitianOperator> = inputs
        .iter()
        .map(|x| {
            let mut out = HermitianOperator::identity(1);
            for _ in 0..n {
                out = out.kron(x);
            }
            out
        })
        .collect();
    map_from_basis_images_with(&inputs, &images, &tol)
}

/// `k → n` cloning of a state set.
#[derive(Debug, Clone)]
pub struct CloneProblem {
    pub states: Vec<DensityMatrix>,
    pub k: usize,
    pub n: usize,
}

impl CloneProblem {
    pub fn new(states: Vec<DensityMatrix>, k: usize, n: usize) -> Result<Self> {
        let d = common_dim(&states)?;
        if k == 0 || n <= k {
            return Err(Error::InvalidArgument(format!("need 1 ≤ k < n, got k = {k}, n = {n}")));
        }
        let dim = d
            .checked_pow((k + n) as u32)
            .filter(|&x| x <= MAX_CHOI_DIM)
            .ok_or(Error::TooLarge { dim: d.saturating_pow((k + n) as u32), limit: MAX_CHOI_DIM })?;
        debug_assert!(dim <= MAX_CHOI_DIM);
        Ok(Self { states, k, n })
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn dim_in(&self) -> usize {
        self.dim().pow(self.k as u32)
    }

    pub fn dim_out(&self) -> usize {
        self.dim().pow(self.n as u32)
    }

    /// `ρ_i^{⊗k}`.
    pub fn inputs(&self) -> Vec<DensityMatrix> {
        self.states.iter().map(|s| s.tensor_power(self.k)).collect()
    }

    /// `ρ_i^{⊗n}`.
    pub fn targets(&self) -> Vec<DensityMatrix> {
        self.states.iter().map(|s| s.tensor_power(self.n)).collect()
    }

    /// Largest entrywise error of `Λ(ρ_i^{⊗k}) − ρ_i^{⊗n}` over the set.
    pub fn clone_residual(&self, apply: impl Fn(&DensityMatrix) -> Result<HermitianOperator>) -> Result<f64> {
        let mut worst = 0.0f64;
        for (x, y) in self.inputs().iter().zip(self.targets()) {
            let out = apply(x)?;
            worst = worst.max(max_abs(&(out.matrix() - y.matrix())));
        }
        Ok(worst)
    }
}
