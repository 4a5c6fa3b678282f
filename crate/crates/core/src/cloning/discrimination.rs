use serde::Serialize;

use super::{check_distinct, check_virtually_clonable, extend_to_basis, DualCertificate};
use crate::channels::{map_from_basis_images, optimal_qpd, ChoiMatrix, QpDecomposition};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{spectral_projector, trace_norm, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::sdp::SolverOptions;

/// Minimum-error measurement for `p₁ρ₁` versus `p₂ρ₂`.
#[derive(Debug, Clone)]
pub struct Helstrom {
    /// Projector onto the nonnegative eigenspace of `p₁ρ₁ − p₂ρ₂`.
    pub p_plus: HermitianOperator,
    pub p_minus: HermitianOperator,
    /// `‖p₁ρ₁ − p₂ρ₂‖₁`.
    pub norm: f64,
    /// `(1 + ‖p₁ρ₁ − p₂ρ₂‖₁)/2`.
    pub success_probability: f64,
}

fn check_priors(p1: f64, p2: f64) -> Result<()> {
    if !(p1 >= 0.0 && p2 >= 0.0 && (p1 + p2 - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidArgument(format!("invalid priors ({p1}, {p2})")));
    }
    Ok(())
}

fn weighted_difference(a: &HermitianOperator, b: &HermitianOperator, p1: f64, p2: f64) -> HermitianOperator {
    a.scale(p1).sub(&b.scale(p2))
}

fn helstrom_ops(a: &HermitianOperator, b: &HermitianOperator, p1: f64, p2: f64) -> Result<Helstrom> {
    check_priors(p1, p2)?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let delta = weighted_difference(a, b, p1, p2);
    // zero eigenvalues go to P₊; the cutoff absorbs rounding in Δ
    let cut = -1e-14 * (1.0 + p1 + p2);
    let p_plus = spectral_projector(&delta, |l| l >= cut);
    let p_minus = HermitianOperator::identity(a.dim()).sub(&p_plus);
    let norm = trace_norm(&delta);
    Ok(Helstrom { p_plus, p_minus, norm, success_probability: 0.5 * (1.0 + norm) })
}

pub fn helstrom_measurement(rho1: &DensityMatrix, rho2: &DensityMatrix, p1: f64, p2: f64) -> Result<Helstrom> {
    helstrom_ops(rho1.as_operator(), rho2.as_operator(), p1, p2)
}

/// `‖p₁ρ₁^{⊗n} − p₂ρ₂^{⊗n}‖ / ‖p₁ρ₁ − p₂ρ₂‖`; `None` when the denominator
/// vanishes.
fn prior_lower_bound(rho1: &DensityMatrix, rho2: &DensityMatrix, n: usize, p1: f64) -> Option<f64> {
    let p2 = 1.0 - p1;
    let den = trace_norm(&weighted_difference(rho1.as_operator(), rho2.as_operator(), p1, p2));
    if den < 1e-12 {
        return None;
    }
    let (a, b) = (rho1.tensor_power(n), rho2.tensor_power(n));
    Some(trace_norm(&weighted_difference(a.as_operator(), b.as_operator(), p1, p2)) / den)
}

fn distinct_pair(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<()> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    check_distinct(&[rho1.clone(), rho2.clone()])
}

/// `‖ρ₁^{⊗n} − ρ₂^{⊗n}‖ / ‖ρ₁ − ρ₂‖` at priors `(p₁, 1 − p₁)`.
pub fn cost_lower_bound(rho1: &DensityMatrix, rho2: &DensityMatrix, n: usize, p1: f64) -> Result<f64> {
    distinct_pair(rho1, rho2)?;
    check_priors(p1, 1.0 - p1)?;
    prior_lower_bound(rho1, rho2, n, p1)
        .ok_or_else(|| Error::InvalidArgument(format!("p₁ρ₁ − p₂ρ₂ vanishes at p₁ = {p1}")))
}

/// `4/‖ρ₁ − ρ₂‖ − 1`.
pub fn cost_upper_bound(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    distinct_pair(rho1, rho2)?;
    Ok(4.0 / trace_norm(&rho1.as_operator().sub(rho2.as_operator())) - 1.0)
}

/// 101 uniform values of `p₁` on `[0.005, 0.995]`.
pub fn default_prior_grid() -> Vec<f64> {
    (0..101).map(|i| 0.005 + 0.99 * i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CloneBounds {
    pub lower: f64,
    pub upper: f64,
    pub priors_used: (f64, f64),
    /// Lower bound at `(½, ½)`.
    pub equal_prior_lower: f64,
}

/// Lower bound maximized over `prior_grid ∪ {½}` and the global upper bound.
pub fn cost_bounds(rho1: &DensityMatrix, rho2: &DensityMatrix, n: usize, prior_grid: &[f64]) -> Result<CloneBounds> {
    distinct_pair(rho1, rho2)?;
    let equal = prior_lower_bound(rho1, rho2, n, 0.5).expect("distinct states");
    let mut best = (equal, 0.5);
    for &p1 in prior_grid {
        check_priors(p1, 1.0 - p1)?;
        if let Some(v) = prior_lower_bound(rho1, rho2, n, p1) {
            if v > best.0 {
                best = (v, p1);
            }
        }
    }
    Ok(CloneBounds {
        lower: best.0,
        upper: cost_upper_bound(rho1, rho2)?,
        priors_used: (best.1, 1.0 - best.1),
        equal_prior_lower: equal,
    })
}

/// Dual point built from the Helstrom measurements of one and `n` copies:
/// `Y₁ = p₁(Q₊ − Q₋)/‖Δ‖`, `Y₂ = −p₂(Q₊ − Q₋)/‖Δ‖`,
/// `M₊ = −M₋ = [(P₊ − P₋)Δ]ᵀ/‖Δ‖` with `Δ = p₁ρ₁ − p₂ρ₂`.
pub fn dual_certificate_from_discrimination(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    n: usize,
    priors: (f64, f64),
) -> Result<DualCertificate> {
    distinct_pair(rho1, rho2)?;
    let (p1, p2) = priors;
    let single = helstrom_measurement(rho1, rho2, p1, p2)?;
    if single.norm < 1e-12 {
        return Err(Error::InvalidArgument("p₁ρ₁ − p₂ρ₂ vanishes".into()));
    }
    let (a, b) = (rho1.tensor_power(n), rho2.tensor_power(n));
    let multi = helstrom_measurement(&a, &b, p1, p2)?;
    let q = multi.p_plus.sub(&multi.p_minus).scale(1.0 / single.norm);
    let y = vec![q.scale(p1), q.scale(-p2)];
    let delta = weighted_difference(rho1.as_operator(), rho2.as_operator(), p1, p2);
    let r = single.p_plus.sub(&single.p_minus);
    let m = HermitianOperator::symmetrized(r.matrix() * delta.matrix()).transpose().scale(1.0 / single.norm);
    let objective = a.as_operator().inner(&y[0]) + b.as_operator().inner(&y[1]);
    Ok(DualCertificate { y, m_plus: m.clone(), m_minus: m.scale(-1.0), objective })
}

/// CPTP preparation `|i⟩⟨j| ↦ δ_ij ρ_i^{⊗n}` from an `m`-level flag.
fn preparation(states: &[DensityMatrix], n: usize) -> Result<ChoiMatrix> {
    let targets: Vec<DensityMatrix> = states.iter().map(|s| s.tensor_power(n)).collect();
    let dout = targets[0].dim();
    ChoiMatrix::from_unit_images(states.len(), dout, |i, j| {
        if i == j {
            targets[i].matrix().clone()
        } else {
            ComplexMatrix::zeros(dout, dout)
        }
    })
}

/// Measure-and-prepare style decomposition: a virtual flag map
/// `ρ_i ↦ |i⟩⟨i|` followed by the preparation of `ρ_i^{⊗n}`.
///
/// For two states the flag map is `η₊𝓓₊ − η₋𝓓₋` from the Helstrom
/// measurement with `η₊ = 2/‖ρ₁ − ρ₂‖`. For other set sizes it is fixed on
/// a completed basis (completion states go to `𝟙/m`) and decomposed by
/// [`optimal_qpd`].
pub fn discrimination_cloner(states: &[DensityMatrix], n: usize) -> Result<QpDecomposition> {
    let flag = discrimination_flag(states)?;
    flag.then(&preparation(states, n)?)
}

fn discrimination_flag(states: &[DensityMatrix]) -> Result<QpDecomposition> {
    let tol = Tolerances::default();
    if states.len() == 2 {
        let (r1, r2) = (&states[0], &states[1]);
        distinct_pair(r1, r2)?;
        let h = helstrom_measurement(r1, r2, 0.5, 0.5)?;
        let t = 2.0 * h.norm;
        let eta_p = 2.0 / t;
        let eta_m = eta_p - 1.0;
        let d = r1.dim();
        let flag = |k: usize| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(k, k)] = crate::linalg::c(1.0, 0.0);
            HermitianOperator::symmetrized(m)
        };
        // Σ_k P_kᵀ ⊗ |k⟩⟨k|
        let d_plus = h.p_plus.transpose().kron(&flag(0)).add(&h.p_minus.transpose().kron(&flag(1)));
        let d_plus = ChoiMatrix::new(d, 2, d_plus)?;
        let (w1, w2) = (r2.as_operator().inner(&h.p_plus), r1.as_operator().inner(&h.p_minus));
        let (q1, q2) = if w1 + w2 > 1e-12 { (w1 / (w1 + w2), w2 / (w1 + w2)) } else { (0.5, 0.5) };
        let sigma = flag(0).scale(q1).add(&flag(1).scale(q2));
        let d_minus = ChoiMatrix::new(d, 2, HermitianOperator::identity(d).kron(&sigma))?;
        return QpDecomposition::new(eta_p, eta_m, d_plus, d_minus);
    }
    let m = states.len();
    if !check_virtually_clonable(states, tol.rank)?.clonable {
        return Err(Error::NotClonable);
    }
    let ops: Vec<HermitianOperator> = states.iter().map(|s| s.as_operator().clone()).collect();
    let ext = extend_to_basis(&ops, tol.rank)?;
    let mut images: Vec<HermitianOperator> = (0..m)
        .map(|i| {
            let mut f = ComplexMatrix::zeros(m, m);
            f[(i, i)] = crate::linalg::c(1.0, 0.0);
            HermitianOperator::symmetrized(f)
        })
        .collect();
    images.extend(ext.iter().map(|_| HermitianOperator::identity(m).scale(1.0 / m as f64)));
    let inputs: Vec<HermitianOperator> = ops.into_iter().chain(ext).collect();
    let j = map_from_basis_images(&inputs, &images)?;
    Ok(optimal_qpd(&j, &SolverOptions::from(&tol))?.qpd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloning::{verify_certificate, CloneProblem};
    use crate::linalg::{max_abs, PureState};

    fn zero() -> DensityMatrix {
        PureState::zero().density()
    }
    fn plus() -> DensityMatrix {
        PureState::plus().density()
    }
    fn one() -> DensityMatrix {
        PureState::one().density()
    }

    #[test]
    fn helstrom_examples() {
        let h = helstrom_measurement(&zero(), &one(), 0.5, 0.5).unwrap();
        assert!((h.norm - 1.0).abs() < 1e-12);
        assert!(max_abs(&(h.p_plus.matrix() - zero().matrix())) < 1e-12);
        let h = helstrom_measurement(&zero(), &zero(), 0.5, 0.5).unwrap();
        assert!(h.norm < 1e-12);
        let h = helstrom_measurement(&zero(), &plus(), 0.5, 0.5).unwrap();
        assert!((h.success_probability - (0.5 + 2f64.sqrt() / 4.0)).abs() < 1e-12);
        let delta = zero().as_operator().scale(0.5).sub(&plus().as_operator().scale(0.5));
        let r = h.p_plus.sub(&h.p_minus);
        assert!((r.inner(&delta) - h.norm).abs() < 1e-10);
        assert!(helstrom_measurement(&zero(), &plus(), 0.6, 0.6).is_err());
    }

    #[test]
    fn bounds_for_zero_plus() {
        let b = cost_bounds(&zero(), &plus(), 2, &[]).unwrap();
        assert!((b.lower - 1.5f64.sqrt()).abs() < 1e-12);
        assert!((b.upper - (2.0 * 2f64.sqrt() - 1.0)).abs() < 1e-12);
        let b = cost_bounds(&zero(), &one(), 3, &default_prior_grid()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
        assert!(cost_bounds(&zero(), &zero(), 2, &[]).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_prior_grid();
        assert_eq!(g.len(), 101);
        assert!((g[0] - 0.005).abs() < 1e-15 && (g[100] - 0.995).abs() < 1e-15);
    }

    #[test]
    fn certificate_for_zero_plus() {
        for (n, want) in [(2usize, 1.5f64.sqrt()), (3, 1.75f64.sqrt())] {
            let c = dual_certificate_from_discrimination(&zero(), &plus(), n, (0.5, 0.5)).unwrap();
            assert!((c.objective - want).abs() < 1e-12);
            let p = CloneProblem::new(vec![zero(), plus()], 1, n).unwrap();
            let chk = verify_certificate(&p, &c, 1e-9).unwrap();
            assert!(chk.feasible, "{chk:?}");
            assert!((chk.objective - c.objective).abs() < 1e-12);
        }
        let c = dual_certificate_from_discrimination(&zero(), &one(), 2, (0.5, 0.5)).unwrap();
        assert!((c.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrimination_cloner_pair() {
        let states = [zero(), plus()];
        for n in [2, 3] {
            let q = discrimination_cloner(&states, n).unwrap();
            assert!((q.cost() - (2.0 * 2f64.sqrt() - 1.0)).abs() < 1e-12);
            for s in &states {
                let out = q.apply(s).unwrap();
                assert!(max_abs(&(out.matrix() - s.tensor_power(n).matrix())) < 1e-10);
            }
        }
        let q = discrimination_cloner(&[zero(), one()], 2).unwrap();
        assert!((q.cost() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discrimination_cloner_triple() {
        let y = DensityMatrix::from_bloch([0.0, 1.0, 0.0]).unwrap();
        let states = [zero(), plus(), y];
        let q = discrimination_cloner(&states, 2).unwrap();
        for s in &states {
            let out = q.apply(s).unwrap();
            assert!(max_abs(&(out.matrix() - s.tensor_power(2).matrix())) < 1e-7);
        }
        assert!(q.cost() >= 1.0);
    }
}
