use serde::Serialize;

use crate::channels::{choi_from_kraus, ChoiMatrix, QpDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, identity, sigma_x, sigma_z, ComplexMatrix, HermitianOperator, PureState};

/// Overlaps at or above this fidelity count as identical states.
const SAME_FIDELITY: f64 = 1.0 - 1e-12;

fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.fidelity(b).min(1.0))
}

fn distinct_fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    let f = fidelity(a, b)?;
    if f >= SAME_FIDELITY {
        return Err(Error::IdenticalStates(0, 1));
    }
    Ok(f)
}

/// `√((1 − Fⁿ)/(1 − Fᵏ))` with `F = |⟨ψ₁|ψ₂⟩|²`.
pub fn pure_pair_cost(psi1: &PureState, psi2: &PureState, k: usize, n: usize) -> Result<f64> {
    let f = distinct_fidelity(psi1, psi2)?;
    if k == 0 || n < k {
        return Err(Error::InvalidArgument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}")));
    }
    Ok(((1.0 - f.powi(n as i32)) / (1.0 - f.powi(k as i32))).sqrt())
}

/// `lim_{n→∞}` of [`pure_pair_cost`]: `1/√(1 − Fᵏ)`.
pub fn pure_pair_cost_limit(psi1: &PureState, psi2: &PureState, k: usize) -> Result<f64> {
    let f = distinct_fidelity(psi1, psi2)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    Ok((1.0 / (1.0 - f.powi(k as i32))).sqrt())
}

/// `max{1, √((1 − F′)/(1 − F))}` for `ψ± → φ±`.
pub fn pure_conversion_cost(psi: (&PureState, &PureState), phi: (&PureState, &PureState)) -> Result<f64> {
    let f = distinct_fidelity(psi.0, psi.1)?;
    let fp = fidelity(phi.0, phi.1)?;
    Ok(((1.0 - fp) / (1.0 - f)).sqrt().max(1.0))
}

/// `ψ± = α|e₀⟩ ± β|e₁⟩` with orthonormal `e₀, e₁`, after rotating the phase
/// of `ψ₋` so that `s = ⟨ψ₊|ψ₋⟩ ≥ 0`.
#[derive(Debug, Clone)]
pub struct CanonicalPair {
    pub alpha: f64,
    pub beta: f64,
    pub overlap: f64,
    pub e0: PureState,
    pub e1: PureState,
}

fn complement_basis(vectors: &[&PureState], d: usize) -> Vec<PureState> {
    let mut proj = identity(d);
    for v in vectors {
        proj -= v.projector().matrix();
    }
    let (vals, vecs) = eig_hermitian(&HermitianOperator::symmetrized(proj));
    vals.iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.5)
        .map(|(i, _)| PureState::normalized(vecs.column(i).into_owned()).expect("eigenvector is nonzero"))
        .collect()
}

/// Canonical form of a pair; identical states are rejected unless
/// `allow_identical`, in which case `e₁` is any unit vector orthogonal to `e₀`.
fn canonical(plus: &PureState, minus: &PureState, allow_identical: bool) -> Result<CanonicalPair> {
    let d = plus.dim();
    if minus.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: minus.dim() });
    }
    if d < 2 {
        return Err(Error::InvalidArgument("pure-state maps need dimension ≥ 2".into()));
    }
    let z = plus.inner(minus);
    let minus = if z.norm() > 0.0 { minus.with_phase(z.conj() / z.norm()) } else { minus.clone() };
    let s = plus.inner(&minus).re.clamp(0.0, 1.0);
    if s >= 1.0 - 1e-12 && !allow_identical {
        return Err(Error::IdenticalStates(0, 1));
    }
    let alpha = ((1.0 + s) / 2.0).sqrt();
    let beta = ((1.0 - s) / 2.0).sqrt();
    let e0 = PureState::normalized(plus.amplitudes() + minus.amplitudes())?;
    let e1 = if beta > 1e-7 {
        PureState::normalized(plus.amplitudes() - minus.amplitudes())?
    } else {
        complement_basis(&[&e0], d).into_iter().next().expect("d ≥ 2 leaves a complement")
    };
    Ok(CanonicalPair { alpha, beta, overlap: s, e0, e1 })
}

pub fn canonical_form(plus: &PureState, minus: &PureState) -> Result<CanonicalPair> {
    canonical(plus, minus, false)
}

/// Parameters of the qubit map for `F > F′`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PureMapParameters {
    pub xi: f64,
    pub mu: f64,
    pub gamma: f64,
    pub y: f64,
}

impl PureMapParameters {
    pub fn new(f: f64, f_prime: f64) -> Result<Self> {
        check_fidelities(f, f_prime)?;
        if f <= f_prime {
            return Err(Error::InvalidArgument("parameters need F > F′".into()));
        }
        let xi = ((1.0 - f_prime) / (1.0 - f)).sqrt();
        let mu = (f_prime / f).sqrt();
        Ok(Self { xi, mu, gamma: 0.0, y: 1.0 - xi - mu })
    }

    /// Weights `((ξ+μ)/2, (1−μ)/2, (ξ−1)/2)` of `ρ`, `σₓρσₓ` and `−σ_zρσ_z`.
    pub fn pauli_weights(&self) -> (f64, f64, f64) {
        ((self.xi + self.mu) / 2.0, (1.0 - self.mu) / 2.0, (self.xi - 1.0) / 2.0)
    }
}

fn check_fidelities(f: f64, f_prime: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&f_prime) {
        return Err(Error::InvalidArgument(format!("fidelities must lie in [0, 1]: {f}, {f_prime}")));
    }
    if f >= SAME_FIDELITY {
        return Err(Error::IdenticalStates(0, 1));
    }
    Ok(())
}

/// Interval `[1 − ξ − μ, ξ − 1 − μ]` of the free Choi parameter `y` (at
/// `γ = 0`) for which the map reaches cost `ξ`.
pub fn feasible_y_interval(f: f64, f_prime: f64) -> Result<(f64, f64)> {
    let p = PureMapParameters::new(f, f_prime)?;
    Ok((1.0 - p.xi - p.mu, p.xi - 1.0 - p.mu))
}

/// `Λ(ρ) = ((ξ+μ)/2)ρ + ((1−μ)/2)σₓρσₓ − ((ξ−1)/2)σ_zρσ_z` on a qubit, with
/// `λ₊ = (ξ+1)/2` over the first two terms and `λ₋ = (ξ−1)/2` on the last.
pub fn canonical_qubit_map(f: f64, f_prime: f64) -> Result<QpDecomposition> {
    let p = PureMapParameters::new(f, f_prime)?;
    let lp = (p.xi + 1.0) / 2.0;
    let lm = (p.xi - 1.0) / 2.0;
    let kp = [
        identity(2) * c(((p.xi + p.mu) / (p.xi + 1.0)).sqrt(), 0.),
        sigma_x() * c(((1.0 - p.mu) / (p.xi + 1.0)).sqrt(), 0.),
    ];
    let plus = choi_from_kraus(&kp, 2, 2)?;
    let minus = choi_from_kraus(&[sigma_z()], 2, 2)?;
    QpDecomposition::with_tolerance(lp, lm, plus, minus, 1e-10)
}

/// Qubit channel sending `α|0⟩ ± β|1⟩` to `a|0⟩ ± b|1⟩` when `s ≤ t`.
fn qubit_contraction(src: &CanonicalPair, dst: &CanonicalPair) -> Result<ChoiMatrix> {
    let (alpha, beta, s) = (src.alpha, src.beta, src.overlap);
    let (a, b, t) = (dst.alpha, dst.beta, dst.overlap);
    let ratio = if t > 0.0 { (s / t).min(1.0) } else { 0.0 };
    let cc = ((1.0 + ratio) / 2.0).sqrt();
    let e = ((1.0 - ratio) / 2.0).sqrt();
    let k0 = ComplexMatrix::from_row_slice(2, 2, &[c(a * cc / alpha, 0.), c(0., 0.), c(0., 0.), c(b * cc / beta, 0.)]);
    let k1 = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(a * e / beta, 0.), c(b * e / alpha, 0.), c(0., 0.)]);
    choi_from_kraus(&[k0, k1], 2, 2)
}

/// `𝓗 → ℂ²`: `ρ ↦ K†ρK + Σ_j |0⟩⟨χ_j|ρ|χ_j⟩⟨0|` with `K = |e₀⟩⟨0| + |e₁⟩⟨1|`
/// and `χ_j` spanning the complement of `span{e₀, e₁}`.
fn encoder(p: &CanonicalPair) -> Result<ChoiMatrix> {
    let d = p.e0.dim();
    let row = |v: &PureState, r: usize| {
        let mut m = ComplexMatrix::zeros(2, d);
        for (j, z) in v.amplitudes().iter().enumerate() {
            m[(r, j)] = z.conj();
        }
        m
    };
    let mut kraus = vec![row(&p.e0, 0) + row(&p.e1, 1)];
    for chi in complement_basis(&[&p.e0, &p.e1], d) {
        kraus.push(row(&chi, 0));
    }
    choi_from_kraus(&kraus, d, 2)
}

/// `ℂ² → 𝓗′` isometry `|0⟩ ↦ e₀, |1⟩ ↦ e₁`.
fn decoder(p: &CanonicalPair) -> Result<ChoiMatrix> {
    let d = p.e0.dim();
    let mut k = ComplexMatrix::zeros(d, 2);
    k.set_column(0, p.e0.amplitudes());
    k.set_column(1, p.e1.amplitudes());
    choi_from_kraus(&[k], 2, d)
}

/// Minimum-cost decomposition of an HPTP map with `ψ± ↦ φ±`.
///
/// Both pairs are reduced to qubit canonical form; for `F > F′` the Pauli
/// map of [`canonical_qubit_map`] is sandwiched between the encoder and the
/// decoder, otherwise a single CPTP contraction is used and `λ₋ = 0`.
pub fn optimal_pure_map(psi: (&PureState, &PureState), phi: (&PureState, &PureState)) -> Result<QpDecomposition> {
    let src = canonical(psi.0, psi.1, false)?;
    let dst = canonical(phi.0, phi.1, true)?;
    let enc = encoder(&src)?;
    let dec = decoder(&dst)?;
    let f = src.overlap * src.overlap;
    let fp = dst.overlap * dst.overlap;
    if src.overlap > dst.overlap {
        canonical_qubit_map(f, fp)?.after(&enc)?.then(&dec)
    } else {
        let mid = qubit_contraction(&src, &dst)?;
        let chan = crate::channels::compose(&crate::channels::compose(&enc, &mid)?, &dec)?;
        QpDecomposition::from_cptp(chan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::is_cptp;
    use crate::linalg::max_abs;

    fn check_map(psi: (&PureState, &PureState), phi: (&PureState, &PureState), tol: f64) -> QpDecomposition {
        let q = optimal_pure_map(psi, phi).unwrap();
        for (x, y) in [(psi.0, phi.0), (psi.1, phi.1)] {
            let out = q.apply(x.projector()).unwrap();
            assert!(max_abs(&(out.matrix() - y.projector().matrix())) < tol);
        }
        assert!(is_cptp(&q.choi_plus, 1e-10).ok && is_cptp(&q.choi_minus, 1e-10).ok);
        q
    }

    #[test]
    fn closed_forms() {
        let (z, p, o) = (PureState::zero(), PureState::plus(), PureState::one());
        assert!((pure_pair_cost(&z, &p, 1, 2).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((pure_pair_cost(&z, &p, 1, 3).unwrap() - 1.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(pure_pair_cost(&z, &o, 1, 5).unwrap(), 1.0);
        assert!((pure_pair_cost_limit(&z, &p, 1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(pure_pair_cost(&z, &z, 1, 2), Err(Error::IdenticalStates(..))));
    }

    #[test]
    fn conversion_cost_cases() {
        let (z, p) = (PureState::zero(), PureState::plus());
        let theta = std::f64::consts::PI / 3.0;
        // F′ = cos²(π/3) = 1/4
        let q = PureState::from_slice(&[c(theta.cos(), 0.), c(theta.sin(), 0.)]).unwrap();
        assert!((pure_conversion_cost((&z, &p), (&z, &q)).unwrap() - 1.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(pure_conversion_cost((&z, &q), (&z, &p)).unwrap(), 1.0);
        assert_eq!(pure_conversion_cost((&z, &p), (&z, &p)).unwrap(), 1.0);
    }

    #[test]
    fn canonical_form_of_zero_plus() {
        let cf = canonical_form(&PureState::zero(), &PureState::plus()).unwrap();
        let pi8 = std::f64::consts::PI / 8.0;
        assert!((cf.alpha - pi8.cos()).abs() < 1e-12);
        assert!((cf.beta - pi8.sin()).abs() < 1e-12);
    }

    #[test]
    fn qubit_map_coefficients() {
        let p = PureMapParameters::new(0.5, 0.25).unwrap();
        let (a, b, g) = p.pauli_weights();
        let (xi, mu) = (1.5f64.sqrt(), 0.5f64.sqrt());
        assert!((a - (xi + mu) / 2.0).abs() < 1e-15);
        assert!((b - (1.0 - mu) / 2.0).abs() < 1e-15);
        assert!((g - (xi - 1.0) / 2.0).abs() < 1e-15);
        let (lo, hi) = feasible_y_interval(0.5, 0.25).unwrap();
        assert!(lo <= p.y && p.y <= hi);
        assert_eq!(p.y, lo);
    }

    #[test]
    fn clones_zero_and_plus() {
        let (z, p) = (PureState::zero(), PureState::plus());
        let (zz, pp) = (z.tensor_power(2), p.tensor_power(2));
        let q = check_map((&z, &p), (&zz, &pp), 1e-10);
        assert!((q.cost() - 1.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn same_pair_gives_identity_cost() {
        let (z, p) = (PureState::zero(), PureState::plus());
        let q = check_map((&z, &p), (&z, &p), 1e-10);
        assert_eq!(q.lambda_minus, 0.0);
        assert_eq!(q.cost(), 1.0);
    }

    #[test]
    fn complex_and_higher_dimensional_pairs() {
        let a = PureState::normalized(nalgebra::DVector::from_vec(vec![c(1., 0.5), c(0.2, -0.3), c(0.1, 0.)])).unwrap();
        let b = PureState::normalized(nalgebra::DVector::from_vec(vec![c(0.3, 0.), c(1., 0.2), c(-0.4, 0.6)])).unwrap();
        let x = PureState::normalized(nalgebra::DVector::from_vec(vec![c(0.7, 0.1), c(0.2, 0.9)])).unwrap();
        let y = PureState::normalized(nalgebra::DVector::from_vec(vec![c(0.1, -0.4), c(1.0, 0.0)])).unwrap();
        for (phi0, phi1) in [(&x, &y), (&y, &x)] {
            let q = check_map((&a, &b), (phi0, phi1), 1e-10);
            let want = pure_conversion_cost((&a, &b), (phi0, phi1)).unwrap();
            assert!((q.cost() - want).abs() < 1e-12);
        }
        let q = check_map((&x, &y), (&a, &b), 1e-10);
        let want = pure_conversion_cost((&x, &y), (&a, &b)).unwrap();
        assert!((q.cost() - want).abs() < 1e-12);
    }
}
