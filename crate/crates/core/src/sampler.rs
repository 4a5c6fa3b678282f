//! Monte Carlo execution of a quasiprobability decomposition: pick a branch
//! with probability `λ±/η`, run it, measure a two-outcome observable and
//! record `±η·x`.
//!
//! Randomness comes from ChaCha8 used as a counter-based stream: round `i`
//! reads keystream words `4i..4i+4` (one `u64` for the branch, one for the
//! outcome) of the generator seeded by `seed`. Rounds are processed in
//! parallel chunks that seek to their first word, so every estimate is
//! identical to a sequential run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{apply_choi, QpDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, max_abs, pauli_string, DensityMatrix, HermitianOperator};

/// Rounds per parallel work item.
const CHUNK: u64 = 1 << 16;
/// Negative Born probabilities beyond this are an error.
const NEGATIVE_PROBABILITY: f64 = 1e-9;

/// Two-outcome measurement `{X₊, X₋}` with `X = X₊ − X₋`.
#[derive(Debug, Clone)]
pub struct DichotomicObservable {
    x: HermitianOperator,
    plus: HermitianOperator,
    minus: HermitianOperator,
    rescaling: Option<(f64, f64)>,
}

impl DichotomicObservable {
    /// `X` with spectrum in `{+1, −1}`; `X₊ = (𝟙 + X)/2`.
    pub fn new(x: HermitianOperator) -> Result<Self> {
        let sq = x.matrix() * x.matrix();
        let dev = max_abs(&(sq - crate::linalg::identity(x.dim())));
        if dev > 1e-10 {
            return Err(Error::InvalidArgument(format!("observable does not square to 𝟙 (deviation {dev:.2e})")));
        }
        Ok(Self::from_effects(x, None))
    }

    fn from_effects(x: HermitianOperator, rescaling: Option<(f64, f64)>) -> Self {
        let id = HermitianOperator::identity(x.dim());
        let plus = id.add(&x).scale(0.5);
        let minus = id.sub(&x).scale(0.5);
        Self { x, plus, minus, rescaling }
    }

    /// Tensor product of Paulis, e.g. `"XX"`.
    pub fn pauli(s: &str) -> Result<Self> {
        Self::new(HermitianOperator::new(pauli_string(s)?)?)
    }

    /// Any Hermitian observable, mapped to `X′ = (2X − (x_max + x_min)𝟙)/(x_max − x_min)`.
    /// When `X′` has eigenvalues strictly inside `(−1, 1)` the measurement
    /// is the two-outcome POVM `{(𝟙 ± X′)/2}`.
    pub fn from_general(x: HermitianOperator) -> Result<Self> {
        if let Ok(o) = Self::new(x.clone()) {
            return Ok(o);
        }
        let (vals, _) = eig_hermitian(&x);
        let (hi, lo) = (vals[0], vals[vals.len() - 1]);
        if hi - lo < 1e-12 {
            return Err(Error::InvalidArgument("observable is a multiple of the identity".into()));
        }
        let id = HermitianOperator::identity(x.dim());
        let scaled = x.scale(2.0 / (hi - lo)).sub(&id.scale((hi + lo) / (hi - lo)));
        Ok(Self::from_effects(scaled, Some((lo, hi))))
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.x
    }

    pub fn plus(&self) -> &HermitianOperator {
        &self.plus
    }

    pub fn minus(&self) -> &HermitianOperator {
        &self.minus
    }

    /// `(x_min, x_max)` of the original observable when it was rescaled.
    pub fn rescaling(&self) -> Option<(f64, f64)> {
        self.rescaling
    }

    /// Maps a value of the measured `X′` back to the units of the original.
    pub fn to_original(&self, v: f64) -> f64 {
        match self.rescaling {
            Some((lo, hi)) => 0.5 * ((hi - lo) * v + (hi + lo)),
            None => v,
        }
    }
}

/// Output of [`simulate_virtual_measurement`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub rounds: u64,
    pub mean: f64,
    /// Every sample is `±η`, so this is `η²`.
    pub second_moment: f64,
    pub standard_error: f64,
    pub eta_used: f64,
    pub seed: u64,
    /// Rounds that ran the `Λ₊` branch.
    pub plus_branch_rounds: u64,
    /// `(x_min, x_max)` when the observable was rescaled to `[−1, 1]`.
    pub rescaling: Option<(f64, f64)>,
}

impl Estimate {
    /// `2 exp(−ε²N / (2η²))`.
    pub fn hoeffding(&self, epsilon: f64) -> f64 {
        hoeffding_bound(self.eta_used, self.rounds, epsilon)
    }
}

/// `2 exp(−ε²N / (2η²))`.
pub fn hoeffding_bound(eta: f64, n: u64, epsilon: f64) -> f64 {
    2.0 * (-epsilon * epsilon * n as f64 / (2.0 * eta * eta)).exp()
}

fn born(out: &HermitianOperator, effect: &HermitianOperator) -> Result<f64> {
    let p = out.inner(effect);
    if !(-NEGATIVE_PROBABILITY..=1.0 + NEGATIVE_PROBABILITY).contains(&p) {
        return Err(Error::NegativeProbability(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

struct Plan {
    eta: f64,
    branch_plus: f64,
    /// `P(x = +1)` given the `+` and `−` branch.
    outcome_plus: [f64; 2],
}

fn plan(q: &QpDecomposition, rho: &DensityMatrix, x: &DichotomicObservable) -> Result<Plan> {
    if rho.dim() != q.dim_in() {
        return Err(Error::DimensionMismatch { expected: q.dim_in(), got: rho.dim() });
    }
    if x.dim() != q.dim_out() {
        return Err(Error::DimensionMismatch { expected: q.dim_out(), got: x.dim() });
    }
    let eta = q.cost();
    let mut outcome_plus = [0.0; 2];
    for (slot, branch) in outcome_plus.iter_mut().zip([&q.choi_plus, &q.choi_minus]) {
        let out = apply_choi(branch, rho)?;
        let pp = born(&out, x.plus())?;
        born(&out, x.minus())?;
        *slot = pp;
    }
    Ok(Plan { eta, branch_plus: q.lambda_plus / eta, outcome_plus })
}

/// `Σ sign·x` and the `+` branch count over rounds `[start, end)`.
fn run_rounds(plan: &Plan, seed: u64, start: u64, end: u64) -> (i64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(4 * start as u128);
    let (mut acc, mut plus) = (0i64, 0u64);
    for _ in start..end {
        let b: f64 = rng.random();
        let o: f64 = rng.random();
        let branch = b < plan.branch_plus;
        let p = if branch { plan.outcome_plus[0] } else { plan.outcome_plus[1] };
        let x = if o < p { 1 } else { -1 };
        acc += if branch { x } else { -x };
        plus += branch as u64;
    }
    (acc, plus)
}

/// Estimates `Tr[Λ̃(ρ) X]` from `n` sampled rounds of the decomposition.
pub fn simulate_virtual_measurement(
    q: &QpDecomposition,
    rho: &DensityMatrix,
    x: &DichotomicObservable,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("number of rounds must be positive".into()));
    }
    let plan = plan(q, rho, x)?;
    let chunks = n.div_ceil(CHUNK);
    let (signed, plus) = (0..chunks)
        .into_par_iter()
        .map(|c| run_rounds(&plan, seed, c * CHUNK, ((c + 1) * CHUNK).min(n)))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let eta = plan.eta;
    let mean = eta * signed as f64 / n as f64;
    let second_moment = eta * eta;
    let standard_error = if n > 1 {
        ((second_moment - mean * mean).max(0.0) / (n - 1) as f64).sqrt()
    } else {
        eta
    };
    Ok(Estimate {
        rounds: n,
        mean,
        second_moment,
        standard_error,
        eta_used: eta,
        seed,
        plus_branch_rounds: plus,
        rescaling: x.rescaling(),
    })
}

/// Exact `Tr[Λ̃(ρ) X′]` for the measured observable.
pub fn exact_expectation(q: &QpDecomposition, rho: &DensityMatrix, x: &DichotomicObservable) -> Result<f64> {
    Ok(q.apply(rho)?.inner(x.operator()))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Coverage {
    /// Fraction of trials with `|mean − truth| ≥ ε`.
    pub fraction: f64,
    pub bound: f64,
    /// `3√(bound / trials)`.
    pub slack: f64,
    pub truth: f64,
    pub trials: u64,
}

impl Coverage {
    pub fn within_bound(&self) -> bool {
        self.fraction <= self.bound + self.slack
    }
}

/// Runs `trials` estimates with seeds `seed, seed + 1, …` and counts the
/// deviations of at least `epsilon` from the exact value.
pub fn empirical_coverage(
    q: &QpDecomposition,
    rho: &DensityMatrix,
    x: &DichotomicObservable,
    n: u64,
    trials: u64,
    epsilon: f64,
    seed: u64,
) -> Result<Coverage> {
    if trials == 0 {
        return Err(Error::InvalidArgument("number of trials must be positive".into()));
    }
    let truth = exact_expectation(q, rho, x)?;
    let misses = (0..trials)
        .into_par_iter()
        .map(|t| simulate_virtual_measurement(q, rho, x, n, seed.wrapping_add(t)).map(|e| ((e.mean - truth).abs() >= epsilon) as u64))
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    let bound = hoeffding_bound(q.cost(), n, epsilon);
    Ok(Coverage {
        fraction: misses as f64 / trials as f64,
        bound,
        slack: 3.0 * (bound / trials as f64).sqrt(),
        truth,
        trials,
    })
}
