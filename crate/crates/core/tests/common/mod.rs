#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

use vclone::channels::{choi_from_kraus, ChoiMatrix};
use vclone::linalg::{c, ComplexMatrix, DensityMatrix, HermitianOperator, PureState, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut impl Rng) -> C64 {
    c(StandardNormal.sample(r), StandardNormal.sample(r))
}

pub fn ginibre(r: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(r))
}

pub fn pure(r: &mut impl Rng, d: usize) -> PureState {
    let v: Vec<C64> = (0..d).map(|_| gaussian(r)).collect();
    PureState::normalized(nalgebra::DVector::from_vec(v)).unwrap()
}

pub fn bloch(r: &mut impl Rng, radius: f64) -> [f64; 3] {
    let u: [f64; 3] = UnitSphere.sample(r);
    [radius * u[0], radius * u[1], radius * u[2]]
}

/// Full rank qubit state with Bloch radius in `[0.1, 0.95]`.
pub fn mixed_qubit(r: &mut impl Rng) -> DensityMatrix {
    let radius = r.random_range(0.1..0.95);
    DensityMatrix::from_bloch(bloch(r, radius)).unwrap()
}

pub fn hermitian(r: &mut impl Rng, d: usize) -> HermitianOperator {
    let g = ginibre(r, d, d);
    HermitianOperator::new((&g + g.adjoint()) * c(0.5, 0.0)).unwrap()
}

pub fn traceless_hermitian(r: &mut impl Rng, d: usize) -> HermitianOperator {
    let h = hermitian(r, d);
    let t = h.trace() / d as f64;
    h.sub(&HermitianOperator::identity(d).scale(t))
}

pub fn density(r: &mut impl Rng, d: usize) -> DensityMatrix {
    let g = ginibre(r, d, d);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityMatrix::new(m * c(1.0 / t, 0.0)).unwrap()
}

/// Kraus operators of a random channel with `rank` operators.
pub fn kraus(r: &mut impl Rng, d_in: usize, d_out: usize, rank: usize) -> Vec<ComplexMatrix> {
    let g = ginibre(r, rank * d_out, d_in);
    let q = g.qr().q();
    (0..rank).map(|k| q.rows(k * d_out, d_out).into_owned()).collect()
}

pub fn cptp(r: &mut impl Rng, d_in: usize, d_out: usize) -> ChoiMatrix {
    let rank = r.random_range(1..=d_in * d_out);
    choi_from_kraus(&kraus(r, d_in, d_out, rank), d_in, d_out).unwrap()
}

pub fn transpose_choi(d: usize) -> ChoiMatrix {
    ChoiMatrix::from_unit_images(d, d, |i, j| {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, i)] = c(1.0, 0.0);
        m
    })
    .unwrap()
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    vclone::linalg::max_abs(&(a - b))
}
