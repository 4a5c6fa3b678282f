//! Helpers for compiling complex Hermitian problems into real blocks.

use super::SparseSym;
use crate::linalg::{real_embedding, real_unembedding, HermitianOperator};
use nalgebra::DMatrix;

/// Sparse `emb(H)/2`, so that `⟨term, emb(J)⟩ = Tr(H J)`.
pub fn hermitian_term(h: &HermitianOperator) -> SparseSym {
    let mut s = SparseSym::from_dense(&real_embedding(h));
    s.entries.iter_mut().for_each(|e| e.2 *= 0.5);
    s
}

/// Hermitian operator represented by an embedded real block.
pub fn hermitian_block(x: &DMatrix<f64>) -> HermitianOperator {
    real_unembedding(x)
}
