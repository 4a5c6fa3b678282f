//! Row and free-column reduction ahead of the interior point iterations.
//!
//! The Newton system needs a full-row-rank constraint operator and a
//! full-column-rank free block. Dependent rows are dropped when consistent
//! and reported as infeasibility otherwise; free variables whose columns are
//! dependent are fixed to zero when the objective agrees.

use nalgebra::DMatrix;

use super::{SdpProblem, SdpStatus};

/// Relative squared residual below which a row/column counts as dependent.
const DEPENDENCE_SQ: f64 = 1e-14;
/// Relative right-hand-side mismatch that certifies linear infeasibility.
const INCONSISTENCY: f64 = 1e-7;

pub(crate) struct Presolved {
    /// Kept constraint indices, in order.
    pub rows: Vec<usize>,
    /// Euclidean norm of each kept row (rows are divided by it).
    pub row_scale: Vec<f64>,
    pub dropped_rows: Vec<usize>,
    pub free: Vec<usize>,
    pub dropped_free: Vec<usize>,
    pub verdict: Option<SdpStatus>,
}

type SparseVec = Vec<(usize, f64)>;

fn row_vector(p: &SdpProblem, k: usize, offsets: &[usize], free_offset: usize) -> SparseVec {
    let con = &p.constraints[k];
    let mut v: SparseVec = Vec::new();
    for (b, a) in &con.blocks {
        for &(i, j, val) in &a.entries {
            let key = offsets[*b] + j * (j + 1) / 2 + i;
            let w = if i == j { val } else { val * std::f64::consts::SQRT_2 };
            v.push((key, w));
        }
    }
    for &(j, f) in &con.free {
        v.push((free_offset + j, f));
    }
    v.sort_by_key(|e| e.0);
    let mut merged: SparseVec = Vec::with_capacity(v.len());
    for (key, w) in v {
        match merged.last_mut() {
            Some(last) if last.0 == key => last.1 += w,
            _ => merged.push((key, w)),
        }
    }
    merged.retain(|e| e.1 != 0.0);
    merged
}

fn sparse_dot(a: &SparseVec, b: &SparseVec) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Incremental Cholesky factor of the Gram matrix of accepted vectors.
struct GramBasis {
    l: Vec<Vec<f64>>,
}

enum Insert {
    Independent,
    /// Combination coefficients over the accepted vectors.
    Dependent(Vec<f64>),
}

impl GramBasis {
    fn new() -> Self {
        Self { l: Vec::new() }
    }

    /// `cross[i] = ⟨v_i, v⟩` for accepted `v_i`, `diag = ⟨v, v⟩`.
    fn insert(&mut self, cross: &[f64], diag: f64) -> Insert {
        let n = self.l.len();
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = cross[i];
            for (j, zj) in z.iter().enumerate().take(i) {
                s -= self.l[i][j] * zj;
            }
            z[i] = s / self.l[i][i];
        }
        let r = diag - z.iter().map(|x| x * x).sum::<f64>();
        if r > DEPENDENCE_SQ * diag.max(f64::MIN_POSITIVE) {
            let mut row = z;
            row.push(r.sqrt());
            self.l.push(row);
            Insert::Independent
        } else {
            // back substitution with Lᵀ
            let mut c = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = z[i];
                for j in (i + 1)..n {
                    s -= self.l[j][i] * c[j];
                }
                c[i] = s / self.l[i][i];
            }
            Insert::Dependent(c)
        }
    }
}

pub(crate) fn presolve(p: &SdpProblem) -> Presolved {
    let mut offsets = Vec::with_capacity(p.block_dims.len());
    let mut acc = 0;
    for &d in &p.block_dims {
        offsets.push(acc);
        acc += d * (d + 1) / 2;
    }
    let vecs: Vec<SparseVec> = (0..p.constraints.len()).map(|k| row_vector(p, k, &offsets, acc)).collect();

    let mut out = Presolved {
        rows: Vec::new(),
        row_scale: Vec::new(),
        dropped_rows: Vec::new(),
        free: Vec::new(),
        dropped_free: Vec::new(),
        verdict: None,
    };

    let mut basis = GramBasis::new();
    // rhs of kept rows, after scaling
    let mut kept_rhs: Vec<f64> = Vec::new();
    for (k, v) in vecs.iter().enumerate() {
        let norm = sparse_dot(v, v).sqrt();
        let rhs = p.constraints[k].rhs;
        if norm == 0.0 {
            if rhs.abs() > INCONSISTENCY {
                out.verdict = Some(SdpStatus::Infeasible);
            }
            out.dropped_rows.push(k);
            continue;
        }
        let cross: Vec<f64> =
            out.rows.iter().zip(&out.row_scale).map(|(&r, &s)| sparse_dot(&vecs[r], v) / (s * norm)).collect();
        match basis.insert(&cross, 1.0) {
            Insert::Independent => {
                out.rows.push(k);
                out.row_scale.push(norm);
                kept_rhs.push(rhs / norm);
            }
            Insert::Dependent(coef) => {
                let predicted: f64 = coef.iter().zip(&kept_rhs).map(|(c, b)| c * b).sum();
                let scale: f64 = 1.0 + coef.iter().zip(&kept_rhs).map(|(c, b)| (c * b).abs()).sum::<f64>();
                if (rhs / norm - predicted).abs() > INCONSISTENCY * scale {
                    out.verdict = Some(SdpStatus::Infeasible);
                }
                out.dropped_rows.push(k);
            }
        }
    }

    // free columns over the kept, scaled rows
    let nf = p.free_count();
    if nf > 0 {
        let mut fmat = DMatrix::<f64>::zeros(out.rows.len(), nf);
        for (r, (&k, &s)) in out.rows.iter().zip(&out.row_scale).enumerate() {
            for &(j, f) in &p.constraints[k].free {
                fmat[(r, j)] += f / s;
            }
        }
        let mut basis = GramBasis::new();
        for j in 0..nf {
            let col = fmat.column(j);
            let diag = col.norm_squared();
            if diag == 0.0 {
                if p.free_objective[j] != 0.0 && out.verdict.is_none() {
                    out.verdict = Some(SdpStatus::Unbounded);
                }
                out.dropped_free.push(j);
                continue;
            }
            let cross: Vec<f64> = out.free.iter().map(|&i| fmat.column(i).dot(&col)).collect();
            let scale_diag = diag.sqrt();
            let cross_scaled: Vec<f64> = cross
                .iter()
                .zip(&out.free)
                .map(|(c, &i)| c / (fmat.column(i).norm() * scale_diag))
                .collect();
            match basis.insert(&cross_scaled, 1.0) {
                Insert::Independent => out.free.push(j),
                Insert::Dependent(coef) => {
                    // coef refers to normalized columns
                    let predicted: f64 = coef
                        .iter()
                        .zip(&out.free)
                        .map(|(c, &i)| c * p.free_objective[i] / fmat.column(i).norm())
                        .sum::<f64>()
                        * scale_diag;
                    let cj = p.free_objective[j];
                    if (cj - predicted).abs() > INCONSISTENCY * (1.0 + cj.abs()) && out.verdict.is_none() {
                        out.verdict = Some(SdpStatus::Unbounded);
                    }
                    out.dropped_free.push(j);
                }
            }
        }
    }
    out
}
