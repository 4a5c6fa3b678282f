//! Primal-dual path-following interior point method with Nesterov-Todd
//! scaling and Mehrotra predictor-corrector steps.

use nalgebra::{DMatrix, DVector};

use super::presolve::{presolve, Presolved};
use super::{SdpProblem, SdpSolution, SdpStatus, SolverOptions, SparseSym};
use crate::error::{Error, Result};

const STEP_FRACTION: f64 = 0.98;

/// Constraint data after presolve: scaled, dependent rows removed.
struct Reduced {
    block_dims: Vec<usize>,
    c: Vec<DMatrix<f64>>,
    cu: DVector<f64>,
    /// per row: (block, matrix)
    a: Vec<Vec<(usize, SparseSym)>>,
    f: DMatrix<f64>,
    b: DVector<f64>,
}

impl Reduced {
    fn build(p: &SdpProblem, pre: &Presolved) -> Self {
        let a = pre
            .rows
            .iter()
            .zip(&pre.row_scale)
            .map(|(&k, &s)| {
                p.constraints[k]
                    .blocks
                    .iter()
                    .map(|(blk, m)| {
                        let mut m = m.clone();
                        m.entries.iter_mut().for_each(|e| e.2 /= s);
                        (*blk, m)
                    })
                    .collect()
            })
            .collect();
        let mut f = DMatrix::zeros(pre.rows.len(), pre.free.len());
        for (r, (&k, &s)) in pre.rows.iter().zip(&pre.row_scale).enumerate() {
            for &(j, coef) in &p.constraints[k].free {
                if let Some(col) = pre.free.iter().position(|&x| x == j) {
                    f[(r, col)] += coef / s;
                }
            }
        }
        let b = DVector::from_iterator(
            pre.rows.len(),
            pre.rows.iter().zip(&pre.row_scale).map(|(&k, &s)| p.constraints[k].rhs / s),
        );
        Self {
            block_dims: p.block_dims.clone(),
            c: p.objective.iter().map(|c| c.to_dense()).collect(),
            cu: DVector::from_iterator(pre.free.len(), pre.free.iter().map(|&j| p.free_objective[j])),
            a,
            f,
            b,
        }
    }

    fn m(&self) -> usize {
        self.b.len()
    }

    fn apply_a(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.a.iter().map(|row| row.iter().map(|(b, a)| a.dot(&x[*b])).sum()))
    }

    fn apply_at(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.block_dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for (row, &yk) in self.a.iter().zip(y.iter()) {
            if yk == 0.0 {
                continue;
            }
            for (b, a) in row {
                a.add_scaled_to(&mut out[*b], yk);
            }
        }
        out
    }
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Per-block Nesterov-Todd scaling `W = G Gᵀ` with `G⁻¹ X G⁻ᵀ = Gᵀ S G = diag(sv)`.
struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    sv: DVector<f64>,
    /// Cholesky factors of X and S, inverted, for step lengths.
    lx_inv: DMatrix<f64>,
    ls_inv: DMatrix<f64>,
}

fn scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let n = x.nrows();
    let lx = x.clone().cholesky()?.l();
    let ls = s.clone().cholesky()?.l();
    let eye = DMatrix::identity(n, n);
    let lx_inv = lx.solve_lower_triangular(&eye)?;
    let ls_inv = ls.solve_lower_triangular(&eye)?;
    let svd = (ls.transpose() * &lx).svd(false, true);
    let v = svd.v_t?.transpose();
    let sv = svd.singular_values;
    if sv.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return None;
    }
    let inv_sqrt = DMatrix::from_diagonal(&sv.map(|x| 1.0 / x.sqrt()));
    let sqrt = DMatrix::from_diagonal(&sv.map(|x| x.sqrt()));
    let g = &lx * &v * inv_sqrt;
    let g_inv = sqrt * v.transpose() * &lx_inv;
    let w = &g * g.transpose();
    Some(Scaling { g, g_inv, w, sv, lx_inv, ls_inv })
}

/// Largest step keeping `L (I + α L⁻¹ Δ L⁻ᵀ) Lᵀ` PSD.
fn max_step(l_inv: &DMatrix<f64>, delta: &DMatrix<f64>) -> f64 {
    let mut z = l_inv * delta * l_inv.transpose();
    symmetrize(&mut z);
    let min = z.symmetric_eigenvalues().min();
    if min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    du: DVector<f64>,
}

struct Newton<'a> {
    red: &'a Reduced,
    sc: &'a [Scaling],
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<'a> Newton<'a> {
    fn new(red: &'a Reduced, sc: &'a [Scaling]) -> Option<Self> {
        let m = red.m();
        let nf = red.f.ncols();
        let mut k = DMatrix::<f64>::zeros(m + nf, m + nf);
        // Schur complement M_kl = ⟨A_k, W A_l W⟩
        let mut t: Vec<DMatrix<f64>> = red.block_dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        let mut touched = vec![false; red.block_dims.len()];
        for l in 0..m {
            for (b, a) in &red.a[l] {
                let tb = &mut t[*b];
                if !touched[*b] {
                    tb.fill(0.0);
                    touched[*b] = true;
                }
                let w = &sc[*b].w;
                for &(i, j, v) in &a.entries {
                    let wi = w.column(i);
                    let wj = w.column(j);
                    tb.ger(v, &wi, &wj, 1.0);
                    if i != j {
                        tb.ger(v, &wj, &wi, 1.0);
                    }
                }
            }
            for kk in 0..m {
                let mut acc = 0.0;
                for (b, a) in &red.a[kk] {
                    if touched[*b] {
                        acc += a.dot(&t[*b]);
                    }
                }
                k[(kk, l)] = acc;
            }
            for (b, _) in &red.a[l] {
                touched[*b] = false;
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let v = 0.5 * (k[(i, j)] + k[(j, i)]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        for i in 0..m {
            for j in 0..nf {
                k[(i, m + j)] = red.f[(i, j)];
                k[(m + j, i)] = red.f[(i, j)];
            }
        }
        if k.iter().any(|x| !x.is_finite()) {
            return None;
        }
        Some(Self { red, sc, lu: k.lu() })
    }

    /// Solves the linearized system with `ΔX + W ΔS W = rc`.
    fn solve(
        &self,
        rp: &DVector<f64>,
        rd: &[DMatrix<f64>],
        ru: &DVector<f64>,
        rc: &[DMatrix<f64>],
    ) -> Option<Direction> {
        let red = self.red;
        let m = red.m();
        let nf = red.f.ncols();
        let tmp: Vec<DMatrix<f64>> = rc
            .iter()
            .zip(rd)
            .zip(self.sc)
            .map(|((rcb, rdb), s)| rcb - &s.w * rdb * &s.w)
            .collect();
        let h = rp - red.apply_a(&tmp);
        let mut rhs = DVector::zeros(m + nf);
        rhs.rows_mut(0, m).copy_from(&h);
        rhs.rows_mut(m, nf).copy_from(ru);
        let sol = self.lu.solve(&rhs)?;
        if sol.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let dy = sol.rows(0, m).into_owned();
        let du = sol.rows(m, nf).into_owned();
        let aty = red.apply_at(&dy);
        let mut ds = Vec::with_capacity(rd.len());
        let mut dx = Vec::with_capacity(rd.len());
        for ((rdb, atyb), (rcb, s)) in rd.iter().zip(&aty).zip(rc.iter().zip(self.sc)) {
            let mut dsb = rdb - atyb;
            symmetrize(&mut dsb);
            let mut dxb = rcb - &s.w * &dsb * &s.w;
            symmetrize(&mut dxb);
            ds.push(dsb);
            dx.push(dxb);
        }
        Some(Direction { dx, ds, dy, du })
    }
}

/// Solves `p`. Deterministic: identical inputs give bitwise identical output.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    p.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
    }
    let pre = presolve(p);
    let nblocks = p.block_dims.len();
    let zeros_blocks = || p.block_dims.iter().map(|&d| DMatrix::<f64>::zeros(d, d)).collect::<Vec<_>>();

    let finish = |status: SdpStatus,
                  x: Vec<DMatrix<f64>>,
                  s: Vec<DMatrix<f64>>,
                  y_red: &DVector<f64>,
                  u_red: &DVector<f64>,
                  iterations: usize|
     -> SdpSolution {
        let mut y = vec![0.0; p.constraints.len()];
        for ((&k, &sc), &v) in pre.rows.iter().zip(&pre.row_scale).zip(y_red.iter()) {
            y[k] = v / sc;
        }
        let mut u = vec![0.0; p.free_count()];
        for (&j, &v) in pre.free.iter().zip(u_red.iter()) {
            u[j] = v;
        }
        let primal_obj = p.primal_objective(&x, &u);
        let dual_obj = p.dual_objective(&y);
        let ax = p.apply_constraints(&x, &u);
        let bnorm = p.constraints.iter().map(|c| c.rhs * c.rhs).sum::<f64>().sqrt();
        let primal_residual = p
            .constraints
            .iter()
            .zip(&ax)
            .map(|(c, v)| (c.rhs - v).powi(2))
            .sum::<f64>()
            .sqrt()
            / (1.0 + bnorm);
        let slack = p.dual_slack(&y);
        let cnorm = p.objective.iter().map(|c| c.frobenius_sq()).sum::<f64>().sqrt()
            + p.free_objective.iter().map(|c| c * c).sum::<f64>().sqrt();
        let rd: f64 = slack.iter().zip(&s).map(|(a, b)| (a - b).norm_squared()).sum::<f64>()
            + p.free_dual_residual(&y).iter().map(|r| r * r).sum::<f64>();
        let dual_residual = rd.sqrt() / (1.0 + cnorm);
        let gap = (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs() + dual_obj.abs());
        SdpSolution {
            status,
            x,
            free: u,
            y,
            s,
            primal_obj,
            dual_obj,
            gap,
            primal_residual,
            dual_residual,
            iterations,
            dropped_constraints: pre.dropped_rows.clone(),
            dropped_free: pre.dropped_free.clone(),
        }
    };

    if let Some(v) = pre.verdict {
        let y0 = DVector::zeros(pre.rows.len());
        let u0 = DVector::zeros(pre.free.len());
        return Ok(finish(v, zeros_blocks(), zeros_blocks(), &y0, &u0, 0));
    }

    let mut red = Reduced::build(p, &pre);
    // Work with a unit-size objective so that y and S scale with C and X does not.
    let cscale = red
        .c
        .iter()
        .map(|c| c.amax())
        .fold(red.cu.amax(), f64::max);
    let cscale = if cscale > 0.0 && cscale.is_finite() { cscale } else { 1.0 };
    for c in &mut red.c {
        *c /= cscale;
    }
    red.cu /= cscale;
    let m = red.m();
    let nf = red.f.ncols();
    let total_dim: usize = p.block_dims.iter().sum::<usize>().max(1);

    let tau = 1.0 + red.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut x: Vec<DMatrix<f64>> = p.block_dims.iter().map(|&d| DMatrix::identity(d, d) * tau).collect();
    let mut s = x.clone();
    let mut y = DVector::<f64>::zeros(m);
    let mut u = DVector::<f64>::zeros(nf);

    let bnorm = red.b.norm();
    let cnorm = frob(&red.c) + red.cu.norm();
    let mut status = SdpStatus::MaxIterations;
    let mut iter = 0;

    while iter <= opts.max_iter {
        let rp = &red.b - red.apply_a(&x) - &red.f * &u;
        let aty = red.apply_at(&y);
        let rd: Vec<DMatrix<f64>> =
            red.c.iter().zip(&aty).zip(&s).map(|((c, a), sb)| c - a - sb).collect();
        let ru = &red.cu - red.f.transpose() * &y;
        let pobj = inner(&red.c, &x) + red.cu.dot(&u);
        let dobj = red.b.dot(&y);
        let relp = rp.norm() / (1.0 + bnorm);
        let reld = (frob(&rd).powi(2) + ru.norm_squared()).sqrt() / (1.0 + cnorm);
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        if relp < opts.tol && reld < opts.tol && relgap < opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if dobj > 1.0 / opts.tol && reld < opts.tol {
            status = SdpStatus::Infeasible;
            break;
        }
        if pobj < -1.0 / opts.tol && relp < opts.tol {
            status = SdpStatus::Unbounded;
            break;
        }
        if iter == opts.max_iter {
            break;
        }
        iter += 1;

        let sc: Vec<Scaling> = match x.iter().zip(&s).map(|(xb, sb)| scaling(xb, sb)).collect() {
            Some(v) => v,
            None => break,
        };
        let newton = match Newton::new(&red, &sc) {
            Some(n) => n,
            None => break,
        };
        let mu = inner(&x, &s) / total_dim as f64;

        // predictor
        let rc_aff: Vec<DMatrix<f64>> = x.iter().map(|xb| -xb).collect();
        let aff = match newton.solve(&rp, &rd, &ru, &rc_aff) {
            Some(d) => d,
            None => break,
        };
        let (ap, ad) = step_lengths(&sc, &aff);
        let x_aff: Vec<DMatrix<f64>> = x.iter().zip(&aff.dx).map(|(a, d)| a + d * ap).collect();
        let s_aff: Vec<DMatrix<f64>> = s.iter().zip(&aff.ds).map(|(a, d)| a + d * ad).collect();
        let mu_aff = inner(&x_aff, &s_aff) / total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let rc: Vec<DMatrix<f64>> = sc
            .iter()
            .zip(aff.dx.iter().zip(&aff.ds))
            .map(|(scb, (dxb, dsb))| {
                let n = scb.sv.len();
                let dxt = &scb.g_inv * dxb * scb.g_inv.transpose();
                let dst = scb.g.transpose() * dsb * &scb.g;
                let prod = &dxt * &dst;
                let mut r = -(&prod + prod.transpose()) * 0.5;
                for i in 0..n {
                    r[(i, i)] += sigma * mu - scb.sv[i] * scb.sv[i];
                }
                let mut dmat = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        dmat[(i, j)] = 2.0 * r[(i, j)] / (scb.sv[i] + scb.sv[j]);
                    }
                }
                let mut out = &scb.g * dmat * scb.g.transpose();
                symmetrize(&mut out);
                out
            })
            .collect();
        let dir = match newton.solve(&rp, &rd, &ru, &rc) {
            Some(d) => d,
            None => break,
        };
        let (ap, ad) = step_lengths(&sc, &dir);
        for b in 0..nblocks {
            x[b] += &dir.dx[b] * ap;
            s[b] += &dir.ds[b] * ad;
            symmetrize(&mut x[b]);
            symmetrize(&mut s[b]);
        }
        u += &dir.du * ap;
        y += &dir.dy * ad;
    }

    let s: Vec<DMatrix<f64>> = s.into_iter().map(|b| b * cscale).collect();
    Ok(finish(status, x, s, &(y * cscale), &u, iter))
}

fn step_lengths(sc: &[Scaling], d: &Direction) -> (f64, f64) {
    let mut ap = f64::INFINITY;
    let mut ad = f64::INFINITY;
    for (b, scb) in sc.iter().enumerate() {
        ap = ap.min(max_step(&scb.lx_inv, &d.dx[b]));
        ad = ad.min(max_step(&scb.ls_inv, &d.ds[b]));
    }
    ((STEP_FRACTION * ap).min(1.0), (STEP_FRACTION * ad).min(1.0))
}
