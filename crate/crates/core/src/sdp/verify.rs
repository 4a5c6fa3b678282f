//! Independent recomputation of residuals, gap and cone membership.

use serde::Serialize;

use super::{SdpProblem, SdpSolution};

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub min_eig_x: Vec<f64>,
    pub min_eig_s: Vec<f64>,
    pub primal_ok: bool,
    pub dual_ok: bool,
    pub gap_ok: bool,
    pub x_cone_ok: bool,
    pub s_cone_ok: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.primal_ok && self.dual_ok && self.gap_ok && self.x_cone_ok && self.s_cone_ok
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.primal_ok {
            out.push("primal residual");
        }
        if !self.dual_ok {
            out.push("dual residual");
        }
        if !self.gap_ok {
            out.push("duality gap");
        }
        if !self.x_cone_ok {
            out.push("primal cone");
        }
        if !self.s_cone_ok {
            out.push("dual cone");
        }
        out
    }
}

/// Checks `s` against `p` using only the problem data and the returned
/// iterates. Residuals and gap are relative, as reported by the solver.
pub fn verify_solution(p: &SdpProblem, s: &SdpSolution, tol: f64) -> VerificationReport {
    let ax = p.apply_constraints(&s.x, &s.free);
    let bnorm = p.constraints.iter().map(|c| c.rhs * c.rhs).sum::<f64>().sqrt();
    let primal_residual =
        p.constraints.iter().zip(&ax).map(|(c, v)| (c.rhs - v).powi(2)).sum::<f64>().sqrt() / (1.0 + bnorm);

    let slack = p.dual_slack(&s.y);
    let cnorm = p.objective.iter().map(|c| c.frobenius_sq()).sum::<f64>().sqrt()
        + p.free_objective.iter().map(|c| c * c).sum::<f64>().sqrt();
    let rd = slack.iter().zip(&s.s).map(|(a, b)| (a - b).norm_squared()).sum::<f64>()
        + p.free_dual_residual(&s.y).iter().map(|r| r * r).sum::<f64>();
    let dual_residual = rd.sqrt() / (1.0 + cnorm);

    let pobj = p.primal_objective(&s.x, &s.free);
    let dobj = p.dual_objective(&s.y);
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

    let min_eig = |m: &nalgebra::DMatrix<f64>| {
        let sym = (m + m.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    };
    let min_eig_x: Vec<f64> = s.x.iter().map(min_eig).collect();
    let min_eig_s: Vec<f64> = s.s.iter().map(min_eig).collect();

    VerificationReport {
        primal_ok: primal_residual < tol,
        dual_ok: dual_residual < tol,
        gap_ok: gap < tol,
        x_cone_ok: min_eig_x.iter().all(|&v| v >= -tol),
        s_cone_ok: min_eig_s.iter().all(|&v| v >= -tol),
        primal_residual,
        dual_residual,
        gap,
        min_eig_x,
        min_eig_s,
    }
}
