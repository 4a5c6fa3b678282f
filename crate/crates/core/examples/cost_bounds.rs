// Discrimination bounds sandwiching the SDP cost of a mixed pair.

use vclone::cloning::{cost_bounds, default_prior_grid, optimal_cost, CloneProblem};
use vclone::linalg::DensityMatrix;
use vclone::sdp::SolverOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r1 = DensityMatrix::from_bloch([0.0, 0.0, 0.5])?;
    let r2 = DensityMatrix::from_bloch([0.5, 0.0, 0.0])?;
    for n in [2, 3] {
        let b = cost_bounds(&r1, &r2, n, &default_prior_grid())?;
        let eta = optimal_cost(&CloneProblem::new(vec![r1.clone(), r2.clone()], 1, n)?, &SolverOptions::default())?.eta;
        println!(
            "n = {n}: {:.8} <= {:.8} <= {:.8}   (priors {:.3}/{:.3}, equal-prior bound {:.8})",
            b.lower, eta, b.upper, b.priors_used.0, b.priors_used.1, b.equal_prior_lower
        );
        assert!(b.lower - 1e-7 <= eta && eta <= b.upper + 1e-7);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
