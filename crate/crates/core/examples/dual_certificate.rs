// Lower bounds from dual certificates: solver multipliers and Helstrom projectors.

use vclone::cloning::{dual_certificate_from_discrimination, optimal_cost, verify_certificate, CloneProblem};
use vclone::linalg::DensityMatrix;
use vclone::sdp::SolverOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r1 = DensityMatrix::from_bloch([0.1, 0.2, 0.6])?;
    let r2 = DensityMatrix::from_bloch([0.5, -0.3, 0.1])?;
    let problem = CloneProblem::new(vec![r1.clone(), r2.clone()], 1, 2)?;
    let res = optimal_cost(&problem, &SolverOptions::default())?;
    println!("eta = {:.8}", res.eta);
    println!(
        "solver certificate: objective {:.8}, feasible {}",
        res.dual_certificate.objective, res.certificate_check.feasible
    );

    for p1 in [0.5, 0.3, 0.7] {
        let cert = dual_certificate_from_discrimination(&r1, &r2, 2, (p1, 1.0 - p1))?;
        let check = verify_certificate(&problem, &cert, 1e-9)?;
        println!("helstrom certificate p1 = {p1}: objective {:.8}, feasible {}", cert.objective, check.feasible);
        assert!(check.feasible && cert.objective <= res.eta + 1e-6);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
