// The standalone solver: a small block SDP, verification and SDPA round trip.

use vclone::sdp::{read_sdpa, solve, verify_solution, write_sdpa, Constraint, SdpProblem, SolverOptions, SparseSym};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // min Tr(C X)  s.t.  Tr X = 1, X ⪰ 0   →  smallest eigenvalue of C
    let mut p = SdpProblem::new(vec![3], 0);
    let mut c = SparseSym::new(3);
    c.push(0, 0, 2.0);
    c.push(1, 1, 1.0);
    c.push(2, 2, 3.0);
    c.push(0, 1, 1.0);
    p.objective[0] = c;
    p.add_constraint(Constraint { blocks: vec![(0, SparseSym::identity(3, 1.0))], free: vec![], rhs: 1.0 });

    let sol = solve(&p, &SolverOptions::default())?;
    let exact = 1.5 - 0.5f64 * 5f64.sqrt();
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("primal {:.10}  dual {:.10}  exact {exact:.10}", sol.primal_obj, sol.dual_obj);
    assert!((sol.primal_obj - exact).abs() < 1e-7);

    let report = verify_solution(&p, &sol, 1e-7);
    println!("verification passed: {}", report.passed());
    assert!(report.passed());

    let text = write_sdpa(&p);
    let back = read_sdpa(&text)?;
    let again = solve(&back, &SolverOptions::default())?;
    println!("SDPA round trip: {} lines, objective {:.10}", text.lines().count(), again.primal_obj);
    assert!((again.primal_obj - sol.primal_obj).abs() < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
