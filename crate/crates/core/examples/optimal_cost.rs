// Optimal cloning cost of |0⟩, |+⟩ for several copy numbers.

use vclone::cloning::{optimal_cost, pure_pair_cost, CloneProblem};
use vclone::linalg::PureState;
use vclone::sdp::SolverOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (a, b) = (PureState::zero(), PureState::plus());
    let states = vec![a.density(), b.density()];
    let opts = SolverOptions::default();
    println!("{:>6} {:>14} {:>14} {:>10}", "k->n", "sdp", "closed form", "gap");
    for (k, n) in [(1, 2), (1, 3), (1, 4), (2, 3)] {
        let res = optimal_cost(&CloneProblem::new(states.clone(), k, n)?, &opts)?;
        let exact = pure_pair_cost(&a, &b, k, n)?;
        println!("{:>6} {:>14.8} {:>14.8} {:>10.1e}", format!("{k}->{n}"), res.eta, exact, res.gap);
        assert!((res.eta - exact).abs() < 1e-5);
    }

    let res = optimal_cost(&CloneProblem::new(states, 1, 2)?, &opts)?;
    let q = &res.qpd;
    println!("1->2 decomposition: λ+ = {:.8}, λ- = {:.8}, residual {:.1e}", q.lambda_plus, q.lambda_minus, res.clone_residual);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
