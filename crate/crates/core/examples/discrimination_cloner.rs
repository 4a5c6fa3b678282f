// Measure-and-prepare cloners built from a signed Helstrom measurement.

use vclone::cloning::{discrimination_cloner, CloneProblem};
use vclone::linalg::{trace_norm, DensityMatrix, PureState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let states = vec![PureState::zero().density(), PureState::plus().density()];
    let diff = states[0].as_operator().sub(states[1].as_operator());
    let expected = 4.0 / trace_norm(&diff) - 1.0;
    for n in [2, 3] {
        let q = discrimination_cloner(&states, n)?;
        let res = CloneProblem::new(states.clone(), 1, n)?.clone_residual(|x| q.apply(x))?;
        println!("n = {n}: cost {:.10} (4/‖ρ1-ρ2‖ - 1 = {expected:.10}), residual {res:.1e}", q.cost());
        assert!((q.cost() - expected).abs() < 1e-9);
    }

    let three = vec![
        PureState::zero().density(),
        PureState::plus().density(),
        DensityMatrix::from_bloch([0.0, 0.7, 0.0])?,
    ];
    let q = discrimination_cloner(&three, 2)?;
    let res = CloneProblem::new(three, 1, 2)?.clone_residual(|x| q.apply(x))?;
    println!("three states: cost {:.8}, residual {res:.1e}", q.cost());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
