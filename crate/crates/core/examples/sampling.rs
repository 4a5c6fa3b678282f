// Quasiprobability sampling of the optimal |0⟩/|+⟩ cloner.

use vclone::cloning::optimal_pure_map;
use vclone::linalg::PureState;
use vclone::sampler::{empirical_coverage, exact_expectation, simulate_virtual_measurement, DichotomicObservable};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (a, b) = (PureState::zero(), PureState::plus());
    let q = optimal_pure_map((&a, &b), (&a.tensor_power(2), &b.tensor_power(2)))?;
    let rho = b.density();
    let xx = DichotomicObservable::pauli("XX")?;

    let est = simulate_virtual_measurement(&q, &rho, &xx, 1_000_000, 11)?;
    let truth = exact_expectation(&q, &rho, &xx)?;
    println!("<XX> on Λ(+): {:.6} ± {:.6}, exact {truth:.6}, eta {:.6}", est.mean, est.standard_error, est.eta_used);
    println!("plus-branch rounds {} of {}", est.plus_branch_rounds, est.rounds);
    for eps in [0.01, 0.05, 0.1] {
        println!("  P(|err| >= {eps}) <= {:.3e}", est.hoeffding(eps));
    }
    assert!((est.mean - truth).abs() <= 5.0 * est.eta_used / 1000.0);

    let zz = DichotomicObservable::pauli("ZZ")?;
    let cov = empirical_coverage(&q, &a.density(), &zz, 2_000, 200, 0.05, 5)?;
    println!("coverage at eps 0.05, N 2000: {} <= {:.4} + {:.4}", cov.fraction, cov.bound, cov.slack);
    assert!(cov.within_bound());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
