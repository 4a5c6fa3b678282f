// Pure-pair conversions ψ± → φ± with the explicit optimal map.

use vclone::channels::is_cptp;
use vclone::cloning::{optimal_pure_map, pure_conversion_cost};
use vclone::linalg::{c, max_abs, PureState};

fn qubit(theta: f64) -> PureState {
    PureState::from_slice(&[c(theta.cos(), 0.0), c(theta.sin(), 0.0)]).unwrap()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let psi = (qubit(0.0), qubit(0.5));
    for target in [0.9, 0.2, 1.4] {
        let phi = (qubit(0.0), qubit(target));
        let q = optimal_pure_map((&psi.0, &psi.1), (&phi.0, &phi.1))?;
        let exact = pure_conversion_cost((&psi.0, &psi.1), (&phi.0, &phi.1))?;
        let out = q.apply(psi.1.density())?;
        let err = max_abs(&(out.matrix() - phi.1.density().matrix()));
        let cp = is_cptp(&q.choi_plus, 1e-9).ok && is_cptp(&q.choi_minus, 1e-9).ok;
        println!(
            "angle 0.5 -> {target}: cost {:.8} (closed form {:.8}), λ- = {:.4}, branches CPTP {cp}, error {err:.1e}",
            q.cost(), exact, q.lambda_minus
        );
        assert!((q.cost() - exact).abs() < 1e-12 && err < 1e-10);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
