// Choi matrices, composition and the cheapest decomposition of a non-CP map.

use vclone::channels::{choi_from_kraus, compose, is_cptp, optimal_qpd, ChoiMatrix};
use vclone::linalg::{c, identity, sigma_x, sigma_z, ComplexMatrix, HermitianOperator};
use vclone::sdp::SolverOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p: f64 = 0.2;
    let flip = choi_from_kraus(&[sigma_x() * c(p.sqrt(), 0.0), identity(2) * c((1.0 - p).sqrt(), 0.0)], 2, 2)?;
    let half = c(0.5f64.sqrt(), 0.0);
    let dephase = choi_from_kraus(&[sigma_z() * half, identity(2) * half], 2, 2)?;
    let both = compose(&flip, &dephase)?;
    println!("flip then dephase: CPTP {}", is_cptp(&both, 1e-12).ok);

    // the transpose map has the swap operator as Choi matrix
    let swap = ComplexMatrix::from_fn(4, 4, |r, col| c(((col % 2) * 2 + col / 2 == r) as u8 as f64, 0.0));
    let transpose = ChoiMatrix::new(2, 2, HermitianOperator::new(swap)?)?;
    let check = is_cptp(&transpose, 1e-9);
    let opt = optimal_qpd(&transpose, &SolverOptions::default())?;
    println!(
        "transpose: min eigenvalue {:.3}, optimal cost {:.8}, λ+ = {:.6}, λ- = {:.6}",
        check.min_eigenvalue.unwrap_or(f64::NAN),
        opt.qpd.cost(),
        opt.qpd.lambda_plus,
        opt.qpd.lambda_minus
    );
    assert!(!check.ok && (opt.qpd.cost() - 2.0).abs() < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
