// Which state sets admit a virtual cloner, and how many copies fix the rest.

use vclone::cloning::{build_cloning_map, check_virtually_clonable, min_copies_for_independence};
use vclone::linalg::{max_abs, DensityMatrix, PureState};
use vclone::channels::{apply_choi, is_hptp};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let zero = PureState::zero().density();
    let one = PureState::one().density();
    let plus = PureState::plus().density();
    let mixed = DensityMatrix::maximally_mixed(2);

    let pair = [zero.clone(), plus.clone()];
    let c = check_virtually_clonable(&pair, 1e-8)?;
    println!("{{0, +}}: clonable = {}, gram singular values {:?}", c.clonable, c.gram_singular_values);
    assert!(c.clonable);

    let triple = [zero.clone(), one, mixed];
    let c = check_virtually_clonable(&triple, 1e-8)?;
    let k = min_copies_for_independence(&triple, 8)?;
    println!("{{0, 1, I/2}}: clonable = {}, rank {}, independent from {k} copies", c.clonable, c.rank);
    assert!(!c.clonable && k == 2);

    let j = build_cloning_map(&pair, 2)?;
    let check = is_hptp(&j, 1e-9);
    let out = apply_choi(&j, &plus)?;
    let err = max_abs(&(out.matrix() - plus.tensor_power(2).matrix()));
    println!("cloning map: HPTP {} (trace deviation {:.1e}), |Λ(+) - +⊗+| = {err:.1e}", check.ok, check.trace_deviation);
    assert!(check.ok && err < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
