// The whole pipeline through the command layer, as `vclone demo` runs it.

use vclone::cli::{cmd_demo, DemoOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r = cmd_demo(&DemoOptions::default())?;
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
    println!("{} checks, {} failed", r.checks.len(), failed.len());
    for c in &failed {
        println!("  FAIL {}: {}", c.name, c.detail);
    }
    println!("eta = {}", r.results["cost"]["eta"]);
    assert!(failed.is_empty());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
