mod clonability_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/clonability.rs"));
}

mod sdp_solver_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sdp_solver.rs"));
}

mod optimal_cost_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/optimal_cost.rs"));
}

mod cost_bounds_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cost_bounds.rs"));
}

mod pure_conversion_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pure_conversion.rs"));
}

mod dual_certificate_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dual_certificate.rs"));
}

mod discrimination_cloner_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/discrimination_cloner.rs"));
}

mod sampling_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sampling.rs"));
}

mod demo_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/demo.rs"));
}

mod channels_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/channels.rs"));
}

#[test]
fn clonability_example_runs() {
    clonability_example::run_example().expect("clonability example should run");
}

#[test]
fn sdp_solver_example_runs() {
    sdp_solver_example::run_example().expect("sdp_solver example should run");
}

#[test]
fn optimal_cost_example_runs() {
    optimal_cost_example::run_example().expect("optimal_cost example should run");
}

#[test]
fn cost_bounds_example_runs() {
    cost_bounds_example::run_example().expect("cost_bounds example should run");
}

#[test]
fn pure_conversion_example_runs() {
    pure_conversion_example::run_example().expect("pure_conversion example should run");
}

#[test]
fn dual_certificate_example_runs() {
    dual_certificate_example::run_example().expect("dual_certificate example should run");
}

#[test]
fn discrimination_cloner_example_runs() {
    discrimination_cloner_example::run_example().expect("discrimination_cloner example should run");
}

#[test]
fn sampling_example_runs() {
    sampling_example::run_example().expect("sampling example should run");
}

#[test]
fn demo_example_runs() {
    demo_example::run_example().expect("demo example should run");
}

#[test]
fn channels_example_runs() {
    channels_example::run_example().expect("channels example should run");
}
