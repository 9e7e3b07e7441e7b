//! Every example in `examples/` runs to completion.

#[allow(dead_code)]
#[path = "../examples/schatten_norms.rs"]
mod schatten_norms;

#[test]
fn schatten_norms_example_runs() {
    schatten_norms::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/channel_representations.rs"]
mod channel_representations;

#[test]
fn channel_representations_example_runs() {
    channel_representations::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/power_iteration_bracket.rs"]
mod power_iteration_bracket;

#[test]
fn power_iteration_bracket_example_runs() {
    power_iteration_bracket::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/ellipsoid_norm.rs"]
mod ellipsoid_norm;

#[test]
fn ellipsoid_norm_example_runs() {
    ellipsoid_norm::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/cb_norms.rs"]
mod cb_norms;

#[test]
fn cb_norms_example_runs() {
    cb_norms::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/sat_gadgets.rs"]
mod sat_gadgets;

#[test]
fn sat_gadgets_example_runs() {
    sat_gadgets::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/oracle_baselines.rs"]
mod oracle_baselines;

#[test]
fn oracle_baselines_example_runs() {
    oracle_baselines::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/dispatch_routing.rs"]
mod dispatch_routing;

#[test]
fn dispatch_routing_example_runs() {
    dispatch_routing::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/map_files.rs"]
mod map_files;

#[test]
fn map_files_example_runs() {
    map_files::run_example().expect("example should run");
}

#[allow(dead_code)]
#[path = "../examples/smoothing.rs"]
mod smoothing;

#[test]
fn smoothing_example_runs() {
    smoothing::run_example().expect("example should run");
}
