mod topology_spectra {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/topology_spectra.rs"));
}

mod four_cases {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/four_cases.rs"));
}

mod distributed_simulation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/distributed_simulation.rs"));
}

mod consensus_comparison {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/consensus_comparison.rs"));
}

mod chebyshev_acceleration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/chebyshev_acceleration.rs"));
}

mod condition_number {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/condition_number.rs"));
}

mod inexact_conjugate {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/inexact_conjugate.rs"));
}

mod scaling_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scaling_sweep.rs"));
}

#[test]
fn topology_spectra_runs() {
    topology_spectra::run_example().expect("topology_spectra example should run");
}

#[test]
fn four_cases_runs() {
    four_cases::run_example().expect("four_cases example should run");
}

#[test]
fn distributed_simulation_runs() {
    distributed_simulation::run_example().expect("distributed_simulation example should run");
}

#[test]
fn consensus_comparison_runs() {
    consensus_comparison::run_example().expect("consensus_comparison example should run");
}

#[test]
fn chebyshev_acceleration_runs() {
    chebyshev_acceleration::run_example().expect("chebyshev_acceleration example should run");
}

#[test]
fn condition_number_runs() {
    condition_number::run_example().expect("condition_number example should run");
}

#[test]
fn inexact_conjugate_runs() {
    inexact_conjugate::run_example().expect("inexact_conjugate example should run");
}

#[test]
fn scaling_sweep_runs() {
    scaling_sweep::run_example().expect("scaling_sweep example should run");
}
