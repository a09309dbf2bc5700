// Power-method gossip against accelerated and Chebyshev consensus on paths
// of growing length, with the round-count exponents fitted.
//
// Run with `cargo run --example consensus_comparison`.

use netopt::experiments::{fit_rate_exponent, Sweep};
use netopt::graph::DEFAULT_EIGEN_TOL;
use netopt::network::ConsensusMethod;
use netopt::{build_laplacian, generate_topology, TopologyKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 1e-6;
    let sizes = [10, 20, 30, 40];
    println!("{:>4} {:>10} {:>10} {:>10}", "m", "power", "accel", "chebyshev");
    let mut rounds = vec![Vec::new(); 3];
    for m in sizes {
        let w = build_laplacian(&generate_topology(TopologyKind::Path, m, 0)?, 1, DEFAULT_EIGEN_TOL)?;
        let x0: Vec<f64> = (0..m).map(|i| if i < m / 2 { 1.0 } else { -1.0 }).collect();
        let mut row = Vec::new();
        for (k, method) in ConsensusMethod::ALL.into_iter().enumerate() {
            let run = method.run(&w, &x0, eps)?;
            rounds[k].push((m as f64, run.rounds as f64));
            row.push(run.rounds);
        }
        println!("{m:>4} {:>10} {:>10} {:>10}", row[0], row[1], row[2]);
    }
    for (k, method) in ConsensusMethod::ALL.into_iter().enumerate() {
        let fit = fit_rate_exponent(&rounds[k], Sweep::M)?;
        println!("{method:>10}: rounds ~ m^{:.2}", fit.slope);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
