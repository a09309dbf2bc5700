// Spectral data of the standard topologies and how the Chebyshev operator
// flattens the path spectrum.
//
// Run with `cargo run --example topology_spectra`.

use netopt::graph::DEFAULT_EIGEN_TOL;
use netopt::{
    build_laplacian, chebyshev_accelerate, generate_topology, ChebyshevDegree, InteractionOperator, TopologyKind,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>17} {:>4} {:>10} {:>10} {:>10}", "topology", "m", "lambda_max", "lambda_min", "chi");
    for kind in [
        TopologyKind::Path,
        TopologyKind::Cycle,
        TopologyKind::Star,
        TopologyKind::Complete,
        TopologyKind::RandomConnected,
    ] {
        for m in [8, 32] {
            let w = build_laplacian(&generate_topology(kind, m, 1)?, 1, DEFAULT_EIGEN_TOL)?;
            let s = w.spectral();
            println!(
                "{:>17} {m:>4} {:>10.4} {:>10.4} {:>10.2}",
                kind.to_string(),
                s.lambda_max,
                s.lambda_min_pos,
                s.chi
            );
        }
    }

    println!();
    println!("Chebyshev operator on paths, degree K = ceil(sqrt(chi)):");
    for m in [10, 20, 40] {
        let w = build_laplacian(&generate_topology(TopologyKind::Path, m, 0)?, 1, DEFAULT_EIGEN_TOL)?;
        let p = chebyshev_accelerate(&w, ChebyshevDegree::Auto)?;
        println!(
            "  m={m:>3}  chi(W)={:>8.2}  K={:>3}  chi(P_K(W))={:.4}",
            w.spectral().chi,
            p.degree(),
            p.effective_spectral().chi
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
