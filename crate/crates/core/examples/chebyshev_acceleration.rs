// The dual method with `W` replaced by its Chebyshev polynomial: far fewer
// outer iterations, `K` communication rounds each.
//
// Run with `cargo run --example chebyshev_acceleration`.

use netopt::graph::DEFAULT_EIGEN_TOL;
use netopt::objectives::ZooSpec;
use netopt::{
    build_laplacian, chebyshev_accelerate, generate_topology, solve_case, Case, ChebyshevDegree, InteractionOperator,
    SolverConfig, TopologyKind,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig::new(Case::One, 1e-6);
    println!("{:>4} {:>18} {:>18}", "m", "plain iters/rounds", "chebyshev iters/rounds");
    for m in [16, 32, 64] {
        let w = build_laplacian(&generate_topology(TopologyKind::Path, m, 0)?, 1, DEFAULT_EIGEN_TOL)?;
        let p = chebyshev_accelerate(&w, ChebyshevDegree::Auto)?;
        let f = ZooSpec::quadratic().build(m, 1, 0)?;
        let a = solve_case(&f, &w, &cfg)?;
        let b = solve_case(&f, &p, &cfg)?;
        println!(
            "{m:>4} {:>18} {:>18}   (K={}, chi {:.1} -> {:.3})",
            format!("{}/{}", a.report.iterations, a.report.n_comm),
            format!("{}/{}", b.report.iterations, b.report.n_comm),
            p.degree(),
            w.spectral().chi,
            p.spectral().chi
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
