// Redistributing strong convexity with the Laplacian term: one agent with
// a tiny curvature makes the plain dual badly conditioned.
//
// Run with `cargo run --example condition_number`.

use netopt::graph::DEFAULT_EIGEN_TOL;
use netopt::objectives::ZooSpec;
use netopt::{build_laplacian, generate_topology, solve_case, Case, SolverConfig, TopologyKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = 8;
    let w = build_laplacian(&generate_topology(TopologyKind::Path, m, 0)?, 1, DEFAULT_EIGEN_TOL)?;
    let f = ZooSpec::IllConditioned { weak_node: 3, weak_curvature: 1e-3, spread: 1.0 }.build(m, 1, 0)?;
    println!("path m={m}, curvatures 1 except 1e-3 at node 3");
    for condition in [false, true] {
        let mut cfg = SolverConfig::new(Case::One, 1e-6);
        cfg.condition = condition;
        let out = solve_case(&f, &w, &cfg)?;
        let k = &out.report.constants;
        println!(
            "  condition={condition:<5} alpha={:<10} mu={:.3e} L={:.3} iterations={} comm rounds={}",
            k.alpha.map_or("-".into(), |a| format!("{a:.4}")),
            k.mu.unwrap_or(f64::NAN),
            k.l.unwrap_or(f64::NAN),
            out.report.iterations,
            out.report.n_comm
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
