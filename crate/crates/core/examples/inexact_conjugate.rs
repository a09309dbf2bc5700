// Inner fast-gradient solves in place of closed-form conjugates, and their
// cost as the inner tolerance shrinks.
//
// Run with `cargo run --example inexact_conjugate`.

use std::sync::Arc;

use netopt::graph::DEFAULT_EIGEN_TOL;
use netopt::objectives::{QuadraticNode, SoftplusNode};
use netopt::{
    build_laplacian, generate_topology, solve_case, Case, NodeObjective, SeparableObjective, SolverConfig, TopologyKind,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = 8;
    let w = build_laplacian(&generate_topology(TopologyKind::Path, m, 0)?, 2, DEFAULT_EIGEN_TOL)?;
    let nodes: Vec<Arc<dyn NodeObjective>> = (0..m)
        .map(|i| {
            let t = i as f64 / (m - 1) as f64;
            let b = vec![(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()];
            Ok(Arc::new(QuadraticNode::new(vec![0.5 + t, 5.0 - 3.0 * t], b)?) as Arc<dyn NodeObjective>)
        })
        .collect::<Result<_, netopt::ObjectiveError>>()?;
    let f = SeparableObjective::new(nodes)?;

    let cfg = SolverConfig::new(Case::One, 1e-6);
    let exact = solve_case(&f, &w, &cfg)?;
    println!("explicit conjugates: gap {:.6e}", exact.report.final_true_gap.unwrap_or(f64::NAN));
    for delta in [1e-6, 1e-8, 1e-10, 1e-12] {
        let mut c = cfg.clone();
        c.inexact = true;
        c.inner_tol = delta;
        let out = solve_case(&f, &w, &c)?;
        println!(
            "delta={delta:e}: gap {:.6e}, outer iterations {}, gradient calls {}",
            out.report.final_true_gap.unwrap_or(f64::NAN),
            out.report.iterations,
            out.report.n_grad
        );
    }

    // softplus has no closed-form conjugate; the solver switches on its own
    let soft = SeparableObjective::from_nodes(
        (0..m).map(|i| SoftplusNode::new(1.0, vec![i as f64 / 4.0 - 1.0, 0.5])).collect::<Result<Vec<_>, _>>()?,
    )?;
    let out = solve_case(&soft, &w, &cfg)?;
    println!("softplus nodes: {} iterations, {} gradient calls", out.report.iterations, out.report.n_grad);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
