// The four regimes on a path of eight agents, each checked against the
// centralized reference optimum.
//
// | Case | Objective | Regularization |
// |------|-----------|----------------|
// | 1 | strongly convex, smooth quadratics | none |
// | 2 | strongly convex, Lipschitz quadratic + absolute value | dual |
// | 3 | smooth Huber losses | primal |
// | 4 | Lipschitz absolute values | both |
//
// Run with `cargo run --example four_cases`.

use netopt::graph::DEFAULT_EIGEN_TOL;
use netopt::objectives::ZooSpec;
use netopt::{build_laplacian, generate_topology, solve_case, Case, InteractionOperator, SolverConfig, TopologyKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let m = 8;
    let w = build_laplacian(&generate_topology(TopologyKind::Path, m, 0)?, 1, DEFAULT_EIGEN_TOL)?;
    let eps = 1e-3;
    let zoo = [
        (Case::One, ZooSpec::quadratic()),
        (Case::Two, ZooSpec::QuadraticAbs { curvature: 1.0, weight: 1.0, spread: 1.0, span: 2.0 }),
        (Case::Three, ZooSpec::Huber { delta: 0.5, spread: 1.0 }),
        (Case::Four, ZooSpec::Absolute { weight: 1.0, spread: 1.0 }),
    ];
    println!("path m={m}, eps={eps:e}");
    println!(
        "{:>5} {:>16} {:>8} {:>8} {:>12} {:>12}",
        "case", "objective", "iters", "budget", "F(x)-F*", "||sqrt(W)x||*R"
    );
    for (case, spec) in zoo {
        let f = spec.build(m, 1, 0)?;
        let out = solve_case(&f, &w, &SolverConfig::new(case, eps))?;
        let f_opt = out.setup.reference.as_ref().map(|s| s.f_opt).ok_or("no reference")?;
        let gap = f.evaluate(&out.x)? - f_opt;
        let feas = w.quad_form(&out.x)?.sqrt() * out.setup.r;
        println!(
            "{:>5} {:>16} {:>8} {:>8} {:>12.3e} {:>12.3e}",
            case.to_string(),
            spec.name(),
            out.report.iterations,
            out.setup.budget,
            gap,
            feas
        );
        if gap > eps || feas > eps {
            return Err(format!("case {case} missed its target").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
