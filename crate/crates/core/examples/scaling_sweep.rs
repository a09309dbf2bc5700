// A config-driven sweep: case 1 on paths of growing size, fitted slope
// checked against the expected exponent, reports written to a temporary
// directory.
//
// Run with `cargo run --example scaling_sweep`.

use netopt::experiments::{run_config, ExperimentConfig};

const CONFIG: &str = r#"{
    "name": "case1-path-sizes",
    "topology": {"kind": "path", "m": [8, 16, 32, 64], "n": 1, "seed": 0},
    "objective": {"name": "quadratic", "params": {}},
    "case": 1,
    "eps": [1e-6],
    "expect": [{"sweep": "m", "slope": 1.0, "tolerance": 0.15}]
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_json(CONFIG)?;
    let dir = tempfile::tempdir()?;
    let summary = run_config(&cfg, Some(dir.path()))?;
    for c in &summary.cells {
        println!("m={:>3}  chi={:>8.2}  iterations={}", c.m, c.chi.unwrap_or(f64::NAN), c.iterations.unwrap_or(0));
    }
    for f in &summary.fits {
        println!("slope vs m: {:.3} (R^2 {:.3}), pass={:?}", f.fit.slope, f.fit.r_squared, f.pass);
    }
    let mut files: Vec<String> = std::fs::read_dir(dir.path())?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()?;
    files.sort();
    println!("written: {}", files.join(", "));
    if !summary.passed {
        return Err("sweep did not pass".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
