use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use super::{
    fit_rate_exponent, run_experiment, CellReport, CellStatus, CellSummary, Expectation, ExperimentConfig,
    ExperimentError, RateFit, Sweep,
};

pub const SUMMARY_FILE: &str = "summary.json";

/// A fit and, if one was asserted, its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitCheck {
    pub fit: RateFit,
    pub expected_slope: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub cells: Vec<CellSummary>,
    pub fits: Vec<FitCheck>,
    /// Asserted sweeps for which no fit could be computed, with the reason.
    pub missing_fits: Vec<(Sweep, String)>,
    pub failed_cells: usize,
    /// Every cell finished and every asserted slope is within tolerance.
    pub passed: bool,
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), ExperimentError> {
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| ExperimentError::Io(e.error))?;
    Ok(())
}

fn trace_name(c: &CellSummary) -> String {
    format!("cell_m{}_eps{:e}.csv", c.m, c.eps)
}

/// Writes `summary.json` and one trace CSV per cell into `dir`.
///
/// Every file is written to a temporary file in `dir` and renamed into
/// place, so readers never see a half-written report.
pub fn emit_report(
    name: &str,
    fits: &[RateFit],
    cells: &[CellReport],
    expectations: &[Expectation],
    dir: &Path,
) -> Result<Summary, ExperimentError> {
    if cells.is_empty() {
        return Err(ExperimentError::EmptyReport);
    }
    fs::create_dir_all(dir)?;
    let mut summaries = Vec::with_capacity(cells.len());
    for c in cells {
        let mut s = c.summary.clone();
        let file = trace_name(&s);
        let mut buf = Vec::new();
        match &c.report {
            Some(r) => r.write_trace_csv(&mut buf)?,
            None => {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["k", "gap_surrogate", "feasibility", "true_gap_if_known", "N_comm", "N_grad"])?;
                w.flush()?;
            }
        }
        write_atomic(dir, &file, &buf)?;
        s.trace_file = Some(file);
        summaries.push(s);
    }
    let mut checks = Vec::new();
    for fit in fits {
        let exp = expectations.iter().find(|e| e.sweep == fit.sweep);
        checks.push(FitCheck {
            fit: fit.clone(),
            expected_slope: exp.map(|e| e.slope),
            tolerance: exp.map(|e| e.tolerance),
            pass: exp.map(|e| fit.within(e.slope, e.tolerance)),
        });
    }
    let missing_fits: Vec<(Sweep, String)> = expectations
        .iter()
        .filter(|e| !fits.iter().any(|f| f.sweep == e.sweep))
        .map(|e| (e.sweep, "no fit".to_string()))
        .collect();
    let failed_cells = summaries.iter().filter(|s| s.status == CellStatus::Failed).count();
    let passed = failed_cells == 0 && missing_fits.is_empty() && checks.iter().all(|c| c.pass != Some(false));
    let summary =
        Summary { name: name.to_string(), cells: summaries, fits: checks, missing_fits, failed_cells, passed };
    write_atomic(dir, SUMMARY_FILE, &serde_json::to_vec_pretty(&summary)?)?;
    Ok(summary)
}

pub fn load_summary(dir: &Path) -> Result<Summary, ExperimentError> {
    let text = fs::read_to_string(dir.join(SUMMARY_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

/// Runs every cell, fits each asserted sweep and writes the report to
/// `dir` (or the config's `output`).
pub fn run_config(cfg: &ExperimentConfig, dir: Option<&Path>) -> Result<Summary, ExperimentError> {
    let dir = dir
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| ExperimentError::Config("no output directory".into()))?;
    let cells = run_experiment(cfg)?;
    let mut fits = Vec::new();
    let mut reasons = Vec::new();
    for e in &cfg.expect {
        match fit_rate_exponent(&cells, e.sweep) {
            Ok(f) => fits.push(f),
            Err(err) => reasons.push((e.sweep, err.to_string())),
        }
    }
    let mut summary = emit_report(&cfg.name, &fits, &cells, &cfg.expect, &dir)?;
    if !reasons.is_empty() {
        summary.missing_fits = reasons;
        write_atomic(&dir, SUMMARY_FILE, &serde_json::to_vec_pretty(&summary)?)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"{
        "name": "small",
        "topology": {"kind": "path", "m": [4, 6, 8, 10]},
        "objective": {"name": "quadratic", "params": {}},
        "case": 1,
        "eps": [1e-6],
        "expect": [{"sweep": "m", "slope": 1.0, "tolerance": 0.5}]
    }"#;

    #[test]
    fn writes_summary_and_traces() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::from_json(CFG).unwrap();
        let s = run_config(&cfg, Some(dir.path())).unwrap();
        assert_eq!(s.cells.len(), 4);
        for c in &s.cells {
            let text = fs::read_to_string(dir.path().join(c.trace_file.as_ref().unwrap())).unwrap();
            assert!(text.starts_with("k,gap_surrogate,feasibility,true_gap_if_known,N_comm,N_grad"));
        }
        assert_eq!(load_summary(dir.path()).unwrap(), s);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::from_json(CFG).unwrap();
        run_config(&cfg, Some(dir.path())).unwrap();
        let first = fs::read(dir.path().join(SUMMARY_FILE)).unwrap();
        run_config(&cfg, Some(dir.path())).unwrap();
        assert_eq!(first, fs::read(dir.path().join(SUMMARY_FILE)).unwrap());
        // only the report files, no leftover temporaries
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 5);
    }

    #[test]
    fn empty_report_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        assert!(matches!(emit_report("x", &[], &[], &[], &out), Err(ExperimentError::EmptyReport)));
        assert!(!out.exists());
    }
}
