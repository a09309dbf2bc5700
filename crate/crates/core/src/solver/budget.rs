use serde::{Deserialize, Serialize};

use super::{Case, SolverError};
use crate::graph::SpectralData;

/// Multiplier in front of `sqrt(L_phi / mu_phi) log(...)`.
///
/// Calibrated once as the smallest integer for which every run of the
/// quadratic zoo in the test suite finishes within its budget, then frozen.
pub const LEADING_CONSTANT: f64 = 1.0;

/// Problem constants entering the budget formula. Unused ones may be left as
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetInputs {
    pub mu: f64,
    pub l: f64,
    pub m_lip: f64,
    pub r: f64,
    pub r_x: Option<f64>,
    pub eps: f64,
    /// Defaults to `eps / R`.
    pub eps_tilde: Option<f64>,
}

/// `ceil(C sqrt(L_phi / mu_phi) max(1, log(max(4 L_phi R^2 / eps, 2 L_phi R / eps_tilde))))`
/// for already known dual constants.
pub(crate) fn budget_for(l_phi: f64, mu_phi: f64, r: f64, eps: f64, eps_tilde: f64) -> usize {
    let arg = (4.0 * l_phi * r * r / eps).max(2.0 * l_phi * r / eps_tilde);
    let log = if arg > 0.0 { arg.ln().max(1.0) } else { 1.0 };
    let n = LEADING_CONSTANT * (l_phi / mu_phi).sqrt() * log;
    n.ceil().max(1.0) as usize
}

/// Theoretical iteration count for the given case with constraint `sqrt(W)`.
///
/// | Case | `L_phi` | `mu_phi` |
/// |------|---------|----------|
/// | 1 | `lambda_max / mu` | `lambda_min / L` |
/// | 2 | `lambda_max / mu + mu_hat` | `mu_hat` |
/// | 3 | `lambda_max / (mu + mu_x)` | `lambda_min / (L + mu_x)` |
/// | 4 | `lambda_max / (mu + mu_x) + mu_hat` | `mu_hat` |
///
/// with `mu_hat = eps / R^2` and `mu_x = eps / R_x^2`.
pub fn iteration_budget(case: Case, k: &BudgetInputs, spectral: &SpectralData) -> Result<usize, SolverError> {
    let missing = |what| SolverError::MissingConstant { case, what };
    if !(k.eps > 0.0) {
        return Err(SolverError::InvalidConfig("eps must be positive".into()));
    }
    if !k.r.is_finite() || k.r < 0.0 {
        return Err(missing("a finite R"));
    }
    let (lmax, lmin) = (spectral.lambda_max, spectral.lambda_min_pos);
    let mu_x = if case.primal_regularized() {
        let rx = k.r_x.filter(|v| v.is_finite() && *v > 0.0).ok_or(missing("a positive R_x"))?;
        k.eps / (rx * rx)
    } else {
        0.0
    };
    let mu_hat = if case.dual_regularized() {
        if !(k.r > 0.0) {
            return Err(missing("a positive R"));
        }
        k.eps / (k.r * k.r)
    } else {
        0.0
    };
    let mu = k.mu.max(0.0) + mu_x;
    let l = k.l + mu_x;
    match case {
        Case::One | Case::Two if !(k.mu > 0.0) => return Err(missing("mu > 0")),
        Case::One | Case::Three if !l.is_finite() => return Err(missing("a finite L")),
        Case::Two | Case::Four if !k.m_lip.is_finite() => return Err(missing("a finite M")),
        _ => {}
    }
    let l_phi = lmax / mu + mu_hat;
    let mu_phi = if l.is_finite() { lmin / l } else { 0.0 } + mu_hat;
    let eps_tilde = k.eps_tilde.unwrap_or(if k.r > 0.0 { k.eps / k.r } else { f64::INFINITY });
    Ok(budget_for(l_phi, mu_phi, k.r, k.eps, eps_tilde))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectral(lmax: f64, lmin: f64) -> SpectralData {
        SpectralData { lambda_max: lmax, lambda_min_pos: lmin, chi: lmax / lmin, eigen_tol: 1e-9 }
    }

    fn inputs(eps: f64) -> BudgetInputs {
        BudgetInputs { mu: 1.0, l: 1.0, m_lip: 1.0, r: 1.0, r_x: Some(1.0), eps, eps_tilde: None }
    }

    #[test]
    fn unit_factors_give_the_constant() {
        // L_phi = mu_phi = 1 and 4 L_phi R^2 / eps = e keeps the log at one
        let k = BudgetInputs { eps: 4.0 / std::f64::consts::E, ..inputs(1.0) };
        let n = iteration_budget(Case::One, &k, &spectral(1.0, 1.0)).unwrap();
        assert_eq!(n, LEADING_CONSTANT.ceil() as usize);
    }

    #[test]
    fn path_doubling_doubles_case_one() {
        let sp = |m: f64| {
            let lmin = 2.0 * (1.0 - (std::f64::consts::PI / m).cos());
            spectral(4.0, lmin)
        };
        let k = inputs(1e-6);
        let a = iteration_budget(Case::One, &k, &sp(32.0)).unwrap() as f64;
        let b = iteration_budget(Case::One, &k, &sp(64.0)).unwrap() as f64;
        assert!((b / a - 2.0).abs() < 0.1, "{}", b / a);
    }

    #[test]
    fn halving_eps_doubles_case_four() {
        let sp = spectral(4.0, 0.5);
        let k = BudgetInputs { mu: 0.0, l: f64::INFINITY, ..inputs(1e-4) };
        let a = iteration_budget(Case::Four, &k, &sp).unwrap() as f64;
        let b = iteration_budget(Case::Four, &BudgetInputs { eps: 5e-5, ..k }, &sp).unwrap() as f64;
        assert!((b / a - 2.0).abs() < 0.15, "{}", b / a);
    }

    #[test]
    fn missing_constants_error() {
        let k = BudgetInputs { mu: 0.0, ..inputs(1e-3) };
        assert!(matches!(
            iteration_budget(Case::One, &k, &spectral(2.0, 1.0)),
            Err(SolverError::MissingConstant { .. })
        ));
        let k = BudgetInputs { r_x: None, ..inputs(1e-3) };
        assert!(iteration_budget(Case::Three, &k, &spectral(2.0, 1.0)).is_err());
    }
}
