use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CellReport, CellStatus, CellSummary, ExperimentError};

pub const MIN_POINTS: usize = 4;

/// Which variable a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    M,
    Eps,
    Chi,
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sweep::M => "m",
            Sweep::Eps => "eps",
            Sweep::Chi => "chi",
        })
    }
}

impl FromStr for Sweep {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m" => Ok(Sweep::M),
            "eps" | "epsilon" => Ok(Sweep::Eps),
            "chi" => Ok(Sweep::Chi),
            other => Err(ExperimentError::Config(format!("unknown sweep variable '{other}'"))),
        }
    }
}

/// A measured cost at a value of the sweep variable.
pub trait SweepPoint {
    /// `(sweep value, cost)`, or `None` if the point does not count.
    fn point(&self, sweep: Sweep) -> Option<(f64, f64)>;
}

impl SweepPoint for CellSummary {
    fn point(&self, sweep: Sweep) -> Option<(f64, f64)> {
        if self.status != CellStatus::Ok {
            return None;
        }
        let x = match sweep {
            Sweep::M => self.m as f64,
            Sweep::Eps => self.eps,
            Sweep::Chi => self.chi?,
        };
        Some((x, self.iterations? as f64))
    }
}

impl SweepPoint for CellReport {
    fn point(&self, sweep: Sweep) -> Option<(f64, f64)> {
        self.summary.point(sweep)
    }
}

/// Already measured `(sweep value, cost)` pairs.
impl SweepPoint for (f64, f64) {
    fn point(&self, _: Sweep) -> Option<(f64, f64)> {
        Some(*self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub sweep: Sweep,
    /// Slope of `log(cost)` against `log(sweep value)`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
    /// Smallest size dropped as warm-up (size sweeps only).
    pub discarded: Option<(f64, f64)>,
    /// Eps sweeps: slope of `cost` against `log(1/eps)`.
    pub log_inverse_slope: Option<f64>,
}

impl RateFit {
    pub fn within(&self, slope: f64, tolerance: f64) -> bool {
        (self.slope - slope).abs() <= tolerance
    }
}

/// Ordinary least squares `y = a + b x`; returns `(b, a, R^2)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (b, a, r2)
}

/// Least-squares slope of `log(cost)` against `log(sweep value)`.
///
/// Needs at least four usable points. For size sweeps the smallest size is
/// dropped as warm-up when at least four points remain without it.
pub fn fit_rate_exponent<P: SweepPoint>(cells: &[P], sweep: Sweep) -> Result<RateFit, ExperimentError> {
    let mut points: Vec<(f64, f64)> = cells.iter().filter_map(|c| c.point(sweep)).collect();
    if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(ExperimentError::Fit(format!("point {p:?} has no logarithm")));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut discarded = None;
    if sweep == Sweep::M && points.len() > MIN_POINTS {
        discarded = Some(points.remove(0));
    }
    if points.len() < MIN_POINTS {
        return Err(ExperimentError::InsufficientPoints { needed: MIN_POINTS, got: points.len() });
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    if lx.iter().all(|&x| x == lx[0]) {
        return Err(ExperimentError::Fit("all points share one sweep value".into()));
    }
    let (slope, intercept, r_squared) = least_squares(&lx, &ly);
    let log_inverse_slope = (sweep == Sweep::Eps).then(|| {
        let inv: Vec<f64> = points.iter().map(|p| -p.0.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        least_squares(&inv, &ys).0
    });
    if !slope.is_finite() {
        return Err(ExperimentError::Fit("slope is not finite".into()));
    }
    Ok(RateFit { sweep, slope, intercept, r_squared, points, discarded, log_inverse_slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&m| (m, 3.0 * m * m)).collect();
        let fit = fit_rate_exponent(&pts, Sweep::Eps).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn warm_up_dropped_only_when_enough_remain() {
        let four: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&m| (m, m)).collect();
        assert!(fit_rate_exponent(&four, Sweep::M).unwrap().discarded.is_none());
        let mut five = four.clone();
        five.push((4.0, 1000.0));
        let fit = fit_rate_exponent(&five, Sweep::M).unwrap();
        assert_eq!(fit.discarded, Some((4.0, 1000.0)));
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let pts = [(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)];
        assert!(matches!(
            fit_rate_exponent(&pts, Sweep::M),
            Err(ExperimentError::InsufficientPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn eps_secondary_fit() {
        // cost = 10 log(1/eps): flat in log-log up to the log, positive against log(1/eps)
        let pts: Vec<(f64, f64)> = [1e-3, 1e-4, 1e-5, 1e-6].iter().map(|&e: &f64| (e, -10.0 * e.ln())).collect();
        let fit = fit_rate_exponent(&pts, Sweep::Eps).unwrap();
        assert!((fit.log_inverse_slope.unwrap() - 10.0).abs() < 1e-9);
        assert!(fit.slope < 0.0 && fit.slope > -0.3);
    }
}
