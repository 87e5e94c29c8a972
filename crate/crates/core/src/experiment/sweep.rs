//! Sweeps over the frequency scale `R` and the fitted growth exponent.

use serde::{Deserialize, Serialize};

use crate::datum::Datum;
use crate::error::{LabError, Result};
use crate::ergodic::{ols_slope, search_theta};
use crate::experiment::maximal::maximal_lower_bound;
use crate::params::ExperimentParams;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SweepRow<T> {
    #[serde(rename = "R")]
    pub r: T,
    pub omega_measure: T,
    pub lambda_coverage_fraction: T,
    pub lhs_lower: T,
    pub lhs_std_error: T,
    pub hs_norm_value: T,
    pub theta: Vec<T>,
    pub density_deficiency: T,
    /// Set when the row failed; such rows are left out of the fit.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ScalingReport<T> {
    pub rows: Vec<SweepRow<T>>,
    pub fitted_exponent: T,
    pub fitted_std_error: T,
    /// `n sigma / 2`.
    pub predicted: T,
    pub residual: T,
    /// Fitted exponent with each fitted row left out in turn (needs 3+ rows).
    pub leave_one_out: Vec<T>,
    pub leave_one_out_max_change: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub search_budget: usize,
    /// Points of `B(0,1)` for the maximal estimate.
    pub space_samples: usize,
}

/// `n sigma / 2`.
pub fn predicted_exponent<T: Real>(n: usize, sigma: T) -> T {
    T::from_usize(n).unwrap() * sigma / T::lit(2.0)
}

/// Slope and its standard error for `(x, y)` pairs.
pub fn fit_line<T: Real>(pts: &[(T, T)]) -> (T, T) {
    let slope = ols_slope(pts);
    if pts.len() < 3 {
        return (slope, T::zero());
    }
    let m = T::from_usize(pts.len()).unwrap();
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / m;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / m;
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let rss = pts.iter().fold(T::zero(), |a, p| {
        let e = p.1 - my - slope * (p.0 - mx);
        a + e * e
    });
    (slope, (rss / (m - T::lit(2.0)) / sxx).sqrt())
}

fn run_row<T: Real>(p: &ExperimentParams<T>, opts: &SweepOptions) -> Result<SweepRow<T>> {
    let witness = search_theta(p, opts.search_budget, p.seed)?;
    let est = maximal_lower_bound(p, &witness.theta, opts.space_samples, p.seed)?;
    let d = Datum::build(p, Some(&witness.theta))?;
    Ok(SweepRow {
        r: p.r,
        omega_measure: est.omega_measure,
        lambda_coverage_fraction: est.coverage,
        lhs_lower: est.value,
        lhs_std_error: est.std_error,
        hs_norm_value: d.hs_norm(p.s_exponent)?,
        theta: witness.theta,
        density_deficiency: witness.worst_deficiency,
        error: None,
    })
}

fn check_list<T: Real>(r_list: &[T]) -> Result<Vec<T>> {
    let mut rs = r_list.to_vec();
    if rs.iter().any(|r| !r.is_finite()) {
        return Err(LabError::contract("R values must be finite"));
    }
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if rs.windows(2).any(|w| w[0] == w[1]) {
        return Err(LabError::contract("R_list has repeated values"));
    }
    if rs.len() < 3 {
        return Err(LabError::contract(format!(
            "R_list needs at least 3 values to fit, got {}",
            rs.len()
        )));
    }
    if rs[rs.len() - 1] < T::lit(4.0) * rs[0] {
        return Err(LabError::contract("R_list must span at least two octaves"));
    }
    Ok(rs)
}

/// Fits `log lhs_lower` against `log R`; failed rows are skipped.
pub fn fit_report<T: Real>(rows: Vec<SweepRow<T>>, n: usize, sigma: T) -> Result<ScalingReport<T>> {
    let pts: Vec<(T, T)> = rows
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| (r.r.ln(), r.lhs_lower.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(LabError::contract(format!(
            "only {} successful rows, cannot fit an exponent",
            pts.len()
        )));
    }
    let (fitted_exponent, fitted_std_error) = fit_line(&pts);
    if !fitted_exponent.is_finite() {
        return Err(LabError::contract("fitted exponent is not finite"));
    }
    let leave_one_out: Vec<T> = if pts.len() >= 3 {
        (0..pts.len())
            .map(|skip| {
                let rest: Vec<(T, T)> = pts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &p)| p)
                    .collect();
                ols_slope(&rest)
            })
            .collect()
    } else {
        Vec::new()
    };
    let leave_one_out_max_change = leave_one_out
        .iter()
        .map(|&s| (s - fitted_exponent).abs())
        .fold(T::zero(), T::max);
    let predicted = predicted_exponent(n, sigma);
    Ok(ScalingReport {
        rows,
        fitted_exponent,
        fitted_std_error,
        predicted,
        residual: fitted_exponent - predicted,
        leave_one_out,
        leave_one_out_max_change,
    })
}

/// Runs one row per `R` (direction search, maximal estimate, `H^s` norm) and
/// fits the exponent.
pub fn r_sweep_with<T: Real>(
    template: &ExperimentParams<T>,
    r_list: &[T],
    opts: &SweepOptions,
) -> Result<ScalingReport<T>> {
    let rs = check_list(r_list)?;
    let rows: Vec<SweepRow<T>> = rs
        .iter()
        .map(|&r| {
            let attempt = template.with_r(r).and_then(|p| run_row(&p, opts));
            attempt.unwrap_or_else(|e| SweepRow {
                r,
                omega_measure: T::nan(),
                lambda_coverage_fraction: T::nan(),
                lhs_lower: T::nan(),
                lhs_std_error: T::nan(),
                hs_norm_value: T::nan(),
                theta: Vec::new(),
                density_deficiency: T::nan(),
                error: Some(e.to_string()),
            })
        })
        .collect();
    fit_report(rows, template.n, template.sigma)
}

/// [`r_sweep_with`] using `template.sample_count` points for both the density
/// search and the maximal estimate.
pub fn r_sweep<T: Real>(
    template: &ExperimentParams<T>,
    r_list: &[T],
    search_budget: usize,
) -> Result<ScalingReport<T>> {
    let opts = SweepOptions {
        search_budget,
        space_samples: template.sample_count,
    };
    r_sweep_with(template, r_list, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(r: f64, lhs: f64) -> SweepRow<f64> {
        SweepRow {
            r,
            omega_measure: 1.0,
            lambda_coverage_fraction: 0.5,
            lhs_lower: lhs,
            lhs_std_error: 0.0,
            hs_norm_value: 1.0,
            theta: vec![],
            density_deficiency: 0.0,
            error: None,
        }
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let rows: Vec<_> = [256.0f64, 1024.0, 4096.0, 16384.0]
            .iter()
            .map(|&r| row(r, 3.0 * r.powf(0.3)))
            .collect();
        let rep = fit_report(rows, 3, 0.15).unwrap();
        assert!((rep.fitted_exponent - 0.3).abs() < 1e-12);
        assert!(rep.fitted_std_error < 1e-10);
        assert!(rep.leave_one_out_max_change < 1e-12);
        assert!((rep.predicted - 0.225).abs() < 1e-15);
        assert!((rep.residual - 0.075).abs() < 1e-12);
    }

    #[test]
    fn failed_rows_are_kept_but_not_fitted() {
        let mut rows: Vec<_> = [256.0f64, 1024.0, 4096.0].iter().map(|&r| row(r, r.powf(0.2))).collect();
        rows[1].lhs_lower = f64::NAN;
        rows[1].error = Some("boom".into());
        let rep = fit_report(rows, 3, 0.15).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!((rep.fitted_exponent - 0.2).abs() < 1e-12);
        assert!(rep.leave_one_out.is_empty());
    }

    #[test]
    fn predicted_halves_with_sigma() {
        assert_eq!(predicted_exponent(3, 0.075f64) * 2.0, predicted_exponent(3, 0.15f64));
    }

    #[test]
    fn list_contract() {
        let p = ExperimentParams::<f64>::new(3, 0.15, 256.0).unwrap();
        assert!(r_sweep(&p, &[256.0], 4).is_err());
        assert!(r_sweep(&p, &[256.0, 300.0, 400.0], 4).is_err());
        assert!(r_sweep(&p, &[256.0, 256.0, 4096.0], 4).is_err());
    }

    #[test]
    fn small_sweep_runs() {
        let mut p = ExperimentParams::<f64>::new(3, 0.15, 256.0).unwrap();
        p.sample_count = 200;
        let rep = r_sweep(&p, &[64.0, 128.0, 256.0], 4).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.rows.windows(2).all(|w| w[0].r < w[1].r));
        assert!(rep.fitted_exponent.is_finite());
        for r in &rep.rows {
            assert!(r.error.is_none());
            assert!((0.0..=1.0).contains(&r.lambda_coverage_fraction));
        }
    }
}
