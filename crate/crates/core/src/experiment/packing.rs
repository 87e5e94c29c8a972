//! Volume of the set where the interference argument places large values,
//! `#E_theta * vol B(0, eps/R) ~ R^{1 - (n+2) sigma}`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::params::DEFAULT_TOLERANCE;
use crate::scalar::unit_ball_volume;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PackingConclusion {
    Vanishes,
    Borderline,
    Survives,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingRow {
    #[serde(rename = "R")]
    pub r: f64,
    /// `#(R^{sigma-1} Z^n in B(0,2))` (volume count) times the time count.
    pub point_count_bound: f64,
    /// `point_count_bound * vol B(0, eps / R)`.
    pub neighborhood_volume_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub n: usize,
    pub sigma: f64,
    /// `1 - (n+2) sigma`.
    pub exponent: f64,
    pub conclusion: PackingConclusion,
    pub rows: Vec<PackingRow>,
}

/// `|exponent|` below this counts as zero.
pub const BORDERLINE_WIDTH: f64 = 1e-12;

pub fn classify(exponent: f64) -> PackingConclusion {
    if exponent.abs() < BORDERLINE_WIDTH {
        PackingConclusion::Borderline
    } else if exponent < 0.0 {
        PackingConclusion::Vanishes
    } else {
        PackingConclusion::Survives
    }
}

/// Point-count and volume bounds along `r_list` with `eps = 1/100`.
///
/// `sigma` may exceed `1/(n+2)` here; that is the regime the check is about.
pub fn packing_check(n: usize, sigma: f64, r_list: &[f64]) -> Result<PackingReport> {
    if n < 3 {
        return Err(LabError::contract(format!("dimension n = {n} is not supported, need n >= 3")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(LabError::contract(format!("sigma = {sigma} must lie in (0, 1)")));
    }
    if r_list.iter().any(|&r| !(r > 1.0 && r.is_finite())) {
        return Err(LabError::contract("every R must be a finite real > 1"));
    }
    let exponent = 1.0 - (n as f64 + 2.0) * sigma;
    let omega = unit_ball_volume::<f64>(n);
    let eps = DEFAULT_TOLERANCE;
    let mut rs = r_list.to_vec();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rows = rs
        .iter()
        .map(|&r| {
            let space = omega * (2.0 * r.powf(1.0 - sigma)).powi(n as i32);
            let time = r.powf(1.0 - 2.0 * sigma);
            let points = space * time;
            PackingRow {
                r,
                point_count_bound: points,
                neighborhood_volume_bound: points * omega * (eps / r).powi(n as i32),
            }
        })
        .collect();
    Ok(PackingReport {
        n,
        sigma,
        exponent,
        conclusion: classify(exponent),
        rows,
    })
}
