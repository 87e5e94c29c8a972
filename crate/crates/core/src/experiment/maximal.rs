//! Monte Carlo lower estimate of `|| sup_t |u_theta(., t)| ||_{L^2(B(0,1))}` with
//! the supremum restricted to the time lattice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datum::Datum;
use crate::error::{LabError, Result};
use crate::params::ExperimentParams;
use crate::propagator::{lattice_time_series, INTERFERENCE_FLOOR, INTERFERENCE_TOLERANCE};
use crate::quadrature::pairwise_sum_slice;
use crate::sampling::{ball_points, Stream};
use crate::scalar::{unit_ball_volume, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MaximalEstimate<T> {
    /// `sqrt(vol B(0,1) * mean of max_k |u(x, t_k)|^2)`.
    pub value: T,
    /// Delta-method standard error of `value`.
    pub std_error: T,
    /// Fraction of samples whose lattice-time maximum reaches
    /// `(cos(2 pi / 10) - 0.01) sqrt|Omega|`, the interference floor less the
    /// quadrature slack.
    pub coverage: T,
    pub samples: usize,
    pub omega_measure: T,
    /// `sqrt(|Omega| vol B(0,1))`, the pointwise ceiling for a unit datum.
    pub ceiling: T,
}

/// Lattice-time maximum of `|u|` at each point, in point order.
pub fn lattice_maxima<T: Real>(d: &Datum<T>, points: &[Vec<T>]) -> Vec<T> {
    points
        .par_iter()
        .map(|x| {
            lattice_time_series(d, x)
                .iter()
                .map(|z| z.norm())
                .fold(T::zero(), T::max)
        })
        .collect()
}

/// Estimate from an explicit point set (treated as uniform in `B(0,1)`).
pub fn maximal_lower_bound_at<T: Real>(d: &Datum<T>, points: &[Vec<T>]) -> Result<MaximalEstimate<T>> {
    if d.params().time_count() == 0 {
        return Err(LabError::contract("time lattice is empty"));
    }
    if points.is_empty() {
        return Err(LabError::contract("no sample points"));
    }
    let n = d.dim();
    let vol = unit_ball_volume::<T>(n);
    let maxima = lattice_maxima(d, points);
    let count = T::from_usize(points.len()).unwrap();
    let squares: Vec<T> = maxima.iter().map(|&m| m * m).collect();
    let mean = pairwise_sum_slice(&squares) / count;
    let var = if points.len() > 1 {
        let dev: Vec<T> = squares.iter().map(|&s| (s - mean) * (s - mean)).collect();
        pairwise_sum_slice(&dev) / (count - T::one())
    } else {
        T::zero()
    };
    let value = (vol * mean).sqrt();
    let se_mean = (var / count).sqrt();
    let std_error = if value > T::zero() {
        vol * se_mean / (T::lit(2.0) * value)
    } else {
        T::zero()
    };
    let scale = d.normalization() * d.omega_measure();
    let floor = T::lit(INTERFERENCE_FLOOR - INTERFERENCE_TOLERANCE) * scale;
    let hits = maxima.iter().filter(|&&m| m >= floor).count();
    Ok(MaximalEstimate {
        value,
        std_error,
        coverage: T::from_usize(hits).unwrap() / count,
        samples: points.len(),
        omega_measure: d.omega_measure(),
        ceiling: scale * vol.sqrt(),
    })
}

/// Builds `f_theta` and estimates its maximal norm on `space_samples`
/// quasi-random points of `B(0,1)`.
pub fn maximal_lower_bound<T: Real>(
    params: &ExperimentParams<T>,
    theta: &[T],
    space_samples: usize,
    seed: u64,
) -> Result<MaximalEstimate<T>> {
    let d = Datum::build(params, Some(theta))?;
    let points = ball_points(params.n, T::one(), space_samples, seed, Stream::Ball);
    maximal_lower_bound_at(&d, &points)
}
