//! Empirical density of the orbit `{[R^sigma j theta] : 0 < j < R^{1-2 sigma}}`
//! on the torus, and the search for a good direction `theta`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::params::{torus_distance_sq_raw, ExperimentParams};
use crate::sampling::{sphere_points, torus_points};
use crate::scalar::{norm_sq, Real};

/// Result of a density scan for one direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DensityWitness<T> {
    pub theta: Vec<T>,
    /// Largest distance from a sample to the nearest orbit point.
    pub worst_deficiency: T,
    /// `eps R^{-sigma}`.
    pub target: T,
    pub passed: bool,
    /// Samples at distance `>= target` from the orbit.
    pub violations: usize,
    pub samples: usize,
    pub worst_sample: Vec<T>,
}

/// The reduced orbit points bucketed into a uniform grid of cells.
pub struct TorusOrbit<T> {
    n: usize,
    points: Vec<T>,
    cells_per_axis: usize,
    /// Point indices sorted by cell, `starts[c]..starts[c+1]` for cell `c`.
    order: Vec<u32>,
    starts: Vec<u32>,
}

impl<T: Real> TorusOrbit<T> {
    /// Orbit of `theta` at the time indices `1..=J`.
    pub fn new(theta: &[T], params: &ExperimentParams<T>) -> Result<Self> {
        let n = params.n;
        check_unit(theta, n)?;
        let count = params.time_count();
        if count == 0 {
            return Err(LabError::contract(format!(
                "empty time lattice at R = {}, sigma = {}",
                params.r, params.sigma
            )));
        }
        let rs = params.r_pow_sigma();
        // [R^sigma j theta_i] accumulated from exact products, not by repeated addition
        let mut points = Vec::with_capacity(count * n);
        for j in 1..=count {
            let t = rs * T::from_usize(j).unwrap();
            points.extend(theta.iter().map(|&c| (t * c).frac()));
        }
        Ok(Self::from_points(n, points))
    }

    pub fn from_points(n: usize, points: Vec<T>) -> Self {
        let count = points.len() / n;
        // about two points per cell
        let g = ((count as f64 / 2.0).powf(1.0 / n as f64).floor() as usize).max(1);
        let total = g.pow(n as u32);
        let cell_of = |p: &[T]| -> usize {
            p.iter().fold(0usize, |acc, &c| {
                let i = ((c.as_f64() * g as f64) as usize).min(g - 1);
                acc * g + i
            })
        };
        let mut counts = vec![0u32; total + 1];
        let cells: Vec<usize> = points.chunks_exact(n).map(cell_of).collect();
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for c in 0..total {
            counts[c + 1] += counts[c];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut order = vec![0u32; count];
        for (i, &c) in cells.iter().enumerate() {
            order[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        TorusOrbit {
            n,
            points,
            cells_per_axis: g,
            order,
            starts,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    fn brute_force_sq(&self, x: &[T]) -> T {
        self.points
            .chunks_exact(self.n)
            .map(|p| torus_distance_sq_raw(x, p))
            .fold(T::infinity(), T::min)
    }

    /// Torus distance from `x` (reduced) to the nearest orbit point.
    pub fn nearest_distance(&self, x: &[T]) -> T {
        let g = self.cells_per_axis;
        let n = self.n;
        if g < 3 {
            return self.brute_force_sq(x).sqrt();
        }
        let home: Vec<i64> = x
            .iter()
            .map(|&c| ((c.as_f64() * g as f64) as i64).min(g as i64 - 1))
            .collect();
        let cell = T::one() / T::from_usize(g).unwrap();
        let mut best = T::infinity();
        let mut offset = vec![0i64; n];
        let mut r: i64 = 0;
        loop {
            if 2 * r + 1 >= g as i64 {
                return self.brute_force_sq(x).sqrt();
            }
            // cells with Chebyshev offset exactly r
            let side = (2 * r + 1) as usize;
            for code in 0..side.pow(n as u32) {
                let mut rest = code;
                for o in offset.iter_mut().rev() {
                    *o = (rest % side) as i64 - r;
                    rest /= side;
                }
                if offset.iter().all(|o| o.abs() < r) {
                    continue;
                }
                let mut c = 0usize;
                for i in 0..n {
                    c = c * g + (home[i] + offset[i]).rem_euclid(g as i64) as usize;
                }
                for &pi in &self.order[self.starts[c] as usize..self.starts[c + 1] as usize] {
                    let d = torus_distance_sq_raw(x, self.point(pi as usize));
                    if d < best {
                        best = d;
                    }
                }
            }
            // anything outside the examined block is at least r cells away
            let reach = cell * T::from_i64(r).unwrap();
            if best.is_finite() && best <= reach * reach {
                return best.sqrt();
            }
            r += 1;
        }
    }
}

fn check_unit<T: Real>(theta: &[T], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(LabError::contract(format!(
            "theta has {} components, expected {n}",
            theta.len()
        )));
    }
    if (norm_sq(theta).sqrt() - T::one()).abs() > T::lit(1e-9) {
        return Err(LabError::contract("theta must be a unit vector"));
    }
    Ok(())
}

/// Nearest-orbit distances of the given samples, in sample order.
pub fn orbit_distances<T: Real>(orbit: &TorusOrbit<T>, samples: &[Vec<T>]) -> Vec<T> {
    samples.par_iter().map(|x| orbit.nearest_distance(x)).collect()
}

fn witness_from<T: Real>(theta: &[T], target: T, samples: &[Vec<T>], dist: &[T]) -> DensityWitness<T> {
    let mut worst = T::zero();
    let mut arg = 0;
    for (i, &d) in dist.iter().enumerate() {
        if d > worst {
            worst = d;
            arg = i;
        }
    }
    let violations = dist.iter().filter(|&&d| d >= target).count();
    DensityWitness {
        theta: theta.to_vec(),
        worst_deficiency: worst,
        target,
        passed: worst < target,
        violations,
        samples: dist.len(),
        worst_sample: samples.get(arg).cloned().unwrap_or_default(),
    }
}

/// `eps R^{-sigma}`.
pub fn density_target<T: Real>(params: &ExperimentParams<T>) -> T {
    params.eps / params.r_pow_sigma()
}

/// Scans `sample_count` quasi-random torus points against the orbit of
/// `theta` with target `eps R^{-sigma}`.
pub fn density_deficiency<T: Real>(
    theta: &[T],
    params: &ExperimentParams<T>,
    sample_count: usize,
    seed: u64,
) -> Result<DensityWitness<T>> {
    density_deficiency_at(theta, params, sample_count, seed, density_target(params))
}

/// As [`density_deficiency`] with an explicit target radius.
pub fn density_deficiency_at<T: Real>(
    theta: &[T],
    params: &ExperimentParams<T>,
    sample_count: usize,
    seed: u64,
    target: T,
) -> Result<DensityWitness<T>> {
    let orbit = TorusOrbit::new(theta, params)?;
    let samples = torus_points::<T>(params.n, sample_count, seed);
    let dist = orbit_distances(&orbit, &samples);
    Ok(witness_from(theta, target, &samples, &dist))
}

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// Candidate directions: a few normalised `(1, a, a^2, ..)` with `a = p^{1/n}`
/// for primes `p`, then quasi-random points of the sphere.
pub fn candidate_directions<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    let heuristic = (count / 4).clamp(1, PRIMES.len()).min(count);
    let mut out: Vec<Vec<T>> = PRIMES[..heuristic]
        .iter()
        .map(|&p| {
            let a = (p as f64).powf(1.0 / n as f64);
            let v: Vec<f64> = (0..n).map(|i| a.powi(i as i32)).collect();
            let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.iter().map(|c| T::lit(c / len)).collect()
        })
        .collect();
    out.extend(sphere_points::<T>(n, count - heuristic, seed));
    out
}

/// Best witness among the given candidates: a coarse scan on the first
/// `max(sample_count / 8, 64)` samples, then the best four on all samples.
pub fn search_theta_among<T: Real>(
    params: &ExperimentParams<T>,
    candidates: &[Vec<T>],
    sample_count: usize,
    seed: u64,
) -> Result<DensityWitness<T>> {
    if candidates.is_empty() {
        return Err(LabError::contract("search_theta needs at least one candidate"));
    }
    let target = density_target(params);
    let samples = torus_points::<T>(params.n, sample_count, seed);
    let coarse_len = (sample_count / 8).max(64).min(sample_count);
    let coarse = &samples[..coarse_len];
    let mut scored: Vec<(usize, T)> = candidates
        .iter()
        .enumerate()
        .map(|(i, th)| {
            let orbit = TorusOrbit::new(th, params)?;
            let d = orbit_distances(&orbit, coarse);
            Ok((i, d.into_iter().fold(T::zero(), T::max)))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    let mut best: Option<DensityWitness<T>> = None;
    for &(i, _) in scored.iter().take(4) {
        let orbit = TorusOrbit::new(&candidates[i], params)?;
        let dist = orbit_distances(&orbit, &samples);
        let w = witness_from(&candidates[i], target, &samples, &dist);
        if best.as_ref().is_none_or(|b| w.worst_deficiency < b.worst_deficiency) {
            best = Some(w);
        }
    }
    Ok(best.unwrap())
}

/// Searches `candidate_count` directions using `params.sample_count` samples.
pub fn search_theta<T: Real>(
    params: &ExperimentParams<T>,
    candidate_count: usize,
    seed: u64,
) -> Result<DensityWitness<T>> {
    if candidate_count == 0 {
        return Err(LabError::contract("candidate_count must be >= 1"));
    }
    let candidates = candidate_directions(params.n, candidate_count, seed);
    search_theta_among(params, &candidates, params.sample_count, seed)
}
