//! Rescaled free Schrödinger evolution of a [`Datum`] and the phase-window
//! certificates behind constructive interference.
//!
//! With `t` rescaled by `1/(2 pi R)` the solution is
//!
//! ```text
//! u(x, t) = normalization * sum_balls sum_nodes w * exp(2 pi i (x.xi - (t/R) |xi|^2))
//! ```
//!
//! where `xi = R^{1-sigma} l + shift + offset`. On the time lattice
//! `t = R^{2 sigma - 1} k` the term `(t/R) |R^{1-sigma} l|^2 = k |l|^2` is an
//! integer and is dropped before any floating point work.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datum::Datum;
use crate::error::{LabError, Result};
use crate::params::{space_lattice_sampler, ExperimentParams};
use crate::quadrature::pairwise_sum;
use crate::sampling::{ball_points, Stream};
use crate::scalar::{dot, int_dot, int_norm_sq, norm_sq, Real};

/// `cos(2 pi / 10)`: both phase windows have half-width 1/20 of a turn, so
/// every integrand phase is within 1/10 turn of an integer on Lambda.
pub const INTERFERENCE_FLOOR: f64 = 0.809_016_994_374_947_5;

/// Default slack for quadrature error in [`verify_interference`].
pub const INTERFERENCE_TOLERANCE: f64 = 0.01;

#[inline]
fn cis<T: Real>(turns: T) -> Complex<T> {
    let (s, c) = (T::lit(2.0) * T::PI() * turns).sin_cos();
    Complex::new(c, s)
}

/// `u(x, t)` for arbitrary `t`.
pub fn evaluate<T: Real>(d: &Datum<T>, x: &[T], t: T) -> Complex<T> {
    assert_eq!(x.len(), d.dim(), "point dimension");
    let n = d.dim();
    let tr = t / d.params().r;
    let shift = d.modulation_shift();
    let rule = d.rule();
    let sum = pairwise_sum(d.ball_count(), &|b| {
        let c: Vec<T> = d.center(b).iter().zip(shift).map(|(&a, &s)| a + s).collect();
        let center_turns = (dot(x, &c) - tr * norm_sq(&c)).frac();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (w, wt) in rule.iter() {
            let mut xw = T::zero();
            let mut cw = T::zero();
            let mut ww = T::zero();
            for i in 0..n {
                xw = xw + x[i] * w[i];
                cw = cw + c[i] * w[i];
                ww = ww + w[i] * w[i];
            }
            let node_turns = xw - tr * (T::lit(2.0) * cw + ww);
            acc = acc + cis(center_turns + node_turns) * wt;
        }
        acc
    });
    sum * d.normalization()
}

/// Per-node phase data on the time lattice: the phase at `t_k` is
/// `spatial - k * drift` turns.
struct LatticePhase<T> {
    spatial: T,
    drift: T,
}

fn lattice_phases<T: Real>(d: &Datum<T>, x: &[T], b: usize) -> Vec<(LatticePhase<T>, T)> {
    let p = d.params();
    let n = d.dim();
    let shift = d.modulation_shift();
    let l = &d.centers()[b];
    let center = d.center(b);
    // (h/R) |s l + a|^2 = |l|^2 + 2 R^{sigma-1} l.a + (h/R) |a|^2, with |l|^2 dropped
    let h_over_r = p.time_spacing() / p.r;
    let two_ss = T::lit(2.0) * p.space_spacing();
    let xc = (dot(x, center) + dot(x, shift)).frac();
    d.rule()
        .iter()
        .map(|(w, wt)| {
            let mut xw = T::zero();
            let mut lq = T::zero();
            let mut q2 = T::zero();
            for i in 0..n {
                let aw = shift[i] + w[i];
                xw = xw + x[i] * w[i];
                lq = lq + T::from_int(l[i]) * aw;
                q2 = q2 + aw * aw;
            }
            let drift = two_ss * lq + h_over_r * q2;
            (
                LatticePhase {
                    spatial: xc + xw,
                    drift,
                },
                wt,
            )
        })
        .collect()
}

/// `u(x, t_k)` at the lattice time `t_k = R^{2 sigma - 1} k`, with exact
/// integer reduction of the centre phase.
pub fn evaluate_lattice_time<T: Real>(d: &Datum<T>, x: &[T], k: u64) -> Complex<T> {
    assert_eq!(x.len(), d.dim(), "point dimension");
    let kk = T::from_u64(k).unwrap();
    let sum = pairwise_sum(d.ball_count(), &|b| {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (ph, wt) in lattice_phases(d, x, b) {
            acc = acc + cis(ph.spatial - (kk * ph.drift).frac()) * wt;
        }
        acc
    });
    sum * d.normalization()
}

/// `u(x, t_k)` for every `k = 1..=J` of the time lattice.
///
/// Each node contributes a geometric sequence in `k`; the series is advanced by
/// one complex multiplication per node and step.
pub fn lattice_time_series<T: Real>(d: &Datum<T>, x: &[T]) -> Vec<Complex<T>> {
    assert_eq!(x.len(), d.dim(), "point dimension");
    let steps = d.params().time_count();
    let mut out = vec![Complex::new(T::zero(), T::zero()); steps];
    for b in 0..d.ball_count() {
        for (ph, wt) in lattice_phases(d, x, b) {
            let rot = cis(-ph.drift.frac());
            let mut z = cis(ph.spatial) * wt;
            for slot in out.iter_mut() {
                z = z * rot;
                *slot = *slot + z;
            }
        }
    }
    let norm = d.normalization();
    out.iter_mut().for_each(|v| *v = *v * norm);
    out
}

/// The four terms of `x.xi` for `x = R^{sigma-1} m + u`, `xi = R^{1-sigma} l + v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PhaseBreakdownSpace<T> {
    pub i1: i64,
    pub i2: T,
    pub i3: T,
    pub i4: T,
}

impl<T: Real> PhaseBreakdownSpace<T> {
    pub fn total(&self) -> T {
        T::from_int(self.i1) + self.i2 + self.i3 + self.i4
    }

    /// `|I2| < 2 rho`, `|I3| < eps`, `|I4| < rho eps / R`.
    pub fn within_bounds(&self, p: &ExperimentParams<T>) -> bool {
        self.i2.abs() < T::lit(2.0) * p.rho
            && self.i3.abs() < p.eps
            && self.i4.abs() < p.rho * p.eps / p.r
    }
}

/// The three terms of `(t/R)|xi|^2` for `t = R^{2 sigma - 1} k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PhaseBreakdownTime<T> {
    pub ii1: i64,
    pub ii2: T,
    pub ii3: T,
}

impl<T: Real> PhaseBreakdownTime<T> {
    pub fn total(&self) -> T {
        T::from_int(self.ii1) + self.ii2 + self.ii3
    }

    /// `|II2| < rho^2 / R`, `|II3| <= 2 rho`.
    pub fn within_bounds(&self, p: &ExperimentParams<T>) -> bool {
        self.ii2.abs() < p.rho * p.rho / p.r && self.ii3.abs() <= T::lit(2.0) * p.rho
    }
}

fn check_freq_form<T: Real>(l: &[i64], v: &[T], p: &ExperimentParams<T>) -> Result<()> {
    if l.len() != p.n || v.len() != p.n {
        return Err(LabError::contract("frequency decomposition has wrong dimension"));
    }
    let rs = p.r_pow_sigma();
    if !(T::from_int(int_norm_sq(l)) < rs * rs) {
        return Err(LabError::contract("|l| must be < R^sigma"));
    }
    if !(norm_sq(v).sqrt() < p.rho) {
        return Err(LabError::contract("|v| must be < rho"));
    }
    Ok(())
}

/// Splits `x.xi` into `m.l + R^{sigma-1} m.v + R^{1-sigma} l.u + u.v`.
pub fn phase_decompose_space<T: Real>(
    m: &[i64],
    u: &[T],
    l: &[i64],
    v: &[T],
    p: &ExperimentParams<T>,
) -> Result<PhaseBreakdownSpace<T>> {
    check_freq_form(l, v, p)?;
    if m.len() != p.n || u.len() != p.n {
        return Err(LabError::contract("spatial decomposition has wrong dimension"));
    }
    let m_bound = T::lit(2.0) * p.freq_spacing();
    if !(T::from_int(int_norm_sq(m)) < m_bound * m_bound) {
        return Err(LabError::contract("|m| must be < 2 R^(1-sigma)"));
    }
    if !(norm_sq(u).sqrt() < p.space_tolerance()) {
        return Err(LabError::contract("|u| must be < eps / R"));
    }
    let mf: Vec<T> = m.iter().map(|&c| T::from_int(c)).collect();
    let lf: Vec<T> = l.iter().map(|&c| T::from_int(c)).collect();
    Ok(PhaseBreakdownSpace {
        i1: int_dot(m, l),
        i2: p.space_spacing() * dot(&mf, v),
        i3: p.freq_spacing() * dot(&lf, u),
        i4: dot(u, v),
    })
}

/// Splits `(t/R)|xi|^2` into `k|l|^2 + R^{2 sigma-2} k |v|^2 + 2 k R^{sigma-1} l.v`.
pub fn phase_decompose_time<T: Real>(
    t: T,
    l: &[i64],
    v: &[T],
    p: &ExperimentParams<T>,
) -> Result<PhaseBreakdownTime<T>> {
    check_freq_form(l, v, p)?;
    let h = p.time_spacing();
    let kf = (t / h).round();
    let k = kf.to_i64().unwrap_or(0);
    if k <= 0 || !(kf < p.time_extent()) || (t - kf * h).abs() > T::lit(1e-9) * h {
        return Err(LabError::contract(format!("t = {t} is not on the time lattice")));
    }
    let lf: Vec<T> = l.iter().map(|&c| T::from_int(c)).collect();
    let scale = p.r.powf(T::lit(2.0) * p.sigma - T::lit(2.0));
    Ok(PhaseBreakdownTime {
        ii1: k * int_norm_sq(l),
        ii2: scale * kf * norm_sq(v),
        ii3: T::lit(2.0) * kf * p.space_spacing() * dot(&lf, v),
    })
}

/// One evaluated space-time point.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRow<T> {
    pub x: Vec<T>,
    pub t: T,
    pub value: Complex<T>,
    /// `|u| / (normalization |Omega|)`, i.e. `|u| / sqrt|Omega|` for the unit datum.
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct InterferenceReport<T> {
    pub min_ratio: T,
    pub argmin_x: Vec<T>,
    pub argmin_t: T,
    pub evaluations: usize,
    pub floor: T,
    pub tolerance: T,
    pub passed: bool,
}

/// Sample points of the spatial part of Lambda, optionally perturbed inside
/// `B(0, eps/R)`.
pub fn lambda_samples<T: Real>(
    p: &ExperimentParams<T>,
    count: usize,
    seed: u64,
    perturb: bool,
) -> Result<Vec<Vec<T>>> {
    let lattice = space_lattice_sampler(p, count, seed)?;
    if !perturb {
        return Ok(lattice.into_iter().map(|s| s.x).collect());
    }
    let radius = p.space_tolerance() * T::lit(1.0 - 1e-9);
    let shifts = ball_points(p.n, radius, count, seed, Stream::Perturbation);
    Ok(lattice
        .into_iter()
        .zip(shifts)
        .map(|(s, u)| s.x.iter().zip(&u).map(|(&a, &b)| a + b).collect())
        .collect())
}

/// Evaluates `u` at every `(x, t_k)` for the given spatial points and all
/// lattice times.
pub fn evaluate_on_lattice_times<T: Real>(d: &Datum<T>, xs: &[Vec<T>]) -> Vec<EvalRow<T>> {
    let times: Vec<T> = {
        let h = d.params().time_spacing();
        (1..=d.params().time_count())
            .map(|k| h * T::from_usize(k).unwrap())
            .collect()
    };
    let scale = d.normalization() * d.omega_measure();
    let series: Vec<Vec<Complex<T>>> = xs.par_iter().map(|x| lattice_time_series(d, x)).collect();
    xs.iter()
        .zip(series)
        .flat_map(|(x, s)| {
            let times = &times;
            s.into_iter().enumerate().map(move |(k, value)| EvalRow {
                x: x.clone(),
                t: times[k],
                value,
                ratio: value.norm() / scale,
            })
        })
        .collect()
}

/// Minimum of `|u| / sqrt|Omega|` over `xs` times all lattice times.
pub fn verify_interference<T: Real>(d: &Datum<T>, xs: &[Vec<T>], tolerance: T) -> Result<InterferenceReport<T>> {
    Ok(interference_scan(d, xs, tolerance)?.0)
}

/// [`verify_interference`] plus every evaluated row.
pub fn interference_scan<T: Real>(
    d: &Datum<T>,
    xs: &[Vec<T>],
    tolerance: T,
) -> Result<(InterferenceReport<T>, Vec<EvalRow<T>>)> {
    if d.is_modulated() {
        return Err(LabError::contract("interference is checked on the unmodulated datum"));
    }
    if xs.is_empty() {
        return Err(LabError::contract("no sample points"));
    }
    if d.params().time_count() == 0 {
        return Err(LabError::contract("time lattice is empty"));
    }
    let rows = evaluate_on_lattice_times(d, xs);
    let mut best = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.ratio < rows[best].ratio {
            best = i;
        }
    }
    let floor = T::lit(INTERFERENCE_FLOOR);
    let min_ratio = rows[best].ratio;
    let report = InterferenceReport {
        min_ratio,
        argmin_x: rows[best].x.clone(),
        argmin_t: rows[best].t,
        evaluations: rows.len(),
        floor,
        tolerance,
        passed: min_ratio >= floor - tolerance,
    };
    Ok((report, rows))
}

/// `| |u_theta(x, t)| - |u(x - t theta, t)| |`.
pub fn galilean_check<T: Real>(d_theta: &Datum<T>, d_plain: &Datum<T>, x: &[T], t: T) -> Result<T> {
    if d_theta.params() != d_plain.params() || d_theta.centers() != d_plain.centers() {
        return Err(LabError::contract("data were built from different parameters"));
    }
    if d_plain.is_modulated() {
        return Err(LabError::contract("reference datum must be unmodulated"));
    }
    let zero = vec![T::zero(); d_theta.dim()];
    let theta = d_theta.theta().unwrap_or(&zero);
    let moved: Vec<T> = x.iter().zip(theta).map(|(&a, &th)| a - t * th).collect();
    let lhs = evaluate(d_theta, x, t).norm();
    let rhs = evaluate(d_plain, &moved, t).norm();
    Ok((lhs - rhs).abs())
}
