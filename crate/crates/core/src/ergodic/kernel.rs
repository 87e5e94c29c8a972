//! The time measure `eta_R`, Dirichlet kernels and sphere averages.
//!
//! `eta_R(t) = R^{2 sigma - 1} sum_{j=1}^{J} R^sigma psi(R^sigma (t - R^sigma j))`
//! with `J` the number of time lattice points, so that
//! `eta_R^(tau) = R^{2 sigma - 1} psi^(R^{-sigma} tau) D_J(R^sigma tau)` where
//! `D_J(x) = sum_{j=1}^{J} e^{-2 pi i j x}`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::ergodic::mollifier::MollifierSpec;
use crate::params::ExperimentParams;
use crate::quadrature::{gauss_legendre, integrate_panel, pairwise_sum};
use crate::scalar::{int_norm_sq, sphere_area, Real};

const PANEL_ORDER: usize = 20;

/// `D_J(x) = sum_{j=1}^{J} e^{-2 pi i j x} = e^{-pi i (J+1) x} sin(pi J x) / sin(pi x)`.
///
/// Only the offset of `x` from the nearest integer enters, which keeps the
/// closed form accurate for large `x` and handles the removable points.
pub fn dirichlet<T: Real>(count: usize, x: T) -> Complex<T> {
    let d = x.centered_frac();
    let jj = T::from_usize(count).unwrap();
    let phase = -(T::PI() * (jj + T::one()) * d);
    Complex::from_polar(dirichlet_ratio(count, d), phase)
}

/// `sin(pi J d) / sin(pi d)` for `|d| <= 1/2`, with the limit `J` at `d = 0`.
#[inline]
fn dirichlet_ratio<T: Real>(count: usize, d: T) -> T {
    let jj = T::from_usize(count).unwrap();
    let a = T::PI() * d;
    if (a * jj).abs() < T::lit(1e-5) {
        // sin(J a) / sin(a) = J (1 - (J^2 - 1) a^2 / 6 + O(a^4))
        jj * (T::one() - (jj * jj - T::one()) * a * a / T::lit(6.0))
    } else {
        (a * jj).sin() / a.sin()
    }
}

/// `|D_J(x)|`.
#[inline]
pub fn dirichlet_abs<T: Real>(count: usize, x: T) -> T {
    dirichlet_ratio(count, x.centered_frac()).abs()
}

/// `eta_R^(tau)`.
pub fn eta_hat<T: Real>(tau: T, params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> Complex<T> {
    let rs = params.r_pow_sigma();
    let amp = params.time_spacing() * spec.psi_hat(tau / rs);
    dirichlet(params.time_count(), rs * tau) * amp
}

/// `|eta_R^(tau)|`, without the phase.
#[inline]
pub fn eta_hat_abs<T: Real>(tau: T, params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> T {
    let rs = params.r_pow_sigma();
    params.time_spacing() * spec.psi_hat(tau / rs) * dirichlet_abs(params.time_count(), rs * tau)
}

/// `int eta_R = eta_R^(0) = R^{2 sigma - 1} J`, also `sup |eta_R^|`.
pub fn eta_mass<T: Real>(params: &ExperimentParams<T>) -> T {
    params.time_spacing() * T::from_usize(params.time_count()).unwrap()
}

/// Sum of `g` over `[a, b]` split at the given sorted interior breakpoints.
fn integrate_pieces<T: Real>(rule: &[(f64, f64)], a: T, b: T, breaks: &[T], g: &impl Fn(T) -> T) -> T {
    let mut edges = Vec::with_capacity(breaks.len() + 2);
    edges.push(a);
    edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    pairwise_sum(edges.len() - 1, &|i| integrate_panel(rule, edges[i], edges[i + 1], g))
}

/// `int_{-1/2}^{1/2} |sin(pi N t) / sin(pi t)| dt`, panels split at the zeros
/// `j / N`.
pub fn dirichlet_l1<T: Real>(count: u64) -> T {
    assert!(count >= 1, "dirichlet_l1 needs N >= 1");
    if count == 1 {
        return T::one();
    }
    let rule = gauss_legendre(PANEL_ORDER);
    let nn = T::from_u64(count).unwrap();
    let half = T::lit(0.5);
    let panels = count / 2;
    let full = pairwise_sum(panels as usize, &|j| {
        let a = T::from_u64(j as u64).unwrap() / nn;
        let b = T::from_u64(j as u64 + 1).unwrap() / nn;
        integrate_panel(&rule, a, b, |t| dirichlet_ratio(count as usize, t).abs())
    });
    let last_start = T::from_u64(panels).unwrap() / nn;
    let rest = if last_start < half {
        integrate_panel(&rule, last_start, half, |t| dirichlet_ratio(count as usize, t).abs())
    } else {
        T::zero()
    };
    T::lit(2.0) * (full + rest)
}

/// One row of a Dirichlet sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirichletRow<T> {
    #[serde(rename = "N")]
    pub n: u64,
    pub value: T,
    /// Slope of value against `ln N` from the previous row; `NaN` on the first.
    pub running_slope: T,
}

/// `dirichlet_l1` at `N = 1, 2, 4, ..` up to `nmax`.
pub fn dirichlet_sweep<T: Real>(nmax: u64) -> Vec<DirichletRow<T>> {
    let mut rows: Vec<DirichletRow<T>> = Vec::new();
    let mut n = 1u64;
    while n <= nmax {
        let value = dirichlet_l1::<T>(n);
        let running_slope = match rows.last() {
            Some(prev) => {
                (value - prev.value)
                    / (T::from_u64(n).unwrap().ln() - T::from_u64(prev.n).unwrap().ln())
            }
            None => T::nan(),
        };
        rows.push(DirichletRow {
            n,
            value,
            running_slope,
        });
        match n.checked_mul(2) {
            Some(m) => n = m,
            None => break,
        }
    }
    rows
}

/// Least-squares slope of `value` against `ln N` over the given rows.
pub fn log_slope<T: Real>(rows: &[DirichletRow<T>]) -> T {
    let pts: Vec<(T, T)> = rows
        .iter()
        .map(|r| (T::from_u64(r.n).unwrap().ln(), r.value))
        .collect();
    crate::ergodic::ols_slope(&pts)
}

/// `int_{S^{n-1}} |eta_R^(theta . k)| d theta`, reduced to
/// `|S^{n-2}| int_0^pi |eta_R^(|k| cos a)| sin^{n-2} a da` and integrated on
/// panels between the angles where `R^sigma |k| cos a` hits a Dirichlet zero.
pub fn sphere_average_eta<T: Real>(k: &[i64], params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> Result<T> {
    let n = params.n;
    if k.len() != n {
        return Err(LabError::contract(format!("k has {} components, expected {n}", k.len())));
    }
    if k.iter().all(|&c| c == 0) {
        return Err(LabError::contract("sphere_average_eta needs k != 0"));
    }
    let kn = T::from_int(int_norm_sq(k)).sqrt();
    let rs = params.r_pow_sigma();
    let count = params.time_count();
    // zeros of D_J(R^sigma tau) at tau = j / (J R^sigma), |tau| <= |k|
    let step = T::one() / (T::from_usize(count.max(1)).unwrap() * rs);
    let jmax = (kn / step).floor().to_i64().unwrap();
    let mut breaks: Vec<T> = (-jmax..=jmax)
        .map(|j| (T::from_int(j) * step / kn).max(-T::one()).min(T::one()).acos())
        .collect();
    breaks.reverse();
    let rule = gauss_legendre(PANEL_ORDER);
    let g = |a: T| eta_hat_abs(kn * a.cos(), params, spec) * a.sin().powi(n as i32 - 2);
    let integral = integrate_pieces(&rule, T::zero(), T::PI(), &breaks, &g);
    Ok(sphere_area::<T>(n - 1) * integral)
}

/// `int_{-a}^{a} |eta_R^(tau)| dtau` on Dirichlet-zero panels.
pub fn eta_abs_integral<T: Real>(a: T, params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> T {
    let rs = params.r_pow_sigma();
    let count = params.time_count();
    let step = T::one() / (T::from_usize(count.max(1)).unwrap() * rs);
    let jmax = (a / step).floor().to_i64().unwrap();
    let breaks: Vec<T> = (-jmax..=jmax).map(|j| T::from_int(j) * step).collect();
    let rule = gauss_legendre(PANEL_ORDER);
    integrate_pieces(&rule, -a, a, &breaks, &|tau| eta_hat_abs(tau, params, spec))
}
