//! Fourier certificate for the density of the orbit of `theta`.
//!
//! The function `F(x) = int phi_R(x - t theta) eta_R(t) dt` on the torus has
//! coefficients `phi_R^(k) eta_R^(theta . k)`. If
//! `phi_R^(0) eta_R^(0) > sum_{k != 0} |phi_R^(k)| |eta_R^(theta . k)|` then
//! `F > 0` everywhere, and every `x` lies within `eps R^{-sigma}` of some
//! `[R^sigma j theta]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::ergodic::kernel::{eta_hat_abs, eta_mass};
use crate::ergodic::mollifier::MollifierSpec;
use crate::params::ExperimentParams;
use crate::quadrature::pairwise_sum_slice;
use crate::scalar::{norm_sq, Real};

/// Largest box `[-K, K]^n` the default truncation will use.
pub const BOX_CAP: u64 = 120_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CertificateReport<T> {
    pub theta: Vec<T>,
    #[serde(rename = "R")]
    pub r: T,
    /// `phi_R^(0) = R^{-n sigma}`.
    pub phi0: T,
    /// `int eta_R = R^{2 sigma - 1} J`.
    pub eta_mass: T,
    /// Sum over `0 < |k|_inf <= K` of `|phi_R^(k)| |eta_R^(theta . k)|`.
    pub gamma_trunc: T,
    /// Bound on the same sum over `|k|_inf > K`.
    pub tail_bound: T,
    pub margin: T,
    pub truncation_radius: u64,
    pub mollifier_order: usize,
    /// `R^{2 sigma - 1} log R`.
    pub asymptotic_scale: T,
    pub asymptotically_certifiable: bool,
    pub certified: bool,
    pub warnings: Vec<String>,
}

/// One-dimensional factor `R^{-sigma} sinc^m(pi h R^{-sigma} k)` of `phi_R^`.
fn axis_coefficient<T: Real>(k: i64, params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> T {
    let inv = T::one() / params.r_pow_sigma();
    inv * spec.phi_axis.fourier(T::from_int(k) * inv)
}

/// Bound on `sum_{|k|_inf > K} phi_R^(k)`.
///
/// Per axis the coefficients sum to the spline peak `g0` (Poisson summation;
/// the spline is narrower than the period), and
/// `sum_{|k| > K} R^{-sigma} sinc^m <= 2 R^{-sigma} (pi h R^{-sigma})^{-m} K^{1-m} / (m-1)`.
/// The box complement is at most `n g0^{n-1}` times that.
pub fn coefficient_tail<T: Real>(k_max: u64, params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> T {
    let inv = T::one() / params.r_pow_sigma();
    let m = spec.order as i32;
    let a = T::PI() * spec.phi_axis.knot * inv;
    let kk = T::from_u64(k_max.max(1)).unwrap();
    let one_d = T::lit(2.0) * inv * a.powi(-m) * kk.powi(1 - m) / T::from_i32(m - 1).unwrap();
    let g0 = spec.phi_axis.peak();
    T::from_usize(params.n).unwrap() * g0.powi(params.n as i32 - 1) * one_d
}

fn box_size(n: usize, k: u64) -> u128 {
    (2 * k as u128 + 1).pow(n as u32)
}

/// Smallest `K >= ceil(R^sigma)` whose tail bound is at most `1e-3` of
/// `phi0 * eta_mass`, limited to boxes of at most [`BOX_CAP`] points.
/// Returns the radius and whether the cap was hit.
pub fn default_truncation<T: Real>(params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> (u64, bool) {
    let n = params.n;
    let lo = params.r_pow_sigma().ceil().to_u64().unwrap().max(1);
    let phi0 = params.r_pow_sigma().powi(-(n as i32));
    let goal = T::lit(1e-3) * phi0 * eta_mass(params);
    let sup = eta_mass(params);
    let tail = |k: u64| coefficient_tail(k, params, spec) * sup;
    // the tail scales like K^{1-m}
    let ratio = (tail(1) / goal).as_f64().max(1.0);
    let guess = ratio.powf(1.0 / (spec.order as f64 - 1.0)).ceil() as u64;
    let mut k = guess.max(lo);
    while k > lo && tail(k - 1) <= goal {
        k -= 1;
    }
    while tail(k) > goal {
        k += 1;
    }
    let cap = (((BOX_CAP as f64).powf(1.0 / n as f64) - 1.0) / 2.0).floor() as u64;
    if k > cap && box_size(n, k) > BOX_CAP as u128 {
        (cap.max(lo), true)
    } else {
        (k, false)
    }
}

/// Evaluates the certificate for `theta` with truncation `K` (default from
/// [`default_truncation`]).
pub fn certificate<T: Real>(
    theta: &[T],
    params: &ExperimentParams<T>,
    truncation: Option<u64>,
    spec: &MollifierSpec<T>,
) -> Result<CertificateReport<T>> {
    params.validate()?;
    let n = params.n;
    if theta.len() != n || (norm_sq(theta).sqrt() - T::one()).abs() > T::lit(1e-9) {
        return Err(LabError::contract("certificate needs a unit vector theta in R^n"));
    }
    if params.time_count() == 0 {
        return Err(LabError::contract("empty time lattice"));
    }
    let rs = params.r_pow_sigma();
    let mut warnings = Vec::new();
    let k_max = match truncation {
        Some(k) => {
            if T::from_u64(k).unwrap() < rs {
                return Err(LabError::contract(format!(
                    "truncation K = {k} must be >= R^sigma = {rs}"
                )));
            }
            k
        }
        None => {
            let (k, capped) = default_truncation(params, spec);
            if capped {
                warnings.push(format!(
                    "truncation capped at K = {k}; the tail bound is not small against phi0 * eta_mass"
                ));
            }
            k
        }
    };
    if box_size(n, k_max) > 4 * BOX_CAP as u128 {
        return Err(LabError::Resource {
            what: "certificate box points",
            requested: box_size(n, k_max),
            cap: 4 * BOX_CAP as u128,
        });
    }

    let side = (2 * k_max + 1) as usize;
    let axis: Vec<T> = (0..side)
        .map(|i| axis_coefficient(i as i64 - k_max as i64, params, spec))
        .collect();
    let ks: Vec<T> = (0..side).map(|i| T::from_int(i as i64 - k_max as i64)).collect();

    // one slab per value of k_1, each summed in a fixed order
    let slabs: Vec<T> = (0..side)
        .into_par_iter()
        .map(|i0| {
            let mut acc = T::zero();
            let inner = side.pow(n as u32 - 1);
            let mut idx = vec![0usize; n - 1];
            for _ in 0..inner {
                let mut w = axis[i0];
                let mut tau = theta[0] * ks[i0];
                let mut zero = i0 == k_max as usize;
                for (d, &i) in idx.iter().enumerate() {
                    w = w * axis[i];
                    tau = tau + theta[d + 1] * ks[i];
                    zero = zero && i == k_max as usize;
                }
                if !zero {
                    acc = acc + w * eta_hat_abs(tau, params, spec);
                }
                for slot in idx.iter_mut().rev() {
                    *slot += 1;
                    if *slot < side {
                        break;
                    }
                    *slot = 0;
                }
            }
            acc
        })
        .collect();
    let gamma_trunc = pairwise_sum_slice(&slabs);

    let phi0 = rs.powi(-(n as i32));
    let mass = eta_mass(params);
    let tail_bound = coefficient_tail(k_max, params, spec) * mass;
    let margin = phi0 * mass - (gamma_trunc + tail_bound);
    let asymptotic_scale = params.time_spacing() * params.r.ln();
    if tail_bound > phi0 * mass {
        warnings.push("tail bound exceeds phi0 * eta_mass; K is too small to certify".to_string());
    }
    Ok(CertificateReport {
        theta: theta.to_vec(),
        r: params.r,
        phi0,
        eta_mass: mass,
        gamma_trunc,
        tail_bound,
        margin,
        truncation_radius: k_max,
        mollifier_order: spec.order,
        asymptotic_scale,
        asymptotically_certifiable: asymptotic_scale < phi0 * mass,
        certified: margin > T::zero(),
        warnings,
    })
}
