//! The initial datum `f` (and its modulation `f_theta`), stored on the
//! frequency side.
//!
//! `f^ = chi_Omega / sqrt|Omega|` where `Omega` is the union of balls
//! `B(R^{1-sigma} l, rho)`. The modulation `e^{i pi R theta.x}` is kept as a
//! frequency shift `(R/2) theta` and never applied in space.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::params::{freq_centers, ExperimentParams};
use crate::quadrature::{pairwise_sum, BallRule};
use crate::scalar::{norm_sq, unit_ball_volume, Real};

#[derive(Clone, Debug)]
pub struct Datum<T> {
    params: ExperimentParams<T>,
    centers: Vec<Vec<i64>>,
    /// `R^{1-sigma} l`, unshifted, `n` entries per ball.
    center_coords: Vec<T>,
    theta: Option<Vec<T>>,
    modulation_shift: Vec<T>,
    normalization: T,
    omega_measure: T,
    rule: BallRule<T>,
}

/// JSON form: centres and parameters only, nodes are rebuilt on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct DatumRecord<T> {
    pub params: ExperimentParams<T>,
    pub centers: Vec<Vec<i64>>,
    pub theta: Option<Vec<T>>,
    pub normalization: T,
}

fn check_theta<T: Real>(theta: &[T], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(LabError::contract(format!(
            "theta has {} components, expected {n}",
            theta.len()
        )));
    }
    let len = norm_sq(theta).sqrt();
    if !(len == T::zero() || (len - T::one()).abs() < T::lit(1e-9)) {
        return Err(LabError::contract(format!(
            "theta must be a unit vector (or zero), |theta| = {len}"
        )));
    }
    Ok(())
}

impl<T: Real> Datum<T> {
    /// Builds `f` (`theta = None`) or `f_theta`.
    pub fn build(params: &ExperimentParams<T>, theta: Option<&[T]>) -> Result<Self> {
        params.validate()?;
        let centers = freq_centers(params)?;
        Self::from_parts(params, centers, theta, None)
    }

    fn from_parts(
        params: &ExperimentParams<T>,
        centers: Vec<Vec<i64>>,
        theta: Option<&[T]>,
        normalization: Option<T>,
    ) -> Result<Self> {
        let n = params.n;
        let spacing = params.freq_spacing();
        if params.rho >= spacing / T::lit(2.0) {
            return Err(LabError::contract(format!(
                "rho = {} >= R^(1-sigma)/2 = {}: the balls of Omega overlap and |Omega| = count * vol(B(0, rho)) would be wrong",
                params.rho,
                spacing / T::lit(2.0)
            )));
        }
        if let Some(th) = theta {
            check_theta(th, n)?;
        }
        let modulation_shift: Vec<T> = match theta {
            Some(th) => th.iter().map(|&c| c * params.r / T::lit(2.0)).collect(),
            None => vec![T::zero(); n],
        };
        let center_coords = centers
            .iter()
            .flat_map(|l| l.iter().map(move |&c| spacing * T::from_int(c)))
            .collect();
        let omega_measure = T::from_usize(centers.len()).unwrap()
            * unit_ball_volume::<T>(n)
            * params.rho.powi(n as i32);
        let normalization = normalization.unwrap_or_else(|| T::one() / omega_measure.sqrt());
        Ok(Datum {
            params: params.clone(),
            centers,
            center_coords,
            theta: theta.map(|t| t.to_vec()),
            modulation_shift,
            normalization,
            omega_measure,
            rule: BallRule::new(n, params.rho, params.quad_order),
        })
    }

    pub fn params(&self) -> &ExperimentParams<T> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.n
    }

    /// Index vectors `l` of the ball centres.
    pub fn centers(&self) -> &[Vec<i64>] {
        &self.centers
    }

    pub fn ball_count(&self) -> usize {
        self.centers.len()
    }

    /// Unshifted centre `R^{1-sigma} l` of ball `b`.
    pub fn center(&self, b: usize) -> &[T] {
        let n = self.dim();
        &self.center_coords[b * n..(b + 1) * n]
    }

    pub fn theta(&self) -> Option<&[T]> {
        self.theta.as_deref()
    }

    pub fn modulation_shift(&self) -> &[T] {
        &self.modulation_shift
    }

    pub fn is_modulated(&self) -> bool {
        self.modulation_shift.iter().any(|&c| c != T::zero())
    }

    pub fn normalization(&self) -> T {
        self.normalization
    }

    /// Same datum with the normalisation constant replaced.
    pub fn with_normalization(mut self, normalization: T) -> Self {
        self.normalization = normalization;
        self
    }

    /// `|Omega|`.
    pub fn omega_measure(&self) -> T {
        self.omega_measure
    }

    pub fn rule(&self) -> &BallRule<T> {
        &self.rule
    }

    /// `||f||_2 = sqrt(normalization^2 |Omega|)`.
    pub fn l2_norm(&self) -> T {
        (self.normalization * self.normalization * self.omega_measure).sqrt()
    }

    /// `||f||_{H^s}` by quadrature of `(1 + |xi|^2)^s` over the shifted support.
    pub fn hs_norm(&self, s: T) -> Result<T> {
        if !(s >= T::zero()) {
            return Err(LabError::contract("Sobolev exponent must be >= 0"));
        }
        if s == T::zero() {
            return Ok(self.l2_norm());
        }
        let n = self.dim();
        let integral = pairwise_sum(self.ball_count(), &|b| {
            let c = self.center(b);
            let mut acc = T::zero();
            for (w_off, w) in self.rule.iter() {
                let mut sq = T::zero();
                for i in 0..n {
                    let xi = c[i] + self.modulation_shift[i] + w_off[i];
                    sq = sq + xi * xi;
                }
                acc = acc + w * (T::one() + sq).powf(s);
            }
            acc
        });
        Ok((self.normalization * self.normalization * integral).sqrt())
    }

    /// Smallest and largest `|xi|` over the (shifted) support.
    pub fn frequency_range(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::zero();
        for b in 0..self.ball_count() {
            let c: Vec<T> = self
                .center(b)
                .iter()
                .zip(&self.modulation_shift)
                .map(|(&a, &s)| a + s)
                .collect();
            let r = norm_sq(&c).sqrt();
            lo = lo.min((r - self.params.rho).max(T::zero()));
            hi = hi.max(r + self.params.rho);
        }
        (lo, hi)
    }

    pub fn to_record(&self) -> DatumRecord<T> {
        DatumRecord {
            params: self.params.clone(),
            centers: self.centers.clone(),
            theta: self.theta.clone(),
            normalization: self.normalization,
        }
    }

    pub fn from_record(record: DatumRecord<T>) -> Result<Self> {
        record.params.validate()?;
        let expected = freq_centers(&record.params)?;
        if expected != record.centers {
            return Err(LabError::contract(
                "stored centres do not match the centres implied by the parameters",
            ));
        }
        Self::from_parts(
            &record.params,
            record.centers,
            record.theta.as_deref(),
            Some(record.normalization),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("datum serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(serde_json::from_str(text)?)
    }
}
