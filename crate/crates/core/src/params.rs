//! Experiment parameters, the three lattices of the construction, and torus
//! arithmetic.
//!
//! Scales used throughout (with `R` the frequency scale and `sigma` the
//! lattice exponent):
//!
//! * frequency centres `R^{1-sigma} l` with `l` in `Z^n`, `|l| < R^sigma`;
//! * spatial lattice `R^{sigma-1} Z^n` inside `B(0, 2)`, sampled, never stored;
//! * time lattice `R^{2 sigma - 1} k` for integers `0 < k < R^{1 - 2 sigma}`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::scalar::{int_norm_sq, Real};

/// Largest `rho` / `eps` accepted without [`ExperimentParams::allow_wide_tolerance`].
pub const DEFAULT_TOLERANCE: f64 = 0.01;

/// Default cap on the number of frequency centres.
pub const DEFAULT_CENTER_CAP: usize = 2_000_000;

fn default_cap() -> usize {
    DEFAULT_CENTER_CAP
}

/// All parameters of one experiment.
///
/// The JSON form has exactly the keys `n, sigma, R, rho, eps, s_exponent,
/// quad_order, seed, sample_count`; anything else is rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct ExperimentParams<T> {
    pub n: usize,
    pub sigma: T,
    #[serde(rename = "R")]
    pub r: T,
    pub rho: T,
    pub eps: T,
    pub s_exponent: T,
    pub quad_order: usize,
    pub seed: u64,
    pub sample_count: usize,
    /// Permits `rho` or `eps` above 1/100, where the phase windows may fail.
    #[serde(skip)]
    pub allow_wide_tolerance: bool,
    #[serde(skip, default = "default_cap")]
    pub center_cap: usize,
}

impl<T: Real> ExperimentParams<T> {
    /// Parameters with `rho = eps = 1/100`, `s = 0`, two quadrature nodes per
    /// axis, seed 0 and 1000 samples.
    pub fn new(n: usize, sigma: T, r: T) -> Result<Self> {
        let p = ExperimentParams {
            n,
            sigma,
            r,
            rho: T::lit(DEFAULT_TOLERANCE),
            eps: T::lit(DEFAULT_TOLERANCE),
            s_exponent: T::zero(),
            quad_order: 2,
            seed: 0,
            sample_count: 1000,
            allow_wide_tolerance: false,
            center_cap: DEFAULT_CENTER_CAP,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    /// Same parameters at another frequency scale.
    pub fn with_r(&self, r: T) -> Result<Self> {
        let mut p = self.clone();
        p.r = r;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(LabError::contract(format!(
                "dimension n = {} is not supported, need n >= 3",
                self.n
            )));
        }
        let upper = T::one() / T::from_usize(self.n + 2).unwrap();
        if !(self.sigma > T::zero() && self.sigma < upper) {
            return Err(LabError::contract(format!(
                "sigma = {} must lie in (0, 1/(n+2)) = (0, {})",
                self.sigma, upper
            )));
        }
        if !(self.r > T::one()) || !self.r.is_finite() {
            return Err(LabError::contract(format!("R = {} must be a finite real > 1", self.r)));
        }
        for (name, v) in [("rho", self.rho), ("eps", self.eps)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(LabError::contract(format!("{name} = {v} must be positive")));
            }
            if v > T::lit(DEFAULT_TOLERANCE) && !self.allow_wide_tolerance {
                return Err(LabError::contract(format!(
                    "{name} = {v} exceeds 1/100; set the wide-tolerance override to allow it"
                )));
            }
        }
        if !(self.s_exponent >= T::zero()) {
            return Err(LabError::contract("s_exponent must be >= 0"));
        }
        if self.quad_order == 0 {
            return Err(LabError::contract("quad_order must be >= 1"));
        }
        if self.sample_count == 0 {
            return Err(LabError::contract("sample_count must be >= 1"));
        }
        Ok(())
    }

    /// `R^sigma`, the radius of the frequency index ball.
    pub fn r_pow_sigma(&self) -> T {
        self.r.powf(self.sigma)
    }

    /// `R^{1-sigma}`, spacing of the frequency centres.
    pub fn freq_spacing(&self) -> T {
        self.r.powf(T::one() - self.sigma)
    }

    /// `R^{sigma-1}`, spacing of the spatial lattice.
    pub fn space_spacing(&self) -> T {
        self.r.powf(self.sigma - T::one())
    }

    /// `R^{2 sigma - 1}`, spacing of the time lattice.
    pub fn time_spacing(&self) -> T {
        self.r.powf(T::lit(2.0) * self.sigma - T::one())
    }

    /// `R^{1 - 2 sigma}`, the exclusive upper bound on time indices.
    pub fn time_extent(&self) -> T {
        self.r.powf(T::one() - T::lit(2.0) * self.sigma)
    }

    /// Number of integers `k` with `0 < k < R^{1-2 sigma}`.
    pub fn time_count(&self) -> usize {
        integers_below(self.time_extent())
    }

    /// Spatial tolerance `eps / R` of the interference neighbourhoods.
    pub fn space_tolerance(&self) -> T {
        self.eps / self.r
    }
}

/// Number of integers `k` with `0 < k < extent`.
pub fn integers_below<T: Real>(extent: T) -> usize {
    if !(extent > T::one()) {
        return 0;
    }
    let mut k = extent.floor().to_usize().unwrap_or(0);
    while k > 0 && T::from_usize(k).unwrap() >= extent {
        k -= 1;
    }
    k
}

/// All `l` in `Z^n` with `|l| < radius`, in lexicographic order.
pub fn lattice_points_in_ball(n: usize, radius: f64, cap: usize) -> Result<Vec<Vec<i64>>> {
    let radius_sq = radius * radius;
    let bound = radius.ceil() as i64;
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    fn recurse(
        depth: usize,
        used: i64,
        radius_sq: f64,
        bound: i64,
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        cap: usize,
    ) -> Result<()> {
        let n = current.len();
        if depth == n {
            if out.len() >= cap {
                return Err(LabError::Resource {
                    what: "frequency centres",
                    requested: out.len() as u128 + 1,
                    cap: cap as u128,
                });
            }
            out.push(current.clone());
            return Ok(());
        }
        for v in -bound..=bound {
            let used_next = used + v * v;
            if (used_next as f64) < radius_sq {
                current[depth] = v;
                recurse(depth + 1, used_next, radius_sq, bound, current, out, cap)?;
            }
        }
        current[depth] = 0;
        Ok(())
    }
    recurse(0, 0, radius_sq, bound, &mut current, &mut out, cap)?;
    Ok(out)
}

/// Index vectors `l` of the frequency centres `R^{1-sigma} l` of Omega.
pub fn freq_centers<T: Real>(params: &ExperimentParams<T>) -> Result<Vec<Vec<i64>>> {
    params.validate()?;
    lattice_points_in_ball(params.n, params.r_pow_sigma().as_f64(), params.center_cap)
}

/// Times `R^{2 sigma - 1} k` for `0 < k < R^{1 - 2 sigma}`, increasing.
pub fn time_lattice<T: Real>(params: &ExperimentParams<T>) -> Result<Vec<T>> {
    params.validate()?;
    let h = params.time_spacing();
    Ok((1..=params.time_count())
        .map(|k| h * T::from_usize(k).unwrap())
        .collect())
}

/// The lattices of one experiment, with the spatial lattice kept implicit.
#[derive(Clone, Debug)]
pub struct LatticeFamily<T> {
    pub freq_centers: Vec<Vec<i64>>,
    pub time_points: Vec<T>,
    pub space_spacing: T,
    pub space_radius: T,
}

impl<T: Real> LatticeFamily<T> {
    pub fn new(params: &ExperimentParams<T>) -> Result<Self> {
        Ok(LatticeFamily {
            freq_centers: freq_centers(params)?,
            time_points: time_lattice(params)?,
            space_spacing: params.space_spacing(),
            space_radius: T::lit(2.0),
        })
    }
}

/// A point of `R^n / Z^n`, coordinates reduced to `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TorusPoint<T> {
    coords: Vec<T>,
}

impl<T: Real> TorusPoint<T> {
    pub fn new(coords: &[T]) -> Self {
        TorusPoint {
            coords: coords.iter().map(|c| c.frac()).collect(),
        }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Distance on the flat torus: Euclidean distance minimised over integer shifts.
pub fn torus_distance<T: Real>(a: &TorusPoint<T>, b: &TorusPoint<T>) -> T {
    assert_eq!(a.dim(), b.dim(), "torus points of different dimension");
    torus_distance_sq_raw(&a.coords, &b.coords).sqrt()
}

/// Squared torus distance between two reduced coordinate slices.
#[inline]
pub(crate) fn torus_distance_sq_raw<T: Real>(a: &[T], b: &[T]) -> T {
    // the minimum over shifts separates per axis
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = (x - y).abs();
        let d = d.min(T::one() - d);
        acc + d * d
    })
}

/// A point `x = R^{sigma-1} m` of the spatial lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSample<T> {
    pub m: Vec<i64>,
    pub x: Vec<T>,
}

/// Uniform sample of `count` points of `R^{sigma-1} Z^n` inside `B(0, 2)`.
///
/// Rejection sampling on the bounding integer box; deterministic for a seed.
pub fn space_lattice_sampler<T: Real>(
    params: &ExperimentParams<T>,
    count: usize,
    seed: u64,
) -> Result<Vec<LatticeSample<T>>> {
    params.validate()?;
    if count == 0 {
        return Err(LabError::contract("sample count must be >= 1"));
    }
    let spacing = params.space_spacing();
    let m_radius = T::lit(2.0) * params.freq_spacing();
    let m_radius_sq = m_radius * m_radius;
    let bound = m_radius.ceil().to_i64().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m: Vec<i64> = (0..params.n).map(|_| rng.random_range(-bound..=bound)).collect();
        let m_sq = T::from_int(int_norm_sq(&m));
        let x: Vec<T> = m.iter().map(|&v| spacing * T::from_int(v)).collect();
        let x_sq = x.iter().fold(T::zero(), |a, &v| a + v * v);
        if m_sq < m_radius_sq && x_sq < T::lit(4.0) {
            out.push(LatticeSample { m, x });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute_force_centers(n: usize, radius: f64) -> Vec<Vec<i64>> {
        let b = radius.ceil() as i64;
        let side = (2 * b + 1) as usize;
        let mut out = Vec::new();
        for idx in 0..side.pow(n as u32) {
            let mut rest = idx;
            let mut v = vec![0i64; n];
            for slot in v.iter_mut().rev() {
                *slot = (rest % side) as i64 - b;
                rest /= side;
            }
            let sq: i64 = v.iter().map(|x| x * x).sum();
            if (sq as f64).sqrt() < radius {
                out.push(v);
            }
        }
        out
    }

    fn params(sigma: f64, r: f64) -> ExperimentParams<f64> {
        ExperimentParams::new(3, sigma, r).unwrap()
    }

    #[test]
    fn unit_radius_has_only_origin() {
        let pts = lattice_points_in_ball(3, 1.0, 100).unwrap();
        assert_eq!(pts, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn center_count_at_256() {
        // |l|^2 <= 5 in Z^3: 1 + 6 + 12 + 8 + 6 + 24
        let oracle = brute_force_centers(3, 256f64.powf(0.15));
        assert_eq!(oracle.len(), 57);
        let p = params(0.15, 256.0);
        let centers = freq_centers(&p).unwrap();
        assert_eq!(centers, oracle);
        let s = p.freq_spacing();
        for l in &centers {
            let norm = (int_norm_sq(l) as f64).sqrt() * s;
            assert!(norm < p.r);
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for &radius in &[1.0, 1.5, 2.0, 2.297, 3.0, 4.2, 6.0] {
            for n in 3..=4 {
                assert_eq!(
                    lattice_points_in_ball(n, radius, usize::MAX).unwrap(),
                    brute_force_centers(n, radius),
                    "n={n} radius={radius}"
                );
            }
        }
    }

    #[test]
    fn center_cap_is_a_resource_error() {
        let mut p = params(0.15, 256.0);
        p.center_cap = 10;
        match freq_centers(&p) {
            Err(LabError::Resource { cap, .. }) => assert_eq!(cap, 10),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn count_scales_like_r_to_n_sigma() {
        let rs = [256.0f64, 1024.0, 4096.0];
        let mut logs = Vec::new();
        for &r in &rs {
            let p = params(0.15, r);
            let count = freq_centers(&p).unwrap().len() as f64;
            let volume = 4.0 / 3.0 * std::f64::consts::PI * p.r_pow_sigma().powi(3);
            assert!(count > 0.5 * volume && count < 2.5 * volume, "R={r}");
            logs.push((r.ln(), count.ln()));
        }
        // least-squares slope of log count against log R
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope / 0.45 - 1.0).abs() < 0.15, "slope={slope}");
    }

    #[test]
    fn time_lattice_at_256() {
        let p = params(0.15, 256.0);
        assert_relative_eq!(p.time_extent(), 48.502930128332729, epsilon = 1e-12);
        let times = time_lattice(&p).unwrap();
        assert_eq!(times.len(), 48);
        let h = 256f64.powf(-0.7);
        for (k, t) in times.iter().enumerate() {
            assert_eq!(*t, h * (k + 1) as f64);
            assert!(*t > 0.0 && *t < 1.0);
        }
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn time_indices_below_extent() {
        assert_eq!(integers_below(1.0f64), 0);
        assert_eq!(integers_below(0.3f64), 0);
        assert_eq!(integers_below(2.0f64), 1);
        assert_eq!(integers_below(48.5f64), 48);
        // R^{1-2 sigma} = 1.5^{0.7} < 2 so only k = 1 survives
        let p = params(0.15, 1.5);
        assert_eq!(time_lattice(&p).unwrap().len(), 1);
    }

    #[test]
    fn rejects_small_dimension_and_bad_sigma() {
        assert!(ExperimentParams::<f64>::new(2, 0.1, 100.0).is_err());
        assert!(ExperimentParams::<f64>::new(3, 0.2, 100.0).is_err());
        assert!(ExperimentParams::<f64>::new(3, 0.0, 100.0).is_err());
        assert!(ExperimentParams::<f64>::new(3, 0.1, 1.0).is_err());
        let mut p = params(0.15, 256.0);
        p.rho = 0.02;
        assert!(p.validate().is_err());
        p.allow_wide_tolerance = true;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn json_keys_are_exact() {
        let text = r#"{"n":3,"sigma":0.15,"R":256.0,"rho":0.01,"eps":0.01,
            "s_exponent":0.0,"quad_order":2,"seed":7,"sample_count":100}"#;
        let p = ExperimentParams::<f64>::from_json(text).unwrap();
        assert_eq!(p.seed, 7);
        assert_eq!(p.r, 256.0);
        let extra = text.replace("\"seed\":7", "\"seed\":7,\"bogus\":1");
        assert!(ExperimentParams::<f64>::from_json(&extra).is_err());
        let missing = text.replace(",\"seed\":7", "");
        assert!(ExperimentParams::<f64>::from_json(&missing).is_err());
        let back = ExperimentParams::<f64>::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn torus_distance_basics() {
        let a = TorusPoint::new(&[0.9, 0.0, 0.0]);
        let b = TorusPoint::new(&[0.1, 0.0, 0.0]);
        assert_relative_eq!(torus_distance(&a, &b), 0.2, epsilon = 1e-15);
        assert_eq!(torus_distance(&a, &a), 0.0);
        let c = TorusPoint::new(&[2.25, -0.5, 7.0]);
        assert_eq!(c.coords(), &[0.25, 0.5, 0.0]);
    }

    #[test]
    fn sampler_points_are_lattice_points() {
        let p = params(0.15, 256.0);
        let s = space_lattice_sampler(&p, 500, 11).unwrap();
        assert_eq!(s, space_lattice_sampler(&p, 500, 11).unwrap());
        let bound = 2.0 * 256f64.powf(0.85);
        for pt in &s {
            let m_norm = (int_norm_sq(&pt.m) as f64).sqrt();
            assert!(m_norm < bound);
            let x_norm = pt.x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(x_norm < 2.0);
            for (xi, mi) in pt.x.iter().zip(&pt.m) {
                assert_eq!(*xi, p.space_spacing() * *mi as f64);
            }
        }
        let one = space_lattice_sampler(&p, 1, 3).unwrap();
        assert_eq!(one.len(), 1);
    }
}
