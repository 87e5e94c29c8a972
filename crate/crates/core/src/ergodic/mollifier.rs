//! Compactly supported mollifiers built from centred cardinal B-splines.
//!
//! A B-spline of even order `m` with knot spacing `h` is supported on
//! `(-m h / 2, m h / 2)`, has unit mass, is `C^{m-2}`, and its Fourier
//! transform is `sinc(pi h xi)^m >= 0`.

use crate::error::{LabError, Result};
use crate::params::ExperimentParams;
use crate::quadrature::{gauss_legendre, integrate_panel};
use crate::scalar::Real;

/// `sin(x) / x` with the removable point filled in.
#[inline]
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}

/// Centred cardinal B-spline scaled to unit mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spline1d<T> {
    pub order: usize,
    pub knot: T,
}

impl<T: Real> Spline1d<T> {
    /// Spline of the given order whose support has total width `width`.
    pub fn with_width(order: usize, width: T) -> Self {
        Spline1d {
            order,
            knot: width / T::from_usize(order).unwrap(),
        }
    }

    pub fn half_width(&self) -> T {
        self.knot * T::from_usize(self.order).unwrap() / T::lit(2.0)
    }

    pub fn eval(&self, x: T) -> T {
        let m = self.order;
        let y = x / self.knot + T::from_usize(m).unwrap() / T::lit(2.0);
        if !(y > T::zero() && y < T::from_usize(m).unwrap()) {
            return T::zero();
        }
        // Cox-de Boor on integer knots: v[j] = M_k(y - j)
        let mut v: Vec<T> = (0..m)
            .map(|j| {
                let j = T::from_usize(j).unwrap();
                if y >= j && y < j + T::one() {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        for k in 2..=m {
            let kk = T::from_usize(k).unwrap();
            for j in 0..=(m - k) {
                let jj = T::from_usize(j).unwrap();
                v[j] = ((y - jj) * v[j] + (kk - y + jj) * v[j + 1]) / (kk - T::one());
            }
        }
        v[0] / self.knot
    }

    /// Fourier transform `int g(x) e^{-2 pi i x xi} dx`, real since `g` is even.
    pub fn fourier(&self, xi: T) -> T {
        sinc(T::PI() * self.knot * xi).powi(self.order as i32)
    }

    /// Value at the centre, the maximum of the spline.
    pub fn peak(&self) -> T {
        self.eval(T::zero())
    }

    /// Mass by Gauss-Legendre on each knot interval (exact up to rounding).
    pub fn mass(&self) -> T {
        let rule = gauss_legendre(self.order.max(2));
        let lo = -self.half_width();
        (0..self.order)
            .map(|j| {
                let a = lo + self.knot * T::from_usize(j).unwrap();
                integrate_panel(&rule, a, a + self.knot, |x| self.eval(x))
            })
            .fold(T::zero(), |acc, v| acc + v)
    }
}

/// The two mollifiers of the density certificate.
///
/// `phi` is a tensor product of splines of width `eps / sqrt(n)` per axis, so
/// it lives in the cube of half side `eps / (2 sqrt n)` inside `B(0, eps/2)`.
/// `psi` is one spline of width `eps` on `(-eps/2, eps/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierSpec<T> {
    pub n: usize,
    pub order: usize,
    pub phi_axis: Spline1d<T>,
    pub psi: Spline1d<T>,
}

/// Smallest even order `>= n + 1`.
pub fn default_order(n: usize) -> usize {
    let m = n + 1;
    m + m % 2
}

impl<T: Real> MollifierSpec<T> {
    pub fn new(params: &ExperimentParams<T>, order: Option<usize>) -> Result<Self> {
        let n = params.n;
        let order = order.unwrap_or_else(|| default_order(n));
        if order < 2 || order % 2 != 0 {
            return Err(LabError::contract(format!(
                "mollifier order must be even and >= 2, got {order}"
            )));
        }
        let axis_width = params.eps / T::from_usize(n).unwrap().sqrt();
        Ok(MollifierSpec {
            n,
            order,
            phi_axis: Spline1d::with_width(order, axis_width),
            psi: Spline1d::with_width(order, params.eps),
        })
    }

    pub fn phi(&self, x: &[T]) -> T {
        x.iter().fold(T::one(), |acc, &c| acc * self.phi_axis.eval(c))
    }

    pub fn phi_hat(&self, xi: &[T]) -> T {
        xi.iter().fold(T::one(), |acc, &c| acc * self.phi_axis.fourier(c))
    }

    pub fn psi(&self, t: T) -> T {
        self.psi.eval(t)
    }

    pub fn psi_hat(&self, tau: T) -> T {
        self.psi.fourier(tau)
    }

    /// `int phi`, from the per-axis quadrature.
    pub fn phi_mass(&self) -> T {
        self.phi_axis.mass().powi(self.n as i32)
    }

    pub fn psi_mass(&self) -> T {
        self.psi.mass()
    }

    /// Radius of the smallest ball holding the support of `phi`.
    pub fn phi_support_radius(&self) -> T {
        self.phi_axis.half_width() * T::from_usize(self.n).unwrap().sqrt()
    }
}

/// Fourier coefficient of `phi_R(x) = phi(R^sigma x)` on the torus at `k`:
/// `R^{-n sigma} phi^(R^{-sigma} k)`.
pub fn phi_hat<T: Real>(k: &[i64], params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> T {
    let inv = T::one() / params.r_pow_sigma();
    let mut acc = inv.powi(params.n as i32);
    for &c in k {
        acc = acc * spec.phi_axis.fourier(T::from_int(c) * inv);
    }
    acc
}

/// Measured and analytic constants in
/// `|phi_R^(k)| <= C R^{-n sigma} (1 + R^{-sigma} |k|)^{-(n+1)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiDecay<T> {
    pub measured: T,
    pub analytic: T,
    pub argmax: Vec<i64>,
}

/// Scans rays through the axes, face and body diagonals out to where the
/// sinc envelope has decayed, and reports the largest normalised coefficient.
pub fn phi_decay_constant<T: Real>(params: &ExperimentParams<T>, spec: &MollifierSpec<T>) -> PhiDecay<T> {
    let n = params.n;
    let rs = params.r_pow_sigma();
    let h = spec.phi_axis.knot;
    let nn = T::from_usize(n).unwrap();
    let analytic = (T::one() + nn.sqrt() / (T::PI() * h)).powi(n as i32 + 1);
    let reach = (T::lit(64.0) * nn.sqrt() * rs / (T::PI() * h)).ceil().to_i64().unwrap_or(i64::MAX).min(1 << 24);
    let mut best = T::zero();
    let mut argmax = vec![0; n];
    for ones in 1..=n {
        let mut s: i64 = 0;
        while s <= reach {
            let k: Vec<i64> = (0..n).map(|i| if i < ones { s } else { 0 }).collect();
            let norm = T::from_int(s) * T::from_usize(ones).unwrap().sqrt();
            let v = phi_hat(&k, params, spec)
                * (T::one() + norm / rs).powi(n as i32 + 1)
                * rs.powi(n as i32);
            if v > best {
                best = v;
                argmax = k;
            }
            s += 1 + s / 64;
        }
    }
    PhiDecay {
        measured: best,
        analytic,
        argmax,
    }
}
