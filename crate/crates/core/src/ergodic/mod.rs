//! Density of `[t theta]` on the torus: mollifiers, the time measure, the
//! Fourier certificate, Dirichlet and sphere-average numerics, and the
//! empirical scan with direction search.

pub mod certificate;
pub mod density;
pub mod kernel;
pub mod mollifier;

pub use certificate::{certificate, default_truncation, CertificateReport};
pub use density::{
    candidate_directions, density_deficiency, density_deficiency_at, search_theta, search_theta_among,
    DensityWitness, TorusOrbit,
};
pub use kernel::{dirichlet_l1, dirichlet_sweep, eta_hat, eta_mass, sphere_average_eta, DirichletRow};
pub use mollifier::{phi_decay_constant, phi_hat, MollifierSpec, PhiDecay};

use crate::scalar::Real;

/// Ordinary least-squares slope of `y` against `x`.
pub fn ols_slope<T: Real>(pts: &[(T, T)]) -> T {
    let n = T::from_usize(pts.len()).unwrap();
    let mx = pts.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / n;
    let my = pts.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / n;
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    sxy / sxx
}
