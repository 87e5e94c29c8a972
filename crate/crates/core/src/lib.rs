//! Numerical laboratory for constructive-interference counterexamples to the
//! Schrödinger maximal estimate in dimension `n >= 3`.
//!
//! The crate builds the frequency-side initial data, evaluates the rescaled
//! free evolution, checks the phase windows and the interference floor,
//! searches and certifies directions whose orbit is dense on the torus, and
//! fits the growth exponent of the maximal function across frequency scales.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the scalar for the common case.

pub mod datum;
pub mod ergodic;
pub mod error;
pub mod experiment;
pub mod params;
pub mod propagator;
pub mod quadrature;
pub mod sampling;
pub mod scalar;

pub use error::{LabError, Result};

pub type Params = params::ExperimentParams<f64>;
pub type ParamsF32 = params::ExperimentParams<f32>;
pub type DatumF64 = datum::Datum<f64>;
pub type DatumF32 = datum::Datum<f32>;
pub type Mollifiers = ergodic::MollifierSpec<f64>;
pub type Certificate = ergodic::CertificateReport<f64>;
pub type Witness = ergodic::DensityWitness<f64>;
pub type Scaling = experiment::ScalingReport<f64>;
