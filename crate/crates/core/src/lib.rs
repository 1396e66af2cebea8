//! Fractional oscillator processes: covariance and structure function,
//! asymptotics, mean-square displacement, path synthesis and the
//! zeta-regularized free energy of the associated thermal field.

pub mod asymptotics;
pub mod casimir;
pub mod covariance;
pub mod dynamics;
pub mod error;
pub mod quad;
pub mod real;
pub mod simulate;
pub mod specfun;

pub use covariance::{ProcessParams, QuadratureSpec, RegularityClass};
pub use error::{Error, Result};
pub use real::Real;

pub type SamplePath64 = simulate::SamplePath<f64>;
pub type SamplePath32 = simulate::SamplePath<f32>;
pub type Variogram64 = simulate::Variogram<f64>;
pub type Variogram32 = simulate::Variogram<f32>;
