//! Coherent information of the additive classical-noise bosonic channel.
//!
//! Closed forms for Gaussian inputs live in [`gaussian`], a truncated
//! Fock-space oracle in [`fock`], and non-Gaussian perturbation theory around
//! thermal inputs in [`perturbation`]. The closed-form layers are generic over
//! [`Real`]; the oracle works in `f64`.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod math;
pub mod perturbation;
pub mod scalar;

pub use error::{Error, Result};
pub use math::{bosonic_entropy, conjectured_capacity, ChannelParams};
pub use scalar::Real;

pub type Channel = ChannelParams<f64>;
pub type Channel32 = ChannelParams<f32>;
pub type Covariance = gaussian::SingleModeCovariance<f64>;
pub type Covariance32 = gaussian::SingleModeCovariance<f32>;
pub type Decomposition = gaussian::ThermalDecomposition<f64>;
pub type TwoModeSqueezedInput = gaussian::TwoModeSqueezedThermalInput<f64>;
