//! Numerical laboratory for the stability of the Sobolev inequality on radial
//! profiles: bubbles, norms, weak norms, rearrangement, projection onto the
//! manifold of extremals, deficit remainders and pointwise vector inequalities.

pub mod bubble;
pub mod deficit;
pub mod error;
pub mod experiments;
pub mod lab;
pub mod norms;
pub mod optimize;
pub mod params;
pub mod pointwise;
pub mod profile;
pub mod projection;
pub mod quadrature;
pub mod rearrange;
pub mod report;
pub mod scalar;
pub mod weak;

pub use error::{LabError, Result};
pub use scalar::Real;

/// Double-precision aliases.
pub type Params64 = params::Params<f64>;
pub type Bubble64 = bubble::Bubble<f64>;
pub type BubbleConstants64 = bubble::BubbleConstants<f64>;
pub type Profile64 = profile::RadialProfile<f64>;
pub type Domain64 = profile::DomainBall<f64>;
pub type QuadConfig64 = quadrature::QuadConfig<f64>;
pub type Lab64 = lab::Lab<f64>;
