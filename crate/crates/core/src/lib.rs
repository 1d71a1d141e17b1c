//! Great-circle flows on the round 3-sphere, built from graph maps between
//! the two factors of the Grassmannian of oriented 2-planes in ℝ⁴.

pub mod error;
pub mod fibration;
pub mod fixtures;
pub mod flowlab;
pub mod geometry;
pub mod grassmann;
pub mod linalg;
pub mod quat;
pub mod report;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Quat = quat::Quaternion<f64>;
pub type SpherePoint3 = quat::UnitQuaternion<f64>;
pub type SpherePoint2 = quat::ImagUnitQuaternion<f64>;
pub type Tangent = quat::TangentVector<f64>;
pub type Bivector = quat::Bivector<f64>;
pub type OrientedPlane = grassmann::OrientedPlane<f64>;
pub type GrassPoint = grassmann::GrassPoint<f64>;
