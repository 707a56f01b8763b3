//! Numerical core for a pseudoclassical spinning particle carrying non-abelian
//! gauge charge.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`algebra`]: structure constants, representation matrices and their checks,
//! * [`grassmann`]: the finite Grassmann algebra carrying the odd spin variables,
//! * [`fields`]: gauge potentials, field strength, covariant derivative and the
//!   Bianchi residual, evaluated at real or Grassmann-even points,
//! * [`dynamics`]: particle state, equations of motion and conserved quantities,
//! * [`integrate`]: fixed and adaptive RK4 with drift monitoring,
//! * [`quantize`]: matrix-level checks of the quantized theory.
//!
//! File formats, configuration parsing and the command line live in the
//! companion `wongspin` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod grassmann;
pub mod integrate;
pub mod linalg;
pub mod metric;
pub mod quantize;
pub mod scalar;

pub use algebra::{ChargeVector, Representation, StructureConstants};

pub use error::{Error, Result};
pub use fields::{FieldKind, GaugeFieldConfig};
pub use grassmann::GradedNumber;

pub use dynamics::{ConservedSet, Mode, Model, ModelParams, ParticleState, Phase};
pub use integrate::{IntegratorOptions, Method, Trajectory};
pub use scalar::Scalar;
