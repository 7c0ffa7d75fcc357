//! Adiabatic elimination of decaying excited states in open quantum systems.
//!
//! A weakly driven system whose excited states decay quickly is reduced to an
//! effective master equation on its ground states:
//!
//! ```text
//! d rho / dt = -i [H_eff, rho] + sum_k L_eff^k rho L_eff^k^dag - 1/2 {L_eff^k^dag L_eff^k, rho}
//! ```
//!
//! Build a [`SystemSpec`], split it with [`partition`], derive effective
//! operators with one of the `effective_operators_*` functions, and check the
//! reduction against the full dynamics with [`dynamics::integrate`] and
//! [`dynamics::compare`].
//!
//! ```
//! use adiabatic_elim::{effective_operators_basic, effective_rate, partition, scenarios};
//!
//! let spec = scenarios::two_level(0.1, 1.0, 0.2)?;
//! let model = effective_operators_basic(&partition(&spec)?, &spec.jumps)?;
//! let rate = effective_rate(&model, "gamma", 0, 0)?;
//! assert!((rate - 0.2 * 0.01 / (4.0 + 0.04)).abs() < 1e-15);
//! # Ok::<(), adiabatic_elim::Error>(())
//! ```

pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod linalg;
pub mod scenarios;
pub mod system;

pub use dynamics::{compare, integrate, DensityMatrix, Metrics, Trajectory};
pub use effective::{
    effective_operators_basic, effective_operators_dressed, effective_operators_fields, effective_operators_general,
    effective_rate, EffectiveModel, TimeDependentModel, Variant,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use system::{partition, validate, FieldDrive, Jump, Partition, SystemSpec};
