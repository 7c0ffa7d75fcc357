use thiserror::Error;

use crate::system::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("expected {expected} entries for a square matrix, found {found}")]
    NotSquare { expected: usize, found: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular (smallest pivot {min_pivot:e}, largest pivot {max_pivot:e})")]
    Singular { min_pivot: f64, max_pivot: f64 },

    #[error("matrix has entries of magnitude {residual:e} outside the requested block")]
    NotBlockSupported { residual: f64 },

    #[error("matrix is not Hermitian (max |H - H^dag| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("invalid system specification:\n{0}")]
    InvalidSpec(ValidationReport),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    SingularPropagator(SingularChannel),

    #[error("effective Hamiltonian is not Hermitian (relative residual {residual:e})")]
    NonHermitianResult { residual: f64 },

    #[error("no jump operator labelled `{0}`")]
    UnknownLabel(String),

    #[error("index {0} is not a ground-state index")]
    NotGroundIndex(usize),

    #[error("variant precondition failed: {0}")]
    VariantPreconditionFailed(String),

    #[error("step too large: trace drift or negative population of {drift:e} (limit {limit:e}); retry with dt <= {suggested_dt:e}")]
    StepTooLarge {
        drift: f64,
        limit: f64,
        suggested_dt: f64,
    },

    #[error("trajectories are sampled on different time grids ({0})")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The resonance that made a propagator `(H_NH - E_l - omega_f)^-1` singular.
///
/// A singular propagator means some excited-state channel does not decay and
/// sits exactly on resonance with the drive, so adiabatic elimination breaks
/// down for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularChannel {
    /// Dressed ground-state energy `E_l` subtracted from `H_NH`, if any.
    pub ground_energy: Option<f64>,
    /// Drive label and frequency `omega_f` subtracted from `H_NH`, if any.
    pub field: Option<(String, f64)>,
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl std::fmt::Display for SingularChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "non-Hermitian propagator is singular")?;
        match (&self.ground_energy, &self.field) {
            (None, None) => write!(f, " (H_NH itself)")?,
            (Some(e), None) => write!(f, " at dressed ground energy E_l = {e}")?,
            (None, Some((label, w))) => write!(f, " for field `{label}` at omega = {w}")?,
            (Some(e), Some((label, w))) => {
                write!(f, " at E_l = {e} with field `{label}` at omega = {w}")?
            }
        }
        write!(
            f,
            ": an excited channel is resonant and non-decaying (pivot ratio {:e})",
            if self.max_pivot > 0.0 {
                self.min_pivot / self.max_pivot
            } else {
                0.0
            }
        )
    }
}
