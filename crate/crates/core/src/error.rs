use thiserror::Error;

/// Errors raised by the geometry, state and metrology routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius {r} m is not in the exterior region (r_s = {r_s} m)")]
    NotExterior { r: f64, r_s: f64 },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symplectic (max |S Ω Sᵀ - Ω| = {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("not a bona fide Gaussian state: {0}")]
    NotBonaFide(String),

    #[error("mode {index} does not exist in a {n_modes}-mode state")]
    InvalidMode { index: usize, n_modes: usize },

    #[error(
        "two-mode fidelity needs vanishing first moments (max |<X>| = {max_moment:e}); \
         use the single-mode formula for displaced states"
    )]
    NonZeroFirstMoments { max_moment: f64 },

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("formula is singular here: {0}")]
    SingularFormula(String),

    #[error("Richardson extrapolation did not converge: value {value:e}, relative error {relative_error:e}")]
    NonConvergent { value: f64, relative_error: f64 },

    #[error("probe carries no resources ({0}); the bound is infinite")]
    NoResources(&'static str),

    #[error("likelihood is flat in theta; configuration is not identifiable")]
    NotIdentifiable,

    #[error("likelihood has {peaks} local maxima on the pre-scan grid (near theta = {locations:?})")]
    Multimodal { peaks: usize, locations: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
