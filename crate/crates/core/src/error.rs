use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("{quantity} = {value:e} is out of range: {requirement}")]
    Domain {
        quantity: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The inputs are legal but the model does not describe this regime.
    #[error("outside model validity: {0}")]
    Validity(String),

    /// Adaptive quadrature exhausted its refinement budget.
    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e} after {panels} panels")]
    NonConvergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("time step {step:e} s is too coarse for this kernel; use at most {suggested:e} s")]
    StepTooCoarse { step: f64, suggested: f64 },

    #[error("spectral table: {0}")]
    Table(String),

    #[error("unknown preset `{0}` (expected fig3, fig4 or antizeno)")]
    UnknownPreset(String),
}

pub(crate) fn require_positive(quantity: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            quantity,
            value,
            requirement: "must be positive and finite",
        })
    }
}

pub(crate) fn require_non_negative(quantity: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            quantity,
            value,
            requirement: "must be non-negative and finite",
        })
    }
}
