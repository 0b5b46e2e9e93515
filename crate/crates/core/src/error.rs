use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("step size underflow at x = {x} (solution is near-singular)")]
    StepUnderflow { x: f64 },

    #[error("state left the finite range at x = {x}")]
    NonFinite { x: f64 },

    #[error("integration exceeded {steps} steps")]
    MaxStepsExceeded { steps: usize },

    #[error("extrapolated limit diverges (samples grow without bound)")]
    Divergent,

    #[error("z = {z} lies on the spectrum [0, +inf)")]
    OnSpectrum { z: Complex64 },

    #[error("Riccati integration blew up at z = {z}: {reason}")]
    RiccatiBlowup { z: Complex64, reason: String },

    #[error("pole hit: denominator {denominator:e} below tolerance")]
    PoleHit { denominator: f64 },

    #[error("potential table is empty")]
    EmptyTable,

    #[error("potential table is not strictly increasing at row {row}")]
    UnsortedTable { row: usize },

    #[error("main operator T_h is not accretive; (*)-extension classes are undefined")]
    InvalidBase,

    #[error("tan(alpha) = {tan_alpha} is outside the accumulative sectorial range [{lower}, 0]")]
    OutOfRange { tan_alpha: f64, lower: f64 },

    #[error("kernel points {first} and {second} coincide")]
    DegeneratePoints { first: usize, second: usize },

    #[error("function failed the inverse Stieltjes test (min value {min_value:e})")]
    NotInverseStieltjes { min_value: f64 },

    #[error("no closed-form m-function attached to potential '{label}'")]
    NoClosedForm { label: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by evaluating outside the domain of a function
    /// (spectrum, poles, blow-ups), as opposed to malformed input.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::OnSpectrum { .. }
                | Error::RiccatiBlowup { .. }
                | Error::PoleHit { .. }
                | Error::Divergent
                | Error::InvalidBase
                | Error::OutOfRange { .. }
                | Error::NotInverseStieltjes { .. }
                | Error::StepUnderflow { .. }
                | Error::NonFinite { .. }
                | Error::MaxStepsExceeded { .. }
        )
    }
}
