use alloc::string::String;

/// Errors produced by the solver core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the objective domain at coordinate {coord} (value {value})")]
    OutsideDomain { coord: usize, value: f64 },

    #[error("prefix contract violated: coordinate {coord} is nonzero but only steps up to {step} have arrived")]
    PrefixViolation { step: usize, coord: usize },

    #[error("online discipline violated: requested step {requested} while step {revealed:?} is the latest revealed")]
    OnlineViolation { requested: usize, revealed: Option<usize> },

    #[error("ground set of size {0} exceeds the cap of 20 elements")]
    GroundSetTooLarge(usize),

    #[error("objective is identically zero on the feasible region")]
    DegenerateObjective,

    #[error("value-to-weight lower bound L = {0} is not positive")]
    NonPositiveLowerBound(f64),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("linear program did not converge within {0} pivots")]
    PivotLimit(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
