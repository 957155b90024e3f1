use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("mode index {index} out of range for a layout with {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("operator does not leave the charge sectors invariant (leak {leak:.3e})")]
    SectorNotInvariant { leak: f64 },
    #[error("grouping infeasible: {0}")]
    GroupingInfeasible(String),
    #[error("transition frequency {frequency} is not covered by the grouping")]
    UncoveredFrequency { frequency: f64 },
    #[error("inconsistent rescaling: cycle constraint violated by {residual:.3e}")]
    InconsistentRescaling { residual: f64 },
    #[error("coupling violates the charge relation [S, N] = nS (residual {residual:.3e})")]
    ChargeMismatch { residual: f64 },
    #[error("negative-frequency components are not the adjoint of the positive ones (residual {residual:.3e})")]
    MirrorMismatch { residual: f64 },
    #[error("unknown bath `{0}`")]
    UnknownBath(String),
    #[error("steady state is not unique (singular bordered system)")]
    SingularSystem,
    #[error("steady-state residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("model is not quadratic: {0}")]
    NonQuadratic(String),
    #[error("Fock cutoff did not converge up to {max_cutoff} (last relative change {change:.3e})")]
    CutoffNotConverged { max_cutoff: usize, change: f64 },
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:.3e})")]
    QuadratureNotConverged { a: f64, b: f64, estimate: f64 },
    #[error("no closed form: {0}")]
    NoClosedForm(String),
    #[error("model has no local structure: {0}")]
    NoLocalStructure(String),
    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
