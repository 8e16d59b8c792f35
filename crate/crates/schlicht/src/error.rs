//! Error type shared by all modules of the crate.

use std::fmt;

use num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the numerical layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A continuation path comes too close to one of the omitted values.
    PathHitsBranchPoint { waypoint: Complex64 },
    /// The two square-root candidates at a waypoint are not decisively
    /// separated; the continuation step is too large.
    AmbiguousContinuation { waypoint: Complex64 },
    /// The branch value vanishes, so the derivative quotient is singular.
    DerivativeSingular,
    /// Evaluation requested outside the open unit disk.
    OutsideDomain { z: Complex64 },
    /// Minimum of |f'| on the boundary grid is below tolerance.
    DerivativeVanishesOnBoundary { min_abs: f64 },
    /// An intermediate recursion value landed on a branch point.
    BranchPointCollision { value: Complex64 },
    /// Requested tree depth exceeds the configured cap.
    CapExceeded { n: u32, cap: u32 },
    /// Sampling found the base map attaining one of the omitted values.
    NotOmitted { z: Complex64, value: Complex64 },
    /// A leaf derivative failed to be a positive real, which signals a
    /// branch-tracking failure.
    NonPositiveCoefficient { index: usize, value: Complex64 },
    /// The omitted pair is too close to the degenerate configuration where
    /// coefficients collapse to zero.
    DegeneratePair,
    /// The fixed-point formula has a pole: 2w = alpha + beta.
    PoleAtMidpoint,
    /// The chain trajectory approached the driving singularity 1 - kf = 0.
    SingularityApproach { s: f64 },
    /// Requested evolution time exceeds the configured horizon.
    HorizonExceeded { t: f64, horizon: f64 },
    /// Both roots of the chain-inversion quadratic sit on the unit circle.
    RootSelectionAmbiguous,
    /// The estimated quadrature tail exceeds the requested tolerance.
    TailBoundLoose { estimate: f64, requested: f64 },
    /// The adaptive integrator exceeded its step budget.
    StepLimitExceeded { t: f64 },
    /// Two consecutive boundary samples coincide.
    DegenerateCurve { index: usize },
    /// A boundary sample sits on a zero of the derivative, so the winding
    /// count cannot be trusted.
    InconclusiveOnBoundary { angle: f64 },
    /// The functional does not vary over the candidate family.
    ConstantFunctional,
    /// No multi-start point passed certification.
    NoFeasibleStart,
    /// Simplicity check requested at an angle that is not a derivative zero.
    NotAZero { angle: f64, derivative_abs: f64 },
    /// Malformed textual input (complex literal, functional spec, config).
    Parse(String),
    /// A precondition on operation inputs was violated.
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PathHitsBranchPoint { waypoint } => {
                write!(f, "continuation path passes through a branch point near {waypoint}")
            }
            Error::AmbiguousContinuation { waypoint } => {
                write!(f, "square-root continuation ambiguous at {waypoint}; step too large")
            }
            Error::DerivativeSingular => write!(f, "branch value is zero; derivative singular"),
            Error::OutsideDomain { z } => write!(f, "point {z} lies outside the open unit disk"),
            Error::DerivativeVanishesOnBoundary { min_abs } => {
                write!(f, "|f'| dips to {min_abs:.3e} on the boundary grid")
            }
            Error::BranchPointCollision { value } => {
                write!(f, "recursion value {value} collides with a branch point")
            }
            Error::CapExceeded { n, cap } => write!(f, "depth {n} exceeds cap {cap}"),
            Error::NotOmitted { z, value } => {
                write!(f, "base map attains an omitted value: f({z}) = {value}")
            }
            Error::NonPositiveCoefficient { index, value } => {
                write!(f, "leaf {index} derivative {value} is not a positive real")
            }
            Error::DegeneratePair => {
                write!(f, "omitted pair is degenerate; coefficients would vanish")
            }
            Error::PoleAtMidpoint => write!(f, "fixed point has a pole: 2w = alpha + beta"),
            Error::SingularityApproach { s } => {
                write!(f, "trajectory approached 1 - kf = 0 at time {s:.6}")
            }
            Error::HorizonExceeded { t, horizon } => {
                write!(f, "time {t} exceeds integration horizon {horizon}")
            }
            Error::RootSelectionAmbiguous => {
                write!(f, "both chain-inversion roots lie on the unit circle")
            }
            Error::TailBoundLoose { estimate, requested } => {
                write!(f, "tail estimate {estimate:.3e} exceeds requested {requested:.3e}")
            }
            Error::StepLimitExceeded { t } => {
                write!(f, "integrator step budget exhausted at time {t:.6}")
            }
            Error::DegenerateCurve { index } => {
                write!(f, "boundary samples {index} and {} coincide", index + 1)
            }
            Error::InconclusiveOnBoundary { angle } => {
                write!(f, "derivative too small at boundary angle {angle:.6}; winding inconclusive")
            }
            Error::ConstantFunctional => write!(f, "functional is constant on the family"),
            Error::NoFeasibleStart => write!(f, "no start point passed certification"),
            Error::NotAZero { angle, derivative_abs } => {
                write!(f, "|p'| = {derivative_abs:.3e} at angle {angle:.6} is not a zero")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
