//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong in the laboratory.
///
/// Variants map one-to-one to the failure modes of the individual
/// operations; the CLI maps them onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("massless energy projector is singular at p = 0")]
    ZeroMomentumMassless,
    #[error("four-vector is not timelike (k·k = {0})")]
    NotTimelike(f64),
    #[error("momentum must be nonzero")]
    ZeroMomentum,
    #[error("four-vector is not lightlike (p·p = {0})")]
    NotLightlike(f64),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(num_complex::Complex<f64>),
    #[error("field is in the wrong representation (expected {expected})")]
    WrongRepresentation { expected: &'static str },
    #[error("dilation by {lambda} pushes resolved momenta beyond the Nyquist band")]
    BandExceeded { lambda: f64 },
    #[error("support [{lo}, {hi}] plus margin does not fit in the grid")]
    SupportExceedsGuard { lo: f64, hi: f64 },
    #[error("anti-wraparound guard violated: {0}")]
    GuardViolation(String),
    #[error("total probability {0} does not exceed the edge tolerance")]
    AllMassBelowTolerance(f64),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("construction case does not match parameters: {0}")]
    CaseMismatch(String),
    #[error("seed state has no positive change time (t_ē = {0})")]
    NoLateChangeSeed(f64),
    #[error("closed-form radial evaluation requested at the origin")]
    OriginSingular,
    #[error("state is not of positive energy (residual {0})")]
    NotPositiveEnergy(f64),
    #[error("‖Qφ‖ = {0} is too small for a point-localized sequence")]
    NullDilationLimit(f64),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("state is not in the range of the projector (residual {0})")]
    NotInRange(f64),
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("invariant failure: {0}")]
    InvariantFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
