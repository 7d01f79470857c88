//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical operations.
///
/// Divergence of a membership quadrature is deliberately *not* an error;
/// it is reported through verdict types. The variants here are genuine
/// failures: invalid inputs, overflow, or a certificate that cannot be met.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A weight derivative evaluated to a non-finite value.
    DerivativeOverflow { radius: f64 },
    /// The radial Laplacian of the weight is not positive at `radius`.
    NotRapidlyIncreasing { radius: f64 },
    /// A truncated power series cannot certify its tail at the requested radius.
    SeriesTruncation { radius: f64 },
    /// The kernel series cannot certify its tail at the given `|z * conj(zeta)|`.
    KernelTruncation { product_modulus: f64 },
    /// The monomial moment integral does not converge for this weight.
    MomentDiverges { degree: usize },
    /// Series truncation order is smaller than the equation order.
    TruncationBelowOrder { truncation: usize, order: usize },
    /// A Taylor recurrence coefficient overflowed.
    CoefficientOverflow { index: usize },
    /// A quadrature needed by the operation failed to converge.
    QuadratureDiverged { radius: f64, last_ratio: f64 },
    /// The weight fails the derivative-norm equivalence hypotheses for this exponent.
    InadmissibleWeight { p: f64 },
    /// The weight grows too slowly for the requested functional.
    WeightGrowthTooSlow,
    /// A candidate solution vanishes on the probe set.
    CandidateHasZero { radius: f64, angle: f64 },
    /// Malformed problem data.
    InvalidProblem { reason: String },
    /// Malformed argument.
    InvalidArgument { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DerivativeOverflow { radius } => {
                write!(f, "weight derivative overflow at r = {radius}")
            }
            Error::NotRapidlyIncreasing { radius } => {
                write!(f, "weight not rapidly increasing at r = {radius}")
            }
            Error::SeriesTruncation { radius } => {
                write!(f, "series truncation insufficient at |z| = {radius}")
            }
            Error::KernelTruncation { product_modulus } => {
                write!(f, "kernel truncation insufficient at |z conj(zeta)| = {product_modulus}")
            }
            Error::MomentDiverges { degree } => {
                write!(f, "moment diverges at n = {degree}")
            }
            Error::TruncationBelowOrder { truncation, order } => {
                write!(f, "truncation {truncation} below equation order {order}")
            }
            Error::CoefficientOverflow { index } => {
                write!(f, "series coefficient overflow at index {index}")
            }
            Error::QuadratureDiverged { radius, last_ratio } => {
                write!(f, "divergent integrand: radius {radius}, last ratio {last_ratio}")
            }
            Error::InadmissibleWeight { p } => {
                write!(f, "derivative-norm equivalence hypotheses fail for p = {p}")
            }
            Error::WeightGrowthTooSlow => {
                write!(f, "weight does not dominate the Gaussian term")
            }
            Error::CandidateHasZero { radius, angle } => {
                write!(
                    f,
                    "candidate has zeros on probe set near r = {radius}, theta = {angle}; \
                     choose different rays or annuli"
                )
            }
            Error::InvalidProblem { reason } => write!(f, "invalid problem: {reason}"),
            Error::InvalidArgument { reason } => write!(f, "invalid argument: {reason}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
