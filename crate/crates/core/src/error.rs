use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Variants map onto stable machine-readable codes through [`Error::code`],
/// which the command-line front end emits verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate means: targets share the same mean ({0})")]
    DegenerateMean(String),

    #[error("degenerate sigmas: primary branch needs distinct standard deviations ({0})")]
    DegenerateSigma(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ordering error: {0}")]
    Ordering(String),

    #[error("risk aversion is singular at x = {0} (zero marginal utility)")]
    Singularity(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("finite-difference step h = {h} must satisfy 0 < h < sigma = {sigma}")]
    Step { h: f64, sigma: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    #[error("no tangency portfolio: risk-free rate {r_rf} is not below the minimum-variance mean {bound}")]
    NoTangency { r_rf: f64, bound: f64 },

    #[error("degenerate market: {0}")]
    DegenerateMarket(String),

    #[error("nonpositive price for asset {index}: {price}")]
    NonpositivePrice { index: usize, price: f64 },

    #[error("substitution rate undefined: {0}")]
    UndefinedRate(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    /// Stable snake_case identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDistribution(_) => "invalid_distribution",
            Error::Domain(_) => "domain",
            Error::DegenerateMean(_) => "degenerate_mean",
            Error::DegenerateSigma(_) => "degenerate_sigma",
            Error::Degenerate(_) => "degenerate",
            Error::Ordering(_) => "ordering",
            Error::Singularity(_) => "singularity",
            Error::Unsupported(_) => "unsupported",
            Error::Infeasible(_) => "infeasible",
            Error::Step { .. } => "step",
            Error::Precondition(_) => "precondition",
            Error::Factorization(_) => "factorization",
            Error::NoTangency { .. } => "no_tangency",
            Error::DegenerateMarket(_) => "degenerate_market",
            Error::NonpositivePrice { .. } => "nonpositive_price",
            Error::UndefinedRate(_) => "undefined_rate",
            Error::Verification(_) => "verification",
        }
    }
}
