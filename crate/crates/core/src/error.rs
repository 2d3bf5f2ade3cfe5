use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported local dimension {0} (expected 3, 5 or 7)")]
    UnsupportedDimension(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A size guard protecting time or memory was exceeded.
    #[error("size guard exceeded: {what} needs {requested}, limit is {limit}")]
    Guard {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A Wigner value came out with a non-negligible imaginary part.
    #[error("expectation value has imaginary part {0:e}; the operator is not Hermitian")]
    NonHermitian(f64),

    #[error("state is not an eigenstate of A_b (residual {residual:e})")]
    NotAnEigenstate { residual: f64 },

    #[error("{count} stabilizing Pauli strings is not a power of {d}")]
    NotPowerOfDim { count: u64, d: u32 },

    #[error("zero-weight start point: W(u0) = {0:e}")]
    ZeroWeightStart(f64),

    #[error("chain stuck: acceptance {acceptance:.4} during burn-in is below {threshold}")]
    StuckChain { acceptance: f64, threshold: f64 },

    #[error("zero denominator at a sampled point")]
    ZeroDenominator,
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }

    /// True for convergence and sampler-diagnostic failures.
    pub fn is_diagnostic(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::StuckChain { .. }
                | Error::ZeroWeightStart(_)
                | Error::ZeroDenominator
                | Error::NonHermitian(_)
        )
    }
}
