use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid precision configuration: {0}")]
    InvalidPrecision(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A series or continued fraction did not reach the requested accuracy.
    #[error("precision exhausted in {what} after {iterations} iterations")]
    PrecisionExhausted { what: &'static str, iterations: usize },

    /// A computed norm h_n was not positive; the oracle needs more bits.
    #[error("positivity breakdown at n = {n} with {bits} bits")]
    PositivityBreakdown { n: usize, bits: u32 },

    /// A divisor in the difference equations fell below the guard.
    #[error("division breakdown at n = {n}: |{quantity}| below guard")]
    DivisionBreakdown { n: usize, quantity: &'static str },

    /// beta_n = (n + r_n)/2 came out non-positive.
    #[error("non-positive off-diagonal coefficient at n = {n}")]
    NonPositiveBeta { n: usize },

    #[error("grid too small: need {needed} points, have {have}")]
    GridTooSmall { needed: usize, have: usize },

    #[error("evaluation point {z} too close to a pole at {pole}")]
    PoleProximity { z: f64, pole: f64 },

    #[error("degenerate phase fit: {0}")]
    DegenerateFit(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// alpha_n / beta < 0, so Psi_n is not real.
    #[error("alpha_n/beta negative at x = {x} (n = {n})")]
    Negativity { x: f64, n: usize },

    #[error("denominator below guard at x = {x}")]
    DenominatorGuard { x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
